"""Neuron DAGs: the immutable `Circuit` and the incremental `CircuitBuilder`."""

import itertools
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import networkx as nx
import numpy as np

from core.abstract import CircuitError
from core.constants import (
    AND_THRESHOLD,
    BIAS_ID,
    EXCITATORY_WEIGHT,
    INHIBITORY_WEIGHT,
    NOT_THRESHOLD,
    OR_THRESHOLD,
    POSSIBLE_RESETS,
)

Signal = str | int
"""A neuron id, a primary input id, or the constants 0 / 1."""


@dataclass(frozen=True)
class NeuronSpec:
    id: str
    threshold: float
    depth: int
    reset: POSSIBLE_RESETS = "soft"


@dataclass(frozen=True)
class Synapse:
    pre: str
    post: str
    weight: float


@dataclass(frozen=True)
class _Level:
    """Neurons sharing one depth, packed for the vectorised simulator"""

    start: int
    stop: int
    pre: np.ndarray  # (n, fan_in) rows of the state matrix
    weight: np.ndarray  # (n, fan_in), 0 on padding
    threshold: np.ndarray  # (n,)


@dataclass(frozen=True)
class _Plan:
    n_rows: int
    input_rows: np.ndarray
    output_rows: np.ndarray
    levels: tuple[_Level, ...]
    neuron_offset: int


@dataclass(frozen=True, eq=False)
class Circuit:
    """Immutable neuron DAG

    Neurons are kept sorted by depth. The state matrix used by the simulator has
    row 0 for the bias source, then one row per primary input, then one row per
    neuron (in the same order as `neurons`).
    """

    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    neurons: tuple[NeuronSpec, ...]
    synapses: tuple[Synapse, ...]
    port_names: tuple[str, ...] = ()
    stages: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.port_names:
            object.__setattr__(self, "port_names", self.outputs)
        if len(self.port_names) != len(self.outputs):
            raise CircuitError(f"{self.name}: one port name per output is required")

    @property
    def depth(self) -> int:
        """Logical depth, the largest neuron depth"""
        return max((n.depth for n in self.neurons), default=0)

    @property
    def bias_sources(self) -> list[tuple[str, float]]:
        """(post, weight) of every bias synapse"""
        return [(s.post, s.weight) for s in self.synapses if s.pre == BIAS_ID]

    @cached_property
    def index(self) -> dict[str, NeuronSpec]:
        return {n.id: n for n in self.neurons}

    def graph(self) -> nx.DiGraph:
        """Directed graph of the circuit (bias, inputs and neurons as nodes)"""
        g = nx.DiGraph(name=self.name)
        g.add_node(BIAS_ID, kind="bias")
        for name in self.inputs:
            g.add_node(name, kind="input")
        for n in self.neurons:
            g.add_node(n.id, kind="neuron", threshold=n.threshold, depth=n.depth)
        for s in self.synapses:
            g.add_edge(s.pre, s.post, weight=s.weight)
        return g

    def validate(self):
        """Check the structural invariants

        Raises:
            CircuitError: Unknown signal, cycle, bad depth, bad threshold or an
                output that no input or bias can reach
        """
        known = {BIAS_ID, *self.inputs, *self.index}
        for s in self.synapses:
            if s.pre not in known or s.post not in self.index:
                raise CircuitError(f"{self.name}: dangling synapse {s.pre} -> {s.post}")

        g = self.graph()
        if not nx.is_directed_acyclic_graph(g):
            cycle = nx.find_cycle(g)
            raise CircuitError(f"{self.name}: cycle detected {cycle}")

        for s in self.synapses:
            if s.pre in self.index and self.index[s.pre].depth >= self.index[s.post].depth:
                raise CircuitError(f"{self.name}: depth of {s.post} is not after {s.pre}")
        for n in self.neurons:
            if n.threshold <= 0:
                raise CircuitError(f"{self.name}: threshold of {n.id} must be positive")

        sources = {BIAS_ID, *self.inputs}
        for out in self.outputs:
            if out not in self.index:
                raise CircuitError(f"{self.name}: output {out} is not a neuron")
            if not sources & nx.ancestors(g, out):
                raise CircuitError(f"{self.name}: output {out} is unreachable")

    @cached_property
    def plan(self) -> _Plan:
        """Packed arrays for `spiking.simulator.evaluate_batch`"""
        rows = {BIAS_ID: 0}
        for i, name in enumerate(self.inputs, 1):
            rows[name] = i
        offset = len(self.inputs) + 1
        for i, n in enumerate(self.neurons):
            rows[n.id] = offset + i

        fan_in: dict[str, list[Synapse]] = {n.id: [] for n in self.neurons}
        for s in self.synapses:
            fan_in[s.post].append(s)

        levels = []
        for depth, group in itertools.groupby(
            enumerate(self.neurons), key=lambda item: item[1].depth
        ):
            group = list(group)
            width = max(1, max(len(fan_in[n.id]) for _, n in group))
            pre = np.zeros((len(group), width), dtype=np.int64)
            weight = np.zeros((len(group), width), dtype=np.float64)
            for r, (_, n) in enumerate(group):
                for c, s in enumerate(fan_in[n.id]):
                    pre[r, c] = rows[s.pre]
                    weight[r, c] = s.weight
            levels.append(
                _Level(
                    start=offset + group[0][0],
                    stop=offset + group[-1][0] + 1,
                    pre=pre,
                    weight=weight,
                    threshold=np.array([n.threshold for _, n in group]),
                )
            )

        return _Plan(
            n_rows=offset + len(self.neurons),
            input_rows=np.arange(1, offset),
            output_rows=np.array([rows[o] for o in self.outputs], dtype=np.int64),
            levels=tuple(levels),
            neuron_offset=offset,
        )

    def to_netlist(self) -> dict:
        """Netlist document: `{neurons, synapses, inputs, outputs}`"""
        return {
            "name": self.name,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "ports": list(self.port_names),
            "neurons": [
                {"id": n.id, "threshold": n.threshold, "depth": n.depth}
                for n in self.neurons
            ],
            "synapses": [
                {"pre": s.pre, "post": s.post, "weight": s.weight}
                for s in self.synapses
            ],
        }

    def to_graphml(self) -> str:
        """GraphML text of the circuit for visualization tools"""
        return "\n".join(nx.generate_graphml(self.graph()))


def circuit_stats(circuit: Circuit, stage_level: int | None = 1) -> dict:
    """Resource figures of a circuit

    Args:
        circuit (Circuit): Circuit
        stage_level (int | None, optional): Number of stage path components used to
            group the per-stage counts. `None` keeps the full paths. Defaults to 1.

    Returns:
        dict: `{neurons, synapses, depth, bias_synapses, stages}`
    """
    stages: dict[str, int] = {}
    for path, ids in circuit.stages.items():
        key = path if stage_level is None else "/".join(path.split("/")[:stage_level])
        stages[key] = stages.get(key, 0) + len(ids)

    return {
        "neurons": len(circuit.neurons),
        "synapses": len(circuit.synapses),
        "depth": circuit.depth,
        "bias_synapses": len(circuit.bias_sources),
        "stages": stages,
    }


class CircuitBuilder:
    """Incremental construction of a `Circuit`

    Every gate call instantiates physical neurons; constant operands are realized
    as "no synapse" (0) or a bias synapse (1) and are never folded away.

    Example:
        >>> b = CircuitBuilder("and")
        >>> x, y = b.input("x"), b.input("y")
        >>> circuit = b.build({"y": b.and_(x, y)})
    """

    def __init__(self, name: str):
        self.name = name
        self.__inputs: list[str] = []
        self.__order: list[str] = []
        self.__thresholds: dict[str, float] = {}
        self.__depths: dict[str, int] = {}
        self.__fan_in: dict[str, dict[str, float]] = {}
        self.__stages: dict[str, list[str]] = {}
        self.__stage_stack: list[str] = []
        self.__counter = itertools.count()

    @property
    def neuron_count(self) -> int:
        return len(self.__order)

    # --- sources -------------------------------------------------------------

    def input(self, name: str) -> str:
        if name in self.__thresholds or name in self.__inputs or name == BIAS_ID:
            raise CircuitError(f"{self.name}: signal {name} already exists")
        self.__inputs.append(name)
        return name

    def inputs(self, prefix: str, width: int) -> list[str]:
        """`width` primary inputs named `{prefix}{i}` (returned in creation order)"""
        return [self.input(f"{prefix}{i}") for i in range(width)]

    def depth_of(self, signal: Signal) -> int:
        if isinstance(signal, str) and signal in self.__depths:
            return self.__depths[signal]
        return 0

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        """Account the neurons created inside the block to the stage `name`"""
        self.__stage_stack.append(name)
        try:
            yield
        finally:
            self.__stage_stack.pop()

    # --- the only primitive --------------------------------------------------

    def neuron(
        self,
        threshold: float,
        synapses: Iterable[tuple[Signal, float]],
        label: str = "n",
    ) -> str:
        """Create one neuron

        Args:
            threshold (float): Firing threshold (> 0)
            synapses (Iterable[tuple[Signal, float]]): (presynaptic signal, weight)
            label (str, optional): Prefix of the generated id. Defaults to "n".

        Raises:
            CircuitError: Unknown signal or invalid constant

        Returns:
            str: Id of the new neuron
        """
        weights: dict[str, float] = {}
        for pre, weight in synapses:
            if isinstance(pre, (bool, int, np.integer)):
                if pre not in (0, 1):
                    raise CircuitError(f"{self.name}: invalid constant {pre!r}")
                if not pre:
                    continue
                pre = BIAS_ID
            elif pre not in self.__thresholds and pre not in self.__inputs:
                raise CircuitError(f"{self.name}: unknown signal {pre}")
            weights[pre] = weights.get(pre, 0.0) + weight

        nid = f"{label}{next(self.__counter)}"
        self.__order.append(nid)
        self.__thresholds[nid] = threshold
        self.__fan_in[nid] = {p: w for p, w in weights.items() if w != 0}
        self.__depths[nid] = 1 + max(
            (self.__depths.get(p, 0) for p in self.__fan_in[nid]), default=0
        )
        self.__stages.setdefault("/".join(self.__stage_stack) or "core", []).append(nid)
        return nid

    # --- cells ----------------------------------------------------------------

    def and_(self, a: Signal, b: Signal) -> str:
        return self.neuron(
            AND_THRESHOLD, [(a, EXCITATORY_WEIGHT), (b, EXCITATORY_WEIGHT)], "and"
        )

    def or_(self, a: Signal, b: Signal) -> str:
        return self.neuron(
            OR_THRESHOLD, [(a, EXCITATORY_WEIGHT), (b, EXCITATORY_WEIGHT)], "or"
        )

    def not_(self, a: Signal) -> str:
        return self.neuron(
            NOT_THRESHOLD, [(1, EXCITATORY_WEIGHT), (a, INHIBITORY_WEIGHT)], "not"
        )

    def xor(self, a: Signal, b: Signal) -> str:
        """AND(OR(a, b), NOT(AND(a, b))), 4 neurons, depth 3"""
        return self.__xor(a, b)[0]

    def __xor(self, a: Signal, b: Signal) -> tuple[str, str]:
        either = self.or_(a, b)
        both = self.and_(a, b)
        return self.and_(either, self.not_(both)), both

    def mux(self, s: Signal, a: Signal, b: Signal) -> str:
        """`a` when `s` fires else `b`: OR(AND(s, a), AND(NOT s, b))"""
        return self.or_(self.and_(s, a), self.and_(self.not_(s), b))

    def half_adder(self, a: Signal, b: Signal) -> tuple[str, str]:
        """(sum, carry); the carry is the AND inside the XOR"""
        return self.__xor(a, b)

    def full_adder(self, a: Signal, b: Signal, c: Signal) -> tuple[str, str]:
        """(sum, carry) from two half adders and an OR"""
        s1, c1 = self.half_adder(a, b)
        s, c2 = self.half_adder(s1, c)
        return s, self.or_(c1, c2)

    def tie(self, value: int) -> str:
        """Constant output cell (a bias-fed neuron that always / never fires)"""
        threshold = OR_THRESHOLD if value else AND_THRESHOLD
        return self.neuron(threshold, [(1, EXCITATORY_WEIGHT)], "tie")

    def buffer(self, a: Signal) -> str:
        return self.neuron(OR_THRESHOLD, [(a, EXCITATORY_WEIGHT)], "buf")

    # --- multi-bit helpers (bit vectors are LSB first) ---------------------------

    def or_reduce(self, bits: Sequence[Signal]) -> Signal:
        """Balanced OR tree (len - 1 neurons)"""
        return self.__reduce(bits, self.or_)

    def and_reduce(self, bits: Sequence[Signal]) -> Signal:
        """Balanced AND tree (len - 1 neurons)"""
        return self.__reduce(bits, self.and_)

    def __reduce(self, bits, cell) -> Signal:
        level = list(bits)
        if not level:
            raise CircuitError(f"{self.name}: reduction over no bits")
        while len(level) > 1:
            paired = [cell(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
            if len(level) % 2:
                paired.append(level[-1])
            level = paired
        return level[0]

    def ripple_add(
        self, a: Sequence[Signal], b: Sequence[Signal], carry_in: Signal | None = None
    ) -> tuple[list[Signal], Signal]:
        """Ripple-carry adder over equal-width operands

        Returns:
            tuple[list[Signal], Signal]: (sum bits, carry out)
        """
        if len(a) != len(b):
            raise CircuitError(f"{self.name}: ripple_add width {len(a)} != {len(b)}")
        out = []
        carry = carry_in
        for x, y in zip(a, b):
            if carry is None:
                s, carry = self.half_adder(x, y)
            else:
                s, carry = self.full_adder(x, y, carry)
            out.append(s)
        return out, carry

    def subtract(
        self, a: Sequence[Signal], b: Sequence[Signal]
    ) -> tuple[list[Signal], Signal]:
        """a - b in two's complement; the carry out fires iff a >= b"""
        return self.ripple_add(a, [self.not_(x) for x in b], carry_in=1)

    def increment(
        self, bits: Sequence[Signal], inc: Signal
    ) -> tuple[list[Signal], Signal]:
        """bits + inc with a half-adder chain"""
        out = []
        carry: Signal = inc
        for x in bits:
            s, carry = self.half_adder(x, carry)
            out.append(s)
        return out, carry

    def mux_bus(
        self, s: Signal, a: Sequence[Signal], b: Sequence[Signal]
    ) -> list[str]:
        """Bit-wise `mux` of two buses"""
        if len(a) != len(b):
            raise CircuitError(f"{self.name}: mux_bus width {len(a)} != {len(b)}")
        return [self.mux(s, x, y) for x, y in zip(a, b)]

    @staticmethod
    def constant(value: int, width: int) -> list[int]:
        """Constant bus (LSB first)"""
        return [(value >> i) & 1 for i in range(width)]

    # --- composition ---------------------------------------------------------

    def instantiate(self, handle, bindings: Mapping[str, Signal]) -> dict[str, str]:
        """Copy a sub-circuit into this builder

        Args:
            handle (spiking.gates.SubcircuitHandle | Circuit): Sub-circuit
            bindings (Mapping[str, Signal]): Input port -> signal of this builder

        Raises:
            CircuitError: Missing or unknown port binding

        Returns:
            dict[str, str]: Output port -> new neuron id
        """
        circuit: Circuit = getattr(handle, "circuit", handle)
        missing = set(circuit.inputs) - set(bindings)
        extra = set(bindings) - set(circuit.inputs)
        if missing or extra:
            raise CircuitError(
                f"{self.name}: binding of {circuit.name} is wrong "
                f"(missing {sorted(missing)}, unknown {sorted(extra)})"
            )

        fan_in: dict[str, list[Synapse]] = {n.id: [] for n in circuit.neurons}
        for s in circuit.synapses:
            fan_in[s.post].append(s)

        mapping: dict[str, Signal] = {BIAS_ID: 1, **bindings}
        for n in circuit.neurons:
            mapping[n.id] = self.neuron(
                n.threshold,
                [(mapping[s.pre], s.weight) for s in fan_in[n.id]],
                n.id.rstrip("0123456789") or "n",
            )
        return {
            port: str(mapping[out])
            for port, out in zip(circuit.port_names, circuit.outputs)
        }

    def build(self, outputs: Mapping[str, Signal] | Sequence[Signal]) -> Circuit:
        """Freeze the builder into a validated `Circuit`

        Outputs that are not neurons (primary inputs or constants) get a buffer
        or tie cell so every output is read at a neuron.

        Args:
            outputs (Mapping[str, Signal] | Sequence[Signal]): Output signals,
                optionally keyed by port name

        Returns:
            Circuit: The circuit
        """
        if isinstance(outputs, Mapping):
            names, signals = list(outputs.keys()), list(outputs.values())
        else:
            signals = list(outputs)
            names = [f"y{i}" for i in range(len(signals))]

        with self.stage("output"):
            out_ids = []
            for signal in signals:
                if isinstance(signal, (bool, int, np.integer)):
                    out_ids.append(self.tie(int(signal)))
                elif signal in self.__inputs:
                    out_ids.append(self.buffer(signal))
                elif signal in self.__thresholds:
                    out_ids.append(signal)
                else:
                    raise CircuitError(f"{self.name}: unknown output signal {signal}")

        position = {nid: i for i, nid in enumerate(self.__order)}
        ordered = sorted(self.__order, key=lambda nid: (self.__depths[nid], position[nid]))
        circuit = Circuit(
            name=self.name,
            inputs=tuple(self.__inputs),
            outputs=tuple(out_ids),
            neurons=tuple(
                NeuronSpec(id=nid, threshold=self.__thresholds[nid], depth=self.__depths[nid])
                for nid in ordered
            ),
            synapses=tuple(
                Synapse(pre=pre, post=nid, weight=w)
                for nid in self.__order
                for pre, w in self.__fan_in[nid].items()
            ),
            port_names=tuple(names),
            stages={k: tuple(v) for k, v in self.__stages.items()},
        )
        circuit.validate()
        return circuit
