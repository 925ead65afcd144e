"""Spiking logic gates and wiring of sub-circuits."""

from dataclasses import dataclass
from enum import StrEnum
from functools import cache
from typing import Callable, Mapping, Sequence

import networkx as nx

from core.abstract import CircuitError

from .circuit import Circuit, CircuitBuilder


class GateKind(StrEnum):
    AND = "AND"
    OR = "OR"
    NOT = "NOT"
    XOR = "XOR"
    MUX2 = "MUX2"
    HALF_ADDER = "HALF_ADDER"
    FULL_ADDER = "FULL_ADDER"


GATE_PORTS: Mapping[GateKind, tuple[tuple[str, ...], tuple[str, ...]]] = {
    GateKind.AND: (("a", "b"), ("y",)),
    GateKind.OR: (("a", "b"), ("y",)),
    GateKind.NOT: (("a",), ("y",)),
    GateKind.XOR: (("a", "b"), ("y",)),
    GateKind.MUX2: (("s", "a", "b"), ("y",)),
    GateKind.HALF_ADDER: (("a", "b"), ("sum", "carry")),
    GateKind.FULL_ADDER: (("a", "b", "cin"), ("sum", "carry")),
}
"""(input ports, output ports) of every gate template."""

GATE_NEURONS: Mapping[GateKind, int] = {
    GateKind.AND: 1,
    GateKind.OR: 1,
    GateKind.NOT: 1,
    GateKind.XOR: 4,
    GateKind.MUX2: 4,
    GateKind.HALF_ADDER: 4,
    GateKind.FULL_ADDER: 9,
}
"""Neuron count of every gate template."""

TRUTH_TABLES: Mapping[GateKind, Callable[..., tuple[int, ...]]] = {
    GateKind.AND: lambda a, b: (a & b,),
    GateKind.OR: lambda a, b: (a | b,),
    GateKind.NOT: lambda a: (1 - a,),
    GateKind.XOR: lambda a, b: (a ^ b,),
    GateKind.MUX2: lambda s, a, b: (a if s else b,),
    GateKind.HALF_ADDER: lambda a, b: (a ^ b, a & b),
    GateKind.FULL_ADDER: lambda a, b, c: ((a + b + c) & 1, (a + b + c) >> 1),
}
"""Boolean reference of every gate, in port order."""


@dataclass(frozen=True)
class SubcircuitHandle:
    kind: str
    circuit: Circuit
    input_ports: tuple[str, ...]
    output_ports: tuple[str, ...]

    @property
    def neuron_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.circuit.neurons)

    @property
    def depth_span(self) -> int:
        return self.circuit.depth


def _gate_outputs(builder: CircuitBuilder, kind: GateKind, ports: Sequence[str]):
    match kind:
        case GateKind.AND:
            return (builder.and_(*ports),)
        case GateKind.OR:
            return (builder.or_(*ports),)
        case GateKind.NOT:
            return (builder.not_(*ports),)
        case GateKind.XOR:
            return (builder.xor(*ports),)
        case GateKind.MUX2:
            return (builder.mux(*ports),)
        case GateKind.HALF_ADDER:
            return builder.half_adder(*ports)
        case GateKind.FULL_ADDER:
            return builder.full_adder(*ports)
        case _:
            raise CircuitError(f"Unknown gate kind: {kind}")


@cache
def build_gate(kind: GateKind | str) -> SubcircuitHandle:
    """Build one gate template

    Args:
        kind (GateKind | str): Gate

    Raises:
        CircuitError: Unknown gate

    Returns:
        SubcircuitHandle: The gate with its named ports
    """
    try:
        kind = GateKind(kind)
    except ValueError as e:
        raise CircuitError(f"Unknown gate kind: {kind}") from e

    in_ports, out_ports = GATE_PORTS[kind]
    builder = CircuitBuilder(kind.value)
    ports = [builder.input(p) for p in in_ports]
    outputs = _gate_outputs(builder, kind, ports)
    circuit = builder.build(dict(zip(out_ports, outputs)))
    return SubcircuitHandle(kind.value, circuit, in_ports, out_ports)


def compose(
    builder: CircuitBuilder,
    subcircuits: Mapping[str, SubcircuitHandle],
    wiring: Mapping[str, str],
    outputs: Sequence[str] | None = None,
) -> Circuit:
    """Wire named sub-circuits into one flat circuit

    Ports are addressed as `instance.port`. `wiring` maps an input port to either
    an output port of another instance or a primary input name; input ports left
    unwired become primary inputs named after the port.

    Args:
        builder (CircuitBuilder): Builder receiving the flat circuit
        subcircuits (Mapping[str, SubcircuitHandle]): Instance name -> sub-circuit
        wiring (Mapping[str, str]): Destination input port -> source
        outputs (Sequence[str], optional): Output ports of the flat circuit.
            Defaults to every output port no wire reads.

    Raises:
        CircuitError: Cycle, dangling or unknown port

    Returns:
        Circuit: Flat circuit with recomputed depths
    """
    in_ports = {f"{n}.{p}" for n, h in subcircuits.items() for p in h.input_ports}
    out_ports = {f"{n}.{p}" for n, h in subcircuits.items() for p in h.output_ports}

    graph = nx.DiGraph()
    graph.add_nodes_from(subcircuits)
    for dst, src in wiring.items():
        if dst not in in_ports:
            raise CircuitError(f"Dangling wire: {dst} is not an input port")
        if "." in src:
            if src not in out_ports:
                raise CircuitError(f"Dangling wire: {src} is not an output port")
            graph.add_edge(src.split(".")[0], dst.split(".")[0])

    if not nx.is_directed_acyclic_graph(graph):
        raise CircuitError(f"Cycle detected: {nx.find_cycle(graph)}")

    primary: dict[str, str] = {}
    produced: dict[str, str] = {}
    for name in nx.topological_sort(graph):
        handle = subcircuits[name]
        bindings = {}
        for port in handle.input_ports:
            key = f"{name}.{port}"
            src = wiring.get(key, key)
            if src in produced:
                bindings[port] = produced[src]
            else:
                if src not in primary:
                    primary[src] = builder.input(src)
                bindings[port] = primary[src]
        for port, nid in builder.instantiate(handle, bindings).items():
            produced[f"{name}.{port}"] = nid

    if outputs is None:
        read = set(wiring.values())
        outputs = sorted(p for p in out_ports if p not in read)
    missing = [o for o in outputs if o not in produced]
    if missing:
        raise CircuitError(f"Unknown output ports: {missing}")
    return builder.build({o: produced[o] for o in outputs})
