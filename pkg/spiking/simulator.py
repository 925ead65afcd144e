"""Spatial (depth-scheduled) and temporal evaluation of circuits."""

from dataclasses import dataclass

import numpy as np
from tqdm import tqdm

from core.abstract import CircuitError
from core.utils import Printter, chunked

from .circuit import Circuit
from .neuron import SimConfig


@dataclass
class EvalTrace:
    """Per-step potentials and spikes of one evaluation

    `potentials[t, i]` is the integrated potential of neuron `i` at step `t + 1`
    (before the reset), `nan` when the neuron does not update at that step.
    """

    neuron_ids: tuple[str, ...]
    potentials: np.ndarray
    spikes: np.ndarray

    @property
    def steps(self) -> int:
        return self.potentials.shape[0]

    @property
    def total_spikes(self) -> int:
        return int(self.spikes.sum())

    @property
    def sparsity(self) -> float:
        """Spikes emitted over neuron updates"""
        updates = np.count_nonzero(~np.isnan(self.potentials))
        return self.total_spikes / updates if updates else 0.0

    def at(self, step: int) -> dict[str, tuple[float, int]]:
        """Neurons updated at `step` (1-indexed): id -> (potential, spike)"""
        row = self.potentials[step - 1]
        return {
            nid: (float(row[i]), int(self.spikes[step - 1, i]))
            for i, nid in enumerate(self.neuron_ids)
            if not np.isnan(row[i])
        }


@dataclass
class BatchResult:
    outputs: np.ndarray  # (batch, n_outputs) uint8
    spike_counts: np.ndarray  # (batch,)
    potentials: np.ndarray | None = None  # (n_neurons, batch)
    spikes: np.ndarray | None = None  # (n_neurons, batch)


def _as_matrix(circuit: Circuit, inputs) -> np.ndarray:
    x = np.asarray(inputs)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != len(circuit.inputs):
        raise CircuitError(
            f"{circuit.name}: expected {len(circuit.inputs)} inputs, got shape {x.shape}"
        )
    if x.size and not np.isin(x, (0, 1)).all():
        raise CircuitError(f"{circuit.name}: inputs must be spikes (0 or 1)")
    return x.astype(np.uint8)


def evaluate_batch(
    circuit: Circuit,
    inputs,
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
    record: bool = False,
) -> BatchResult:
    """Spatial evaluation of a whole batch at once

    Every neuron integrates its presynaptic spikes once, at the step equal to its
    depth, from a fresh zero potential, so the retention factor never matters.

    Args:
        circuit (Circuit): Circuit
        inputs (array-like): (batch, n_inputs) or (n_inputs,) spikes
        cfg (SimConfig): Dynamics
        rng (np.random.Generator, optional): Noise source. Defaults to `cfg.rng()`.
        record (bool, optional): Keep potentials and spikes of every neuron.

    Raises:
        CircuitError: Arity mismatch or non binary inputs

    Returns:
        BatchResult: Outputs and spike counts
    """
    plan = circuit.plan
    x = _as_matrix(circuit, inputs)
    batch = x.shape[0]
    if cfg.sigma > 0 and rng is None:
        rng = cfg.rng()

    state = np.zeros((plan.n_rows, batch), dtype=np.uint8)
    state[0] = 1
    state[plan.input_rows] = x.T
    potentials = (
        np.empty((plan.n_rows - plan.neuron_offset, batch), dtype=np.float64)
        if record
        else None
    )

    for level in plan.levels:
        current = np.einsum("nk,nkb->nb", level.weight, state[level.pre])
        noise = cfg.noise(rng, current.shape)
        # fresh zero potential: beta * 0 + I
        v = current if noise is None else current + noise
        state[level.start : level.stop] = v >= level.threshold[:, None]
        if record:
            lo, hi = level.start - plan.neuron_offset, level.stop - plan.neuron_offset
            potentials[lo:hi] = v

    spikes = state[plan.neuron_offset :]
    return BatchResult(
        outputs=state[plan.output_rows].T.copy(),
        spike_counts=spikes.sum(axis=0, dtype=np.int64),
        potentials=potentials,
        spikes=spikes.copy() if record else None,
    )


def evaluate_many(
    circuit: Circuit,
    inputs,
    cfg: SimConfig,
    stream: tuple[int, ...] = (),
    progress: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Chunked `evaluate_batch` over a large input matrix

    Chunk `i` draws its noise from the stream `(*stream, i)`, so the result does
    not depend on how the chunks are scheduled.

    Returns:
        tuple[np.ndarray, np.ndarray]: (outputs, spike counts)
    """
    x = _as_matrix(circuit, inputs)
    outputs = np.empty((x.shape[0], len(circuit.outputs)), dtype=np.uint8)
    counts = np.empty(x.shape[0], dtype=np.int64)
    slices = chunked(x.shape[0], cfg.chunk_size)
    for i, part in enumerate(
        tqdm(slices, desc=circuit.name, disable=not progress or Printter.quiet, leave=False)
    ):
        rng = cfg.rng(*stream, i) if cfg.sigma > 0 else None
        result = evaluate_batch(circuit, x[part], cfg, rng)
        outputs[part] = result.outputs
        counts[part] = result.spike_counts
    return outputs, counts


def evaluate_spatial(
    circuit: Circuit,
    inputs,
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
) -> tuple[tuple[int, ...], EvalTrace]:
    """Evaluate one input vector in `circuit.depth` steps

    Args:
        circuit (Circuit): Circuit
        inputs (Sequence[int]): One spike per primary input
        cfg (SimConfig): Dynamics
        rng (np.random.Generator, optional): Noise source

    Returns:
        tuple[tuple[int, ...], EvalTrace]: (outputs, trace)
    """
    result = evaluate_batch(circuit, inputs, cfg, rng, record=True)
    if result.outputs.shape[0] != 1:
        raise CircuitError(f"{circuit.name}: evaluate_spatial takes one input vector")

    n = len(circuit.neurons)
    depths = np.array([spec.depth for spec in circuit.neurons], dtype=np.int64)
    potentials = np.full((circuit.depth, n), np.nan)
    spikes = np.zeros((circuit.depth, n), dtype=np.uint8)
    potentials[depths - 1, np.arange(n)] = result.potentials[:, 0]
    spikes[depths - 1, np.arange(n)] = result.spikes[:, 0]

    trace = EvalTrace(
        neuron_ids=tuple(spec.id for spec in circuit.neurons),
        potentials=potentials,
        spikes=spikes,
    )
    return tuple(int(v) for v in result.outputs[0]), trace


def evaluate_temporal_reference(
    circuit: Circuit,
    stream,
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Time-stepped simulation with persistent membranes

    At every step the membranes decay by the retention factor, then the neurons
    update in depth order and see the spikes emitted in the same step by their
    presynaptic neurons.

    Args:
        circuit (Circuit): Circuit
        stream (array-like): (T, n_inputs) input spikes, or (batch, T, n_inputs)
        cfg (SimConfig): Dynamics
        rng (np.random.Generator, optional): Noise source

    Raises:
        CircuitError: Empty stream or arity mismatch

    Returns:
        np.ndarray: (T, n_outputs) output spikes, or (batch, T, n_outputs)
    """
    x = np.asarray(stream)
    single = x.ndim == 2
    if single:
        x = x[None]
    if x.ndim != 3 or x.shape[2] != len(circuit.inputs):
        raise CircuitError(
            f"{circuit.name}: expected (T, {len(circuit.inputs)}) stream, got {np.shape(stream)}"
        )
    batch, steps, _ = x.shape
    if steps < 1:
        raise CircuitError(f"{circuit.name}: a stream needs at least one step")
    if cfg.sigma > 0 and rng is None:
        rng = cfg.rng()

    plan = circuit.plan
    soft = np.array([spec.reset == "soft" for spec in circuit.neurons])
    membrane = np.zeros((plan.n_rows - plan.neuron_offset, batch))
    out = np.zeros((batch, steps, len(circuit.outputs)), dtype=np.uint8)

    for t in range(steps):
        state = np.zeros((plan.n_rows, batch), dtype=np.uint8)
        state[0] = 1
        state[plan.input_rows] = x[:, t, :].T
        for level in plan.levels:
            lo, hi = level.start - plan.neuron_offset, level.stop - plan.neuron_offset
            current = np.einsum("nk,nkb->nb", level.weight, state[level.pre])
            noise = cfg.noise(rng, current.shape)
            if noise is not None:
                current = current + noise
            v = cfg.retention * membrane[lo:hi] + current
            fired = v >= level.threshold[:, None]
            reset = fired & soft[lo:hi, None]
            membrane[lo:hi] = v - reset * level.threshold[:, None]
            state[level.start : level.stop] = fired
        out[:, t, :] = state[plan.output_rows].T

    return out[0] if single else out
