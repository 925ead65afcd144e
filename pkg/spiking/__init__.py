from .circuit import Circuit, CircuitBuilder, NeuronSpec, Synapse, circuit_stats
from .gates import GateKind, SubcircuitHandle, build_gate, compose
from .neuron import SimConfig, step_neuron
from .simulator import (
    EvalTrace,
    evaluate_batch,
    evaluate_many,
    evaluate_spatial,
    evaluate_temporal_reference,
)

__all__ = [
    "Circuit",
    "CircuitBuilder",
    "EvalTrace",
    "GateKind",
    "NeuronSpec",
    "SimConfig",
    "SubcircuitHandle",
    "Synapse",
    "build_gate",
    "circuit_stats",
    "compose",
    "evaluate_batch",
    "evaluate_many",
    "evaluate_spatial",
    "evaluate_temporal_reference",
    "step_neuron",
]
