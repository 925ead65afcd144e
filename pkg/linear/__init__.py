from .activation import build_threshold_activation, spike_activation
from .engine import (
    AuditResult,
    LatencyModel,
    LatencyReport,
    latency_report,
    linear_forward,
    nonassociativity_audit,
    reduce_sequential,
    reduce_tree,
)
from .tensor import Fp8Tensor

__all__ = [
    "AuditResult",
    "Fp8Tensor",
    "LatencyModel",
    "LatencyReport",
    "build_threshold_activation",
    "latency_report",
    "linear_forward",
    "nonassociativity_audit",
    "reduce_sequential",
    "reduce_tree",
    "spike_activation",
]
