"""FP8 linear layers built from the spiking units, and their latency laws."""

from dataclasses import asdict, dataclass
from typing import Callable, Literal

import numpy as np

from arithmetic.units import run_unit, unit_circuit
from core.abstract import CampaignSpecError, ShapeError
from core.constants import TEMPORAL_ADDER_NEURONS, TEMPORAL_STEPS_PER_OP
from fp8.oracle import oracle_table, ordinal
from spiking.neuron import SimConfig

from .tensor import Fp8Tensor

POSSIBLE_REDUCTIONS = Literal["tree", "sequential"]
POSSIBLE_ENGINES = Literal["spiking", "oracle"]

BinaryOp = Callable[[np.ndarray, np.ndarray], np.ndarray]


def tree_levels(d_in: int) -> int:
    """ceil(log2(d_in)) adder levels of the pairwise tree"""
    return (d_in - 1).bit_length()


@dataclass(frozen=True)
class LatencyModel:
    """Step cost of one product and one addition

    `tree`: `t_mul + ceil(log2 D) * t_add`; `sequential`: `t_mul + (D - 1) * t_add`.
    With unit costs these are `1 + ceil(log2 D)` and `D`.
    """

    t_mul: int = 1
    t_add: int = 1
    mode: POSSIBLE_REDUCTIONS = "tree"

    def steps(self, d_in: int, mode: POSSIBLE_REDUCTIONS | None = None) -> int:
        if d_in < 1:
            raise ShapeError(f"D_in must be >= 1, got {d_in}")
        match mode or self.mode:
            case "tree":
                return self.t_mul + tree_levels(d_in) * self.t_add
            case "sequential":
                return self.t_mul + (d_in - 1) * self.t_add
            case other:
                raise CampaignSpecError(f"Unknown reduction: {other}")

    @classmethod
    def from_circuits(cls, saturate: bool = True, mode: POSSIBLE_REDUCTIONS = "tree") -> "LatencyModel":
        """Costs equal to the logical depths of the spiking units"""
        return cls(
            t_mul=unit_circuit("mul", saturate).depth,
            t_add=unit_circuit("add", saturate).depth,
            mode=mode,
        )


@dataclass(frozen=True)
class LatencyReport:
    d_in: int
    unit_tree: int
    unit_sequential: int
    unit_speedup: float
    t_mul: int
    t_add: int
    circuit_tree: int
    circuit_sequential: int
    circuit_speedup: float
    temporal_serial: int
    temporal_neurons: int
    speedup_law: float

    def to_dict(self) -> dict:
        return asdict(self)


def latency_report(d_in: int, model: LatencyModel | None = None) -> LatencyReport:
    """Tree against sequential accumulation, in unit steps and in circuit depth

    Args:
        d_in (int): Reduction length
        model (LatencyModel, optional): Circuit costs. Defaults to the depths of
            the built units.

    Returns:
        LatencyReport: The comparison, with the temporal (serial) estimate
    """
    unit = LatencyModel()
    model = model or LatencyModel.from_circuits()
    unit_tree, unit_seq = unit.steps(d_in, "tree"), unit.steps(d_in, "sequential")
    circ_tree, circ_seq = model.steps(d_in, "tree"), model.steps(d_in, "sequential")
    return LatencyReport(
        d_in=d_in,
        unit_tree=unit_tree,
        unit_sequential=unit_seq,
        unit_speedup=unit_seq / unit_tree,
        t_mul=model.t_mul,
        t_add=model.t_add,
        circuit_tree=circ_tree,
        circuit_sequential=circ_seq,
        circuit_speedup=circ_seq / circ_tree,
        temporal_serial=TEMPORAL_STEPS_PER_OP * d_in,
        temporal_neurons=TEMPORAL_ADDER_NEURONS,
        speedup_law=d_in / (1 + tree_levels(d_in)),
    )


def elementwise_ops(
    engine: POSSIBLE_ENGINES = "spiking",
    cfg: SimConfig = SimConfig(),
    saturate: bool = True,
) -> tuple[BinaryOp, BinaryOp]:
    """(mul, add) over broadcastable byte arrays for the chosen engine"""
    match engine:
        case "oracle":
            mul_table, add_table = oracle_table("mul", saturate), oracle_table("add", saturate)
            return (lambda a, b: mul_table[a, b]), (lambda a, b: add_table[a, b])
        case "spiking":
            mul_circuit = unit_circuit("mul", saturate)
            add_circuit = unit_circuit("add", saturate)
            counter = iter(range(1 << 62))

            def mul(a, b):
                return run_unit(mul_circuit, a, b, cfg, stream=(0, next(counter))).results

            def add(a, b):
                return run_unit(add_circuit, a, b, cfg, stream=(1, next(counter))).results

            return mul, add
        case _:
            raise CampaignSpecError(f"Unknown engine: {engine}")


def reduce_tree(values: np.ndarray, add: BinaryOp) -> np.ndarray:
    """Pairwise reduction of the last axis; an odd element passes to the next level"""
    while values.shape[-1] > 1:
        n = values.shape[-1]
        pairs = n // 2
        summed = add(values[..., 0 : 2 * pairs : 2], values[..., 1 : 2 * pairs : 2])
        if n % 2:
            summed = np.concatenate([summed, values[..., -1:]], axis=-1)
        values = summed
    return values[..., 0]


def reduce_sequential(values: np.ndarray, add: BinaryOp) -> np.ndarray:
    """Left fold of the last axis"""
    acc = values[..., 0]
    for k in range(1, values.shape[-1]):
        acc = add(acc, values[..., k])
    return acc


def linear_forward(
    x: Fp8Tensor,
    w: Fp8Tensor,
    mode: POSSIBLE_REDUCTIONS = "tree",
    engine: POSSIBLE_ENGINES = "spiking",
    cfg: SimConfig = SimConfig(),
    saturate: bool = True,
    model: LatencyModel | None = None,
) -> tuple[Fp8Tensor, int]:
    """`Y = X W^T` with FP8 products and FP8 accumulation

    Args:
        x (Fp8Tensor): (batch, D_in) or (D_in,)
        w (Fp8Tensor): (D_out, D_in)
        mode (str, optional): `tree` or `sequential`. Defaults to "tree".
        engine (str, optional): `spiking` circuits or `oracle` tables (fast check).
        cfg (SimConfig, optional): Dynamics of the spiking engine.
        saturate (bool, optional): Saturating overflow. Defaults to True.
        model (LatencyModel, optional): Step costs. Defaults to unit costs.

    Raises:
        ShapeError: Inner dimensions differ or D_in is zero

    Returns:
        tuple[Fp8Tensor, int]: (Y with shape (batch, D_out) or (D_out,), latency in steps)
    """
    xs, ws = x.array, w.array
    single = xs.ndim == 1
    if single:
        xs = xs[None, :]
    if xs.ndim != 2 or ws.ndim != 2:
        raise ShapeError(f"Expected X (B, D_in) and W (D_out, D_in), got {x.shape} and {w.shape}")
    if xs.shape[1] != ws.shape[1]:
        raise ShapeError(f"Inner dimensions differ: X {x.shape}, W {w.shape}")
    d_in = xs.shape[1]
    if d_in < 1:
        raise ShapeError("D_in must be >= 1")

    mul, add = elementwise_ops(engine, cfg, saturate)
    products = mul(xs[:, None, :], ws[None, :, :])
    match mode:
        case "tree":
            y = reduce_tree(products, add)
        case "sequential":
            y = reduce_sequential(products, add)
        case _:
            raise CampaignSpecError(f"Unknown reduction: {mode}")

    latency = (model or LatencyModel()).steps(d_in, mode)
    return Fp8Tensor.from_codes(y[0] if single else y), latency


@dataclass(frozen=True)
class AuditResult:
    outputs: int
    matches: int
    max_ulp: int
    mean_ulp: float
    nan_mismatches: int

    @property
    def match_rate(self) -> float:
        return self.matches / self.outputs if self.outputs else 1.0


def _ordinals(codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    table = np.array([0 if (b & 0x7F) == 0x7F else ordinal(b) for b in range(256)])
    nan = (codes & 0x7F) == 0x7F
    return table[codes], nan


def nonassociativity_audit(
    x: Fp8Tensor,
    w: Fp8Tensor,
    engine: POSSIBLE_ENGINES = "oracle",
    cfg: SimConfig = SimConfig(),
    saturate: bool = True,
) -> AuditResult:
    """Compare tree and sequential accumulation of the same layer, output by output"""
    y_tree, _ = linear_forward(x, w, "tree", engine, cfg, saturate)
    y_seq, _ = linear_forward(x, w, "sequential", engine, cfg, saturate)
    tree, seq = y_tree.codes, y_seq.codes

    tree_ord, tree_nan = _ordinals(tree)
    seq_ord, seq_nan = _ordinals(seq)
    both_finite = ~tree_nan & ~seq_nan
    delta = np.abs(tree_ord - seq_ord)[both_finite]
    nan_mismatches = int(np.count_nonzero(tree_nan != seq_nan))
    matches = int(np.count_nonzero((tree == seq) | (tree_nan & seq_nan)))

    return AuditResult(
        outputs=int(tree.size),
        matches=matches,
        max_ulp=int(delta.max()) if delta.size else 0,
        mean_ulp=float(delta.mean()) if delta.size else 0.0,
        nan_mismatches=nan_mismatches,
    )
