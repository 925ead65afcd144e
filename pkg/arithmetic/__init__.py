from .adder import (
    build_barrel_shifter,
    build_leading_zero_detector,
    build_rne_rounder,
    build_spatial_adder,
)
from .bus import Fp8Lines, SpikeBus
from .corner_cases import CornerCase, load_corner_suite
from .multiplier import build_multiplier
from .stages import barrel_shift, leading_zero_detect, rne_round
from .units import (
    run_unit,
    snn_add,
    snn_add_batch,
    snn_mul,
    snn_mul_batch,
    unit_circuit,
)

__all__ = [
    "CornerCase",
    "Fp8Lines",
    "SpikeBus",
    "barrel_shift",
    "build_barrel_shifter",
    "build_leading_zero_detector",
    "build_multiplier",
    "build_rne_rounder",
    "build_spatial_adder",
    "leading_zero_detect",
    "load_corner_suite",
    "rne_round",
    "run_unit",
    "snn_add",
    "snn_add_batch",
    "snn_mul",
    "snn_mul_batch",
    "unit_circuit",
]
