"""Spiking evaluation of the standalone adder stages, checked against integer references."""

from functools import cache
from typing import Sequence

from fp8.code import RoundFlags
from spiking.neuron import SimConfig
from spiking.simulator import evaluate_spatial

from .adder import build_barrel_shifter, build_leading_zero_detector, build_rne_rounder

IDEAL = SimConfig()

_shifter = cache(build_barrel_shifter)
_detector = cache(build_leading_zero_detector)
_rounder = cache(build_rne_rounder)


def _bits(value: int, width: int) -> list[int]:
    return [(value >> i) & 1 for i in range(width)]


def barrel_shift(lines: Sequence[int], delta: int) -> tuple[list[int], int]:
    """Shift spike lines (MSB first) right by `delta`

    Returns:
        tuple[list[int], int]: (lines, sticky of the dropped lines)
    """
    circuit = _shifter(len(lines), 4)
    outputs, _ = evaluate_spatial(circuit, [*lines, *_bits(delta, 4)], IDEAL)
    return list(outputs[:-1]), outputs[-1]


def leading_zero_detect(lines: Sequence[int]) -> tuple[int, int]:
    """Leading zeros of spike lines (MSB first)

    Returns:
        tuple[int, int]: (count, all_zero)
    """
    circuit = _detector(len(lines))
    outputs, _ = evaluate_spatial(circuit, list(lines), IDEAL)
    count = sum(bit << i for i, bit in enumerate(outputs[:-1]))
    return count, outputs[-1]


def rne_round(flags: RoundFlags, mantissa: int, width: int = 4) -> tuple[int, int]:
    """Round-to-nearest-even increment of a `width`-bit mantissa

    `flags.lsb` must match the LSB of `mantissa`.

    Returns:
        tuple[int, int]: (mantissa, carry out)
    """
    if flags.lsb != mantissa & 1:
        raise ValueError("flags.lsb does not match the mantissa LSB")
    circuit = _rounder(width)
    outputs, _ = evaluate_spatial(
        circuit, [*_bits(mantissa, width), flags.round_bit, flags.sticky], IDEAL
    )
    return sum(bit << i for i, bit in enumerate(outputs[:-1])), outputs[-1]
