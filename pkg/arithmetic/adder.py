"""Bit-exact spatial FP8 (E4M3) adder and its standalone stage circuits."""

from functools import cache

from spiking.circuit import Circuit, CircuitBuilder

from . import blocks
from .bus import SpikeBus

A_BUS, B_BUS, Y_BUS = SpikeBus("a"), SpikeBus("b"), SpikeBus("y")

LINES = 12
"""Width of the aligned significand register (h, m2, m1, m0 and 8 guard lines)."""


@cache
def build_spatial_adder(saturate: bool = True) -> Circuit:
    """Spiking FP8 adder in five stages, 16 input lines and 8 output lines

    1. compare: effective exponents, |a| >= |b| and the exponent difference
    2. align: swap into (big, small) and shift the small significand right
    3. add: 12-line ripple adder (two's complement when the signs differ)
    4. normalize: leading-zero count clamped by the exponent, left shift
    5. round: RNE, saturation and special values

    Args:
        saturate (bool, optional): Overflow gives +-448 (else nan). Defaults to True.

    Returns:
        Circuit: The adder
    """
    b = CircuitBuilder(f"fp8-add{'' if saturate else '-nan'}")
    x, y = A_BUS.declare(b), B_BUS.declare(b)

    with b.stage("special"):
        nan = b.or_(blocks.is_nan(b, x), blocks.is_nan(b, y))

    with b.stage("compare"):
        hx, hy = blocks.implicit_bit(b, x), blocks.implicit_bit(b, y)
        ex = blocks.effective_exponent_bits(b, x, hx)
        ey = blocks.effective_exponent_bits(b, y, hy)
        sx, sy = blocks.significand_bits(x, hx), blocks.significand_bits(y, hy)
        diff_xy, exp_ge = b.subtract(ex, ey)
        diff_yx, _ = b.subtract(ey, ex)
        exp_eq = b.not_(b.or_reduce(diff_xy))
        _, sig_ge = b.subtract(sx, sy)
        x_big = b.mux(exp_eq, sig_ge, exp_ge)
        delta = b.mux_bus(x_big, diff_xy, diff_yx)

    with b.stage("align"):
        big_sign = b.mux(x_big, x.sign, y.sign)
        big_exp = b.mux_bus(x_big, ex, ey)
        big_sig = b.mux_bus(x_big, sx, sy)
        small_sig = b.mux_bus(x_big, sy, sx)
        subtract = b.xor(x.sign, y.sign)
        small, align_sticky = blocks.shift_toward_lsb(
            b, [*reversed(small_sig), *[0] * (LINES - 4)], delta
        )

    with b.stage("add"):
        big = [*reversed(big_sig), *[0] * (LINES - 4)]
        small = [b.xor(line, subtract) for line in small]
        total, carry_out = b.ripple_add(
            list(reversed(big)), list(reversed(small)), carry_in=subtract
        )
        carry = b.and_(carry_out, b.not_(subtract))
        summed = list(reversed(total))

    with b.stage("normalize"):
        summed, sticky = _carry_preshift(b, summed, carry, align_sticky)
        shift = _clamped_leading_zeros(b, summed, big_exp)
        is_zero = b.not_(b.or_reduce(summed))
        lines = blocks.shift_toward_msb(b, summed, shift)
        # E = E_big - shift + carry, as E_big + ~shift + 1 (or E_big + 0 + 1)
        operand = [b.not_(b.or_(bit, carry)) for bit in shift] + [b.not_(carry)]
        exp_norm, _ = b.ripple_add([*big_exp, 0], operand, carry_in=1)
        exponent = [b.and_(lines[0], bit) for bit in exp_norm]

    with b.stage("round"):
        sticky = b.or_(b.or_reduce(lines[5:]), sticky)
        em, _ = blocks.round_half_even(
            b, [lines[3], lines[2], lines[1], *exponent], lines[4], sticky
        )
        sign = b.mux(is_zero, b.and_(x.sign, y.sign), big_sign)
        sign, em = blocks.clamp(b, sign, em, blocks.overflow_flag(b, em), saturate)

    with b.stage("special"):
        result = blocks.force_nan(b, sign, em, nan)

    return b.build(Y_BUS.outputs(result))


def _carry_preshift(b: CircuitBuilder, lines: list, carry, sticky) -> tuple[list, object]:
    """On a carry out, move every line one step toward the LSB and keep the carry on line 0"""
    shifted = [b.mux(carry, prev, line) for prev, line in zip([carry, *lines[:-1]], lines)]
    return shifted, b.or_(sticky, b.and_(carry, lines[-1]))


def _clamped_leading_zeros(b: CircuitBuilder, lines: list, big_exp: list) -> list:
    """min(leading zeros, E_big - 1)

    A marker is OR-ed into line `E_big - 1` so the count never moves the value
    below the subnormal quantum.
    """
    inverted = [b.not_(bit) for bit in big_exp]
    marked = []
    for k, line in enumerate(lines):
        pattern = b.constant(k + 1, len(big_exp))
        literals = [bit if want else inv for bit, inv, want in zip(big_exp, inverted, pattern)]
        marked.append(b.or_(line, b.and_reduce(literals)))
    count, _ = blocks.leading_zero_count(b, marked)
    return count


def build_barrel_shifter(width: int = LINES, amount_bits: int = 4) -> Circuit:
    """Standalone alignment shifter: lines `x*` shifted right by `d*`, with sticky"""
    b = CircuitBuilder(f"barrel-shift-{width}")
    lines = b.inputs("x", width)
    amount = b.inputs("d", amount_bits)
    shifted, sticky = blocks.shift_toward_lsb(b, lines, amount)
    return b.build({**{f"y{i}": s for i, s in enumerate(shifted)}, "sticky": sticky})


def build_leading_zero_detector(width: int = LINES) -> Circuit:
    """Standalone leading-zero counter: outputs `p*` (LSB first) and `all_zero`"""
    b = CircuitBuilder(f"lzd-{width}")
    lines = b.inputs("x", width)
    count, nonzero = blocks.leading_zero_count(b, lines)
    return b.build(
        {**{f"p{i}": c for i, c in enumerate(count)}, "all_zero": b.not_(nonzero)}
    )


def build_rne_rounder(width: int = 4) -> Circuit:
    """Standalone rounder: mantissa `m*` (LSB first) with round `r` and sticky `s`"""
    b = CircuitBuilder(f"rne-{width}")
    bits = b.inputs("m", width)
    round_bit, sticky = b.input("r"), b.input("s")
    rounded, carry = blocks.round_half_even(b, bits, round_bit, sticky)
    return b.build({**{f"y{i}": r for i, r in enumerate(rounded)}, "carry": carry})
