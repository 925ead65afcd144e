"""Bit-exact spiking FP8 (E4M3) multiplier."""

from functools import cache

from spiking.circuit import Circuit, CircuitBuilder

from . import blocks
from .bus import SpikeBus

A_BUS, B_BUS, Y_BUS = SpikeBus("a"), SpikeBus("b"), SpikeBus("y")

NORMAL_THRESHOLD = 14
"""`X + (7 - lzc)` from which the product is normal (biased exponent >= 1)."""

NORMAL_SHIFT_OFFSET = 5
"""Left shift bringing the leading one of the product to the hidden line."""

SUBNORMAL_SHIFT_OFFSET = 2
"""`X - 2` aligns a subnormal product to the 2^-9 quantum."""


@cache
def build_multiplier(saturate: bool = True, sticky_extra: bool = True) -> Circuit:
    """Spiking FP8 multiplier, 16 input lines and 8 output lines

    The 8-bit significand product `P` enters a 12-line shifter without its LSB;
    the shifter brings the leading one to line 0 for normal products, or aligns
    the value to the subnormal quantum otherwise. `P0` is re-injected after the
    shift by three correction pairs: into the mantissa LSB when the shift is 9
    or more, into the round bit when it is exactly 8, into the sticky bit below.

    Args:
        saturate (bool, optional): Overflow gives +-448 (else nan). Defaults to True.
        sticky_extra (bool, optional): Build the `P0` correction. `False` is a debug
            switch that reproduces the rounding errors of the bare shifter.

    Returns:
        Circuit: The multiplier
    """
    b = CircuitBuilder(f"fp8-mul{'' if saturate else '-nan'}{'' if sticky_extra else '-nosx'}")
    x, y = A_BUS.declare(b), B_BUS.declare(b)

    with b.stage("sign"):
        sign = b.xor(x.sign, y.sign)

    with b.stage("special"):
        nan = b.or_(blocks.is_nan(b, x), blocks.is_nan(b, y))

    with b.stage("exponent"):
        hx, hy = blocks.implicit_bit(b, x), blocks.implicit_bit(b, y)
        ex = blocks.effective_exponent_bits(b, x, hx)
        ey = blocks.effective_exponent_bits(b, y, hy)
        exp_sum, _ = b.ripple_add([*ex, 0], [*ey, 0])

    with b.stage("mantissa"):
        product = _array_multiply(
            b, blocks.significand_bits(x, hx), blocks.significand_bits(y, hy)
        )

    with b.stage("normalize"):
        # lines MSB first: five empty lines, then P7..P1
        lines = [0] * 5 + list(reversed(product[1:]))
        lzc, nonzero = blocks.leading_zero_count(b, list(reversed(product)))
        top = [b.not_(bit) for bit in lzc]
        biased, carry = b.ripple_add(exp_sum, [*top, 0, 0])
        biased = [*biased, carry]
        normal = b.or_(
            b.or_(biased[5], biased[4]),
            b.and_(b.and_(biased[3], biased[2]), biased[1]),
        )
        exp_norm, _ = b.ripple_add(
            biased[:5], b.constant(32 - NORMAL_THRESHOLD + 1, 5)
        )
        normal_shift, _ = b.ripple_add([*lzc, 0], b.constant(NORMAL_SHIFT_OFFSET, 4))
        subnormal_shift, _ = b.ripple_add(
            exp_sum[:4], b.constant(16 - SUBNORMAL_SHIFT_OFFSET, 4)
        )
        shift = b.mux_bus(normal, normal_shift, subnormal_shift)
        lines = blocks.shift_toward_msb(b, lines, shift)

    mantissa_lsb, round_bit = lines[3], lines[4]
    with b.stage("round"):
        sticky = b.or_reduce(lines[5:])

    if sticky_extra:
        with b.stage("sticky-extra"):
            low = product[0]
            fraction = b.or_(b.or_(shift[0], shift[1]), shift[2])
            ge9 = b.and_(shift[3], fraction)
            eq8 = b.and_(shift[3], b.not_(fraction))
            lt8 = b.not_(shift[3])
            mantissa_lsb = b.or_(mantissa_lsb, b.and_(ge9, low))
            round_bit = b.or_(round_bit, b.and_(eq8, low))
            sticky = b.or_(sticky, b.and_(lt8, low))

    with b.stage("round"):
        enable = b.and_(normal, nonzero)
        exponent = [b.and_(enable, bit) for bit in exp_norm]
        em, _ = blocks.round_half_even(
            b, [mantissa_lsb, lines[2], lines[1], *exponent], round_bit, sticky
        )

    with b.stage("clamp"):
        sign, em = blocks.clamp(b, sign, em, blocks.overflow_flag(b, em), saturate)

    with b.stage("special"):
        result = blocks.force_nan(b, sign, em, nan)

    return b.build(Y_BUS.outputs(result))


def _array_multiply(b: CircuitBuilder, a: list, c: list) -> list:
    """4x4 unsigned array multiplier: 16 partial-product ANDs and three adder rows"""
    partial = [[b.and_(ai, cj) for ai in a] for cj in c]
    running = list(partial[0])
    for j in range(1, len(c)):
        high = running[j:] + [0] * (j + len(a) - len(running))
        total, carry = b.ripple_add(high[: len(a)], partial[j])
        running = running[:j] + total + [carry]
    return running
