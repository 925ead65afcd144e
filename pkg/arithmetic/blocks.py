"""Datapath blocks shared by the multiplier and the adder.

Bit vectors are LSB first; "lines" (significand registers) are MSB first, line 0
being the hidden-bit position.
"""

from typing import Sequence

from spiking.circuit import CircuitBuilder, Signal

from .bus import Fp8Lines


def implicit_bit(b: CircuitBuilder, x: Fp8Lines) -> Signal:
    """Hidden bit: 1 unless the exponent field is zero"""
    return b.or_reduce(x.exponent)


def effective_exponent_bits(b: CircuitBuilder, x: Fp8Lines, hidden: Signal) -> list[Signal]:
    """Biased exponent with subnormals promoted to 1 (forces bit 0 when h = 0)"""
    e0, *rest = x.exponent
    return [b.or_(e0, b.not_(hidden)), *rest]


def significand_bits(x: Fp8Lines, hidden: Signal) -> list[Signal]:
    """[m0, m1, m2, h]"""
    return [*x.mantissa, hidden]


def is_nan(b: CircuitBuilder, x: Fp8Lines) -> Signal:
    return b.and_reduce([*x.exponent, *x.mantissa])


def shift_toward_lsb(
    b: CircuitBuilder, lines: Sequence[Signal], amount: Sequence[Signal]
) -> tuple[list[Signal], Signal]:
    """Logarithmic right shifter with sticky collection

    Layer `k` moves every line by `2**k` positions when `amount[k]` fires; the
    lines falling off the end are OR-ed into a sticky bit.

    Returns:
        tuple[list[Signal], Signal]: (shifted lines, sticky)
    """
    lines = list(lines)
    n = len(lines)
    stickies = []
    for k, bit in enumerate(amount):
        step = 1 << k
        dropped = lines[max(0, n - step) :]
        with b.stage("sticky"):
            stickies.append(b.and_(bit, b.or_reduce(dropped)))
        with b.stage("shifter"):
            lines = [b.mux(bit, lines[i - step] if i >= step else 0, lines[i]) for i in range(n)]
    with b.stage("sticky"):
        sticky = b.or_reduce(stickies)
    return lines, sticky


def shift_toward_msb(
    b: CircuitBuilder, lines: Sequence[Signal], amount: Sequence[Signal]
) -> list[Signal]:
    """Logarithmic left shifter (lines shifted out of line 0 are discarded)"""
    lines = list(lines)
    n = len(lines)
    with b.stage("shifter"):
        for k, bit in enumerate(amount):
            step = 1 << k
            lines = [
                b.mux(bit, lines[i + step] if i + step < n else 0, lines[i]) for i in range(n)
            ]
    return lines


def leading_zero_count(
    b: CircuitBuilder, lines: Sequence[Signal]
) -> tuple[list[Signal], Signal]:
    """Hierarchical leading-zero counter

    Returns:
        tuple[list[Signal], Signal]: (count bits LSB first, any line fires). The
            count is meaningless when no line fires.
    """
    lines = list(lines)
    if len(lines) == 1:
        return [], lines[0]

    half = 1 << ((len(lines) - 1).bit_length() - 1)
    high_count, high_any = leading_zero_count(b, lines[:half])
    low_count, low_any = leading_zero_count(b, lines[half:])

    count = []
    for i, bit in enumerate(high_count):
        if i < len(low_count):
            count.append(b.mux(high_any, bit, low_count[i]))
        else:
            count.append(b.and_(high_any, bit))
    count.append(b.not_(high_any))
    return count, b.or_(high_any, low_any)


def round_half_even(
    b: CircuitBuilder,
    bits: Sequence[Signal],
    round_bit: Signal,
    sticky: Signal,
) -> tuple[list[Signal], Signal]:
    """Round-to-nearest-even increment; `bits[0]` is the kept LSB

    Returns:
        tuple[list[Signal], Signal]: (rounded bits, carry out)
    """
    up = b.and_(round_bit, b.or_(sticky, bits[0]))
    return b.increment(bits, up)


def overflow_flag(b: CircuitBuilder, em: Sequence[Signal]) -> Signal:
    """Fires when the 8-bit `E:M` value is 127 (nan pattern) or more"""
    return b.or_(em[7], b.and_reduce(em[:7]))


def clamp(
    b: CircuitBuilder,
    sign: Signal,
    em: Sequence[Signal],
    overflow: Signal,
    saturate: bool,
) -> tuple[Signal, list[Signal]]:
    """Replace an overflowing `E:M` by the largest finite value or by nan

    Returns:
        tuple[Signal, list[Signal]]: (sign, seven E:M bits LSB first)
    """
    if saturate:
        keep = b.not_(overflow)
        return sign, [b.and_(em[0], keep), *(b.or_(bit, overflow) for bit in em[1:7])]
    return b.and_(sign, b.not_(overflow)), [b.or_(bit, overflow) for bit in em[:7]]


def force_nan(
    b: CircuitBuilder, sign: Signal, em: Sequence[Signal], nan: Signal
) -> Fp8Lines:
    """Drive the canonical nan when any operand is nan"""
    sign = b.and_(sign, b.not_(nan))
    em = [b.or_(bit, nan) for bit in em]
    return Fp8Lines(sign, em[3:7], em[0:3])
