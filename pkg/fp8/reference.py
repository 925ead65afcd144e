"""Independent oracle: double precision arithmetic and a nearest-code search.

It shares nothing with `fp8.oracle` except the code layout, so agreement of the
two is a meaningful cross-check.
"""

import math
from bisect import bisect_left
from functools import cache

from core.constants import FP8_MAX_FINITE_BYTE, FP8_NAN_BYTE

from .code import Fp8Code, as_code


@cache
def _positive_values() -> tuple[float, ...]:
    # bytes 0x00..0x7E grow with their value; one virtual code past the largest
    # finite one stands for "overflow"
    values = []
    for byte in range(FP8_MAX_FINITE_BYTE + 1):
        e, m = byte >> 3, byte & 7
        values.append(m * 2.0**-9 if e == 0 else (1 + m / 8) * 2.0 ** (e - 7))
    values.append(480.0)
    return tuple(values)


def _value(code: Fp8Code) -> float:
    e, m = code.exponent, code.mantissa
    magnitude = m * 2.0**-9 if e == 0 else (1 + m / 8) * 2.0 ** (e - 7)
    return -magnitude if code.sign else magnitude


def nearest_code(value: float, saturate: bool = True) -> Fp8Code:
    """Nearest code of a double, ties to the even byte"""
    sign = int(math.copysign(1.0, value) < 0)
    magnitude = abs(value)
    values = _positive_values()

    i = bisect_left(values, magnitude)
    if i == len(values):
        byte = len(values) - 1
    elif values[i] == magnitude:
        byte = i
    else:
        lo, hi = i - 1, i
        below, above = magnitude - values[lo], values[hi] - magnitude
        if below < above:
            byte = lo
        elif above < below:
            byte = hi
        else:
            byte = lo if lo % 2 == 0 else hi

    if byte > FP8_MAX_FINITE_BYTE:
        return Fp8Code(sign, 15, 6) if saturate else Fp8Code.from_byte(FP8_NAN_BYTE)
    return Fp8Code.from_byte((sign << 7) | byte)


def float_reference_mul(a: Fp8Code | int, b: Fp8Code | int, saturate: bool = True) -> Fp8Code:
    a, b = as_code(a), as_code(b)
    if a.is_nan or b.is_nan:
        return Fp8Code.from_byte(FP8_NAN_BYTE)
    return nearest_code(_value(a) * _value(b), saturate)


def float_reference_add(a: Fp8Code | int, b: Fp8Code | int, saturate: bool = True) -> Fp8Code:
    a, b = as_code(a), as_code(b)
    if a.is_nan or b.is_nan:
        return Fp8Code.from_byte(FP8_NAN_BYTE)
    return nearest_code(_value(a) + _value(b), saturate)
