"""Golden FP8 arithmetic: exact rational result, then a single RNE rounding."""

from functools import cache
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd

from core.abstract import Fp8Error
from core.constants import FP8_NAN_BYTE
from core.utils import atomic_write

from .code import Fp8Code, as_code, classify, decode, encode_rne, to_float

NAN = Fp8Code.from_byte(FP8_NAN_BYTE)


def oracle_mul(a: Fp8Code | int, b: Fp8Code | int, saturate: bool = True) -> Fp8Code:
    """Correctly rounded product (nan propagating, zero keeps `S_a xor S_b`)"""
    a, b = as_code(a), as_code(b)
    if a.is_nan or b.is_nan:
        return NAN
    return encode_rne(decode(a) * decode(b), saturate)


def oracle_add(a: Fp8Code | int, b: Fp8Code | int, saturate: bool = True) -> Fp8Code:
    """Correctly rounded sum (nan propagating, exact cancellation gives +0)"""
    a, b = as_code(a), as_code(b)
    if a.is_nan or b.is_nan:
        return NAN
    return encode_rne(decode(a) + decode(b), saturate)


@cache
def oracle_table(op: Literal["mul", "add"], saturate: bool = True) -> np.ndarray:
    """Result byte of every (a, b) byte pair

    Returns:
        np.ndarray: (256, 256) uint8, read-only
    """
    fn = {"mul": oracle_mul, "add": oracle_add}[op]
    table = np.empty((256, 256), dtype=np.uint8)
    for a in range(256):
        for b in range(256):
            table[a, b] = fn(a, b, saturate).byte
    table.setflags(write=False)
    return table


def ordinal(code: Fp8Code | int) -> int:
    """Position of a code on the number line (both zeros map to 0)

    Raises:
        Fp8Error: The code is nan
    """
    code = as_code(code)
    if code.is_nan:
        raise Fp8Error(f"nan has no position ({code})")
    magnitude = code.byte & 0x7F
    return -magnitude if code.sign else magnitude


def ulp_distance(a: Fp8Code | int, b: Fp8Code | int) -> int:
    """Number of representable steps between two codes"""
    return abs(ordinal(a) - ordinal(b))


def code_table() -> pd.DataFrame:
    """Every code with its fields, class and value"""
    rows = []
    for byte in range(256):
        code = Fp8Code.from_byte(byte)
        exact = None if code.is_nan else decode(code)
        rows.append(
            {
                "byte": byte,
                "hex": f"0x{byte:02X}",
                "sign": code.sign,
                "exponent": code.exponent,
                "mantissa": code.mantissa,
                "class": classify(code),
                "value": to_float(code),
                "exact": "nan" if exact is None else str(exact.to_fraction()),
            }
        )
    return pd.DataFrame(rows)


def dump_code_table(path: Path) -> Path:
    """Write the code table as a CSV fixture"""
    path = Path(path)
    atomic_write(path, code_table().to_csv(index=False))
    return path
