"""FP8 E4M3 codes and exact binary reals."""

import math
from dataclasses import dataclass
from fractions import Fraction

from core.abstract import Fp8Error
from core.constants import FP8_BIAS, POSSIBLE_CLASSES


@dataclass(frozen=True, order=True)
class Fp8Code:
    """One E4M3 code: 1 sign bit, 4 exponent bits, 3 mantissa bits

    No infinities; `E=15, M=7` is nan (either sign).
    """

    sign: int
    exponent: int
    mantissa: int

    def __post_init__(self):
        if self.sign not in (0, 1) or not 0 <= self.exponent <= 15 or not 0 <= self.mantissa <= 7:
            raise Fp8Error(f"Malformed FP8 code: {self.sign}/{self.exponent}/{self.mantissa}")

    @classmethod
    def from_byte(cls, byte: int) -> "Fp8Code":
        if not 0 <= int(byte) <= 0xFF:
            raise Fp8Error(f"FP8 byte out of range: {byte}")
        byte = int(byte)
        return cls(byte >> 7, (byte >> 3) & 0xF, byte & 0x7)

    @property
    def byte(self) -> int:
        return (self.sign << 7) | (self.exponent << 3) | self.mantissa

    @property
    def is_nan(self) -> bool:
        return self.exponent == 15 and self.mantissa == 7

    @property
    def is_zero(self) -> bool:
        return self.exponent == 0 and self.mantissa == 0

    @property
    def cls(self) -> POSSIBLE_CLASSES:
        return classify(self)

    def __str__(self) -> str:
        return f"0x{self.byte:02X}"


def as_code(code: "Fp8Code | int") -> Fp8Code:
    """Accept either a code or its byte"""
    return code if isinstance(code, Fp8Code) else Fp8Code.from_byte(code)


def classify(code: Fp8Code | int) -> POSSIBLE_CLASSES:
    code = as_code(code)
    if code.is_nan:
        return "nan"
    if code.exponent == 0:
        return "zero" if code.mantissa == 0 else "subnormal"
    return "normal"


def effective_exponent(code: Fp8Code | int) -> int:
    """Biased exponent used for alignment (subnormals share the exponent of E=1)"""
    code = as_code(code)
    return 1 if code.exponent == 0 else code.exponent


@dataclass(frozen=True)
class ExactReal:
    """`(-1)^sign * significand * 2^exponent`, canonical

    The significand is odd, or zero with a zero exponent; the sign of a zero is kept.
    """

    sign: int
    significand: int
    exponent: int

    def __post_init__(self):
        if self.significand < 0:
            raise ValueError("significand must be non negative")
        sig, exp = self.significand, self.exponent
        if sig == 0:
            exp = 0
        else:
            while sig % 2 == 0:
                sig //= 2
                exp += 1
        object.__setattr__(self, "significand", sig)
        object.__setattr__(self, "exponent", exp)

    @property
    def is_zero(self) -> bool:
        return self.significand == 0

    @classmethod
    def from_float(cls, value: float) -> "ExactReal":
        """Exact value of a finite double"""
        if not math.isfinite(value):
            raise Fp8Error(f"Not a finite value: {value}")
        sign = int(math.copysign(1.0, value) < 0)
        numerator, denominator = abs(value).as_integer_ratio()
        return cls(sign, numerator, 1 - denominator.bit_length())

    def to_fraction(self) -> Fraction:
        value = Fraction(self.significand) * Fraction(2) ** self.exponent
        return -value if self.sign else value

    def __mul__(self, other: "ExactReal") -> "ExactReal":
        return ExactReal(
            self.sign ^ other.sign,
            self.significand * other.significand,
            self.exponent + other.exponent,
        )

    def __add__(self, other: "ExactReal") -> "ExactReal":
        base = min(self.exponent, other.exponent)
        a = self.significand << (self.exponent - base)
        b = other.significand << (other.exponent - base)
        total = (-a if self.sign else a) + (-b if other.sign else b)
        if total == 0:
            # exact cancellation is +0 unless both addends are negative
            return ExactReal(self.sign & other.sign, 0, 0)
        return ExactReal(int(total < 0), abs(total), base)


@dataclass(frozen=True)
class RoundFlags:
    """Guard information of a truncated significand

    Args:
        lsb (int): L, the last kept bit
        round_bit (int): R, the first dropped bit
        sticky (int): S, the OR of every other dropped bit
    """

    lsb: int
    round_bit: int
    sticky: int

    @property
    def round_up(self) -> bool:
        """Round-half-to-even decision `R and (S or L)`"""
        return bool(self.round_bit and (self.sticky or self.lsb))


def decode(code: Fp8Code | int) -> ExactReal:
    """Exact value of a code

    Raises:
        Fp8Error: The code is nan
    """
    code = as_code(code)
    if code.is_nan:
        raise Fp8Error(f"Can not decode nan ({code})")
    hidden = 0 if code.exponent == 0 else 8
    return ExactReal(code.sign, hidden + code.mantissa, effective_exponent(code) - FP8_BIAS - 3)


def to_float(code: Fp8Code | int) -> float:
    code = as_code(code)
    if code.is_nan:
        return float("nan")
    value = float(decode(code).to_fraction())
    return -0.0 if code.sign and value == 0 else value


def split_rne(significand: int, shift: int) -> tuple[int, RoundFlags]:
    """Drop `shift` low bits of a significand

    Returns:
        tuple[int, RoundFlags]: (kept bits, flags)
    """
    if shift <= 0:
        kept = significand << -shift
        return kept, RoundFlags(kept & 1, 0, 0)
    kept = significand >> shift
    rest = significand & ((1 << shift) - 1)
    half = 1 << (shift - 1)
    return kept, RoundFlags(kept & 1, int(rest >= half), int(rest & (half - 1) != 0))


def encode_rne(x: ExactReal, saturate: bool = True) -> Fp8Code:
    """Round an exact real to the nearest code, ties to even

    Values below the subnormal range underflow to a signed zero. Overflow
    saturates to +-448 or, with `saturate=False`, becomes the canonical nan.

    Args:
        x (ExactReal): Value
        saturate (bool, optional): Saturating overflow. Defaults to True.

    Returns:
        Fp8Code: Rounded code
    """
    if x.is_zero:
        return Fp8Code(x.sign, 0, 0)

    top = x.significand.bit_length() - 1 + x.exponent
    quantum = max(top, 1 - FP8_BIAS) - 3
    n, flags = split_rne(x.significand, quantum - x.exponent)
    if flags.round_up:
        n += 1
    if n == 16:
        n, quantum = 8, quantum + 1

    if n >= 8:
        exponent, mantissa = quantum + FP8_BIAS + 3, n - 8
    else:
        exponent, mantissa = 0, n

    if exponent > 15 or (exponent == 15 and mantissa == 7):
        return Fp8Code(x.sign, 15, 6) if saturate else Fp8Code(0, 15, 7)
    return Fp8Code(x.sign, exponent, mantissa)


def encode_float(value: float, saturate: bool = True) -> Fp8Code:
    """Quantize a double (nan gives nan, infinities overflow)"""
    if math.isnan(value):
        return Fp8Code(0, 15, 7)
    if math.isinf(value):
        sign = int(value < 0)
        return Fp8Code(sign, 15, 6) if saturate else Fp8Code(0, 15, 7)
    return encode_rne(ExactReal.from_float(value), saturate)
