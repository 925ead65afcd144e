"""FP8 operands as parallel spike lines."""

from dataclasses import dataclass

import numpy as np

from spiking.circuit import CircuitBuilder, Signal

FIELD_LABELS = ("s", "e3", "e2", "e1", "e0", "m2", "m1", "m0")
"""Line labels of one FP8 bus, most significant first (same order as the byte)."""

_WEIGHTS = np.array([1 << (7 - i) for i in range(8)], dtype=np.uint16)


@dataclass(frozen=True)
class Fp8Lines:
    """Signals of one FP8 value inside a builder (exponent and mantissa LSB first)"""

    sign: Signal
    exponent: list[Signal]
    mantissa: list[Signal]

    def msb_first(self) -> list[Signal]:
        return [self.sign, *reversed(self.exponent), *reversed(self.mantissa)]


@dataclass(frozen=True)
class SpikeBus:
    """Ordered named lines carrying one FP8 operand

    Line `i` carries bit `7 - i` of the byte.
    """

    prefix: str

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f"{self.prefix}_{label}" for label in FIELD_LABELS)

    def declare(self, builder: CircuitBuilder) -> Fp8Lines:
        """Create the eight primary inputs of the bus"""
        s, e3, e2, e1, e0, m2, m1, m0 = (builder.input(n) for n in self.names)
        return Fp8Lines(s, [e0, e1, e2, e3], [m0, m1, m2])

    def outputs(self, lines: Fp8Lines) -> dict[str, Signal]:
        return dict(zip(self.names, lines.msb_first()))

    @staticmethod
    def encode(codes) -> np.ndarray:
        """Bytes -> (n, 8) spikes"""
        codes = np.asarray(codes, dtype=np.uint8).reshape(-1, 1)
        return np.unpackbits(codes, axis=1)

    @staticmethod
    def decode(spikes) -> np.ndarray:
        """(n, 8) spikes -> bytes"""
        spikes = np.asarray(spikes, dtype=np.uint16)
        return (spikes @ _WEIGHTS).astype(np.uint8)
