from functools import cache

import numpy as np

from arithmetic.bus import SpikeBus
from core.constants import FP8_ONE_BYTE
from spiking.circuit import Circuit, CircuitBuilder
from spiking.neuron import SimConfig
from spiking.simulator import evaluate_many

from .engine import POSSIBLE_ENGINES


@cache
def build_threshold_activation() -> Circuit:
    """Fires when the FP8 input is strictly positive

    A balanced OR tree over the seven magnitude bits (three levels) gated by
    `NOT(sign)`: 8 neurons, 4 levels.
    """
    b = CircuitBuilder("threshold-activation")
    x = SpikeBus("x").declare(b)
    fires = b.and_(b.not_(x.sign), b.or_reduce([*x.exponent, *x.mantissa]))
    return b.build({"spike": fires})


def spike_activation(
    codes, engine: POSSIBLE_ENGINES = "spiking", cfg: SimConfig = SimConfig()
) -> np.ndarray:
    """1.0 where the input is positive, else +0 (a nan with clear sign bit counts as positive)"""
    codes = np.asarray(codes, dtype=np.uint8)
    if engine == "spiking":
        outputs, _ = evaluate_many(build_threshold_activation(), SpikeBus.encode(codes.ravel()), cfg)
        fires = outputs[:, 0].reshape(codes.shape).astype(bool)
    else:
        fires = (codes < 0x80) & (codes != 0)
    return np.where(fires, np.uint8(FP8_ONE_BYTE), np.uint8(0)).astype(np.uint8)
