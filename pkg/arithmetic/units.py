"""Evaluation of the spiking FP8 units on codes."""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from core.abstract import CampaignSpecError
from fp8.code import Fp8Code, as_code
from spiking.circuit import Circuit
from spiking.neuron import SimConfig
from spiking.simulator import evaluate_many

from .adder import build_spatial_adder
from .bus import SpikeBus
from .multiplier import build_multiplier

POSSIBLE_UNITS = Literal["mul", "add"]

IDEAL = SimConfig()


@dataclass
class UnitRun:
    results: np.ndarray  # result bytes
    spike_counts: np.ndarray
    neurons: int

    @property
    def sparsity(self) -> np.ndarray:
        """Fraction of the neurons spiking, per evaluation"""
        return self.spike_counts / self.neurons


def unit_circuit(unit: POSSIBLE_UNITS, saturate: bool = True, sticky_extra: bool = True) -> Circuit:
    match unit:
        case "mul":
            return build_multiplier(saturate, sticky_extra)
        case "add":
            return build_spatial_adder(saturate)
        case _:
            raise CampaignSpecError(f"Unknown unit: {unit}")


def run_unit(
    circuit: Circuit,
    a,
    b,
    cfg: SimConfig = IDEAL,
    stream: tuple[int, ...] = (),
    progress: bool = False,
) -> UnitRun:
    """Evaluate a two-operand unit on broadcast byte arrays"""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.uint8), np.asarray(b, dtype=np.uint8))
    shape = a.shape
    spikes = np.hstack([SpikeBus.encode(a.ravel()), SpikeBus.encode(b.ravel())])
    outputs, counts = evaluate_many(circuit, spikes, cfg, stream, progress)
    return UnitRun(
        results=SpikeBus.decode(outputs).reshape(shape),
        spike_counts=counts.reshape(shape),
        neurons=len(circuit.neurons),
    )


def snn_mul(
    a: Fp8Code | int,
    b: Fp8Code | int,
    cfg: SimConfig = IDEAL,
    saturate: bool = True,
    sticky_extra: bool = True,
) -> Fp8Code:
    run = run_unit(build_multiplier(saturate, sticky_extra), as_code(a).byte, as_code(b).byte, cfg)
    return Fp8Code.from_byte(int(run.results))


def snn_add(
    a: Fp8Code | int, b: Fp8Code | int, cfg: SimConfig = IDEAL, saturate: bool = True
) -> Fp8Code:
    run = run_unit(build_spatial_adder(saturate), as_code(a).byte, as_code(b).byte, cfg)
    return Fp8Code.from_byte(int(run.results))


def snn_mul_batch(a, b, cfg: SimConfig = IDEAL, saturate: bool = True, sticky_extra: bool = True) -> np.ndarray:
    """Products of two broadcastable byte arrays"""
    return run_unit(build_multiplier(saturate, sticky_extra), a, b, cfg).results


def snn_add_batch(a, b, cfg: SimConfig = IDEAL, saturate: bool = True) -> np.ndarray:
    """Sums of two broadcastable byte arrays"""
    return run_unit(build_spatial_adder(saturate), a, b, cfg).results
