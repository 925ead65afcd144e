"""Leakage (beta) and noise (sigma) scans of gates and arithmetic units."""

import itertools
from dataclasses import dataclass, field
from functools import cache
from pathlib import Path
from typing import Annotated, Callable, get_args

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from tqdm import tqdm

from arithmetic.adder import build_spatial_adder
from arithmetic.bus import SpikeBus
from arithmetic.corner_cases import load_corner_suite
from core.abstract import CampaignSpecError
from core.constants import (
    DEFAULT_ADDER_TRIALS,
    DEFAULT_BETA_GRID,
    DEFAULT_NOISE_CLIP,
    DEFAULT_SIGMA_GRID,
    DEFAULT_TRIALS,
    GATE_MARGIN,
    POSSIBLE_TARGETS,
)
from core.utils import Printter, load_document
from spiking.circuit import Circuit, CircuitBuilder
from spiking.gates import GATE_PORTS, TRUTH_TABLES, GateKind, build_gate
from spiking.neuron import SimConfig
from spiking.simulator import evaluate_batch, evaluate_temporal_reference

display = Printter("SCAN")

TARGETS: tuple[str, ...] = get_args(POSSIBLE_TARGETS)
"""Every scan target; its position keys the noise streams."""

TEMPORAL_THRESHOLD = 2.0
"""Threshold of the reference accumulator: one output spike every two input spikes."""

TEMPORAL_STEPS = 4


class ScanSpec(BaseModel):
    """Robustness campaign description (JSON or TOML)"""

    model_config = ConfigDict(extra="forbid")

    name: str = "scan"
    targets: list[POSSIBLE_TARGETS] = Field(min_length=1)
    beta_grid: list[Annotated[float, Field(gt=0, le=1)]] = Field(
        default_factory=lambda: list(DEFAULT_BETA_GRID), min_length=1
    )
    sigma_grid: list[Annotated[float, Field(ge=0)]] = Field(
        default_factory=lambda: list(DEFAULT_SIGMA_GRID), min_length=1
    )
    trials: int = Field(DEFAULT_TRIALS, gt=0)
    adder_trials: int = Field(DEFAULT_ADDER_TRIALS, gt=0)
    seed: int = 0
    noise_clip: Annotated[float, Field(gt=0)] | None = DEFAULT_NOISE_CLIP

    @field_validator("targets")
    @classmethod
    def unique_targets(cls, targets: list[str]) -> list[str]:
        if len(set(targets)) != len(targets):
            raise ValueError("targets must be unique")
        return targets

    @classmethod
    def from_document(cls, document: dict) -> "ScanSpec":
        try:
            return cls.model_validate(document)
        except ValidationError as e:
            raise CampaignSpecError(f"Invalid scan spec: {e}") from e

    @classmethod
    def from_file(cls, path: Path) -> "ScanSpec":
        return cls.from_document(load_document(path))


@dataclass(frozen=True)
class ScanPoint:
    target: str
    kind: str
    beta: float
    sigma: float
    trials: int
    passes: int

    @property
    def accuracy(self) -> float:
        return self.passes / self.trials if self.trials else 0.0


@dataclass
class ScanResult:
    kind: str
    spec: ScanSpec
    points: list[ScanPoint] = field(default_factory=list)

    def accuracy(self, target: str, value: float) -> float:
        for p in self.points:
            if p.target == target and self._x(p) == value:
                return p.accuracy
        raise KeyError(f"No point {target} @ {value}")

    @property
    def first_failure_sigma(self) -> dict[str, float | None]:
        """Smallest noise level with accuracy below 1, per target"""
        failures: dict[str, float | None] = {t: None for t in self.spec.targets}
        for p in sorted(self.points, key=lambda p: p.sigma):
            if p.accuracy < 1.0 and failures.get(p.target) is None:
                failures[p.target] = p.sigma
        return failures

    @property
    def clip_floor(self) -> float | None:
        """Smallest sigma at which clipped noise can push a neuron across the gate margin

        Below it no spatial target can fail, so their first failures sit at or above
        this level whatever the gate. `None` for unclipped noise.
        """
        clip = self.spec.noise_clip
        return None if clip is None else GATE_MARGIN / clip

    def _x(self, p: ScanPoint) -> float:
        return p.beta if self.kind == "beta" else p.sigma

    def series(self) -> dict[str, dict[str, list[float]]]:
        """Plot data: x (beta or sigma) and accuracy per target"""
        out: dict[str, dict[str, list[float]]] = {}
        for p in self.points:
            s = out.setdefault(p.target, {"x": [], "y": []})
            s["x"].append(self._x(p))
            s["y"].append(p.accuracy)
        return out

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{**p.__dict__, "accuracy": p.accuracy} for p in self.points],
            columns=["target", "kind", "beta", "sigma", "trials", "passes", "accuracy"],
        )


@dataclass(frozen=True)
class _Task:
    """Rows of one target: input patterns and the ideal outputs

    `run(inputs, cfg, rng)` evaluates a batch of patterns and returns the outputs.
    """

    inputs: np.ndarray
    expected: np.ndarray
    run: Callable[[np.ndarray, SimConfig, np.random.Generator | None], np.ndarray]
    trials_key: str = "trials"


def _spatial_task(circuit: Circuit, inputs: np.ndarray, expected: np.ndarray, key="trials") -> _Task:
    def run(batch, cfg, rng):
        return evaluate_batch(circuit, batch, cfg, rng).outputs

    return _Task(inputs, expected, run, key)


@cache
def build_temporal_accumulator() -> Circuit:
    """Single neuron integrating its input over time (threshold 2)"""
    b = CircuitBuilder("temporal-accumulator")
    x = b.input("x")
    return b.build({"y": b.neuron(TEMPORAL_THRESHOLD, [(x, 1.0)], "acc")})


@cache
def target_task(target: str) -> _Task:
    """Build the rows of a target

    Raises:
        CampaignSpecError: Unknown target
    """
    if target in GateKind.__members__:
        kind = GateKind(target)
        n_in = len(GATE_PORTS[kind][0])
        rows = np.array(list(itertools.product((0, 1), repeat=n_in)), dtype=np.uint8)
        expected = np.array([TRUTH_TABLES[kind](*row) for row in rows], dtype=np.uint8)
        return _spatial_task(build_gate(kind).circuit, rows, expected)

    match target:
        case "spatial-adder":
            cases = load_corner_suite()
            a = np.array([c.a for c in cases], dtype=np.uint8)
            b = np.array([c.b for c in cases], dtype=np.uint8)
            expected = np.array([c.expected().byte for c in cases], dtype=np.uint8)
            rows = np.hstack([SpikeBus.encode(a), SpikeBus.encode(b)])
            return _spatial_task(build_spatial_adder(), rows, SpikeBus.encode(expected), "adder_trials")
        case "temporal-reference":
            circuit = build_temporal_accumulator()
            streams = np.array(
                list(itertools.product((0, 1), repeat=TEMPORAL_STEPS)), dtype=np.uint8
            )[:, :, None]
            expected = evaluate_temporal_reference(circuit, streams, SimConfig())

            def run(batch, cfg, rng):
                return evaluate_temporal_reference(circuit, batch, cfg, rng)

            return _Task(streams, expected, run)
        case _:
            raise CampaignSpecError(f"Unknown scan target: {target}")


def _score(task: _Task, cfg: SimConfig, trials: int, stream: tuple[int, int]) -> tuple[int, int]:
    """(passes, trials) of one target at one point; each row gets its own noise stream"""
    per_row = trials if cfg.sigma > 0 else 1
    passes = total = 0
    for r, (row, expected) in enumerate(zip(task.inputs, task.expected)):
        batch = np.repeat(row[None], per_row, axis=0)
        rng = cfg.rng(*stream, r) if cfg.sigma > 0 else None
        outputs = task.run(batch, cfg, rng)
        ok = (outputs == expected[None]).reshape(per_row, -1).all(axis=1)
        passes += int(ok.sum())
        total += per_row
    return passes, total


def _scan(spec: ScanSpec, kind: str, configs: list[SimConfig]) -> ScanResult:
    result = ScanResult(kind=kind, spec=spec)
    jobs = [(t, i, cfg) for t in spec.targets for i, cfg in enumerate(configs)]
    for target, point, cfg in tqdm(jobs, desc=f"{kind} scan", disable=Printter.quiet, leave=False):
        task = target_task(target)
        trials = getattr(spec, task.trials_key)
        passes, total = _score(task, cfg, trials, (TARGETS.index(target), point))
        result.points.append(ScanPoint(target, kind, cfg.retention, cfg.sigma, total, passes))
    return result


def beta_scan(spec: ScanSpec) -> ScanResult:
    """Accuracy of every target for each retention factor, noiseless"""
    configs = [SimConfig(beta=beta, mode="lif", seed=spec.seed) for beta in spec.beta_grid]
    result = _scan(spec, "beta", configs)
    display(f"Beta scan '{spec.name}' done ({len(result.points)} points)", category="info")
    return result


def sigma_scan(spec: ScanSpec) -> ScanResult:
    """Accuracy of every target for each noise level, without leakage"""
    configs = [
        SimConfig(sigma=sigma, seed=spec.seed, noise_clip=spec.noise_clip)
        for sigma in spec.sigma_grid
    ]
    result = _scan(spec, "sigma", configs)
    display(f"Sigma scan '{spec.name}' done ({len(result.points)} points)", category="info")
    return result
