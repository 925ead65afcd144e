import json

import numpy as np
import pytest

from core.abstract import CampaignSpecError
from robustness import ScanSpec, beta_scan, sigma_scan, target_task

GATES = ["AND", "OR", "NOT", "XOR"]
SEEDS = [2024, 7, 99]

# 2000 trials per row: above the clip floor the weakest gate flips in a few
# percent of the trials, and below it no flip is possible at any trial count.
TRIALS = 2000


@pytest.fixture(scope="module")
def beta_result():
    spec = ScanSpec(
        targets=[*GATES, "MUX2", "spatial-adder", "temporal-reference"],
        beta_grid=[1.0, 0.5, 0.1, 0.01],
        adder_trials=1,
    )
    return beta_scan(spec)


@pytest.fixture(scope="module", params=SEEDS)
def sigma_result(request):
    spec = ScanSpec(targets=GATES, sigma_grid=[0.0, 0.15, 0.3], trials=TRIALS, seed=request.param)
    return sigma_scan(spec)


@pytest.mark.parametrize("target", [*GATES, "MUX2", "spatial-adder"])
@pytest.mark.parametrize("beta", [1.0, 0.5, 0.1, 0.01])
def test_spatial_targets_ignore_leakage(beta_result, target, beta):
    assert beta_result.accuracy(target, beta) == 1.0


def test_leakage_breaks_the_temporal_reference(beta_result):
    assert beta_result.accuracy("temporal-reference", 1.0) == 1.0
    assert beta_result.accuracy("temporal-reference", 0.5) < 1.0


@pytest.mark.parametrize("target", GATES)
def test_no_failure_below_the_clipped_margin(sigma_result, target):
    assert sigma_result.accuracy(target, 0.0) == 1.0
    assert sigma_result.accuracy(target, 0.15) == 1.0


def test_default_trial_count_up_to_the_threshold():
    spec = ScanSpec(targets=GATES, sigma_grid=[0.1, 0.15], seed=1)
    assert spec.trials == 10_000
    result = sigma_scan(spec)
    assert all(p.accuracy == 1.0 for p in result.points)
    assert {p.trials for p in result.points if p.target == "NOT"} == {20_000}


def test_clip_floor(sigma_result):
    assert sigma_result.clip_floor == pytest.approx(0.5 / 3)
    assert 0.15 < sigma_result.clip_floor < 0.3
    unclipped = ScanSpec(targets=["AND"], sigma_grid=[0.1], trials=1, noise_clip=None)
    assert sigma_scan(unclipped).clip_floor is None


def test_clipped_gates_first_fail_together(sigma_result):
    # every gate has the same margin, so the clip alone sets the first failing level
    assert set(sigma_result.first_failure_sigma.values()) == {0.3}


def test_xor_is_the_least_accurate_gate(sigma_result):
    xor = sigma_result.accuracy("XOR", 0.3)
    assert xor < 1.0
    for gate in ("AND", "OR", "NOT"):
        assert xor < sigma_result.accuracy(gate, 0.3)


def test_without_the_clip_xor_flips_most():
    spec = ScanSpec(
        targets=["AND", "XOR"], sigma_grid=[0.15], trials=10_000, seed=1, noise_clip=None
    )
    result = sigma_scan(spec)
    failures = {p.target: p.trials - p.passes for p in result.points}
    assert failures["XOR"] > failures["AND"]


def test_accuracy_does_not_grow_with_noise():
    grid = [0.0, 0.1, 0.15, 0.2, 0.3, 0.5]
    results = [
        sigma_scan(ScanSpec(targets=GATES, sigma_grid=grid, trials=TRIALS, seed=seed))
        for seed in SEEDS
    ]
    mean = np.array(
        [[np.mean([r.accuracy(t, s) for r in results]) for s in grid] for t in GATES]
    )
    # seed averaged, a rise within sampling noise is tolerated
    assert (np.diff(mean, axis=1) <= 0.01).all()
    assert (mean[:, -1] < mean[:, 0]).all()


def test_adder_survives_small_noise():
    spec = ScanSpec(targets=["spatial-adder"], sigma_grid=[0.15], adder_trials=3)
    assert sigma_scan(spec).accuracy("spatial-adder", 0.15) == 1.0


def test_scans_are_reproducible():
    spec = ScanSpec(targets=["XOR"], sigma_grid=[0.4], trials=500, seed=9)
    assert sigma_scan(spec).points == sigma_scan(spec).points


def test_series_and_frame(sigma_result):
    series = sigma_result.series()
    assert series["AND"]["x"] == [0.0, 0.15, 0.3]
    frame = sigma_result.to_frame()
    assert len(frame) == 12
    assert frame["accuracy"].between(0, 1).all()


class TestScanSpec:
    def test_empty_targets(self):
        with pytest.raises(CampaignSpecError):
            ScanSpec.from_document({"targets": []})

    def test_unknown_target(self):
        with pytest.raises(CampaignSpecError):
            ScanSpec.from_document({"targets": ["NAND"]})

    def test_duplicate_targets(self):
        with pytest.raises(CampaignSpecError):
            ScanSpec.from_document({"targets": ["AND", "AND"]})

    def test_invalid_beta(self):
        with pytest.raises(CampaignSpecError):
            ScanSpec.from_document({"targets": ["AND"], "beta_grid": [1.5]})

    def test_from_file(self, tmp_path):
        path = tmp_path / "scan.json"
        path.write_text(json.dumps({"name": "tiny", "targets": ["OR"], "trials": 10}))
        spec = ScanSpec.from_file(path)
        assert (spec.name, spec.trials) == ("tiny", 10)

    def test_unknown_task(self):
        with pytest.raises(CampaignSpecError):
            target_task("NAND")
