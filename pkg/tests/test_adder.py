import itertools

import numpy as np
import pytest

from arithmetic import (
    barrel_shift,
    build_barrel_shifter,
    build_leading_zero_detector,
    build_rne_rounder,
    leading_zero_detect,
    load_corner_suite,
    rne_round,
    run_unit,
    snn_add,
    snn_add_batch,
)
from core.abstract import DataSourceError
from core.constants import (
    ADDER_DEPTH,
    ADDER_NEURONS,
    QUOTED_ADDER_NEURONS,
    QUOTED_SHIFTER_NEURONS,
    RESOURCE_TOLERANCE,
)
from fp8 import RoundFlags, oracle_table, to_float
from spiking import SimConfig, evaluate_batch
from spiking.circuit import circuit_stats

ALL = np.arange(256, dtype=np.uint8)
IDEAL = SimConfig()


def _msb_first(values: np.ndarray, width: int) -> np.ndarray:
    return ((values[:, None] >> np.arange(width - 1, -1, -1)) & 1).astype(np.uint8)


def _lsb_first(values: np.ndarray, width: int) -> np.ndarray:
    return ((values[:, None] >> np.arange(width)) & 1).astype(np.uint8)


def test_every_pair_matches_the_oracle(adder):
    run = run_unit(adder, ALL[:, None], ALL[None, :])
    np.testing.assert_array_equal(run.results, oracle_table("add"))


def test_nan_overflow_variant():
    results = snn_add_batch(ALL[:, None], ALL[None, :], saturate=False)
    np.testing.assert_array_equal(results, oracle_table("add", saturate=False))


def test_resources(adder):
    stats = circuit_stats(adder)
    assert stats["neurons"] == ADDER_NEURONS
    assert stats["depth"] == ADDER_DEPTH
    assert abs(ADDER_NEURONS - QUOTED_ADDER_NEURONS) <= RESOURCE_TOLERANCE * QUOTED_ADDER_NEURONS
    assert set(stats["stages"]) >= {"compare", "align", "add", "normalize", "round", "special"}
    assert sum(stats["stages"].values()) == stats["neurons"]


def test_alignment_shifter_size(adder):
    stages = circuit_stats(adder, stage_level=None)["stages"]
    assert stages["align/shifter"] == QUOTED_SHIFTER_NEURONS == 192


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (0x38, 0x38, 2.0),
        (0x38, 0xB8, 0.0),
        (0x7E, 0x7E, 448.0),
        (0x01, 0x01, 2.0**-8),
        (0x08, 0x87, 2.0**-9),
    ],
)
def test_examples(a, b, expected):
    assert to_float(snn_add(a, b)) == expected


def test_cancellation_gives_positive_zero():
    assert snn_add(0x38, 0xB8).byte == 0x00
    assert snn_add(0xB8, 0x38).byte == 0x00
    assert snn_add(0x80, 0x80).byte == 0x80


def test_corner_suite(adder):
    cases = load_corner_suite()
    a = np.array([c.a for c in cases], dtype=np.uint8)
    b = np.array([c.b for c in cases], dtype=np.uint8)
    expected = np.array([c.expected().byte for c in cases], dtype=np.uint8)
    np.testing.assert_array_equal(run_unit(adder, a, b).results, expected)
    assert {c.category for c in cases} >= {"cancellation", "tie", "saturation", "nan"}


def test_corner_suite_errors(tmp_path):
    with pytest.raises(DataSourceError):
        load_corner_suite(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text('{"cases": [{"a": "0x100", "b": "0x00"}]}')
    with pytest.raises(DataSourceError):
        load_corner_suite(bad)


def test_small_noise_does_not_change_sums(adder):
    rng = np.random.default_rng(4)
    a, b = rng.integers(0, 256, size=(2, 4096), dtype=np.uint8)
    run = run_unit(adder, a, b, SimConfig(sigma=0.15, seed=8), stream=(5,))
    np.testing.assert_array_equal(run.results, oracle_table("add")[a, b])


class TestStages:
    def test_barrel_shifter_exhaustive(self):
        circuit = build_barrel_shifter()
        rows = np.array(list(itertools.product(range(4096), range(16))))
        values, amounts = rows[:, 0], rows[:, 1]
        inputs = np.hstack([_msb_first(values, 12), _lsb_first(amounts, 4)])
        outputs = evaluate_batch(circuit, inputs, IDEAL).outputs

        shifted = np.where(amounts < 12, values >> np.minimum(amounts, 11), 0)
        dropped = values & ((1 << np.minimum(amounts, 12)) - 1)
        np.testing.assert_array_equal(outputs[:, :12], _msb_first(shifted, 12))
        np.testing.assert_array_equal(outputs[:, 12], (dropped != 0).astype(np.uint8))

    def test_barrel_shift_helper(self):
        lines, sticky = barrel_shift([1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 1], 3)
        assert lines == [0, 0, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0]
        assert sticky == 1

    def test_leading_zero_detector_exhaustive(self):
        circuit = build_leading_zero_detector()
        values = np.arange(4096)
        outputs = evaluate_batch(circuit, _msb_first(values, 12), IDEAL).outputs
        counts = (outputs[:, :4].astype(int) << np.arange(4)).sum(axis=1)
        expected = np.array([12 - int(v).bit_length() for v in values])
        nonzero = values != 0
        np.testing.assert_array_equal(counts[nonzero], expected[nonzero])
        np.testing.assert_array_equal(outputs[:, 4], (~nonzero).astype(np.uint8))

    def test_leading_zero_helper(self):
        assert leading_zero_detect([0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0]) == (3, 0)
        assert leading_zero_detect([0] * 12)[1] == 1

    def test_rounder_exhaustive(self):
        circuit = build_rne_rounder()
        rows = np.array(list(itertools.product(range(16), (0, 1), (0, 1))))
        m, r, s = rows.T
        inputs = np.hstack([_lsb_first(m, 4), r[:, None], s[:, None]])
        outputs = evaluate_batch(circuit, inputs, IDEAL).outputs
        total = m + (r & (s | (m & 1)))
        np.testing.assert_array_equal(outputs[:, :4], _lsb_first(total & 15, 4))
        np.testing.assert_array_equal(outputs[:, 4], total >> 4)

    def test_rne_round_helper(self):
        assert rne_round(RoundFlags(lsb=0, round_bit=1, sticky=0), 0b0110) == (0b0110, 0)
        assert rne_round(RoundFlags(lsb=1, round_bit=1, sticky=0), 0b0111) == (0b1000, 0)
        assert rne_round(RoundFlags(lsb=1, round_bit=1, sticky=0), 0b1111) == (0, 1)
        with pytest.raises(ValueError):
            rne_round(RoundFlags(lsb=1, round_bit=0, sticky=0), 0b0110)
