import numpy as np
import pytest

from arithmetic import run_unit, snn_mul, snn_mul_batch, unit_circuit
from core.constants import (
    ADDER_DEPTH,
    MULTIPLIER_DEPTH,
    MULTIPLIER_NEURONS,
    QUOTED_MULTIPLIER_DEPTH,
    QUOTED_MULTIPLIER_NEURONS,
    RESOURCE_TOLERANCE,
)
from fp8 import oracle_table, to_float
from spiking import SimConfig
from spiking.circuit import circuit_stats

ALL = np.arange(256, dtype=np.uint8)


def test_every_pair_matches_the_oracle(multiplier):
    run = run_unit(multiplier, ALL[:, None], ALL[None, :])
    np.testing.assert_array_equal(run.results, oracle_table("mul"))


def test_nan_overflow_variant():
    results = snn_mul_batch(ALL[:, None], ALL[None, :], saturate=False)
    np.testing.assert_array_equal(results, oracle_table("mul", saturate=False))


def test_neuron_count(multiplier):
    stats = circuit_stats(multiplier)
    assert stats["neurons"] == MULTIPLIER_NEURONS
    assert stats["depth"] == MULTIPLIER_DEPTH
    assert len(multiplier.inputs) == 16
    assert len(multiplier.outputs) == 8


def test_neuron_count_is_close_to_the_quoted_figure(multiplier):
    deviation = abs(circuit_stats(multiplier)["neurons"] - QUOTED_MULTIPLIER_NEURONS)
    assert deviation <= RESOURCE_TOLERANCE * QUOTED_MULTIPLIER_NEURONS


def test_depth_stays_above_the_quoted_bound(multiplier):
    # the serial adders keep the datapath above the quoted bound
    stages = circuit_stats(multiplier)["stages"]
    assert MULTIPLIER_DEPTH > QUOTED_MULTIPLIER_DEPTH
    assert MULTIPLIER_DEPTH < ADDER_DEPTH
    assert {"exponent", "mantissa", "normalize", "round"} <= set(stages)


def test_sticky_extra_costs_a_fixed_number_of_neurons(multiplier):
    bare = circuit_stats(unit_circuit("mul", sticky_extra=False))["neurons"]
    stages = circuit_stats(multiplier)["stages"]
    assert MULTIPLIER_NEURONS - bare == stages["sticky-extra"]


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (0x38, 0x38, 1.0),
        (0x3C, 0xBC, -2.25),
        (0x7E, 0x7E, 448.0),
        (0x01, 0x01, 0.0),
        (0x01, 0x7D, 0.8125),
        (0x04, 0x40, 2.0**-6),
    ],
)
def test_examples(a, b, expected):
    assert to_float(snn_mul(a, b)) == expected


def test_product_lsb_is_not_lost():
    # 2^-9 * 416: the product LSB ends on the mantissa LSB after a shift of 9
    assert snn_mul(0x01, 0x7D).byte == 0x35
    assert snn_mul(0x01, 0x7D, sticky_extra=False).byte == 0x34


def test_without_the_correction_some_products_are_wrong():
    circuit = unit_circuit("mul", sticky_extra=False)
    run = run_unit(circuit, ALL[:, None], ALL[None, :])
    wrong = run.results != oracle_table("mul")
    assert wrong.any()
    # 1.625 * 1.625: the dropped product bit is the only sticky bit of a tie
    assert wrong[0x3D, 0x3D]


def test_leakage_does_not_change_products(multiplier):
    ideal = run_unit(multiplier, ALL[:, None], ALL[None, :])
    leaky = run_unit(multiplier, ALL[:, None], ALL[None, :], SimConfig(beta=0.01, mode="lif"))
    np.testing.assert_array_equal(leaky.results, ideal.results)
    np.testing.assert_array_equal(leaky.results, oracle_table("mul"))


def test_small_noise_does_not_change_products(multiplier):
    rng = np.random.default_rng(2)
    a, b = rng.integers(0, 256, size=(2, 4096), dtype=np.uint8)
    run = run_unit(multiplier, a, b, SimConfig(sigma=0.15, seed=3), stream=(9,))
    np.testing.assert_array_equal(run.results, oracle_table("mul")[a, b])


def test_sparsity_is_a_fraction(multiplier):
    run = run_unit(multiplier, ALL, 0x38)
    assert ((run.sparsity >= 0) & (run.sparsity <= 1)).all()
    assert run.sparsity.mean() > 0
