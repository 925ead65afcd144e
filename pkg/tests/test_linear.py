import numpy as np
import pytest

from campaigns.bench import random_layer
from core.abstract import DataSourceError, ShapeError
from linear import (
    Fp8Tensor,
    LatencyModel,
    latency_report,
    linear_forward,
    nonassociativity_audit,
    reduce_sequential,
    reduce_tree,
    spike_activation,
)
from linear.activation import build_threshold_activation
from linear.engine import tree_levels
from spiking import SimConfig
from spiking.circuit import circuit_stats


class TestLatency:
    def test_unit_costs_at_256(self):
        report = latency_report(256)
        assert (report.unit_tree, report.unit_sequential) == (9, 256)
        assert report.unit_speedup == pytest.approx(256 / 9)
        assert report.circuit_speedup >= 17

    def test_single_input(self):
        report = latency_report(1)
        assert report.unit_tree == report.unit_sequential == 1
        assert report.unit_speedup == 1

    @pytest.mark.parametrize("d_in", range(1, 65))
    def test_tree_levels(self, d_in):
        assert tree_levels(d_in) == int(np.ceil(np.log2(d_in)))
        assert LatencyModel().steps(d_in, "sequential") == d_in

    @pytest.mark.parametrize("d_in", range(1, 257))
    def test_speedup_law(self, d_in):
        report = latency_report(d_in)
        assert report.unit_speedup == pytest.approx(d_in / (1 + tree_levels(d_in)))

    def test_speedup_grows_over_powers_of_two(self):
        speedups = [latency_report(2**k).unit_speedup for k in range(9)]
        assert speedups == sorted(speedups)
        # the ceiling makes it dip right after a power of two
        assert latency_report(5).unit_speedup < latency_report(4).unit_speedup

    def test_circuit_costs(self):
        model = LatencyModel(t_mul=10, t_add=20)
        assert model.steps(8, "tree") == 70
        assert model.steps(8, "sequential") == 150

    def test_invalid_length(self):
        with pytest.raises(ShapeError):
            LatencyModel().steps(0)


class TestReductions:
    def test_tree_pairs_neighbours(self):
        calls = []

        def add(a, b):
            calls.append((a.tolist(), b.tolist()))
            return a + b

        assert reduce_tree(np.array([1, 2, 3, 4, 5]), add) == 15
        assert calls[0] == ([1, 3], [2, 4])

    def test_sequential_is_a_left_fold(self):
        assert reduce_sequential(np.array([[1, 2, 3]]), lambda a, b: a * 10 + b).tolist() == [123]


class TestLinearForward:
    def test_spiking_matches_the_oracle_tables(self):
        x, w = random_layer(3, d_in=6, batch=4, d_out=3)
        for mode in ("tree", "sequential"):
            spiking, latency = linear_forward(x, w, mode, "spiking")
            oracle, _ = linear_forward(x, w, mode, "oracle")
            np.testing.assert_array_equal(spiking.codes, oracle.codes)
            assert spiking.shape == (4, 3)
            assert latency == LatencyModel().steps(6, mode)

    def test_single_row(self):
        x = Fp8Tensor.from_floats([1.0, 2.0, -0.5])
        w = Fp8Tensor.from_floats([[1.0, 1.0, 1.0], [0.5, 0.25, 2.0]])
        y, _ = linear_forward(x, w, engine="oracle")
        assert y.shape == (2,)
        assert y.to_floats().tolist() == [2.5, 0.0]

    def test_shape_mismatch(self):
        x = Fp8Tensor.from_floats(np.ones((2, 3)))
        w = Fp8Tensor.from_floats(np.ones((4, 5)))
        with pytest.raises(ShapeError):
            linear_forward(x, w, engine="oracle")

    def test_nonassociativity_audit(self):
        x, w = random_layer(0, d_in=64, batch=8, d_out=4)
        audit = nonassociativity_audit(x, w)
        assert audit.outputs == 32
        assert 0 <= audit.match_rate <= 1
        assert audit.max_ulp >= 0
        if audit.matches == audit.outputs:
            assert audit.max_ulp == 0

    def test_audit_of_identical_orders(self):
        x = Fp8Tensor.from_floats(np.ones((2, 2)))
        w = Fp8Tensor.from_floats(np.ones((1, 2)))
        audit = nonassociativity_audit(x, w)
        assert (audit.matches, audit.max_ulp, audit.nan_mismatches) == (2, 0, 0)


class TestTensor:
    def test_from_floats_rounds_to_nearest_even(self):
        t = Fp8Tensor.from_floats([1.0625, 1000.0, -0.0])
        assert t.codes.tolist() == [0x38, 0x7E, 0x80]

    def test_size_must_fill_the_shape(self):
        with pytest.raises(ShapeError):
            Fp8Tensor((2, 2), np.zeros(3, dtype=np.uint8))

    def test_save_and_load(self, tmp_path):
        t = Fp8Tensor.from_floats(np.linspace(-2, 2, 12).reshape(3, 4))
        path = t.save(tmp_path / "w.fp8")
        loaded = Fp8Tensor.load(path)
        assert loaded.shape == (3, 4)
        np.testing.assert_array_equal(loaded.codes, t.codes)

    def test_load_errors(self, tmp_path):
        with pytest.raises(DataSourceError):
            Fp8Tensor.load(tmp_path / "missing.fp8")
        path = Fp8Tensor.from_floats(np.ones(4)).save(tmp_path / "t.fp8")
        path.with_suffix(".json").write_text('{"format": "fp8-e4m3", "shape": [5]}')
        with pytest.raises(DataSourceError):
            Fp8Tensor.load(path)


class TestActivation:
    def test_circuit_size(self):
        stats = circuit_stats(build_threshold_activation())
        assert (stats["neurons"], stats["depth"]) == (8, 4)

    def test_spiking_matches_the_comparator(self):
        codes = np.arange(256, dtype=np.uint8)
        np.testing.assert_array_equal(
            spike_activation(codes, "spiking"), spike_activation(codes, "oracle")
        )

    def test_values(self):
        out = spike_activation(np.array([0x38, 0xB8, 0x00, 0x80, 0x01], dtype=np.uint8))
        assert out.tolist() == [0x38, 0x00, 0x00, 0x00, 0x38]

    def test_leakage_does_not_matter(self):
        codes = np.arange(256, dtype=np.uint8)
        leaky = spike_activation(codes, "spiking", SimConfig(beta=0.1, mode="lif"))
        np.testing.assert_array_equal(leaky, spike_activation(codes, "oracle"))
