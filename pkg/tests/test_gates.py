import itertools

import numpy as np
import pytest

from core.abstract import CircuitError
from spiking import CircuitBuilder, GateKind, SimConfig, build_gate, compose, evaluate_batch
from spiking.gates import GATE_NEURONS, GATE_PORTS, TRUTH_TABLES


@pytest.mark.parametrize("kind", list(GateKind))
def test_truth_table(kind):
    handle = build_gate(kind)
    rows = np.array(list(itertools.product((0, 1), repeat=len(handle.input_ports))))
    outputs = evaluate_batch(handle.circuit, rows, SimConfig()).outputs
    for row, out in zip(rows, outputs):
        assert tuple(out) == TRUTH_TABLES[kind](*row), (kind, row)


@pytest.mark.parametrize("kind", list(GateKind))
def test_neuron_counts(kind):
    handle = build_gate(kind)
    assert len(handle.neuron_ids) == GATE_NEURONS[kind]
    assert (handle.input_ports, handle.output_ports) == GATE_PORTS[kind]


def test_mux_is_a_four_neuron_circuit():
    assert len(build_gate("MUX2").circuit.neurons) == 4


@pytest.mark.parametrize("beta", [0.5, 0.1, 0.01])
def test_gates_are_immune_to_leakage(beta):
    for kind in (GateKind.AND, GateKind.OR, GateKind.XOR):
        handle = build_gate(kind)
        rows = np.array(list(itertools.product((0, 1), repeat=2)))
        outputs = evaluate_batch(handle.circuit, rows, SimConfig(beta=beta, mode="lif")).outputs
        assert [tuple(o) for o in outputs] == [TRUTH_TABLES[kind](*r) for r in rows]


def test_unknown_gate():
    with pytest.raises(CircuitError):
        build_gate("NAND3")


class TestCompose:
    def test_two_half_adders_make_a_full_adder(self):
        ha = build_gate(GateKind.HALF_ADDER)
        circuit = compose(
            CircuitBuilder("fa"),
            {"h1": ha, "h2": ha, "c": build_gate(GateKind.OR)},
            {
                "h1.a": "a",
                "h1.b": "b",
                "h2.a": "h1.sum",
                "h2.b": "cin",
                "c.a": "h1.carry",
                "c.b": "h2.carry",
            },
            outputs=["h2.sum", "c.y"],
        )
        assert circuit.inputs == ("a", "b", "cin")
        rows = np.array(list(itertools.product((0, 1), repeat=3)))
        outputs = evaluate_batch(circuit, rows, SimConfig()).outputs
        for row, out in zip(rows, outputs):
            assert tuple(out) == TRUTH_TABLES[GateKind.FULL_ADDER](*row)

    def test_unwired_ports_become_inputs(self):
        circuit = compose(CircuitBuilder("one"), {"g": build_gate("AND")}, {})
        assert circuit.inputs == ("g.a", "g.b")
        assert circuit.port_names == ("g.y",)

    def test_cycle_is_rejected(self):
        with pytest.raises(CircuitError):
            compose(
                CircuitBuilder("loop"),
                {"p": build_gate("AND"), "q": build_gate("AND")},
                {"p.a": "q.y", "q.a": "p.y"},
            )

    def test_dangling_wire_is_rejected(self):
        with pytest.raises(CircuitError):
            compose(CircuitBuilder("dangling"), {"p": build_gate("AND")}, {"p.c": "x"})
        with pytest.raises(CircuitError):
            compose(CircuitBuilder("dangling"), {"p": build_gate("AND")}, {"p.a": "q.y"})
