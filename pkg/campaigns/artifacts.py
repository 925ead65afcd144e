"""Artifact campaigns: netlists, the FP8 code table and the report schemas."""

import json
from typing import Callable, Mapping

from arithmetic.adder import build_barrel_shifter, build_leading_zero_detector, build_rne_rounder
from arithmetic.units import unit_circuit
from core.abstract import CampaignSpecError
from core.constants import SCHEMA_VERSION
from core.utils import atomic_write
from fp8.oracle import dump_code_table
from linear.activation import build_threshold_activation
from spiking.circuit import Circuit, circuit_stats
from spiking.gates import GateKind, build_gate

from .base import BaseCampaign
from .schemas import export_schemas

GATE_ALIASES: Mapping[str, GateKind] = {
    "MUX": GateKind.MUX2,
    "HA": GateKind.HALF_ADDER,
    "FA": GateKind.FULL_ADDER,
}

UNIT_BUILDERS: Mapping[str, Callable[[bool], Circuit]] = {
    "mul": lambda saturate: unit_circuit("mul", saturate),
    "add": lambda saturate: unit_circuit("add", saturate),
    "shifter": lambda _: build_barrel_shifter(),
    "lzd": lambda _: build_leading_zero_detector(),
    "rounder": lambda _: build_rne_rounder(),
    "activation": lambda _: build_threshold_activation(),
}
"""Non-gate units exportable by name."""


def resolve_unit(unit: str, saturate: bool = True) -> Circuit:
    """Circuit of a gate kind (case-insensitive, with aliases) or of a named unit

    Raises:
        CampaignSpecError: Unknown unit
    """
    if unit in UNIT_BUILDERS:
        return UNIT_BUILDERS[unit](saturate)
    name = unit.upper()
    kind = GATE_ALIASES.get(name) or GateKind.__members__.get(name)
    if kind is None:
        known = [*GateKind, *GATE_ALIASES, *UNIT_BUILDERS]
        raise CampaignSpecError(f"Unknown unit: {unit} (known: {', '.join(map(str, known))})")
    return build_gate(kind).circuit


class ExportNetlistCampaign(BaseCampaign):
    """JSON netlist and GraphML text of one unit"""

    name = "export-netlist"

    def run(self) -> dict:
        unit = self.options.get("unit") or ""
        circuit = resolve_unit(unit, self.saturate)
        netlist_path = self.out_dir / f"{circuit.name}.netlist.json"
        graph_path = self.out_dir / f"{circuit.name}.graphml"
        atomic_write(netlist_path, json.dumps(circuit.to_netlist(), indent=2))
        atomic_write(graph_path, circuit.to_graphml())

        stats = circuit_stats(circuit)
        self.reporter.success(
            f"{circuit.name}: {stats['neurons']} neurons, {stats['synapses']} synapses, depth {stats['depth']}",
            str(netlist_path),
        )
        return {
            "engine": "none",
            "unit": unit,
            "files": [str(netlist_path), str(graph_path)],
            "resources": stats,
        }


class CodeTableCampaign(BaseCampaign):
    """CSV of the 256 FP8 codes with their fields, class and exact value"""

    name = "code-table"

    def run(self) -> dict:
        path = dump_code_table(self.out_dir / "fp8_e4m3_codes.csv")
        self.reporter.success("Code table written", str(path))
        return {"engine": "none", "codes": 256, "file": str(path)}


class SchemasCampaign(BaseCampaign):
    """JSON Schema files of every report document"""

    name = "schemas"

    def run(self) -> dict:
        files = export_schemas(self.out_dir / "schemas")
        self.reporter.success(f"{len(files)} schemas written", f"version {SCHEMA_VERSION}")
        return {"engine": "none", "files": [str(f) for f in files]}
