"""
Versioned pydantic models of the report documents.

Every document written by a campaign validates against one of these models;
`export_schemas()` writes their JSON Schema next to the reports.
"""

import json
from pathlib import Path
from typing import Literal, Mapping

from pydantic import BaseModel, ConfigDict, Field

from core.constants import POSSIBLE_MODES, SCHEMA_VERSION
from core.utils import atomic_write


class ConfigEcho(BaseModel):
    """Configuration that produced a report"""

    beta: float
    sigma: float
    seed: int
    mode: POSSIBLE_MODES
    noise_clip: float | None
    chunk_size: int
    retention: float
    rng_algorithm: str
    noise_resampling: str
    saturate: bool
    fast_check: bool


class Message(BaseModel):
    category: str
    subject: str = ""
    message: str
    observation: str = ""
    timestamp: str


class Criterion(BaseModel):
    """One acceptance check of a campaign"""

    name: str
    passed: bool
    detail: str = ""


class ReportDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[SCHEMA_VERSION] = SCHEMA_VERSION
    kind: str
    engine: Literal["spiking", "fast-check", "none"] = "spiking"
    config: ConfigEcho
    started_at: str
    wall_time: float = Field(ge=0)
    passed: bool
    criteria: list[Criterion] = []
    stats: dict[str, float] = {}
    messages: list[Message] = []


class ClassRow(BaseModel):
    """One row of the per-class table: operand classes, count and pass rate"""

    row: str
    total: int = Field(ge=0)
    passed: int = Field(ge=0)
    pass_rate: float = Field(ge=0, le=1)


class Failure(BaseModel):
    a: str
    b: str
    got: str
    expected: str
    row: str = ""


class Resources(BaseModel):
    neurons: int
    synapses: int
    depth: int
    bias_synapses: int
    quoted_neurons: int
    within_tolerance: bool
    quoted_depth: int | None = None
    stages: dict[str, int]


class SuiteRun(BaseModel):
    """Outcome of a list of pairs checked outside the exhaustive sweep"""

    name: str
    total: int
    passed: int


class SweepDocument(ReportDocument):
    kind: Literal["verify-mul", "verify-add"]
    classes: list[ClassRow]
    failures: list[Failure]
    mean_sparsity: float = Field(ge=0, le=1)
    sparsity_within_band: bool
    resources: Resources
    suites: list[SuiteRun] = []
    sticky_extra: bool = True


class ScanRow(BaseModel):
    target: str
    kind: Literal["beta", "sigma"]
    beta: float
    sigma: float
    trials: int
    passes: int
    accuracy: float = Field(ge=0, le=1)


class Series(BaseModel):
    x: list[float]
    y: list[float]


class ScanDocument(ReportDocument):
    kind: Literal["scan"]
    name: str
    snr_interpretation: str
    points: list[ScanRow]
    first_failure_sigma: dict[str, float | None]
    noise_clip: float | None = None
    clip_floor_sigma: float | None = None
    series: dict[str, dict[str, Series]]


class LatencyRow(BaseModel):
    d_in: int = Field(ge=1)
    unit_tree: int
    unit_sequential: int
    unit_speedup: float
    t_mul: int
    t_add: int
    circuit_tree: int
    circuit_sequential: int
    circuit_speedup: float
    temporal_serial: int
    temporal_neurons: int
    speedup_law: float


class AuditRow(BaseModel):
    d_in: int
    outputs: int
    matches: int
    match_rate: float = Field(ge=0, le=1)
    max_ulp: int
    mean_ulp: float
    nan_mismatches: int


class LatencyDocument(ReportDocument):
    kind: Literal["linear-bench"]
    rows: list[LatencyRow]
    audits: list[AuditRow]


class MlpDemoDocument(ReportDocument):
    kind: Literal["mlp-demo"]
    layer_shapes: list[list[int]]
    data_source: Literal["idx", "synthetic"]
    samples: int
    activation: str
    argmax_agreement: float = Field(ge=0, le=1)
    tree_vs_sequential_match: float = Field(ge=0, le=1)
    tree_vs_sequential_argmax: float = Field(ge=0, le=1)


class NetlistDocument(ReportDocument):
    kind: Literal["export-netlist"]
    unit: str
    files: list[str]
    resources: dict[str, int | dict[str, int]]


class CodeTableDocument(ReportDocument):
    kind: Literal["code-table"]
    codes: int
    file: str


class SchemasDocument(ReportDocument):
    kind: Literal["schemas"]
    files: list[str]


DOCUMENT_MODELS: Mapping[str, type[ReportDocument]] = {
    "verify-mul": SweepDocument,
    "verify-add": SweepDocument,
    "scan": ScanDocument,
    "linear-bench": LatencyDocument,
    "mlp-demo": MlpDemoDocument,
    "export-netlist": NetlistDocument,
    "code-table": CodeTableDocument,
    "schemas": SchemasDocument,
}
"""Document model of every campaign kind."""


def export_schemas(out_dir: Path) -> list[Path]:
    """Write the JSON Schema of every document model

    Args:
        out_dir (Path): Destination folder

    Returns:
        list[Path]: Written files, one per model
    """
    written = []
    for model in dict.fromkeys(DOCUMENT_MODELS.values()):
        path = Path(out_dir) / f"{model.__name__}.v{SCHEMA_VERSION}.schema.json"
        atomic_write(path, json.dumps(model.model_json_schema(), indent=2))
        written.append(path)
    return written
