from pathlib import Path
from typing import Literal, Mapping

SETTINGS_FILE = "settings.toml"
"""Settings file name with the configs used by the campaigns."""

DATA_FOLDER = Path(__file__).resolve().parent.parent / "data"
"""Folder with the versioned fixtures shipped with the repository."""

OUTPUT_FOLDER = Path("reports")
"""Default folder to save the campaign reports."""

HISTORY_FILE_NAME = "history.json"
"""File (inside the output folder) where the summaries are kept between executions."""

SCHEMA_VERSION = "1.3.0"
"""Version of the report documents. Bump it on any change of the report models."""

# --- neuron dynamics ---------------------------------------------------------

AND_THRESHOLD = 1.5
"""Firing threshold of the AND neuron, `AND(a, b) = I[a + b >= 1.5]`."""

OR_THRESHOLD = 0.5
"""Firing threshold of the OR neuron, `OR(a, b) = I[a + b >= 0.5]`."""

NOT_THRESHOLD = 0.5
"""Firing threshold of the NOT neuron, `NOT(a) = I[1 - a >= 0.5]`."""

EXCITATORY_WEIGHT = 1.0
"""Weight of an excitatory synapse (and of every bias synapse)."""

INHIBITORY_WEIGHT = -1.0
"""Weight of an inhibitory synapse (used by NOT)."""

GATE_MARGIN = 0.5
"""Distance between every gate threshold and the nearest reachable input current."""

BIAS_ID = "bias"
"""Id of the always-on constant source feeding the bias synapses."""

POSSIBLE_MODES = Literal["ideal", "lif"]
"""[TypeHint] Neuron dynamics: ideal integrate-and-fire or leaky."""

POSSIBLE_RESETS = Literal["soft", "none"]
"""[TypeHint] What happens to the membrane after a spike."""

RNG_ALGORITHM = "Philox"
"""Counter-based bit generator used for every noise draw (numpy)."""

DEFAULT_NOISE_CLIP = 3.0
"""Noise samples are clipped to +-DEFAULT_NOISE_CLIP * sigma."""

DEFAULT_CHUNK_SIZE = 8192
"""Number of samples evaluated together by the vectorised simulator."""

NOISE_RESAMPLING = "per neuron per step"
"""How often a noise sample is drawn (recorded in every report)."""

SNR_INTERPRETATION = "signal = unit spike current (synaptic weight 1.0)"
"""How the noise figure relates to the signal amplitude (recorded in scan reports)."""

# --- FP8 E4M3 ------------------------------------------------------------------

FP8_BIAS = 7
"""Exponent bias of E4M3."""

FP8_EXPONENT_BITS = 4
FP8_MANTISSA_BITS = 3

FP8_MAX_FINITE = 448
"""Largest finite magnitude (S=0, E=15, M=6)."""

FP8_MAX_FINITE_BYTE = 0x7E
"""Byte of +448."""

FP8_NAN_BYTE = 0x7F
"""Canonical nan byte (S=0, E=15, M=7)."""

FP8_ONE_BYTE = 0x38
"""Byte of +1.0."""

FP8_NEG_ZERO_BYTE = 0x80
"""Byte of -0.0."""

POSSIBLE_CLASSES = Literal["zero", "subnormal", "normal", "nan"]
"""[TypeHint] Classes of an FP8 code."""

# --- quoted figures (reference values in the reports) ------------------------

QUOTED_MULTIPLIER_NEURONS = 670
"""Neuron count quoted for the spiking multiplier."""

QUOTED_ADDER_NEURONS = 1042
"""Neuron count quoted for the spatial adder."""

QUOTED_SHIFTER_NEURONS = 192
"""Neuron count quoted for the 12-line barrel shifter."""

RESOURCE_TOLERANCE = 0.15
"""Accepted relative deviation from the quoted neuron counts."""

QUOTED_MULTIPLIER_DEPTH = 40
"""Depth bound quoted for the multiplier (not met by the ripple-carry datapath)."""

# --- golden resources (default saturating builds) ------------------------------

MULTIPLIER_NEURONS = 645
"""Exact neuron count of `build_multiplier()`."""

MULTIPLIER_DEPTH = 80
"""Exact logical depth of `build_multiplier()`."""

ADDER_NEURONS = 1077
"""Exact neuron count of `build_spatial_adder()`."""

ADDER_DEPTH = 108
"""Exact logical depth of `build_spatial_adder()`."""

SPARSITY_BAND = (0.3, 0.7)
"""Accepted band for the mean spike sparsity of the arithmetic units."""

TEMPORAL_STEPS_PER_OP = 19
"""Latency (time steps) of one temporal (serial) adder operation."""

TEMPORAL_ADDER_NEURONS = 1000
"""Neuron count quoted for the temporal (serial) adder."""

TARGET_SPEEDUP = 17.0
"""Minimum circuit-depth speedup of the tree linear layer at D_in=256."""

# --- robustness campaigns ----------------------------------------------------

POSSIBLE_TARGETS = Literal[
    "AND", "OR", "NOT", "XOR", "MUX2", "spatial-adder", "temporal-reference"
]
"""[TypeHint] Targets of a robustness scan."""

DEFAULT_BETA_GRID = [1.0, 0.5, 0.1, 0.01]
"""Retention factors of the leakage scan."""

DEFAULT_SIGMA_GRID = [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5]
"""Noise levels of the noise scan."""

NOISE_THRESHOLD = 0.15
"""Largest noise level that must not produce any failure."""

DEFAULT_TRIALS = 10_000
"""Trials per gate truth-table row and noise level."""

DEFAULT_ADDER_TRIALS = 1_000
"""Trials per corner case and noise level for the spatial adder."""

# --- reports -------------------------------------------------------------------

POSSIBLE_FORMATS = Literal["json", "csv", "xlsx"]
"""[TypeHint] Output formats of the reports."""

IMPORTANCE_MAP: Mapping[str, str] = {
    "debug": "Debug",
    "info": "Progress",
    "warn": "Warning",
    "error": "Error",
    "success": "Success",
}
"""Friendly names of the message categories of a report."""

IMPORTANCE_COLOR_MAP: Mapping[str, str] = {
    "debug": "FFFFFF",  # White
    "info": "ADD8E6",  # Light Blue
    "warn": "FFFFE0",  # Light Yellow
    "error": "FFC0CB",  # Light Pink
    "success": "90EE90",  # Light Green
}
"""Spreadsheet colours of the message categories."""

CLASS_ROWS = [
    "Normal x Normal",
    "Subnormal x Normal",
    "Normal x Subnormal",
    "Subnormal x Subnormal",
    "Zero x Finite",
    "Finite x Zero",
]
"""Row structure of the exhaustive sweep tables (pairs involving zero get their own rows)."""
