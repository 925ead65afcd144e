import json
import os
import tempfile
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import toml

from .abstract import CampaignSpecError
from .constants import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_NOISE_CLIP,
    OUTPUT_FOLDER,
    SETTINGS_FILE,
)


def load_document(path: Path) -> dict:
    """Load a configuration document from file

    Args:
        path (Path): Path to file.
            Allowed extensions: `.json`, `.toml`

    Raises:
        CampaignSpecError: Unsupported file type, missing file or malformed document

    Returns:
        dict: Loaded document
    """
    path = Path(path)
    if not path.exists():
        raise CampaignSpecError(f"File not found: {path}")

    ext = path.suffix
    try:
        match ext:
            case ".json":
                document = json.loads(path.read_text(encoding="utf-8"))
            case ".toml":
                document = toml.loads(path.read_text(encoding="utf-8"))
            case _:
                raise CampaignSpecError(f"Unsupported file type: {ext}")
    except (json.JSONDecodeError, toml.TomlDecodeError) as e:
        raise CampaignSpecError(f"Malformed document {path}: {e}") from e

    if not isinstance(document, dict):
        raise CampaignSpecError(f"Document {path} must hold a mapping at the top level")
    return document


def atomic_write(path: Path, data: str | bytes):
    """Write a file atomically (temporary file in the same folder + rename)

    Args:
        path (Path): Destination
        data (str | bytes): Content
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    encoding = None if isinstance(data, bytes) else "utf-8"
    with tempfile.NamedTemporaryFile(
        mode, dir=path.parent, delete=False, suffix=".tmp", encoding=encoding
    ) as f:
        f.write(data)
        tmp_name = f.name
    os.replace(tmp_name, path)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Build a counter-based generator for one noise stream

    The stream key is usually (target index, point index, row index) or a chunk
    index, so the draws never depend on the evaluation order.

    Args:
        seed (int): Campaign seed
        *stream (int): Spawn key of the stream

    Returns:
        np.random.Generator: Philox generator
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(sequence))


def chunked(total: int, size: int) -> Sequence[slice]:
    """Split `range(total)` into slices of at most `size` elements"""
    size = max(1, int(size))
    return [slice(i, min(i + size, total)) for i in range(0, total, size)]


def __create_initial_settings() -> dict:
    """Create the initial settings document

    Returns:
        dict: Configuration document
    """
    return {
        "simulation": {
            "mode": "ideal",
            "beta": 1.0,
            "sigma": 0.0,
            "seed": 2024,
            "noise_clip": DEFAULT_NOISE_CLIP,
            "chunk_size": DEFAULT_CHUNK_SIZE,
        },
        "fp8": {"saturate": True},
        "output": {"dir": str(OUTPUT_FOLDER), "format": "json"},
    }


def get_settings(path: Path | None = None) -> dict:
    """Get the configuration setted in `settings.toml`

    Missing sections or keys are completed with the defaults.

    Args:
        path (Path, optional): Settings file. Defaults to `SETTINGS_FILE` in the working dir.

    Returns:
        dict: Configuration document
    """
    config_path = Path(path or SETTINGS_FILE)
    defaults = __create_initial_settings()
    if config_path.exists():
        with config_path.open() as f:
            settings = toml.load(f)
    else:
        settings = defaults
        with config_path.open("w") as f:
            toml.dump(settings, f)

    merged = {section: dict(values) for section, values in defaults.items()}
    for section, values in settings.items():
        if isinstance(values, dict):
            merged.setdefault(section, {}).update(values)
        else:
            merged[section] = values
    return merged


def merge_overrides(settings: dict, overrides: dict[str, dict[str, Any]]) -> dict:
    """Apply the command line overrides over the settings (None means not given)

    Args:
        settings (dict): Settings from `get_settings()`
        overrides (dict): `{section: {key: value}}`

    Returns:
        dict: New merged document
    """
    merged = {
        k: dict(v) if isinstance(v, dict) else v for k, v in settings.items()
    }
    for section, values in overrides.items():
        for key, value in values.items():
            if value is not None:
                merged.setdefault(section, {})[key] = value
    return merged


class Printter:
    """
    Custom print function
    """

    quiet = False
    """Silences every printter (used by the test suite)."""

    def __init__(self, app: str):
        self.app = app
        self.default_print = print

    def __call__(self, message: str, category: str = "", *args, **kwargs):
        if Printter.quiet:
            return
        self.default_print(
            f"[{self.app}{': ' if category else ''}{category.upper()}] {message}",
            *args,
            **kwargs,
        )
