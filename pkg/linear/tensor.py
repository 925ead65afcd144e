import json
from dataclasses import dataclass
from functools import cache
from pathlib import Path

import numpy as np

from core.abstract import DataSourceError, ShapeError
from core.utils import atomic_write
from fp8.code import encode_float, to_float

TENSOR_FORMAT = "fp8-e4m3"


@cache
def float_table() -> np.ndarray:
    """Value of every byte (nan for the nan codes)"""
    table = np.array([to_float(b) for b in range(256)], dtype=np.float64)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class Fp8Tensor:
    """Shape plus flat row-major FP8 codes"""

    shape: tuple[int, ...]
    codes: np.ndarray

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.uint8).ravel()
        shape = tuple(int(d) for d in self.shape)
        if int(np.prod(shape, dtype=np.int64)) != codes.size:
            raise ShapeError(f"{codes.size} codes do not fill a tensor of shape {shape}")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "shape", shape)

    @property
    def array(self) -> np.ndarray:
        return self.codes.reshape(self.shape)

    @classmethod
    def from_codes(cls, codes) -> "Fp8Tensor":
        codes = np.asarray(codes, dtype=np.uint8)
        return cls(codes.shape, codes)

    @classmethod
    def from_floats(cls, values, saturate: bool = True) -> "Fp8Tensor":
        """Quantize with round-to-nearest-even"""
        values = np.asarray(values, dtype=np.float64)
        codes = np.fromiter(
            (encode_float(float(v), saturate).byte for v in values.ravel()),
            dtype=np.uint8,
            count=values.size,
        )
        return cls(values.shape, codes)

    def to_floats(self) -> np.ndarray:
        return float_table()[self.array]

    def save(self, path: Path) -> Path:
        """Write the raw codes to `path` and the shape header next to it (`.json`)"""
        path = Path(path)
        atomic_write(path, self.codes.tobytes())
        header = {"format": TENSOR_FORMAT, "shape": list(self.shape)}
        atomic_write(path.with_suffix(".json"), json.dumps(header))
        return path

    @classmethod
    def load(cls, path: Path) -> "Fp8Tensor":
        """Read a tensor written by `save`

        Raises:
            DataSourceError: Missing file or header not matching the data
        """
        path = Path(path)
        header_path = path.with_suffix(".json")
        if not path.exists() or not header_path.exists():
            raise DataSourceError(f"Tensor {path} or its header is missing")
        try:
            header = json.loads(header_path.read_text(encoding="utf-8"))
            shape = tuple(header["shape"])
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise DataSourceError(f"Malformed tensor header {header_path}: {e}") from e
        if header.get("format") != TENSOR_FORMAT:
            raise DataSourceError(f"Unknown tensor format: {header.get('format')}")
        codes = np.frombuffer(path.read_bytes(), dtype=np.uint8)
        try:
            return cls(shape, codes)
        except ShapeError as e:
            raise DataSourceError(str(e)) from e
