import gzip
from pathlib import Path

import numpy as np

from core.abstract import DataSourceError
from core.constants import DATA_FOLDER
from core.utils import Printter, load_document, make_rng
from linear.tensor import Fp8Tensor

display = Printter("DATA")

WEIGHTS_FILE = DATA_FOLDER / "mlp_weights.json"

FEATURES = 16
"""Inputs of the demo network: a 4x4 pooled image."""

CLASSES = 4

IDX_DTYPES = {
    0x08: np.dtype(np.uint8),
    0x09: np.dtype(np.int8),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}
"""Element type of every IDX type code."""


def read_idx(path: Path) -> np.ndarray:
    """Read an IDX file (gzip accepted when the name ends with `.gz`)

    Layout: two zero bytes, the type code, the number of dimensions, one
    big-endian uint32 per dimension, then the row-major data.

    Raises:
        DataSourceError: Missing file, bad magic number or truncated data

    Returns:
        np.ndarray: The array with its stored shape
    """
    path = Path(path)
    if not path.exists():
        raise DataSourceError(f"IDX file not found: {path}")
    try:
        raw = gzip.decompress(path.read_bytes()) if path.suffix == ".gz" else path.read_bytes()
    except (OSError, EOFError) as e:
        raise DataSourceError(f"Can not read {path}: {e}") from e

    if len(raw) < 4 or raw[0] != 0 or raw[1] != 0 or raw[2] not in IDX_DTYPES:
        raise DataSourceError(f"{path} is not an IDX file")
    dtype, ndim = IDX_DTYPES[raw[2]], raw[3]
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise DataSourceError(f"{path}: truncated header")
    shape = tuple(int(d) for d in np.frombuffer(raw, dtype=">u4", count=ndim, offset=4))
    expected = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
    if len(raw) - header != expected:
        raise DataSourceError(f"{path}: {len(raw) - header} data bytes, expected {expected}")
    return np.frombuffer(raw, dtype=dtype, offset=header).reshape(shape)


def pool_images(images: np.ndarray, side: int = 4) -> np.ndarray:
    """Average-pool square images down to `side x side` features in [0, 1]

    Raises:
        DataSourceError: Images are not (N, H, W) with H = W divisible by `side`
    """
    if images.ndim != 3 or images.shape[1] != images.shape[2] or images.shape[1] % side:
        raise DataSourceError(f"Can not pool images of shape {images.shape} to {side}x{side}")
    n, h, _ = images.shape
    k = h // side
    pooled = images.astype(np.float64).reshape(n, side, k, side, k).mean(axis=(2, 4))
    scale = float(images.max()) or 1.0
    return (pooled / scale).reshape(n, side * side)


def synthetic_samples(seed: int, n: int) -> np.ndarray:
    """Noisy copies of one random prototype per class, in [0, 1]

    Returns:
        np.ndarray: (n, FEATURES) float64
    """
    rng = make_rng(seed, 4)
    prototypes = rng.uniform(0.0, 1.0, size=(CLASSES, FEATURES))
    labels = rng.integers(0, CLASSES, size=n)
    samples = prototypes[labels] + rng.normal(0.0, 0.15, size=(n, FEATURES))
    return np.clip(samples, 0.0, 1.0)


def load_samples(images: Path | None, seed: int, n: int) -> tuple[Fp8Tensor, str, str]:
    """Demo inputs from an IDX image file, or synthetic ones

    Returns:
        tuple[Fp8Tensor, str, str]: (inputs (n, FEATURES), source, warning or "")
    """
    if images is not None:
        try:
            pooled = pool_images(read_idx(images))[:n]
            return Fp8Tensor.from_floats(pooled), "idx", ""
        except DataSourceError as e:
            display(f"{e}. Falling back to synthetic samples", category="warn")
            return Fp8Tensor.from_floats(synthetic_samples(seed, n)), "synthetic", str(e)
    return Fp8Tensor.from_floats(synthetic_samples(seed, n)), "synthetic", ""


def load_weights(path: Path = WEIGHTS_FILE) -> list[Fp8Tensor]:
    """Pre-quantized layer weights `{"layers": [{"shape": [out, in], "codes": [...]}]}`

    Raises:
        DataSourceError: Missing file, malformed layer or layers not chaining

    Returns:
        list[Fp8Tensor]: One (D_out, D_in) tensor per layer
    """
    try:
        document = load_document(path)
        layers = [
            Fp8Tensor(tuple(layer["shape"]), np.array(layer["codes"], dtype=np.uint8))
            for layer in document["layers"]
        ]
    except Exception as e:
        raise DataSourceError(f"Can not load the weights {path}: {e}") from e

    if not layers:
        raise DataSourceError(f"{path} holds no layer")
    for previous, layer in zip(layers, layers[1:]):
        if previous.shape[0] != layer.shape[1]:
            raise DataSourceError(f"Layers do not chain: {previous.shape} then {layer.shape}")
    return layers
