"""Dataset container, synthetic GMM generator, IDX ingestion, corruption.

IDX parsing is big-endian and strict: wrong magic, short payloads and
image/label count disagreements each raise their own error; nothing is
silently truncated. Pixels are scaled to [0, 1] by 1/255.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (DimensionError, IdxCountMismatchError, IdxMagicError,
                     IdxTruncatedError, NumericError)
from .nn import make_rng

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801

GMM_MEAN_RANGE = 5.0   # mode means drawn uniformly from [-5, 5]^dim
GMM_NOISE_STD = 0.5    # isotropic within-mode standard deviation


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with optional integer labels."""

    features: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2:
            raise DimensionError("features must be a 2-D array")
        if not np.all(np.isfinite(features)):
            raise NumericError("features contain non-finite entries")
        object.__setattr__(self, "features", features)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (features.shape[0],):
                raise DimensionError("labels length must equal sample count")
            if np.any(labels < 0):
                raise ValueError("labels must be non-negative")
            object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


def gmm_generate(modes: int, dim: int, n: int, seed: int) -> Dataset:
    """Draw n samples from a seeded Gaussian mixture.

    Mode means are uniform in [-5, 5]^dim; each sample picks a mode
    uniformly and adds isotropic noise with std 0.5. Labels record the
    mode index.
    """
    if modes < 1 or dim < 1 or n < 1:
        raise ValueError("modes, dim and n must all be at least 1")
    rng = make_rng(seed)
    means = rng.uniform(-GMM_MEAN_RANGE, GMM_MEAN_RANGE, size=(modes, dim))
    component = rng.integers(0, modes, size=n)
    features = means[component] + GMM_NOISE_STD * rng.standard_normal((n, dim))
    return Dataset(features=features, labels=component)


def _read_exact(f, count: int, what: str) -> bytes:
    buf = f.read(count)
    if len(buf) != count:
        raise IdxTruncatedError(f"{what}: expected {count} bytes, "
                                f"got {len(buf)}")
    return buf


def _read_be32(f, what: str) -> int:
    return struct.unpack(">I", _read_exact(f, 4, what))[0]


def load_idx(images_path, labels_path) -> Dataset:
    """Parse an IDX image/label file pair into a flattened [0, 1] dataset."""
    with open(images_path, "rb") as f:
        magic = _read_be32(f, "image header")
        if magic != IDX_IMAGE_MAGIC:
            raise IdxMagicError(
                f"bad image magic 0x{magic:08x} in {images_path}")
        count = _read_be32(f, "image count")
        rows = _read_be32(f, "image rows")
        cols = _read_be32(f, "image cols")
        payload = _read_exact(f, count * rows * cols, "image payload")
        if f.read(1):
            raise IdxTruncatedError(f"trailing bytes in {images_path}")
    pixels = np.frombuffer(payload, dtype=np.uint8)
    features = pixels.reshape(count, rows * cols).astype(np.float64) / 255.0

    with open(labels_path, "rb") as f:
        magic = _read_be32(f, "label header")
        if magic != IDX_LABEL_MAGIC:
            raise IdxMagicError(
                f"bad label magic 0x{magic:08x} in {labels_path}")
        label_count = _read_be32(f, "label count")
        raw = _read_exact(f, label_count, "label payload")
        if f.read(1):
            raise IdxTruncatedError(f"trailing bytes in {labels_path}")
    if label_count != count:
        raise IdxCountMismatchError(
            f"{count} images but {label_count} labels")
    labels = np.frombuffer(raw, dtype=np.uint8).astype(np.int64)
    return Dataset(features=features, labels=labels)


def serialize_idx_images(features: np.ndarray, rows: int, cols: int) -> bytes:
    """Inverse of the image half of :func:`load_idx` (exact for its output)."""
    features = np.asarray(features)
    if features.ndim != 2 or features.shape[1] != rows * cols:
        raise DimensionError("features do not match the given image shape")
    pixels = np.rint(features * 255.0).astype(np.uint8)
    header = struct.pack(">IIII", IDX_IMAGE_MAGIC, features.shape[0],
                         rows, cols)
    return header + pixels.tobytes()


def serialize_idx_labels(labels: np.ndarray) -> bytes:
    labels = np.asarray(labels)
    header = struct.pack(">II", IDX_LABEL_MAGIC, labels.shape[0])
    return header + labels.astype(np.uint8).tobytes()


def add_noise(d: Dataset, sigma: float, seed: int) -> Dataset:
    """Additive Gaussian corruption; features are not re-clipped."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return Dataset(features=d.features.copy(), labels=d.labels)
    rng = make_rng(seed)
    noisy = d.features + sigma * rng.standard_normal(d.features.shape)
    return Dataset(features=noisy, labels=d.labels)


def split(d: Dataset, fractions, seed: int) -> list[Dataset]:
    """Seeded-shuffle partition into len(fractions) disjoint parts.

    Part sizes deviate from the exact proportions by at most one sample.
    """
    fractions = [float(f) for f in fractions]
    if not fractions or any(f <= 0 for f in fractions):
        raise ValueError("fractions must be positive")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError("fractions must sum to 1")
    n = d.n_samples
    bounds = [int(round(c * n)) for c in np.cumsum(fractions)]
    bounds[-1] = n
    sizes = np.diff([0] + bounds)
    if np.any(sizes == 0):
        raise ValueError("a requested part would be empty")
    perm = make_rng(seed).permutation(n)
    parts = []
    start = 0
    for size in sizes:
        idx = perm[start:start + size]
        labels = d.labels[idx] if d.labels is not None else None
        parts.append(Dataset(features=d.features[idx], labels=labels))
        start += size
    return parts
