"""IDX image/label loading and the labeled/unlabeled split."""

from __future__ import annotations

import gzip
import struct
from pathlib import Path

import numpy as np

IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049

TRAIN_IMAGES = "train-images-idx3-ubyte"
TRAIN_LABELS = "train-labels-idx1-ubyte"
TEST_IMAGES = "t10k-images-idx3-ubyte"
TEST_LABELS = "t10k-labels-idx1-ubyte"


def _read_idx(path: Path) -> bytes:
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as fh:
            return fh.read()
    return path.read_bytes()


def _find(data_dir: Path, stem: str) -> Path:
    for candidate in (data_dir / stem, data_dir / f"{stem}.gz"):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"{stem}[.gz] not found under {data_dir}")


def load_idx_images(path: Path) -> np.ndarray:
    """(N, rows, cols) float32 scaled to [0, 1]."""
    raw = _read_idx(path)
    magic, count, rows, cols = struct.unpack(">IIII", raw[:16])
    if magic != IMAGE_MAGIC:
        raise ValueError(f"{path}: expected image magic {IMAGE_MAGIC}, got {magic}")
    body = np.frombuffer(raw, dtype=np.uint8, offset=16)
    if body.size != count * rows * cols:
        raise ValueError(f"{path}: truncated image body")
    return body.reshape(count, rows, cols).astype(np.float32) / 255.0


def load_idx_labels(path: Path) -> np.ndarray:
    raw = _read_idx(path)
    magic, count = struct.unpack(">II", raw[:8])
    if magic != LABEL_MAGIC:
        raise ValueError(f"{path}: expected label magic {LABEL_MAGIC}, got {magic}")
    body = np.frombuffer(raw, dtype=np.uint8, offset=8)
    if body.size != count:
        raise ValueError(f"{path}: truncated label body")
    return body.astype(np.int64)


def load_split(data_dir, train: bool = True) -> tuple[np.ndarray, np.ndarray]:
    data_dir = Path(data_dir)
    stem_images = TRAIN_IMAGES if train else TEST_IMAGES
    stem_labels = TRAIN_LABELS if train else TEST_LABELS
    images = load_idx_images(_find(data_dir, stem_images))
    labels = load_idx_labels(_find(data_dir, stem_labels))
    if images.shape[0] != labels.shape[0]:
        raise ValueError("image and label counts disagree")
    return images, labels


def labeled_split(count: int, fraction: float, seed: int) -> np.ndarray:
    """Uniformly sampled index set that keeps its label; the rest is treated
    as unlabeled."""
    if not (0.0 < fraction <= 1.0):
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    rng = np.random.default_rng(seed)
    keep = int(round(count * fraction))
    return np.sort(rng.choice(count, size=keep, replace=False))
