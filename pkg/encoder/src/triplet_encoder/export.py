"""Embedding export in the quantizer's binary interchange format.

Layout (little-endian): magic "SQEMB1", u32 dimension, u64 count, u8 label
flag, u32 class count, count*dimension f64 coordinates, then (when flagged)
count i32 labels with -1 marking unlabeled records.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import torch

MAGIC = b"SQEMB1"
UNLABELED = -1


def write_embedding_file(path, vectors: np.ndarray, labels: np.ndarray | None,
                         n_classes: int = 10) -> None:
    vectors = np.ascontiguousarray(vectors, dtype="<f8")
    count, dim = vectors.shape
    flag = 1 if labels is not None else 0
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<IQBI", dim, count, flag, n_classes))
        fh.write(vectors.tobytes())
        if labels is not None:
            fh.write(np.ascontiguousarray(labels, dtype="<i4").tobytes())


def embed_images(model: torch.nn.Module, images: np.ndarray, batch_size: int = 1024) -> np.ndarray:
    """Forward all images through the encoder in eval mode; float64 output."""
    model.eval()
    chunks = []
    with torch.no_grad():
        for start in range(0, images.shape[0], batch_size):
            batch = torch.from_numpy(images[start : start + batch_size])
            chunks.append(model(batch).double().numpy())
    return np.concatenate(chunks, axis=0)


def export_embeddings(
    model: torch.nn.Module,
    images: np.ndarray,
    labels: np.ndarray | None,
    path,
    n_classes: int = 10,
    batch_size: int = 1024,
) -> np.ndarray:
    """Embed and write; labels may carry -1 for the unlabeled fraction or be
    None for a fully unlabeled export. Returns the embedded vectors."""
    vectors = embed_images(model, images, batch_size=batch_size)
    if not np.isfinite(vectors).all():
        raise ValueError("encoder produced non-finite embeddings")
    write_embedding_file(Path(path), vectors, labels, n_classes=n_classes)
    return vectors
