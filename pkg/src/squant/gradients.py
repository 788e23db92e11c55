"""Generalized gradients of the non-smooth clustering objective.

The per-sample gradient touches exactly one center (the nearest); the batch
gradient sums weighted per-sample contributions over the nearest-center
partition. Gradient formulas use the Euclidean norm internally regardless of
the objective's norm order; callers are warned when the two disagree.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import Codebook, FeatureSet
from .objective import assign, nearest


@dataclass(frozen=True)
class SparseGradient:
    """Gradient with at most one non-zero center row per sample.

    entries      : list of (center index, gradient vector) pairs.
    sample_index : identity of the sample that produced it, when known.
    """

    entries: list
    sample_index: int | None = None

    def dense(self, n_centers: int, dim: int) -> np.ndarray:
        out = np.zeros((n_centers, dim))
        for k, g in self.entries:
            out[k] += g
        return out


def partial_gradient(sample: np.ndarray, center: np.ndarray, rank: float) -> np.ndarray:
    """rank * ||xi - y||^(rank-2) * (y - xi), with the zero vector at
    coincidence (the formula is singular there for rank < 2; zero keeps a
    coinciding sample stationary and is a valid selection for rank >= 2)."""
    sample = np.asarray(sample, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    diff = center - sample
    dist = float(np.sqrt(np.dot(diff, diff)))
    if dist == 0.0:
        return np.zeros_like(diff)
    return rank * dist ** (rank - 2.0) * diff


def stochastic_gradient(sample: np.ndarray, codebook: Codebook, sample_index: int | None = None) -> SparseGradient:
    """Single-sample gradient: one entry at the canonical nearest center."""
    k, _, _ = nearest(sample, codebook)
    g = partial_gradient(sample, codebook.centers[k], codebook.rank)
    return SparseGradient(entries=[(k, g)], sample_index=sample_index)


def full_gradient(data: FeatureSet, codebook: Codebook) -> np.ndarray:
    """(K, n) batch gradient: row k sums rank * p_i ||y_k - xi_i||^(rank-2)
    (y_k - xi_i) over the points assigned to center k; empty groups give zero
    rows."""
    if codebook.norm_order != 2.0:
        warnings.warn(
            "gradient formulas assume the Euclidean norm; "
            f"codebook norm_order={codebook.norm_order} is used for assignment only",
            stacklevel=2,
        )
    idx = assign(data, codebook).nearest_index
    rank = codebook.rank
    out = np.zeros_like(codebook.centers)
    for k in range(codebook.size):
        members = np.flatnonzero(idx == k)
        if members.size == 0:
            continue
        diff = codebook.centers[k] - data.points[members]
        dist = np.sqrt((diff * diff).sum(axis=1))
        scale = np.zeros_like(dist)
        nz = dist > 0
        scale[nz] = rank * dist[nz] ** (rank - 2.0)
        out[k] = (data.weights[members] * scale) @ diff
    return out
