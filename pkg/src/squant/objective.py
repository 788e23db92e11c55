"""Distances, nearest-center assignment, the weighted clustering objective,
and the interchange-relaxation lower bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, UnboundedRegionError
from .model import Codebook, FeatureSet, ProjectionRegion, project


def distance(a: np.ndarray, b: np.ndarray, norm_order: float = 2.0) -> float:
    """l_p distance (sum_j |a_j - b_j|^p)^(1/p) for p >= 1."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"vector shapes differ: {a.shape} vs {b.shape}")
    if norm_order < 1:
        raise ValueError(f"norm_order must be >= 1, got {norm_order}")
    diff = np.abs(a - b)
    if norm_order == 2.0:
        return float(np.sqrt(np.dot(diff, diff)))
    if norm_order == 1.0:
        return float(diff.sum())
    return float((diff**norm_order).sum() ** (1.0 / norm_order))


def distance_matrix(points: np.ndarray, centers: np.ndarray, norm_order: float = 2.0) -> np.ndarray:
    """(I, K) matrix of l_p distances between rows of `points` and `centers`."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    if points.shape[1] != centers.shape[1]:
        raise DimensionMismatchError(
            f"point dimension {points.shape[1]} does not match center dimension {centers.shape[1]}"
        )
    diff = np.abs(points[:, None, :] - centers[None, :, :])
    if norm_order == 2.0:
        return np.sqrt((diff * diff).sum(axis=2))
    if norm_order == 1.0:
        return diff.sum(axis=2)
    return (diff**norm_order).sum(axis=2) ** (1.0 / norm_order)


@dataclass(frozen=True)
class Assignment:
    """Nearest-center assignment for every point.

    nearest_index   : (I,) canonical nearest-center index (lowest index on ties).
    nearest_distance: (I,) distance to that center.
    tie_sets        : {point index: tuple of tied center indices} for points
                      whose full argmin set has more than one member.
    """

    nearest_index: np.ndarray
    nearest_distance: np.ndarray
    tie_sets: dict


def nearest(point: np.ndarray, codebook: Codebook) -> tuple[int, float, tuple[int, ...]]:
    """Canonical nearest center for one point: (index, distance, full argmin set).

    Ties are detected by exact distance equality; the canonical representative
    is the lowest tied index.
    """
    dists = distance_matrix(np.asarray(point)[None, :], codebook.centers, codebook.norm_order)[0]
    best = float(dists.min())
    ties = tuple(int(k) for k in np.flatnonzero(dists == best))
    return ties[0], best, ties


def assign(data: FeatureSet, codebook: Codebook) -> Assignment:
    """Nearest-center assignment for the whole feature set."""
    dists = distance_matrix(data.points, codebook.centers, codebook.norm_order)
    best = dists.min(axis=1)
    idx = dists.argmin(axis=1)
    tie_sets = {}
    tie_counts = (dists == best[:, None]).sum(axis=1)
    for i in np.flatnonzero(tie_counts > 1):
        tie_sets[int(i)] = tuple(int(k) for k in np.flatnonzero(dists[i] == best[i]))
    return Assignment(idx.astype(np.int64), best, tie_sets)


def empirical_objective(data: FeatureSet, codebook: Codebook) -> float:
    """Weighted objective sum_i p_i (min_k d(xi_i, y_k))^rank.

    The minimum is taken on the un-raised distance and raised once, which
    avoids overflow for large rank.
    """
    dists = distance_matrix(data.points, codebook.centers, codebook.norm_order)
    return float(np.dot(data.weights, dists.min(axis=1) ** codebook.rank))


def partition(data: FeatureSet, codebook: Codebook) -> list[np.ndarray]:
    """Mutually exclusive, exhaustive point-index groups, one per center.

    Ties go to the lowest center index; empty groups come back as empty arrays.
    """
    idx = assign(data, codebook).nearest_index
    return [np.flatnonzero(idx == k) for k in range(codebook.size)]


def interchange_lower_bound(
    data: FeatureSet,
    regions: list[ProjectionRegion],
    rank: float,
    norm_order: float = 2.0,
) -> float:
    """Lower bound on the objective over center placements y_k in region k.

    Swaps the minimum over placements with the minimum over centers: each
    point is charged min_k d(xi_i, clamp_k(xi_i))^rank, which never exceeds
    the distance to any feasible center.
    """
    for k, region in enumerate(regions):
        if not region.is_bounded:
            raise UnboundedRegionError(f"region {k} is unbounded; the bound degenerates")
    per_point = np.empty((data.count, len(regions)))
    for k, region in enumerate(regions):
        projected = project(data.points, region)
        diff = np.abs(data.points - projected)
        if norm_order == 2.0:
            per_point[:, k] = np.sqrt((diff * diff).sum(axis=1))
        else:
            per_point[:, k] = (diff**norm_order).sum(axis=1) ** (1.0 / norm_order)
    return float(np.dot(data.weights, per_point.min(axis=1) ** rank))
