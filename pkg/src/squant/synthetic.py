"""Deterministic fixture generators: diagonal Gaussian mixtures, separable
clusters, and outlier-contaminated sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError
from .model import FeatureSet


@dataclass(frozen=True)
class MixtureSpec:
    """Diagonal Gaussian mixture: component means, per-component coordinate
    scales, mixing weights, sample count, and seed."""

    means: np.ndarray
    scales: np.ndarray
    weights: np.ndarray
    count: int
    seed: int = 0

    def __post_init__(self):
        means = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        scales = np.asarray(self.scales, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if means.shape[0] != weights.shape[0] or means.shape[0] != scales.shape[0]:
            raise InvalidConfigError("means, scales, and weights must agree on component count")
        if (scales < 0).any():
            raise InvalidConfigError("scales must be non-negative")
        if abs(weights.sum() - 1.0) > 1e-9 or (weights <= 0).any():
            raise InvalidConfigError("weights must be positive and sum to 1")
        if self.count < 1:
            raise InvalidConfigError("count must be >= 1")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "weights", weights)

    @property
    def n_components(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def generate(spec: MixtureSpec) -> FeatureSet:
    """Draw the mixture; labels record the generating component."""
    rng = np.random.default_rng(spec.seed)
    components = rng.choice(spec.n_components, size=spec.count, p=spec.weights)
    noise = rng.standard_normal((spec.count, spec.dim))
    points = spec.means[components] + spec.scales[components, None] * noise
    return FeatureSet(points, labels=components.astype(np.int64), n_classes=spec.n_components)


def separated_clusters(
    n_clusters: int, per_cluster: int, dim: int = 2, spread: float = 0.05,
    separation: float = 1.0, seed: int = 0,
) -> FeatureSet:
    """Well-separated blobs on a deterministic grid-ish layout, convenient for
    optimum-recovery tests."""
    rng = np.random.default_rng(seed)
    means = rng.uniform(0.0, separation * n_clusters, size=(n_clusters, dim))
    spec = MixtureSpec(
        means=means,
        scales=np.full(n_clusters, spread),
        weights=np.full(n_clusters, 1.0 / n_clusters),
        count=n_clusters * per_cluster,
        seed=seed + 1,
    )
    return generate(spec)


def with_outliers(base: FeatureSet, outliers: np.ndarray) -> FeatureSet:
    """Append outlier points with uniform reweighting; labels are dropped."""
    points = np.vstack([base.points, np.atleast_2d(outliers)])
    return FeatureSet(points)
