"""Classical baselines: batch center-mean iteration, distance-weighted
seeding, mini-batch streaming updates, full-batch generalized-gradient
descent, and the one-sample stochastic variant.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .driver import (
    EPOCH_SHUFFLE,
    IID_WEIGHTED,
    INIT_EXPLICIT,
    INIT_SAMPLE,
    SQConfig,
    run_sq,
)
from .errors import InvalidConfigError, InvalidScheduleError
from .gradients import full_gradient
from .model import (
    Codebook,
    ConvergenceTrace,
    FeatureSet,
    LearningSchedule,
    ProjectionRegion,
    TraceBuilder,
    validate_schedule,
)
from .objective import assign, distance_matrix, empirical_objective
from .optimizers import SGD

SEED_UNIFORM = "uniform-random"
SEED_KMEANSPP = "kmeanspp"

EMPTY_KEEP = "keep"
EMPTY_RESEED = "reseed-farthest"


@dataclass(frozen=True)
class KMeansConfig:
    """Configuration shared by the batch, mini-batch, gradient, and
    stochastic paths."""

    n_centers: int
    max_epochs: int = 100
    tol: float = 1e-6
    seeding: str = SEED_UNIFORM
    empty_policy: str = EMPTY_KEEP
    rank: float = 2.0
    schedule: LearningSchedule = None
    batch_size: int = 32
    sampling: str = IID_WEIGHTED
    seed: int = 0

    def __post_init__(self):
        if self.n_centers < 1:
            raise InvalidConfigError("n_centers must be >= 1")
        if self.tol < 0:
            raise InvalidConfigError("tol must be >= 0")
        if self.max_epochs < 1:
            raise InvalidConfigError("max_epochs must be >= 1")
        if self.seeding not in (SEED_UNIFORM, SEED_KMEANSPP):
            raise InvalidConfigError(f"unknown seeding mode {self.seeding!r}")
        if self.empty_policy not in (EMPTY_KEEP, EMPTY_RESEED):
            raise InvalidConfigError(f"unknown empty-cluster policy {self.empty_policy!r}")
        if self.sampling not in (IID_WEIGHTED, EPOCH_SHUFFLE):
            raise InvalidConfigError(f"unknown sampling mode {self.sampling!r}")


def kmeanspp_probabilities(points: np.ndarray, chosen: np.ndarray) -> np.ndarray:
    """Selection probabilities for the next seed: squared Euclidean distance
    to the nearest already-chosen center, normalized. Returns None when every
    point coincides with a chosen center (degenerate denominator)."""
    d2 = distance_matrix(points, chosen, 2.0).min(axis=1) ** 2
    total = d2.sum()
    if total == 0.0:
        return None
    return d2 / total


def seed_kmeanspp(data: FeatureSet, n_centers: int, seed=0) -> Codebook:
    """Distance-weighted seeding: first center uniform over the data, each
    later center drawn with probability proportional to squared Euclidean
    distance from the chosen set. Falls back to uniform draws if all points
    coincide with chosen centers."""
    if n_centers > data.count:
        raise InvalidConfigError(f"cannot seed {n_centers} centers from {data.count} points")
    rng = np.random.default_rng(seed)
    centers = np.empty((n_centers, data.dim))
    centers[0] = data.points[rng.integers(data.count)]
    for k in range(1, n_centers):
        q = kmeanspp_probabilities(data.points, centers[:k])
        if q is None:
            idx = rng.integers(data.count)
        else:
            idx = rng.choice(data.count, p=q)
        centers[k] = data.points[idx]
    return Codebook(centers, rank=2.0, norm_order=2.0)


def _reseed_empty(
    centers: np.ndarray, empties: np.ndarray, data: FeatureSet, nearest_distance: np.ndarray
) -> None:
    # Farthest-point reseeding: each empty center jumps to the point with the
    # largest nearest-center distance not already claimed; ties break low.
    order = np.argsort(-nearest_distance, kind="stable")
    for slot, k in enumerate(empties):
        centers[k] = data.points[order[slot % len(order)]]


def lloyd_iterate(
    data: FeatureSet, codebook: Codebook, empty_policy: str = EMPTY_KEEP
) -> tuple[Codebook, list[np.ndarray], float]:
    """One assignment + center-mean update.

    Non-empty groups move to their weighted mean (the plain mean under uniform
    weights); empty groups follow the policy. Returns the new codebook, the
    partition it was computed from, and the largest center displacement.
    """
    result = assign(data, codebook)
    idx = result.nearest_index
    centers = codebook.centers.copy()
    groups = [np.flatnonzero(idx == k) for k in range(codebook.size)]
    empties = []
    for k, members in enumerate(groups):
        if members.size == 0:
            empties.append(k)
            continue
        w = data.weights[members]
        centers[k] = (w @ data.points[members]) / w.sum()
    if empties and empty_policy == EMPTY_RESEED:
        _reseed_empty(centers, np.array(empties), data, result.nearest_distance)
    moved = float(np.sqrt(((centers - codebook.centers) ** 2).sum(axis=1)).max())
    return codebook.with_centers(centers), groups, moved


def _initial_codebook(data: FeatureSet, config: KMeansConfig, rank: float = 2.0) -> Codebook:
    if config.seeding == SEED_KMEANSPP:
        seeded = seed_kmeanspp(data, config.n_centers, seed=config.seed)
        return Codebook(seeded.centers, rank=rank, norm_order=2.0)
    rng = np.random.default_rng(config.seed)
    idx = rng.choice(data.count, size=config.n_centers, replace=False)
    return Codebook(data.points[idx], rank=rank, norm_order=2.0)


def run_lloyd(data: FeatureSet, config: KMeansConfig) -> tuple[Codebook, ConvergenceTrace]:
    """Iterate assignment/mean updates until the largest center movement falls
    to the tolerance or the epoch budget runs out."""
    codebook = _initial_codebook(data, config)
    builder = TraceBuilder(eval_stride=1)
    builder.record(0, empirical_objective(data, codebook), 0.0, -1)
    for epoch in range(config.max_epochs):
        codebook, _, moved = lloyd_iterate(data, codebook, config.empty_policy)
        builder.record(epoch + 1, empirical_objective(data, codebook), moved, -1)
        if moved <= config.tol:
            break
    return codebook, builder.build()


def run_minibatch(data: FeatureSet, config: KMeansConfig) -> tuple[Codebook, ConvergenceTrace]:
    """Streaming updates on sampled batches with per-center appearance counts
    as the learning rate: each batch point pulls its nearest center toward
    itself by 1/(times that center has been hit so far)."""
    m = config.batch_size
    if not (1 <= m < data.count):
        raise InvalidConfigError(f"batch_size must satisfy 1 <= m < {data.count}, got {m}")
    rng = np.random.default_rng(config.seed)
    codebook = _initial_codebook(data, config)
    centers = codebook.centers.copy()
    counts = np.zeros(config.n_centers, dtype=np.int64)

    builder = TraceBuilder(eval_stride=1)
    builder.record(0, empirical_objective(data, codebook), 0.0, -1)
    batches_per_epoch = -(-data.count // m)
    iteration = 0
    for epoch in range(config.max_epochs):
        before = centers.copy()
        for _ in range(batches_per_epoch):
            batch_idx = rng.choice(data.count, size=m, replace=False)
            batch = data.points[batch_idx]
            # assignments frozen against the batch-start centers
            owners = distance_matrix(batch, centers, 2.0).argmin(axis=1)
            for j in range(m):
                c = int(owners[j])
                counts[c] += 1
                eta = 1.0 / counts[c]
                centers[c] = (1.0 - eta) * centers[c] + eta * batch[j]
            iteration += 1
        moved = float(np.sqrt(((centers - before) ** 2).sum(axis=1)).max())
        codebook = codebook.with_centers(centers)
        builder.record(iteration, empirical_objective(data, codebook), moved, -1)
        if moved <= config.tol:
            break
    return codebook, builder.build()


def generalized_gradient_step(
    data: FeatureSet,
    codebook: Codebook,
    rate: float,
    per_center_scaling: bool = False,
) -> Codebook:
    """One full-batch descent step y_k <- y_k - rho_k * g_k.

    With per_center_scaling the rate for center k becomes
    rate * I / |group k|, the choice that makes a single step with rank 2 and
    rate 0.5 coincide with the assignment/mean update; empty groups are left
    untouched.
    """
    gradient = full_gradient(data, codebook)
    centers = codebook.centers.copy()
    if per_center_scaling:
        idx = assign(data, codebook).nearest_index
        for k in range(codebook.size):
            count = int((idx == k).sum())
            if count == 0:
                continue
            centers[k] -= rate * data.count / count * gradient[k]
    else:
        centers -= rate * gradient
    return codebook.with_centers(centers)


def run_generalized_gradient(
    data: FeatureSet, config: KMeansConfig
) -> tuple[Codebook, ConvergenceTrace]:
    """Full-batch generalized-gradient descent for any rank >= 1.

    Requires a diminishing schedule (steps tending to zero with divergent
    sum); each epoch applies one step at the scheduled rate.
    """
    schedule = config.schedule or LearningSchedule.polynomial(0.5, 0.75)
    report = validate_schedule(schedule)
    if not report.diminishing:
        raise InvalidScheduleError(
            f"gradient descent requires a diminishing schedule ({report.reason})"
        )
    codebook = _initial_codebook(data, config, rank=config.rank)
    builder = TraceBuilder(eval_stride=1)
    builder.record(0, empirical_objective(data, codebook), 0.0, -1)
    for t in range(config.max_epochs):
        rate = schedule.rate(t)
        new = generalized_gradient_step(data, codebook, rate)
        moved = float(np.sqrt(((new.centers - codebook.centers) ** 2).sum(axis=1)).max())
        codebook = new
        builder.record(t + 1, empirical_objective(data, codebook), rate, -1)
        if moved <= config.tol:
            break
    return codebook, builder.build()


def run_stochastic_kmeans(
    data: FeatureSet,
    config: KMeansConfig,
    region: ProjectionRegion = None,
) -> tuple[Codebook, ConvergenceTrace]:
    """One-sample stochastic descent: the same recursion as the quantization
    driver with the plain-SGD variant, exposed under its classical name.

    Runs max_epochs * I iterations; identical seeds give bit-identical traces
    to the driver.
    """
    if config.seeding == SEED_KMEANSPP:
        seeded = seed_kmeanspp(data, config.n_centers, seed=config.seed)
        init, explicit = INIT_EXPLICIT, seeded.centers
    else:
        init, explicit = INIT_SAMPLE, None
    sq = SQConfig(
        n_centers=config.n_centers,
        rank=config.rank,
        variant=SGD,
        schedule=config.schedule,
        iterations=config.max_epochs * data.count,
        region=region if region is not None else ProjectionRegion.unbounded(),
        sampling=config.sampling,
        seed=config.seed,
        init=init,
        explicit_centers=explicit,
    )
    return run_sq(data, sq)


def nk_weighted_average(iterates: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Per-center running average weighted by inverse group counts.

    iterates: (T, K, n) center positions after each epoch; counts: (T, K)
    group sizes, zero marking an empty group whose epoch is skipped for that
    center. Iterate s of center k gets weight (1/N_k^s) normalized over the
    center's non-empty history.
    """
    iterates = np.asarray(iterates, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    if iterates.ndim == 2:
        iterates = iterates[:, None, :]
    if counts.ndim == 1:
        counts = counts[:, None]
    if iterates.shape[:2] != counts.shape:
        raise InvalidConfigError(
            f"iterates {iterates.shape} and counts {counts.shape} disagree"
        )
    steps, n_centers, dim = iterates.shape
    out = np.empty((n_centers, dim))
    for k in range(n_centers):
        live = counts[:, k] > 0
        if not live.any():
            raise InvalidConfigError(f"center {k} has no iterations with a non-empty group")
        w = 1.0 / counts[live, k]
        w /= w.sum()
        out[k] = w @ iterates[live, k]
    return out
