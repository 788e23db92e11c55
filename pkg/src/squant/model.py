"""Shared data model: point clouds, codebooks, step schedules, projection regions.

All types are immutable after construction (backing arrays are frozen) and
safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidConfigError, InvalidScheduleError

WEIGHT_SUM_TOL = 1e-9

# Marker label for "this point carries no class label".
NO_LABEL = -1


def _frozen(a: np.ndarray, dtype=np.float64) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FeatureSet:
    """A weighted point cloud, optionally with per-point class labels.

    points   : (I, n) coordinates.
    weights  : (I,) strictly positive probabilities summing to 1.
    labels   : (I,) int labels, NO_LABEL (-1) where absent, or None when the
               set carries no labels at all.
    n_classes: declared class count L; labels present must lie in [0, L).
    """

    points: np.ndarray
    weights: np.ndarray = None
    labels: np.ndarray = None
    n_classes: int = 0

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise InvalidConfigError("points must be a non-empty I x n matrix")
        if not np.isfinite(points).all():
            raise InvalidConfigError("points contain non-finite coordinates")
        object.__setattr__(self, "points", _frozen(points))

        count = points.shape[0]
        if self.weights is None:
            weights = np.full(count, 1.0 / count)
        else:
            weights = np.asarray(self.weights, dtype=np.float64)
            if weights.shape != (count,):
                raise DimensionMismatchError(
                    f"weights shape {weights.shape} does not match {count} points"
                )
            if not (weights > 0).all():
                raise InvalidConfigError("weights must be strictly positive")
            if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
                raise InvalidConfigError(
                    f"weights sum to {weights.sum():.12f}, expected 1 within {WEIGHT_SUM_TOL}"
                )
        object.__setattr__(self, "weights", _frozen(weights))

        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (count,):
                raise DimensionMismatchError(
                    f"labels shape {labels.shape} does not match {count} points"
                )
            n_classes = self.n_classes
            if n_classes <= 0:
                n_classes = int(labels.max()) + 1 if (labels >= 0).any() else 0
            bad = (labels != NO_LABEL) & ((labels < 0) | (labels >= n_classes))
            if bad.any():
                raise InvalidConfigError(
                    f"labels must be in {{-1}} U [0, {n_classes}); offending index {int(np.argmax(bad))}"
                )
            object.__setattr__(self, "labels", _frozen(labels, dtype=np.int64))
            object.__setattr__(self, "n_classes", n_classes)
        else:
            object.__setattr__(self, "n_classes", 0)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def labeled_mask(self) -> np.ndarray:
        """Boolean mask of points that carry a label."""
        if self.labels is None:
            return np.zeros(self.count, dtype=bool)
        return self.labels != NO_LABEL

    def bounding_box(self, margin: float = 0.0) -> "ProjectionRegion":
        """Axis-aligned bounding box of the points, inflated by `margin`."""
        lower = self.points.min(axis=0) - margin
        upper = self.points.max(axis=0) + margin
        return ProjectionRegion.box(lower, upper)


@dataclass(frozen=True)
class Codebook:
    """K center positions plus the rank and norm order they were trained with."""

    centers: np.ndarray
    rank: float = 2.0
    norm_order: float = 2.0

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=np.float64))
        if centers.shape[0] < 1 or centers.shape[1] < 1:
            raise InvalidConfigError("centers must be a non-empty K x n matrix")
        if not np.isfinite(centers).all():
            raise InvalidConfigError("centers contain non-finite coordinates")
        if self.rank < 1:
            raise InvalidConfigError(f"rank must be >= 1, got {self.rank}")
        if self.norm_order < 1:
            raise InvalidConfigError(f"norm_order must be >= 1, got {self.norm_order}")
        object.__setattr__(self, "centers", _frozen(centers))
        object.__setattr__(self, "rank", float(self.rank))
        object.__setattr__(self, "norm_order", float(self.norm_order))

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def with_centers(self, centers: np.ndarray) -> "Codebook":
        return Codebook(centers, rank=self.rank, norm_order=self.norm_order)


@dataclass(frozen=True)
class ProjectionRegion:
    """Axis-aligned box constraint, or unbounded (no constraint).

    The box is the concrete convex compact used as the feasible set for
    projected updates; `unbounded` disables projection entirely.
    """

    lower: np.ndarray = None
    upper: np.ndarray = None

    @classmethod
    def box(cls, lower, upper) -> "ProjectionRegion":
        lower = np.asarray(lower, dtype=np.float64)
        upper = np.asarray(upper, dtype=np.float64)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DimensionMismatchError("box bounds must be equal-length vectors")
        if (lower > upper).any():
            raise InvalidConfigError("box lower bound exceeds upper bound")
        return cls(_frozen(lower), _frozen(upper))

    @classmethod
    def unbounded(cls) -> "ProjectionRegion":
        return cls(None, None)

    @property
    def is_bounded(self) -> bool:
        return self.lower is not None

    def contains(self, point: np.ndarray, atol: float = 0.0) -> bool:
        if not self.is_bounded:
            return True
        p = np.asarray(point, dtype=np.float64)
        return bool((p >= self.lower - atol).all() and (p <= self.upper + atol).all())


def project(point: np.ndarray, region: ProjectionRegion) -> np.ndarray:
    """Euclidean projection onto the region: component-wise clamp for a box,
    identity when unbounded."""
    point = np.asarray(point, dtype=np.float64)
    if not region.is_bounded:
        return point.copy()
    if point.shape[-1] != region.lower.shape[0]:
        raise DimensionMismatchError(
            f"point dimension {point.shape[-1]} does not match region dimension {region.lower.shape[0]}"
        )
    return np.clip(point, region.lower, region.upper)


CONSTANT = "constant"
POLYNOMIAL_DECAY = "polynomial-decay"


@dataclass(frozen=True)
class LearningSchedule:
    """Step-size sequence rho_t.

    constant         : rho_t = base_rate.
    polynomial-decay : rho_t = base_rate / (1 + t)^decay_exponent.
    """

    kind: str
    base_rate: float
    decay_exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in (CONSTANT, POLYNOMIAL_DECAY):
            raise InvalidScheduleError(f"unknown schedule kind {self.kind!r}")
        if not (self.base_rate > 0):
            raise InvalidScheduleError(f"base_rate must be > 0, got {self.base_rate}")

    @classmethod
    def constant(cls, base_rate: float) -> "LearningSchedule":
        return cls(CONSTANT, base_rate)

    @classmethod
    def polynomial(cls, base_rate: float, decay_exponent: float) -> "LearningSchedule":
        return cls(POLYNOMIAL_DECAY, base_rate, decay_exponent)

    def rate(self, t: int) -> float:
        if self.kind == CONSTANT:
            return self.base_rate
        return self.base_rate / (1.0 + t) ** self.decay_exponent

    def rates(self, count: int) -> np.ndarray:
        return np.array([self.rate(t) for t in range(count)])


@dataclass(frozen=True)
class ScheduleCompliance:
    """Analytic classification of a schedule against the convergence conditions
    (positive steps, divergent step sum, convergent squared-step sum) and the
    weaker diminishing-step conditions (steps -> 0, divergent step sum)."""

    positive: bool
    sum_diverges: bool
    sum_sq_converges: bool
    limit_zero: bool
    reason: str

    @property
    def compliant(self) -> bool:
        return self.positive and self.sum_diverges and self.sum_sq_converges

    @property
    def diminishing(self) -> bool:
        return self.positive and self.sum_diverges and self.limit_zero


def validate_schedule(schedule: LearningSchedule) -> ScheduleCompliance:
    """Classify a schedule analytically.

    Constant schedules keep a divergent squared sum; polynomial decay with
    exponent g gives a p-series: the step sum diverges iff g <= 1 and the
    squared sum converges iff g > 1/2.
    """
    if not (schedule.base_rate > 0):
        raise InvalidScheduleError(f"base_rate must be > 0, got {schedule.base_rate}")

    if schedule.kind == CONSTANT:
        return ScheduleCompliance(
            positive=True,
            sum_diverges=True,
            sum_sq_converges=False,
            limit_zero=False,
            reason="sum of squared steps diverges",
        )

    g = schedule.decay_exponent
    sum_diverges = g <= 1.0
    sum_sq_converges = g > 0.5
    limit_zero = g > 0.0
    if sum_diverges and sum_sq_converges:
        reason = "compliant"
    elif not sum_diverges:
        reason = "sum of steps converges"
    else:
        reason = "sum of squared steps diverges"
    return ScheduleCompliance(True, sum_diverges, sum_sq_converges, limit_zero, reason)


@dataclass(frozen=True)
class ConvergenceTrace:
    """Per-sampled-iteration record of an optimization run.

    Records are (iteration, objective, effective step size, updated center
    index); updated_center is -1 for records that precede any update or where
    every center moved (batch methods).
    """

    iterations: np.ndarray
    objectives: np.ndarray
    step_sizes: np.ndarray
    updated_centers: np.ndarray
    eval_stride: int = 1

    def __post_init__(self):
        iterations = _frozen(self.iterations, dtype=np.int64)
        objectives = _frozen(self.objectives)
        step_sizes = _frozen(self.step_sizes)
        updated = _frozen(self.updated_centers, dtype=np.int64)
        sizes = {a.shape[0] for a in (iterations, objectives, step_sizes, updated)}
        if len(sizes) != 1:
            raise DimensionMismatchError("trace columns must have equal length")
        if iterations.shape[0] == 0:
            raise InvalidConfigError("trace must hold at least one record")
        if (np.diff(iterations) <= 0).any():
            raise InvalidConfigError("trace iterations must be strictly increasing")
        if not np.isfinite(objectives).all():
            raise InvalidConfigError("trace objectives must be finite")
        object.__setattr__(self, "iterations", iterations)
        object.__setattr__(self, "objectives", objectives)
        object.__setattr__(self, "step_sizes", step_sizes)
        object.__setattr__(self, "updated_centers", updated)

    def __len__(self) -> int:
        return self.iterations.shape[0]

    @property
    def initial_objective(self) -> float:
        return float(self.objectives[0])

    @property
    def final_objective(self) -> float:
        return float(self.objectives[-1])


class TraceBuilder:
    """Accumulates trace records during a run; cheap to append to."""

    def __init__(self, eval_stride: int = 1):
        self.eval_stride = int(eval_stride)
        self._iterations: list[int] = []
        self._objectives: list[float] = []
        self._step_sizes: list[float] = []
        self._updated: list[int] = []

    def record(self, iteration: int, objective: float, step_size: float, updated_center: int):
        self._iterations.append(int(iteration))
        self._objectives.append(float(objective))
        self._step_sizes.append(float(step_size))
        self._updated.append(int(updated_center))

    @property
    def last_iteration(self) -> int:
        return self._iterations[-1] if self._iterations else -1

    def build(self) -> ConvergenceTrace:
        return ConvergenceTrace(
            np.array(self._iterations, dtype=np.int64),
            np.array(self._objectives),
            np.array(self._step_sizes),
            np.array(self._updated, dtype=np.int64),
            eval_stride=self.eval_stride,
        )
