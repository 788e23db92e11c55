"""Single-sample quantization training loop: sampling, nearest-center search,
one-center updates through any optimizer variant, trajectory averaging, and
seeded multi-start.

All randomness flows from one 64-bit seed through numpy's PCG64 generator:
each run splits its seed into an init stream and a sampling stream, and
restart i of a multi-start reuses the base seed plus i.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DivergenceError, InvalidConfigError
from .gradients import partial_gradient
from .model import (
    Codebook,
    ConvergenceTrace,
    FeatureSet,
    LearningSchedule,
    ProjectionRegion,
    TraceBuilder,
)
from .objective import distance_matrix, empirical_objective
from .optimizers import DEFAULT_RATES, SGD, VARIANTS, OptimizerState, apply_step

IID_WEIGHTED = "iid-weighted"
EPOCH_SHUFFLE = "epoch-shuffle"

INIT_SAMPLE = "sample-from-data"
INIT_PER_LABEL = "per-label-sample"
INIT_EXPLICIT = "explicit"

AVERAGE_NONE = "none"
AVERAGE_CESARO = "cesaro"

# Divergence guard: abort when the sampled objective exceeds this multiple of
# the initial objective (or turns non-finite).
DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class SQConfig:
    """Full configuration of one quantization run."""

    n_centers: int
    rank: float = 2.0
    norm_order: float = 2.0
    variant: str = SGD
    schedule: LearningSchedule = None
    iterations: int = 1000
    region: ProjectionRegion = field(default_factory=ProjectionRegion.unbounded)
    sampling: str = IID_WEIGHTED
    seed: int = 0
    init: str = INIT_SAMPLE
    explicit_centers: np.ndarray = None
    averaging: str = AVERAGE_NONE
    eval_stride: int = None
    restarts: int = 1
    gamma: float = 0.9
    beta: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    bias_correction_power_t: bool = False

    def __post_init__(self):
        if self.n_centers < 1:
            raise InvalidConfigError("n_centers must be >= 1")
        if self.iterations < 0:
            raise InvalidConfigError("iterations must be >= 0")
        if self.variant not in VARIANTS:
            raise InvalidConfigError(f"unknown variant {self.variant!r}")
        if self.sampling not in (IID_WEIGHTED, EPOCH_SHUFFLE):
            raise InvalidConfigError(f"unknown sampling mode {self.sampling!r}")
        if self.init not in (INIT_SAMPLE, INIT_PER_LABEL, INIT_EXPLICIT):
            raise InvalidConfigError(f"unknown init mode {self.init!r}")
        if self.averaging not in (AVERAGE_NONE, AVERAGE_CESARO):
            raise InvalidConfigError(f"unknown averaging mode {self.averaging!r}")
        if self.restarts < 1:
            raise InvalidConfigError("restarts must be >= 1")
        if self.schedule is None:
            object.__setattr__(
                self, "schedule", LearningSchedule.constant(DEFAULT_RATES[self.variant])
            )
        if self.init == INIT_EXPLICIT:
            if self.explicit_centers is None:
                raise InvalidConfigError("explicit init requires explicit_centers")
            centers = np.asarray(self.explicit_centers, dtype=np.float64)
            if centers.shape[0] != self.n_centers:
                raise InvalidConfigError(
                    f"explicit_centers has {centers.shape[0]} rows, expected {self.n_centers}"
                )


def initialize(data: FeatureSet, config: SQConfig, seed=None) -> Codebook:
    """Starting codebook per the configured init mode.

    sample-from-data draws n_centers distinct points uniformly;
    per-label-sample draws one uniformly chosen labeled point per class
    (requires n_centers == class count); explicit passes positions through.
    """
    if config.init == INIT_EXPLICIT:
        return Codebook(config.explicit_centers, rank=config.rank, norm_order=config.norm_order)
    rng = np.random.default_rng(config.seed if seed is None else seed)
    if config.init == INIT_SAMPLE:
        if config.n_centers > data.count:
            raise InvalidConfigError(
                f"cannot draw {config.n_centers} distinct points from {data.count}"
            )
        idx = rng.choice(data.count, size=config.n_centers, replace=False)
        return Codebook(data.points[idx], rank=config.rank, norm_order=config.norm_order)
    # per-label-sample
    if data.labels is None or not data.labeled_mask().any():
        raise InvalidConfigError("per-label init requires labeled points")
    n_classes = data.n_classes
    if config.n_centers != n_classes:
        raise InvalidConfigError(
            f"per-label init requires n_centers == class count ({n_classes}), got {config.n_centers}"
        )
    centers = np.empty((n_classes, data.dim))
    for label in range(n_classes):
        members = np.flatnonzero(data.labels == label)
        if members.size == 0:
            raise InvalidConfigError(f"no labeled points for class {label}")
        centers[label] = data.points[rng.choice(members)]
    return Codebook(centers, rank=config.rank, norm_order=config.norm_order)


def cesaro_average(iterates, schedule: LearningSchedule) -> np.ndarray:
    """Step-size-weighted running average of an iterate sequence.

    Iterate s (1-based) is absorbed with weight rho_s / sum_{u<=s} rho_u,
    where rho_s is the rate that produced it; with a constant schedule this is
    the plain arithmetic mean.
    """
    iterates = [np.asarray(y, dtype=np.float64) for y in iterates]
    if not iterates:
        raise InvalidConfigError("cesaro_average requires at least one iterate")
    avg = np.zeros_like(iterates[0])
    cum = 0.0
    for s, y in enumerate(iterates):
        rate = schedule.rate(s)
        cum += rate
        sigma = rate / cum
        avg = (1.0 - sigma) * avg + sigma * y
    return avg


def _draw_indices(data: FeatureSet, config: SQConfig, rng: np.random.Generator) -> np.ndarray:
    if config.sampling == IID_WEIGHTED:
        return rng.choice(data.count, size=config.iterations, p=data.weights)
    # epoch-shuffle: concatenated per-epoch permutations, truncated to length
    epochs = -(-config.iterations // data.count)
    blocks = [rng.permutation(data.count) for _ in range(max(epochs, 1))]
    return np.concatenate(blocks)[: config.iterations]


def run_sq(
    data: FeatureSet,
    config: SQConfig,
    on_step=None,
) -> tuple[Codebook, ConvergenceTrace]:
    """Execute the sampled one-center-per-iteration descent.

    Each iteration draws a point, finds its canonical nearest center, applies
    the configured variant's update to that center alone, and projects back
    into the region. Returns the final codebook (the running average when
    averaging is enabled) and the objective trace, fully determined by the
    seed.

    on_step, when given, is called after every iteration with
    (iteration, updated_center, centers_copy); intended for instrumentation.
    """
    if config.norm_order != 2.0:
        warnings.warn(
            "gradient steps assume the Euclidean norm; "
            f"norm_order={config.norm_order} affects assignment and objective only",
            stacklevel=2,
        )
    seq = np.random.SeedSequence(config.seed)
    init_seed, sample_seed = seq.spawn(2)
    codebook = initialize(data, config, seed=init_seed)
    centers = codebook.centers.copy()

    stride = config.eval_stride if config.eval_stride else data.count
    builder = TraceBuilder(eval_stride=stride)
    initial_objective = empirical_objective(data, codebook)
    builder.record(0, initial_objective, 0.0, -1)

    if config.iterations == 0:
        return codebook, builder.build()

    rng = np.random.default_rng(sample_seed)
    order = _draw_indices(data, config, rng)
    state = OptimizerState.create(
        config.variant,
        centers,
        gamma=config.gamma,
        beta=config.beta,
        beta1=config.beta1,
        beta2=config.beta2,
        eps=config.eps,
        bias_correction_power_t=config.bias_correction_power_t,
    )

    averaging = config.averaging == AVERAGE_CESARO
    avg = np.zeros_like(centers)
    cum_rate = 0.0

    limit = DIVERGENCE_FACTOR * max(initial_objective, 1.0)
    for t in range(config.iterations):
        sample = data.points[order[t]]
        dists = distance_matrix(sample[None, :], centers, config.norm_order)[0]
        k = int(dists.argmin())
        gradient = partial_gradient(sample, centers[k], config.rank)
        rate = config.schedule.rate(t)
        centers[k] = apply_step(state, k, centers[k], gradient, rate, config.region)

        if not np.isfinite(centers[k]).all():
            raise DivergenceError(
                f"center {k} became non-finite at iteration {t}", trace=builder.build()
            )
        if averaging:
            cum_rate += rate
            sigma = rate / cum_rate
            avg *= 1.0 - sigma
            avg += sigma * centers
        if on_step is not None:
            on_step(t, k, centers.copy())

        if (t + 1) % stride == 0 or t + 1 == config.iterations:
            work = Codebook(centers, rank=config.rank, norm_order=config.norm_order)
            with np.errstate(over="ignore"):  # inf is handled as divergence below
                objective = empirical_objective(data, work)
            if not np.isfinite(objective) or objective > limit:
                raise DivergenceError(
                    f"objective {objective} exceeded the divergence guard at iteration {t + 1}",
                    trace=builder.build(),
                )
            builder.record(t + 1, objective, rate, k)

    final = avg if averaging else centers
    return Codebook(final, rank=config.rank, norm_order=config.norm_order), builder.build()


@dataclass(frozen=True)
class MultistartResult:
    codebook: Codebook
    trace: ConvergenceTrace
    final_objectives: tuple
    best_restart: int


def _restart_seed(base_seed: int, index: int) -> int:
    return (int(base_seed) + index) % (2**64)


def run_multistart(data: FeatureSet, config: SQConfig) -> MultistartResult:
    """Run `config.restarts` independently seeded runs and keep the best.

    Restart i reruns the config with seed base+i; runs may execute
    concurrently (capped by SQ_THREADS) and merge deterministically by
    restart index. Diverged restarts are discarded unless every restart
    diverges. Reported objectives are sorted worst-to-best, with diverged
    restarts as +inf.
    """
    configs = [
        replace(config, seed=_restart_seed(config.seed, i), restarts=1)
        for i in range(config.restarts)
    ]

    def one(cfg):
        try:
            # errstate is thread-local; divergence turns overflow into a result
            with np.errstate(over="ignore"):
                codebook, trace = run_sq(data, cfg)
            return empirical_objective(data, codebook), codebook, trace
        except DivergenceError as err:
            return float("inf"), None, err

    if config.restarts == 1:
        outcomes = [one(configs[0])]
    else:
        workers = min(config.restarts, _thread_cap())
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, configs))

    objectives = [o[0] for o in outcomes]
    best = int(np.argmin(objectives))
    if not np.isfinite(objectives[best]):
        raise DivergenceError(
            f"all {config.restarts} restarts diverged", trace=outcomes[best][2].trace
        )
    _, codebook, trace = outcomes[best]
    return MultistartResult(
        codebook=codebook,
        trace=trace,
        final_objectives=tuple(sorted(objectives, reverse=True)),
        best_restart=best,
    )


def _thread_cap() -> int:
    value = os.environ.get("SQ_THREADS", "")
    if value.strip():
        try:
            return max(1, int(value))
        except ValueError:
            pass
    return os.cpu_count() or 1
