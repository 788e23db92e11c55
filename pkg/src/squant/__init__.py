"""Stochastic quantization and the classical K-Means family.

Codebook learning by sampled one-center-per-iteration generalized-gradient
descent (with heavy-ball, extrapolated, and adaptive-rate update variants),
batch and mini-batch baselines, distance-weighted seeding, interchange
lower bounds, and nearest-quant classification scoring.
"""

from .driver import MultistartResult, SQConfig, cesaro_average, initialize, run_multistart, run_sq
from .errors import (
    DimensionMismatchError,
    DivergenceError,
    FormatError,
    InvalidConfigError,
    InvalidScheduleError,
    LabelRangeError,
    MagicMismatchError,
    TruncatedFileError,
    UnboundedRegionError,
    UndefinedContrastError,
)
from .evaluation import (
    EvaluationReport,
    classify,
    classify_batch,
    contrast_ratio,
    evaluate,
    label_quants,
    weighted_f1,
)
from .gradients import SparseGradient, full_gradient, partial_gradient, stochastic_gradient
from .kmeans import (
    KMeansConfig,
    generalized_gradient_step,
    kmeanspp_probabilities,
    lloyd_iterate,
    nk_weighted_average,
    run_generalized_gradient,
    run_lloyd,
    run_minibatch,
    run_stochastic_kmeans,
    seed_kmeanspp,
)
from .model import (
    Codebook,
    ConvergenceTrace,
    FeatureSet,
    LearningSchedule,
    ProjectionRegion,
    ScheduleCompliance,
    project,
    validate_schedule,
)
from .objective import (
    Assignment,
    assign,
    distance,
    distance_matrix,
    empirical_objective,
    interchange_lower_bound,
    nearest,
    partition,
)
from .optimizers import (
    DEFAULT_RATES,
    OptimizerState,
    apply_step,
    step_adagrad,
    step_adam,
    step_momentum,
    step_nag,
    step_rmsprop,
    step_sgd,
)
from .synthetic import MixtureSpec, generate, separated_clusters, with_outliers

__version__ = "0.1.0"
