"""Per-center update rules: plain projected SGD plus heavy-ball, extrapolated,
and adaptive-rate variants.

Every rule updates a single codebook row and ends with a projection onto the
feasible region, so outputs always lie inside it. Accumulator layout follows
the update formulas: squared-gradient sums are kept element-wise per
coordinate, the second-moment estimate is a scalar ||g||^2 average per center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError
from .model import ProjectionRegion, project

SGD = "sgd"
MOMENTUM = "momentum"
NAG = "nag"
ADAGRAD = "adagrad"
RMSPROP = "rmsprop"
ADAM = "adam"

VARIANTS = (SGD, MOMENTUM, NAG, ADAGRAD, RMSPROP, ADAM)

# Per-variant default base rates; the remaining defaults are the conventional
# smoothing/averaging constants.
DEFAULT_RATES = {
    SGD: 0.001,
    MOMENTUM: 0.001,
    NAG: 0.001,
    RMSPROP: 0.001,
    ADAGRAD: 0.1,
    ADAM: 0.01,
}


@dataclass
class OptimizerState:
    """Variant tag plus per-center accumulators.

    prev_position holds y^{t-1} for momentum and the previous extrapolation
    point for NAG, both initialized to the starting positions so the first
    step reduces to plain SGD. sq_sum is the element-wise squared-gradient
    accumulator (cumulative for adagrad, moving average for rmsprop);
    first_moment / second_moment are the adam estimates, the second being a
    scalar per center. step_counts tracks per-center update counts for the
    optional power-t bias correction.
    """

    variant: str
    prev_position: np.ndarray = None
    sq_sum: np.ndarray = None
    first_moment: np.ndarray = None
    second_moment: np.ndarray = None
    step_counts: np.ndarray = None
    gamma: float = 0.9
    beta: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    bias_correction_power_t: bool = False
    t: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidConfigError(f"unknown optimizer variant {self.variant!r}")
        for name, value in (("gamma", self.gamma), ("beta", self.beta),
                            ("beta1", self.beta1), ("beta2", self.beta2)):
            if not (0.0 < value < 1.0):
                raise InvalidConfigError(f"{name} must lie in (0, 1), got {value}")
        if not (self.eps > 0):
            raise InvalidConfigError(f"eps must be > 0, got {self.eps}")

    @classmethod
    def create(
        cls,
        variant: str,
        initial_centers: np.ndarray,
        *,
        gamma: float = 0.9,
        beta: float = 0.9,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        bias_correction_power_t: bool = False,
    ) -> "OptimizerState":
        centers = np.asarray(initial_centers, dtype=np.float64)
        n_centers, dim = centers.shape
        state = cls(
            variant=variant,
            gamma=gamma,
            beta=beta,
            beta1=beta1,
            beta2=beta2,
            eps=eps,
            bias_correction_power_t=bias_correction_power_t,
        )
        if variant in (MOMENTUM, NAG):
            state.prev_position = centers.copy()
        if variant in (ADAGRAD, RMSPROP):
            state.sq_sum = np.zeros((n_centers, dim))
        if variant == ADAM:
            state.first_moment = np.zeros((n_centers, dim))
            state.second_moment = np.zeros(n_centers)
        state.step_counts = np.zeros(n_centers, dtype=np.int64)
        return state


def step_sgd(position: np.ndarray, gradient: np.ndarray, rate: float, region: ProjectionRegion) -> np.ndarray:
    """y <- project(y - rate * g)."""
    return project(position - rate * gradient, region)


def step_momentum(
    state: OptimizerState, k: int, position: np.ndarray, gradient: np.ndarray,
    rate: float, region: ProjectionRegion,
) -> np.ndarray:
    """Heavy ball: y <- y + gamma * (y - y_prev) - rate * g, then project.

    The history term applies only to the center being updated; other centers'
    previous positions are untouched.
    """
    new = position + state.gamma * (position - state.prev_position[k]) - rate * gradient
    state.prev_position[k] = position
    return project(new, region)


def step_nag(
    state: OptimizerState, k: int, position: np.ndarray, gradient: np.ndarray,
    rate: float, region: ProjectionRegion,
) -> np.ndarray:
    """Extrapolated step: y_half = y - rate * g; y <- y_half + gamma *
    (y_half - y_half_prev), then project."""
    half = position - rate * gradient
    new = half + state.gamma * (half - state.prev_position[k])
    state.prev_position[k] = half
    return project(new, region)


def step_adagrad(
    state: OptimizerState, k: int, position: np.ndarray, gradient: np.ndarray,
    rate: float, region: ProjectionRegion,
) -> np.ndarray:
    """Cumulative element-wise squared-gradient normalization:
    G += g^2; y <- project(y - rate / sqrt(G + eps) * g)."""
    state.sq_sum[k] += gradient * gradient
    new = position - rate / np.sqrt(state.sq_sum[k] + state.eps) * gradient
    return project(new, region)


def step_rmsprop(
    state: OptimizerState, k: int, position: np.ndarray, gradient: np.ndarray,
    rate: float, region: ProjectionRegion,
) -> np.ndarray:
    """Moving-average squared-gradient normalization:
    G <- beta * G + (1 - beta) * g^2, then the adagrad-style scaled step."""
    state.sq_sum[k] = state.beta * state.sq_sum[k] + (1.0 - state.beta) * gradient * gradient
    new = position - rate / np.sqrt(state.sq_sum[k] + state.eps) * gradient
    return project(new, region)


def step_adam(
    state: OptimizerState, k: int, position: np.ndarray, gradient: np.ndarray,
    rate: float, region: ProjectionRegion,
) -> np.ndarray:
    """Adaptive moment estimation with a scalar second moment per center:

      m <- beta1 * m + (1 - beta1) * g
      v <- beta2 * v + (1 - beta2) * ||g||^2
      y <- project(y - rate * m_hat / sqrt(v_hat + eps))

    Bias correction divides by (1 - beta) by default; with
    bias_correction_power_t set it divides by (1 - beta^t) using the
    per-center update count.
    """
    state.first_moment[k] = state.beta1 * state.first_moment[k] + (1.0 - state.beta1) * gradient
    state.second_moment[k] = state.beta2 * state.second_moment[k] + (1.0 - state.beta2) * float(
        np.dot(gradient, gradient)
    )
    state.step_counts[k] += 1
    if state.bias_correction_power_t:
        t_k = int(state.step_counts[k])
        m_hat = state.first_moment[k] / (1.0 - state.beta1**t_k)
        v_hat = state.second_moment[k] / (1.0 - state.beta2**t_k)
    else:
        m_hat = state.first_moment[k] / (1.0 - state.beta1)
        v_hat = state.second_moment[k] / (1.0 - state.beta2)
    new = position - rate / np.sqrt(v_hat + state.eps) * m_hat
    return project(new, region)


def apply_step(
    state: OptimizerState, k: int, position: np.ndarray, gradient: np.ndarray,
    rate: float, region: ProjectionRegion,
) -> np.ndarray:
    """Dispatch one update of center k through the state's variant."""
    state.t += 1
    if state.variant == SGD:
        state.step_counts[k] += 1
        return step_sgd(position, gradient, rate, region)
    if state.variant == MOMENTUM:
        state.step_counts[k] += 1
        return step_momentum(state, k, position, gradient, rate, region)
    if state.variant == NAG:
        state.step_counts[k] += 1
        return step_nag(state, k, position, gradient, rate, region)
    if state.variant == ADAGRAD:
        state.step_counts[k] += 1
        return step_adagrad(state, k, position, gradient, rate, region)
    if state.variant == RMSPROP:
        state.step_counts[k] += 1
        return step_rmsprop(state, k, position, gradient, rate, region)
    return step_adam(state, k, position, gradient, rate, region)
