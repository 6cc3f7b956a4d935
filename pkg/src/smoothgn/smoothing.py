"""Gaussian convolution smoothing and the Monte-Carlo smoothed Jacobian."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .moments import ContractError, MomentProblem
from .rng import stream

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def normal_cdf(z):
    return ndtr(z)


def normal_pdf(z):
    z = np.asarray(z, dtype=float)
    return np.exp(-0.5 * z * z) / _SQRT_2PI


@dataclass(frozen=True)
class SmoothingConfig:
    eps: float
    L: int = 25
    seed: int = 0

    def __post_init__(self):
        if not self.eps > 0:
            raise ContractError("eps must be positive")
        if self.L < 1:
            raise ContractError("L must be >= 1")


def gaussian_draws(seed: int, d: int, L: int, *keys: int) -> np.ndarray:
    """L standard-normal directions in R^d, shape (L, d)."""
    return stream(seed, *keys).standard_normal((L, d))


def mc_smoothed_moments(problem: MomentProblem, theta, cfg: SmoothingConfig, draws) -> np.ndarray:
    """Average of the raw moments over the perturbed points theta + eps * Z."""
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    if draws.shape[0] == 0:
        raise ContractError("draws must be nonempty")
    theta = np.asarray(theta, dtype=float)
    total = np.zeros(problem.p)
    for z in draws:
        total += problem.moments(theta + cfg.eps * z)
    return total / draws.shape[0]


def mc_jacobian(problem: MomentProblem, theta, cfg: SmoothingConfig, counter: int = 0,
                g0: np.ndarray | None = None) -> np.ndarray:
    """Monte-Carlo estimate of the smoothed Jacobian at theta.

    Computes ``(1 / (eps L)) sum_l [g(theta + eps Z_l) - g(theta)] Z_l'`` with
    raw moments ``g``; subtracting ``g(theta)`` leaves the estimator unbiased
    and lowers its variance. Draws come from the stream ``(cfg.seed, counter)``.
    Perturbed points are not clamped to the box.

    Parameters
    ----------
    counter : int
        Stream index, e.g. the solver iteration.
    g0 : array, optional
        Moments at theta if already available (saves one evaluation).
    """
    theta = np.asarray(theta, dtype=float)
    Z = gaussian_draws(cfg.seed, problem.d_theta, cfg.L, counter)
    if g0 is None:
        g0 = problem.moments(theta)
    Y = np.empty((cfg.L, problem.p))
    for ell, z in enumerate(Z):
        Y[ell] = problem.moments(theta + cfg.eps * z) - g0
    return Y.T @ Z / (cfg.eps * cfg.L)
