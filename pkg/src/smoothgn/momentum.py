"""Heavy-ball momentum: companion-matrix rate and the rate-maximizing alpha."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .moments import ContractError


@dataclass(frozen=True)
class CompanionAnalysis:
    gamma: float
    alpha: float
    rate: float
    matrix: np.ndarray


def companion_matrix(gamma: float, alpha: float) -> np.ndarray:
    return np.array([[1.0 - gamma + alpha, -alpha], [1.0, 0.0]])


def _check(gamma: float, alpha: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise ContractError(f"gamma must lie in (0, 1), got {gamma}")
    if not 0.0 <= alpha < 1.0:
        raise ContractError(f"alpha must lie in [0, 1), got {alpha}")


def companion_rate(gamma: float, alpha: float) -> float:
    """Effective contraction rate 1 - rho(A(gamma, alpha)), clipped to [0, 1].

    rho is the spectral radius. The largest singular value of A exceeds one
    for typical (gamma, alpha) and does not give a contraction rate.
    """
    _check(gamma, alpha)
    rho = np.max(np.abs(np.linalg.eigvals(companion_matrix(gamma, alpha))))
    return float(np.clip(1.0 - rho, 0.0, 1.0))


def analyse(gamma: float, alpha: float) -> CompanionAnalysis:
    return CompanionAnalysis(gamma, alpha, companion_rate(gamma, alpha),
                             companion_matrix(gamma, alpha))


def optimal_alpha(gamma: float, step: float = 1e-3) -> tuple[float, float]:
    """Grid search over alpha in [0, 1) maximizing the companion rate.

    Ties go to the smaller alpha.
    """
    _check(gamma, 0.0)
    grid = np.arange(0.0, 1.0, step)
    rates = np.array([companion_rate(gamma, a) for a in grid])
    i = int(np.argmax(rates))  # first maximizer = smallest alpha
    return float(grid[i]), float(rates[i])


TABLE_GAMMAS = (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8)


def momentum_table(gammas=TABLE_GAMMAS) -> list[dict]:
    rows = []
    for g in gammas:
        a, r = optimal_alpha(g)
        rows.append({"gamma": g, "alpha_star": a, "rate": r, "gamma_over_rate": g / r})
    return rows
