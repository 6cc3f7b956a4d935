"""Moment-condition problems, weighted norms and parameter-box geometry."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np


class ContractError(ValueError):
    """Raised when an input violates an operation's preconditions."""


class EvaluationError(RuntimeError):
    """Raised when a model cannot produce moments at a parameter value."""


@dataclass(frozen=True)
class ParamBox:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size < 1:
            raise ContractError("box bounds must be 1-d arrays of equal length >= 1")
        if not np.all(lower < upper):
            raise ContractError("box requires lower < upper in every coordinate")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def scale(self, unit_points: np.ndarray) -> np.ndarray:
        """Map points of the unit cube affinely onto the box."""
        return self.lower + np.asarray(unit_points) * self.width

    def contains(self, theta: np.ndarray) -> bool:
        theta = np.asarray(theta)
        return bool(np.all(theta >= self.lower) and np.all(theta <= self.upper))

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "ParamBox":
        return cls(np.full(dim, lo, dtype=float), np.full(dim, hi, dtype=float))


SmoothedFn = Callable[[np.ndarray, float], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class MomentProblem:
    """A moment-condition estimation problem.

    ``eval`` must be a deterministic function of theta: simulated moments
    freeze their shocks at construction (common random numbers).

    ``closed_form_smoothed(theta, eps)`` optionally returns the convolution
    smoothed moments and their Jacobian. ``smoothed_eval(theta, eps)``
    optionally returns a problem-specific smooth surrogate of the moments
    (moments only), used by the smoothed-GMM baseline when no closed form
    exists.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    box: ParamBox
    p: int
    n: int = 1
    closed_form_smoothed: Optional[SmoothedFn] = None
    smoothed_eval: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    theta_dagger: Optional[np.ndarray] = None
    name: str = "problem"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.p < self.d_theta:
            raise ContractError(f"need p >= d_theta, got p={self.p}, d={self.d_theta}")

    @property
    def d_theta(self) -> int:
        return self.box.dim

    def moments(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.d_theta,):
            raise ContractError(f"theta must have shape ({self.d_theta},), got {theta.shape}")
        if not np.all(np.isfinite(theta)):
            raise ContractError("theta has non-finite entries")
        g = np.atleast_1d(np.asarray(self.eval(theta), dtype=float))
        if g.shape != (self.p,):
            raise EvaluationError(f"moment function returned shape {g.shape}, expected ({self.p},)")
        if not np.all(np.isfinite(g)):
            raise EvaluationError(f"non-finite moments at theta={theta}")
        return g


def as_weight_matrix(W, p: int | None = None, tol: float = 1e-10) -> np.ndarray:
    """Validate a weighting matrix: symmetric and strictly positive definite.

    ``None`` gives the identity of size ``p``.
    """
    if W is None:
        if p is None:
            raise ContractError("identity weighting needs p")
        return np.eye(p)
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if W.shape[0] != W.shape[1] or (p is not None and W.shape[0] != p):
        raise ContractError(f"weight matrix shape {W.shape} does not match p={p}")
    if not np.allclose(W, W.T, rtol=1e-10, atol=1e-12):
        raise ContractError("weight matrix is not symmetric")
    try:
        C = np.linalg.cholesky(W)
    except np.linalg.LinAlgError as exc:
        raise ContractError("weight matrix is not positive definite") from exc
    if np.min(np.diag(C)) ** 2 <= tol * max(1.0, np.max(np.abs(np.diag(W)))):
        raise ContractError("weight matrix is numerically singular")
    return W


def weighted_norm(v, W) -> float:
    """sqrt(v' W v)."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if W.shape != (v.size, v.size):
        raise ContractError(f"dimension mismatch: v has {v.size} entries, W is {W.shape}")
    q = float(v @ W @ v)
    # round-off can push q slightly negative for v ~ 0
    return float(np.sqrt(max(q, 0.0)))


def objective(problem: MomentProblem, theta, W) -> float:
    """Squared weighted norm of the sample moments at theta."""
    return weighted_norm(problem.moments(theta), W) ** 2


def clamp_to_box(theta, box: ParamBox) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != box.lower.shape:
        raise ContractError("theta and box dimensions differ")
    return np.minimum(np.maximum(theta, box.lower), box.upper)
