"""Rolling quasi-Newton approximation of the smoothed Jacobian.

A ring buffer of ``L`` pairs ``(Z, Y)`` with ``Y = [g(theta + eps Z) - g(theta)] / eps``
is refreshed one (or a few) directions per solver iteration. The Jacobian
estimate is the least-squares coefficient of ``Y`` on the de-meaned ``Z``;
the plain sample-mean estimator ``(1/L) sum Y Z'`` is kept for comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .moments import ContractError, MomentProblem
from .rng import stream

RANK_TOL = 1e-10
MAX_RETRIES = 3


class RankDeficiencyError(RuntimeError):
    pass


def default_L(d_theta: int) -> int:
    return max(25, math.ceil(1.5 * d_theta))


@dataclass
class QnBuffer:
    eps: float
    Z: np.ndarray  # (L, d)
    Y: np.ndarray  # (L, p)
    seed: int
    head: int = 0  # slot holding the oldest pair
    draws: int = 0  # directions drawn so far, keys the RNG stream
    estimator: str = "ls"

    @property
    def capacity(self) -> int:
        return self.Z.shape[0]

    def _draw(self, d: int) -> np.ndarray:
        z = stream(self.seed, self.draws).standard_normal(d)
        self.draws += 1
        return z

    def push(self, z: np.ndarray, y: np.ndarray) -> None:
        """Overwrite the oldest pair (FIFO)."""
        self.Z[self.head] = z
        self.Y[self.head] = y
        self.head = (self.head + 1) % self.capacity

    def jacobian(self) -> np.ndarray:
        if self.estimator == "mean":
            return jacobian_mean(self)
        return jacobian_ls(self)


def jacobian_ls(buf: QnBuffer) -> np.ndarray:
    """Least-squares slope of Y on de-meaned Z, shape (p, d)."""
    Zt = buf.Z - buf.Z.mean(axis=0)
    s = np.linalg.svd(Zt, compute_uv=False)
    if s.size == 0 or s[-1] < RANK_TOL:
        raise RankDeficiencyError(f"de-meaned design is rank deficient (sigma_min={s[-1]:.3g})")
    coef, *_ = np.linalg.lstsq(Zt, buf.Y, rcond=None)
    return coef.T


def jacobian_mean(buf: QnBuffer) -> np.ndarray:
    return buf.Y.T @ buf.Z / buf.capacity


def qn_init(problem: MomentProblem, theta0, eps: float, L: int | None = None, seed: int = 0,
            g0: np.ndarray | None = None, estimator: str = "ls") -> QnBuffer:
    """Fill a buffer with ``L`` directions, all evaluated at ``theta0``."""
    d, p = problem.d_theta, problem.p
    L = default_L(d) if L is None else int(L)
    if L < d:
        raise ContractError(f"L={L} < d_theta={d}: least-squares Jacobian is underdetermined")
    if not eps > 0:
        raise ContractError("eps must be positive")
    if estimator not in ("ls", "mean"):
        raise ContractError(f"unknown estimator {estimator!r}")
    theta0 = np.asarray(theta0, dtype=float)
    if g0 is None:
        g0 = problem.moments(theta0)
    buf = QnBuffer(eps=float(eps), Z=np.empty((L, d)), Y=np.empty((L, p)), seed=seed,
                   estimator=estimator)
    for _ in range(L):
        z = buf._draw(d)
        buf.push(z, (problem.moments(theta0 + eps * z) - g0) / eps)
    return buf


def qn_update_jacobian(buf: QnBuffer, problem: MomentProblem, theta_b, g_b: np.ndarray | None = None,
                       directions: int = 1) -> np.ndarray:
    """Refresh ``directions`` pairs at theta_b and return the Jacobian estimate.

    A rank-deficient design is retried with fresh directions (at most
    ``MAX_RETRIES`` times) before :class:`RankDeficiencyError` propagates.
    """
    theta_b = np.asarray(theta_b, dtype=float)
    if g_b is None:
        g_b = problem.moments(theta_b)
    d = problem.d_theta

    def fresh_pair():
        z = buf._draw(d)
        return z, (problem.moments(theta_b + buf.eps * z) - g_b) / buf.eps

    for _ in range(directions):
        buf.push(*fresh_pair())
    for attempt in range(MAX_RETRIES + 1):
        try:
            return buf.jacobian()
        except RankDeficiencyError:
            if attempt == MAX_RETRIES:
                raise
            # replace the newest pair
            buf.head = (buf.head - 1) % buf.capacity
            buf.push(*fresh_pair())
    raise AssertionError("unreachable")
