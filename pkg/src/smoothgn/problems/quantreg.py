"""Instrumented quantile-regression moments and their closed-form smoothing.

Moments are ``(1/n) sum [1{y_i - x_i'theta > 0} - t] w_i``. Smoothing with
bandwidth ``eps`` acts on theta, so observation i is effectively smoothed with
bandwidth ``eps * ||x_i||``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..moments import ContractError, MomentProblem, ParamBox
from ..smoothing import normal_cdf, normal_pdf


@dataclass(frozen=True)
class QuantRegProblem:
    y: np.ndarray
    x: np.ndarray
    w: np.ndarray
    t: float

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        x = np.asarray(self.x, dtype=float).reshape(y.size, -1)
        w = np.asarray(self.w, dtype=float).reshape(y.size, -1)
        if w.shape[1] < x.shape[1]:
            raise ContractError("need at least as many instruments as regressors")
        norms = np.linalg.norm(x, axis=1)
        if np.any(norms == 0):
            raise ContractError("a regressor row is the zero vector")
        if not 0.0 < self.t < 1.0:
            raise ContractError("t must lie in (0, 1)")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "_xnorm", norms)

    @property
    def n(self) -> int:
        return self.y.size

    def as_problem(self, box: ParamBox | None = None) -> MomentProblem:
        d = self.x.shape[1]
        return MomentProblem(
            eval=lambda th: quantreg_moments(self, th),
            box=box or ParamBox.cube(-10.0, 10.0, d),
            p=self.w.shape[1],
            n=self.n,
            closed_form_smoothed=lambda th, eps: quantreg_moments(self, th, eps),
            name="quantreg",
        )


def quantreg_moments(prob: QuantRegProblem, theta, eps: float | None = None):
    """Raw moments, or ``(smoothed moments, Jacobian)`` when ``eps`` is given."""
    theta = np.asarray(theta, dtype=float).ravel()
    resid = prob.y - prob.x @ theta
    n = prob.n
    if eps is None:
        return ((resid > 0).astype(float) - prob.t) @ prob.w / n
    if not eps > 0:
        raise ContractError("eps must be positive")
    z = resid / (eps * prob._xnorm)
    g = (normal_cdf(z) - prob.t) @ prob.w / n
    # d/dtheta Phi(z_i) = -phi(z_i) x_i / (eps ||x_i||)
    scaled = (normal_pdf(z) / prob._xnorm)[:, None] * prob.w
    G = -scaled.T @ prob.x / (n * eps)
    return g, G
