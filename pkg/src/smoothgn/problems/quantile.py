"""Sample quantile as a just-identified moment problem: F_n(theta) - t = 0."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..moments import ContractError, MomentProblem, ParamBox
from ..smoothing import normal_cdf, normal_pdf


@dataclass(frozen=True)
class QuantileProblem:
    data: np.ndarray
    t: float

    def __post_init__(self):
        data = np.sort(np.asarray(self.data, dtype=float).ravel())
        if data.size < 1:
            raise ContractError("need at least one observation")
        if not 0.0 < self.t < 1.0:
            raise ContractError("t must lie in (0, 1)")
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.size

    def ecdf(self, theta: float) -> float:
        return np.searchsorted(self.data, theta, side="right") / self.n

    def default_box(self, pad: float = 1.0) -> ParamBox:
        return ParamBox([self.data[0] - pad], [self.data[-1] + pad])

    def as_problem(self, box: ParamBox | None = None, theta_dagger=None) -> MomentProblem:
        return MomentProblem(
            eval=lambda th: np.array([quantile_moments(self, th[0])]),
            box=box or self.default_box(),
            p=1,
            n=self.n,
            closed_form_smoothed=lambda th, eps: _as_arrays(quantile_smoothed(self, th[0], eps)),
            theta_dagger=None if theta_dagger is None else np.atleast_1d(theta_dagger),
            name="quantile",
        )


def _as_arrays(pair):
    g, f = pair
    return np.array([g]), np.array([[f]])


def quantile_moments(prob: QuantileProblem, theta: float) -> float:
    return prob.ecdf(float(theta)) - prob.t


def quantile_smoothed(prob: QuantileProblem, theta: float, eps: float) -> tuple[float, float]:
    """Smoothed moment F_{n,eps}(theta) - t and the kernel density estimate f_{n,eps}(theta)."""
    if not eps > 0:
        raise ContractError("eps must be positive")
    z = (float(theta) - prob.data) / eps
    return float(normal_cdf(z).mean() - prob.t), float(normal_pdf(z).mean() / eps)


def quantile_std_err(prob: QuantileProblem, theta_hat: float, eps: float) -> float:
    """sqrt(t(1-t)/n) / f_{n,eps}(theta_hat)."""
    f = quantile_smoothed(prob, theta_hat, eps)[1]
    return float(np.sqrt(prob.t * (1.0 - prob.t) / prob.n) / f)


def gmm_root_interval(prob: QuantileProblem) -> tuple[float, float] | None:
    """Interval [x_(k), x_(k+1)) on which F_n(theta) = t exactly, if it exists."""
    k = prob.t * prob.n
    k_int = int(round(k))
    if abs(k - k_int) > 1e-9 or k_int < 1 or k_int >= prob.n:
        return None
    return float(prob.data[k_int - 1]), float(prob.data[k_int])


def sample_quantile(prob: QuantileProblem) -> float:
    """Linear interpolation between order statistics (R type 7)."""
    return float(np.quantile(prob.data, prob.t))
