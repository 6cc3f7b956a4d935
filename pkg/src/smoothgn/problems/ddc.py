"""Panel dynamic discrete choice estimated by simulated OLS matching.

    y_it = 1{x_it' beta + u_it > 0},   u_it = e_it + rho e_{i,t-1},   e ~ N(0, 1)

The moments are the difference between pooled OLS coefficients of y_it on
(1, x_it, y_{i,t-1}) in a simulated panel at theta = (beta, rho) and in the
observed panel. Simulation reuses the observed regressors and a frozen draw
of shocks, so the moments are a deterministic, piecewise-constant function
of theta. Period 0 is a burn-in that supplies y_{i0}.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..moments import EvaluationError, MomentProblem, ParamBox
from ..rng import stream
from ..smoothing import normal_cdf

COND_LIMIT = 1e12


def true_theta(beta_dim: int = 14, n_active: int = 5, rho: float = 0.7) -> np.ndarray:
    beta = np.zeros(beta_dim)
    beta[:n_active] = 1.0 / np.sqrt(n_active)
    return np.append(beta, rho)


def draw_regressors(rng: np.random.Generator, n: int, T: int, beta_dim: int) -> np.ndarray:
    return rng.standard_normal((n, T + 1, beta_dim))


def draw_shocks(rng: np.random.Generator, n: int, T: int) -> np.ndarray:
    """e_{i,-1}, ..., e_{i,T}: shape (n, T + 2)."""
    return rng.standard_normal((n, T + 2))


def latent_index(x: np.ndarray, e: np.ndarray, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    beta, rho = theta[:-1], theta[-1]
    u = e[:, 1:] + rho * e[:, :-1]
    return x @ beta + u


def simulate_panel(x: np.ndarray, e: np.ndarray, theta, eps: float | None = None) -> np.ndarray:
    """Outcomes for periods 0..T; smooth Phi(index / eps) when eps is given."""
    z = latent_index(x, e, theta)
    if eps is None:
        return (z > 0).astype(float)
    return normal_cdf(z / eps)


class DdcProblem:
    """Dynamic discrete choice SMM problem with frozen simulation shocks.

    Individuals are put in a canonical order at construction, so the moments
    do not depend on how the panel was ordered.
    """

    def __init__(self, x, y_obs, e_sim, box: ParamBox | None = None,
                 theta_dagger: Optional[np.ndarray] = None):
        x = np.asarray(x, dtype=float)
        y_obs = np.asarray(y_obs, dtype=float)
        e_sim = np.asarray(e_sim, dtype=float)
        n, T1, k = x.shape
        if y_obs.shape != (n, T1) or e_sim.shape != (n, T1 + 1):
            raise ValueError("inconsistent panel shapes")
        order = np.lexsort(x.reshape(n, -1).T[::-1])
        self.x, self.y_obs, self.e_sim = x[order], y_obs[order], e_sim[order]
        self.n, self.T, self.beta_dim = n, T1 - 1, k
        self.box = box or ParamBox(np.append(np.full(k, -3.0), -0.95), np.append(np.full(k, 3.0), 0.95))
        self.theta_dagger = theta_dagger
        # regressors that do not depend on theta: intercept and x_it for t >= 1
        N = n * self.T
        self._Xb = np.column_stack([np.ones(N), self.x[:, 1:, :].reshape(N, k)])
        self._XbXb = self._Xb.T @ self._Xb
        self.coef_obs = self._ols(self.y_obs)

    @property
    def p(self) -> int:
        return self.beta_dim + 2

    def _ols(self, y: np.ndarray) -> np.ndarray:
        """Pooled OLS of y_it on (1, x_it, y_{i,t-1}), t = 1..T."""
        dep = y[:, 1:].ravel()
        lag = y[:, :-1].ravel()
        Xb = self._Xb
        Xbl = Xb.T @ lag
        XtX = np.block([[self._XbXb, Xbl[:, None]], [Xbl[None, :], np.array([[lag @ lag]])]])
        Xty = np.append(Xb.T @ dep, lag @ dep)
        if np.linalg.cond(XtX) > COND_LIMIT:
            raise EvaluationError("OLS design is singular (lagged outcome has no variation)")
        return np.linalg.solve(XtX, Xty)

    def moments(self, theta) -> np.ndarray:
        return ddc_moments(self, theta)

    def as_problem(self) -> MomentProblem:
        return MomentProblem(
            eval=lambda th: ddc_moments(self, th),
            box=self.box,
            p=self.p,
            n=self.n,
            smoothed_eval=lambda th, eps: ddc_smoothed_moments(self, th, eps),
            theta_dagger=self.theta_dagger,
            name="ddc",
        )


def ddc_moments(prob: DdcProblem, theta) -> np.ndarray:
    return prob._ols(simulate_panel(prob.x, prob.e_sim, theta)) - prob.coef_obs


def ddc_smoothed_moments(prob: DdcProblem, theta, eps: float) -> np.ndarray:
    """Same pipeline with the indicator replaced by Phi(. / eps) in the simulated panel."""
    return prob._ols(simulate_panel(prob.x, prob.e_sim, theta, eps)) - prob.coef_obs


def make_ddc(data_seed: int, sim_seed: int, n: int = 250, T: int = 10, beta_dim: int = 14,
             theta_dagger=None) -> DdcProblem:
    """Generate an observed panel at theta_dagger and freeze simulation shocks."""
    theta_dagger = true_theta(beta_dim) if theta_dagger is None else np.asarray(theta_dagger, float)
    rng = stream(data_seed)
    x = draw_regressors(rng, n, T, beta_dim)
    y_obs = simulate_panel(x, draw_shocks(rng, n, T), theta_dagger)
    e_sim = draw_shocks(stream(sim_seed), n, T)
    return DdcProblem(x, y_obs, e_sim, theta_dagger=theta_dagger)
