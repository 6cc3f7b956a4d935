"""Smoothed-GMM baseline: Gauss-Newton on the smoothed moments themselves.

Unlike :func:`smoothgn.solver.solve`, both steps use the smoothed moments, so
the fixed point solves the smoothed equations and inherits their smoothing
bias.
"""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..moments import MomentProblem
from ..smoothing import SmoothingConfig, gaussian_draws, mc_smoothed_moments
from ..solver import JacobianMode, SolverConfig, SolverResult, solve

FROZEN_DRAWS = 200


def smoothed_problem(problem: MomentProblem, eps: float, seed: int = 0) -> MomentProblem:
    """A problem whose moments are the eps-smoothed moments of ``problem``.

    Uses the closed form when available, then a problem-specific surrogate,
    then a Monte-Carlo average over frozen draws.
    """
    cf = problem.closed_form_smoothed
    if cf is not None:
        return replace(problem, eval=lambda th: cf(th, eps)[0],
                       closed_form_smoothed=lambda th, _e: cf(th, eps),
                       smoothed_eval=None, name=f"{problem.name}_smoothed")
    if problem.smoothed_eval is not None:
        se = problem.smoothed_eval
        return replace(problem, eval=lambda th: se(th, eps), smoothed_eval=None,
                       name=f"{problem.name}_smoothed")
    draws = gaussian_draws(seed, problem.d_theta, FROZEN_DRAWS)
    cfg = SmoothingConfig(eps, FROZEN_DRAWS, seed)
    return replace(problem, eval=lambda th: mc_smoothed_moments(problem, th, cfg, draws),
                   smoothed_eval=None, name=f"{problem.name}_smoothed")


def baseline_smoothed_gn_solve(problem: MomentProblem, W=None, cfg: SolverConfig | None = None,
                               theta0=None) -> SolverResult:
    cfg = cfg or SolverConfig()
    eps = cfg.resolved_eps(problem.n)
    sp = smoothed_problem(problem, eps, seed=cfg.seed)
    if sp.closed_form_smoothed is not None:
        cfg = replace(cfg, jacobian=JacobianMode("closed_form"))
    elif cfg.jacobian.mode == "closed_form":
        cfg = replace(cfg, jacobian=JacobianMode("quasi_newton"))
    return solve(sp, W, cfg, theta0=theta0)


def smoothed_root_bisection(fn, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of a continuous increasing scalar function on [lo, hi]."""
    flo = fn(lo)
    if flo > 0 or fn(hi) < 0:
        raise ValueError("no sign change on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


__all__ = ["baseline_smoothed_gn_solve", "smoothed_problem", "smoothed_root_bisection"]
