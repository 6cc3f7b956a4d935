"""Smoothed Gauss-Newton: local step on raw moments with a smoothed Jacobian,
optional heavy-ball momentum, a covering-sequence global step and best-iterate
output."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .covering import CoveringSpec
from .moments import ContractError, MomentProblem, as_weight_matrix, clamp_to_box, weighted_norm
from .momentum import optimal_alpha
from .qn import QnBuffer, RankDeficiencyError, default_L, qn_init, qn_update_jacobian
from .smoothing import SmoothingConfig, mc_jacobian
from .stopping import StoppingRule, stopping_check

log = logging.getLogger(__name__)

LOCAL = "local"
GLOBAL = "global"
JACOBIAN_MODES = ("closed_form", "monte_carlo", "quasi_newton")


class SolverError(RuntimeError):
    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace or []


@dataclass
class JacobianMode:
    mode: str = "quasi_newton"
    L: Optional[int] = None  # None -> max(25, ceil(1.5 d)) for quasi-Newton, 100 for MC
    directions_per_iter: int = 1
    estimator: str = "ls"  # quasi-Newton only: "ls" or "mean"

    def __post_init__(self):
        if self.mode not in JACOBIAN_MODES:
            raise ContractError(f"unknown jacobian mode {self.mode!r}")
        if self.directions_per_iter < 1:
            raise ContractError("directions_per_iter must be >= 1")


@dataclass
class SolverConfig:
    gamma: float = 0.1
    eps: Optional[float] = None  # None -> n ** (-1/4)
    alpha: float | str = 0.0  # "optimal" -> optimal_alpha(gamma)
    jacobian: JacobianMode = field(default_factory=JacobianMode)
    covering: Optional[CoveringSpec] = field(default_factory=CoveringSpec)  # None: local only
    b_max: int = 300
    stop: StoppingRule = field(default_factory=StoppingRule)
    sigma_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ContractError("gamma must lie in (0, 1)")
        if self.eps is not None and not self.eps > 0:
            raise ContractError("eps must be positive")
        if self.b_max < 1:
            raise ContractError("b_max must be >= 1")
        if self.alpha != "optimal" and not 0.0 <= float(self.alpha) < 1.0:
            raise ContractError("alpha must lie in [0, 1)")

    def resolved_eps(self, n: int) -> float:
        return float(self.eps) if self.eps is not None else float(n) ** -0.25

    def resolved_alpha(self) -> float:
        if self.alpha == "optimal":
            return optimal_alpha(self.gamma)[0]
        return float(self.alpha)


@dataclass
class IterationRecord:
    b: int
    theta: np.ndarray
    obj_norm: float
    step_kind: str
    jacobian_sigma_min: float = float("nan")
    regularized: bool = False
    clamped: bool = False


@dataclass
class SolverResult:
    theta_best: np.ndarray
    best_obj_norm: float
    iterations_run: int
    trace: list
    stopped_by: str
    best_index: int = 0

    @property
    def thetas(self) -> np.ndarray:
        return np.array([r.theta for r in self.trace])

    @property
    def obj_norms(self) -> np.ndarray:
        return np.array([r.obj_norm for r in self.trace])

    def to_csv(self, path) -> None:
        d = self.theta_best.size
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["b", *[f"theta_{i}" for i in range(d)], "obj_norm", "step_kind", "sigma_min"])
            for r in self.trace:
                w.writerow([r.b, *map(repr, r.theta.tolist()), repr(r.obj_norm), r.step_kind,
                            repr(r.jacobian_sigma_min)])


def _chol(W: np.ndarray) -> np.ndarray:
    return np.linalg.cholesky(W)


def gauss_newton_direction(G, W, g, sigma_tol: float = 1e-10, chol=None):
    """Solve the weighted normal equations (G'WG) delta = G'W g.

    Works on the whitened least-squares problem C'G delta ~ C'g with W = CC',
    which avoids squaring the condition number. When sigma_min(G) < sigma_tol
    the minimum-norm solution with singular values below sigma_tol discarded
    is returned instead.

    Returns ``(delta, sigma_min, regularized)``.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    g = np.atleast_1d(np.asarray(g, dtype=float))
    C = _chol(W) if chol is None else chol
    whiten = not _is_identity(C)
    A = C.T @ G if whiten else G
    r = C.T @ g if whiten else g
    delta, _, _, s_a = np.linalg.lstsq(A, r, rcond=None)
    s_g = np.linalg.svd(G, compute_uv=False) if whiten else s_a
    sigma_min = float(s_g[-1]) if s_g.size == G.shape[1] else 0.0
    if not np.isfinite(sigma_min) or sigma_min < sigma_tol:
        rcond = sigma_tol / s_g[0] if s_g.size and s_g[0] > 0 else None
        delta, *_ = np.linalg.lstsq(A, r, rcond=rcond)
        return delta, sigma_min, True
    return delta, sigma_min, False


def _is_identity(C: np.ndarray) -> bool:
    return C.shape[0] == C.shape[1] and np.array_equal(C, np.eye(C.shape[0]))


def local_step(problem: MomentProblem, theta_b, theta_prev, G_b, W, gamma: float, alpha: float = 0.0,
               g_b=None, sigma_tol: float = 1e-10) -> np.ndarray:
    """theta_b - gamma (G'WG)^{-1} G'W g(theta_b) + alpha (theta_b - theta_prev), clamped."""
    theta_b = np.asarray(theta_b, dtype=float)
    theta_prev = np.asarray(theta_prev, dtype=float)
    if g_b is None:
        g_b = problem.moments(theta_b)
    delta, _, _ = gauss_newton_direction(G_b, W, g_b, sigma_tol)
    return clamp_to_box(theta_b - gamma * delta + alpha * (theta_b - theta_prev), problem.box)


def global_step(problem: MomentProblem, theta_local, theta_candidate, W, local_norm: float | None = None):
    """Keep the covering candidate only if its weighted moment norm is strictly smaller.

    Evaluates the moments once at the candidate (and once at ``theta_local``
    unless ``local_norm`` is given). Returns ``(theta, step_kind)``.
    """
    if local_norm is None:
        local_norm = weighted_norm(problem.moments(theta_local), W)
    cand_norm = weighted_norm(problem.moments(theta_candidate), W)
    if cand_norm < local_norm:
        return np.asarray(theta_candidate, dtype=float), GLOBAL
    return np.asarray(theta_local, dtype=float), LOCAL


class _JacobianEstimator:
    def __init__(self, problem: MomentProblem, cfg: SolverConfig, eps: float):
        self.problem, self.cfg, self.eps = problem, cfg, eps
        self.mode = cfg.jacobian
        self.qn: QnBuffer | None = None
        if self.mode.mode == "closed_form" and problem.closed_form_smoothed is None:
            raise ContractError(f"problem {problem.name!r} has no closed-form smoothed Jacobian")

    def __call__(self, b: int, theta: np.ndarray, g: np.ndarray) -> np.ndarray:
        mode, problem, eps = self.mode, self.problem, self.eps
        if mode.mode == "closed_form":
            return np.atleast_2d(problem.closed_form_smoothed(theta, eps)[1])
        if mode.mode == "monte_carlo":
            L = mode.L or 100
            return mc_jacobian(problem, theta, SmoothingConfig(eps, L, self.cfg.seed), counter=b, g0=g)
        if self.qn is None:
            L = mode.L or default_L(problem.d_theta)
            self.qn = qn_init(problem, theta, eps, L, seed=self.cfg.seed, g0=g,
                              estimator=mode.estimator)
            return self.qn.jacobian()
        return qn_update_jacobian(self.qn, problem, theta, g_b=g, directions=mode.directions_per_iter)


def solve(problem: MomentProblem, W=None, cfg: SolverConfig | None = None, theta0=None) -> SolverResult:
    """Run smoothed Gauss-Newton and return the best iterate with its trace.

    Iteration ``b`` visits ``theta_b``: it records the weighted moment norm,
    checks the stopping rule, estimates the smoothed Jacobian, takes the local
    step and then the global step against the next covering point. Without
    ``theta0`` the run starts at the first covering point (box centre when the
    global step is disabled).
    """
    cfg = cfg or SolverConfig()
    W = as_weight_matrix(W, problem.p)
    C = _chol(W)
    eps = cfg.resolved_eps(problem.n)
    alpha = cfg.resolved_alpha()
    box = problem.box
    cover = cfg.covering.build(box) if cfg.covering is not None else None
    jac = _JacobianEstimator(problem, cfg, eps)

    if theta0 is None:
        theta0 = cover.next_point() if cover is not None else 0.5 * (box.lower + box.upper)
    theta = clamp_to_box(np.asarray(theta0, dtype=float), box)
    g = problem.moments(theta)
    norm = weighted_norm(g, W)
    theta_prev = theta
    kind, clamped = LOCAL, False
    trace: list[IterationRecord] = []
    norms: list[float] = []
    stopped_by = "fixed"

    for b in range(cfg.b_max):
        rec = IterationRecord(b, theta.copy(), norm, kind, clamped=clamped)
        trace.append(rec)
        norms.append(norm)
        reason = stopping_check(norms, cfg.stop, problem.p, problem.n, cfg.b_max)
        if reason is not None:
            stopped_by = reason
            break
        try:
            G = jac(b, theta, g)
        except RankDeficiencyError as exc:
            raise SolverError(f"Jacobian rank failure at b={b}: {exc}", trace) from exc
        delta, rec.jacobian_sigma_min, rec.regularized = gauss_newton_direction(G, W, g, cfg.sigma_tol, C)
        raw = theta - cfg.gamma * delta + alpha * (theta - theta_prev)
        theta_new = clamp_to_box(raw, box)
        clamped = bool(np.any(theta_new != raw))
        g_new = problem.moments(theta_new)
        norm_new = weighted_norm(g_new, W)
        kind = LOCAL
        theta_prev = theta
        if cover is not None:
            cand = cover.next_point()
            g_cand = problem.moments(cand)
            norm_cand = weighted_norm(g_cand, W)
            if norm_cand < norm_new:
                theta_new, g_new, norm_new, kind, clamped = cand, g_cand, norm_cand, GLOBAL, False
                # no momentum across a jump
                theta_prev = cand
        theta, g, norm = theta_new, g_new, norm_new

    best = int(np.argmin(norms))
    return SolverResult(trace[best].theta.copy(), norms[best], len(trace), trace, stopped_by, best)
