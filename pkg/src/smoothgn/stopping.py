"""Stopping rules: fixed budget, or chi-square threshold plus extra iterations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from scipy.special import gammainc

from .moments import ContractError


def chi2_cdf(x: float, p: int) -> float:
    if x <= 0:
        return 0.0
    return float(gammainc(p / 2.0, x / 2.0))


def chi2_quantile(p: int, level: float, tol: float = 1e-12) -> float:
    """Inverse chi-square CDF by bisection on the regularized incomplete gamma."""
    if p < 1:
        raise ContractError("degrees of freedom must be >= 1")
    if not 0.0 < level < 1.0:
        raise ContractError(f"level must lie in (0, 1), got {level}")
    lo, hi = 0.0, max(1.0, 2.0 * p)
    while chi2_cdf(hi, p) < level:
        hi *= 2.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if chi2_cdf(mid, p) < level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class StoppingRule:
    """``mode`` is ``"fixed"`` (run b_max iterations) or ``"chi2"``.

    Under ``"chi2"`` the run stops ``extra_j`` iterations after the first
    iterate whose squared weighted moment norm is below
    ``chi2_quantile(p, level) / n``; b_max still caps the run.
    """
    mode: str = "fixed"
    level: float = 0.95
    extra_j: int = 0

    def __post_init__(self):
        if self.mode not in ("fixed", "chi2"):
            raise ContractError(f"unknown stopping mode {self.mode!r}")
        if self.extra_j < 0:
            raise ContractError("extra_j must be >= 0")
        if not 0.0 < self.level < 1.0:
            raise ContractError("level must lie in (0, 1)")

    def threshold(self, p: int, n: int) -> float:
        return chi2_quantile(p, self.level) / n


def stopping_check(obj_norms: Sequence[float], rule: StoppingRule, p: int, n: int,
                   b_max: int) -> str | None:
    """Return the reason to stop after the latest iterate, or None to continue.

    ``obj_norms`` holds the weighted moment norms of the iterates visited so far.
    """
    if not obj_norms:
        raise ContractError("trace is empty")
    b = len(obj_norms) - 1
    if rule.mode == "chi2":
        thr = rule.threshold(p, n)
        k = next((i for i, v in enumerate(obj_norms) if v * v <= thr), None)
        if k is not None and b >= k + rule.extra_j:
            return "chi2"
    if len(obj_norms) >= b_max:
        return "fixed"
    return None
