"""Monte-Carlo summary statistics: average, std, bias, MAE and test size."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

Z_975 = 1.959963984540054


@dataclass
class ReplicationSummary:
    avg: np.ndarray
    std: np.ndarray
    bias: np.ndarray
    mae: np.ndarray
    size: Optional[np.ndarray]
    mean_obj_norm: float = float("nan")
    replications: int = 0
    errors: int = 0
    chi2_failures: int = 0
    extra: dict = field(default_factory=dict)

    def rows(self, estimator: str) -> list[dict]:
        out = []
        for i in range(self.avg.size):
            out.append({
                "estimator": estimator,
                "coefficient": i,
                "avg": self.avg[i],
                "std": self.std[i],
                "bias": self.bias[i],
                "mae": self.mae[i],
                "size": np.nan if self.size is None else self.size[i],
                "mean_obj_norm": self.mean_obj_norm,
                "replications": self.replications,
                "errors": self.errors,
                "chi2_failures": self.chi2_failures,
            })
        return out


def summarize(theta_tilde: Sequence, theta_dagger, std_errs: Sequence | None = None,
              obj_norms: Sequence | None = None) -> ReplicationSummary:
    """Per-coefficient summary over replications.

    ``size`` is the share of replications with ``|theta - theta_dagger| / se``
    above the two-sided 5% normal critical value; it is None without standard
    errors.
    """
    est = np.asarray(theta_tilde, dtype=float)
    if est.ndim == 1:
        est = est[:, None]
    if est.size == 0:
        raise ValueError("no estimates to summarize")
    truth = np.atleast_1d(np.asarray(theta_dagger, dtype=float))
    R = est.shape[0]
    avg = est.mean(axis=0)
    std = est.std(axis=0, ddof=1) if R > 1 else np.zeros_like(avg)
    size = None
    if std_errs is not None:
        se = np.asarray(std_errs, dtype=float).reshape(est.shape)
        size = np.mean(np.abs(est - truth) / se > Z_975, axis=0)
    return ReplicationSummary(
        avg=avg,
        std=std,
        bias=avg - truth,
        mae=np.mean(np.abs(est - truth), axis=0),
        size=size,
        mean_obj_norm=float(np.mean(obj_norms)) if obj_norms is not None and len(obj_norms) else float("nan"),
        replications=R,
    )
