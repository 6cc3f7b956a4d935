"""Seeded Monte-Carlo replication runner.

A replication ``r`` derives independent child seeds for the data, the
simulation shocks, the solver's Jacobian draws and the starting value from
``(master_seed, r)``, so results do not depend on execution order, on the
number of workers, or on the total number of replications.
"""
from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Optional

import numpy as np
from scipy.special import ndtri

from ..covering import CoveringSpec
from ..moments import MomentProblem, ParamBox
from ..problems import (QuantileProblem, QuantRegProblem, baseline_smoothed_gn_solve, make_ddc,
                        quantile_std_err, sample_quantile, two_basin_problem)
from ..rng import child_seed, stream
from ..solver import JacobianMode, SolverConfig, SolverError, solve
from ..stopping import StoppingRule, chi2_quantile
from .summary import ReplicationSummary, summarize

log = logging.getLogger(__name__)

PROBLEM_KINDS = ("quantile", "quantreg", "ddc", "toy")


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentSpec:
    problem_kind: str
    problem_params: dict = field(default_factory=dict)
    solver: SolverConfig = field(default_factory=SolverConfig)
    baseline: Optional[SolverConfig] = None
    replications: int = 100
    master_seed: int = 0
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.problem_kind not in PROBLEM_KINDS:
            raise ExperimentError(f"unknown problem kind {self.problem_kind!r}")
        if self.replications < 1:
            raise ExperimentError("replications must be >= 1")


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    theta_dagger: np.ndarray
    summaries: dict  # estimator name -> ReplicationSummary
    records: list  # per-replication rows

    def write(self, out_dir: str) -> tuple[str, str]:
        os.makedirs(out_dir, exist_ok=True)
        rep_path = os.path.join(out_dir, "replications.csv")
        sum_path = os.path.join(out_dir, "summary.csv")
        _write_rows(rep_path, self.records)
        rows = []
        for name, s in self.summaries.items():
            for row in s.rows(name):
                row["theta_dagger"] = self.theta_dagger[row["coefficient"]]
                rows.append(row)
        _write_rows(sum_path, rows)
        return rep_path, sum_path


def _write_rows(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        w.writeheader()
        for row in rows:
            w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                        for k, v in row.items()})


# ---------------------------------------------------------------- problems

@dataclass
class Instance:
    problem: MomentProblem
    theta_dagger: np.ndarray
    theta0: Optional[np.ndarray]
    quantile: Optional[QuantileProblem] = None


def build_instance(kind: str, params: dict, master_seed: int, r: int) -> Instance:
    data_seed = child_seed(master_seed, r, "data")
    sim_seed = child_seed(master_seed, r, "sim")
    if kind == "quantile":
        n, t = int(params.get("n", 250)), float(params.get("t", 0.7))
        qp = QuantileProblem(stream(data_seed).standard_normal(n), t)
        lo, hi = params.get("box", (-5.0, 5.0))
        theta0 = params.get("theta0", 0.0)
        return Instance(qp.as_problem(ParamBox([lo], [hi])), np.array([ndtri(t)]),
                        None if theta0 is None else np.array([float(theta0)]), quantile=qp)
    if kind == "quantreg":
        n, d, t = int(params.get("n", 500)), int(params.get("d", 2)), float(params.get("t", 0.5))
        beta = np.asarray(params.get("beta", np.ones(d)), dtype=float)
        rng = stream(data_seed)
        x = np.column_stack([np.ones(n), rng.standard_normal((n, d - 1))])
        y = x @ beta + rng.standard_normal(n)
        qr = QuantRegProblem(y, x, x, t)
        # moments target P(y > x'theta) = t
        truth = beta.copy()
        truth[0] += ndtri(1.0 - t)
        theta0 = params.get("theta0", [0.0] * d)
        return Instance(qr.as_problem(), truth, np.asarray(theta0, dtype=float))
    if kind == "ddc":
        prob = make_ddc(data_seed, sim_seed, n=int(params.get("n", 250)), T=int(params.get("T", 10)),
                        beta_dim=int(params.get("beta_dim", 14)))
        theta0 = np.asarray(params.get("theta0", np.zeros(prob.beta_dim + 1)), dtype=float)
        return Instance(prob.as_problem(), prob.theta_dagger, theta0)
    pr = two_basin_problem(float(params.get("penalty", 0.5)))
    lo, hi = params.get("start_range", (-3.0, -0.5))
    theta0 = stream(child_seed(master_seed, r, "start")).uniform(lo, hi, 1)
    return Instance(pr, pr.theta_dagger, theta0)


# ---------------------------------------------------------------- running

def _reseed(cfg: SolverConfig, master_seed: int, r: int) -> SolverConfig:
    cov = cfg.covering
    if cov is not None and (cov.shift or cov.kind == "uniform"):
        cov = replace(cov, seed=child_seed(master_seed, r, "cover"))
    return replace(cfg, seed=child_seed(master_seed, r, "solver"), covering=cov)


def run_one(spec: ExperimentSpec, r: int) -> list[dict]:
    """All estimator rows for replication ``r``."""
    inst = build_instance(spec.problem_kind, spec.problem_params, spec.master_seed, r)
    prob = inst.problem
    thr = chi2_quantile(prob.p, 0.95) / prob.n
    runs = [("sgn", spec.solver, solve)]
    if spec.baseline is not None:
        runs.append(("sgmm", spec.baseline, baseline_smoothed_gn_solve))
    rows = []
    for name, cfg, fn in runs:
        cfg = _reseed(cfg, spec.master_seed, r)
        try:
            res = fn(prob, None, cfg, theta0=inst.theta0)
        except (SolverError, ArithmeticError, ValueError, RuntimeError) as exc:
            log.warning("replication %d (%s) failed: %s", r, name, exc)
            rows.append(_row(r, name, None, np.nan, 0, np.nan, error=str(exc)))
            continue
        eps = cfg.resolved_eps(prob.n)
        # smoothed-GMM is scored on the raw moments like everything else
        raw_norm = float(np.linalg.norm(prob.moments(res.theta_best))) if name != "sgn" else res.best_obj_norm
        se = quantile_std_err(inst.quantile, res.theta_best[0], eps) if inst.quantile is not None else np.nan
        rows.extend(_row(r, name, i, res.theta_best[i], res.iterations_run, raw_norm, se=se,
                         chi2_ok=raw_norm ** 2 <= thr) for i in range(prob.d_theta))
    if inst.quantile is not None:
        sq = sample_quantile(inst.quantile)
        eps = spec.solver.resolved_eps(prob.n)
        rows.append(_row(r, "sample_quantile", 0, sq, 0, abs(inst.quantile.ecdf(sq) - inst.quantile.t),
                         se=quantile_std_err(inst.quantile, sq, eps)))
    return rows


def _row(r, estimator, coef, estimate, iterations, obj_norm, se=np.nan, chi2_ok=True, error=""):
    return {"replication": r, "estimator": estimator, "coefficient": -1 if coef is None else coef,
            "estimate": float(estimate) if estimate is not None else np.nan, "obj_norm": obj_norm,
            "iterations": iterations, "std_err": se, "chi2_ok": bool(chi2_ok), "error": error}


def run_replications(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    indices = range(spec.replications)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_rep = list(pool.map(run_one, [spec] * spec.replications, indices))
    else:
        per_rep = [run_one(spec, r) for r in indices]
    records = [row for rows in per_rep for row in rows]
    truth = build_instance(spec.problem_kind, spec.problem_params, spec.master_seed, 0).theta_dagger
    summaries = summarize_records(records, truth)
    if all(s.replications == 0 for s in summaries.values()):
        raise ExperimentError("every replication failed")
    result = ExperimentResult(spec, np.asarray(truth, dtype=float), summaries, records)
    if spec.output_path:
        result.write(spec.output_path)
    return result


def summarize_records(records: list[dict], theta_dagger) -> dict:
    """Rebuild per-estimator summaries from per-replication rows."""
    truth = np.atleast_1d(np.asarray(theta_dagger, dtype=float))
    out = {}
    for name in dict.fromkeys(row["estimator"] for row in records):
        rows = [row for row in records if row["estimator"] == name]
        reps = sorted({row["replication"] for row in rows})
        errors = sorted({row["replication"] for row in rows if row["error"]})
        good = [r for r in reps if r not in errors]
        k = max(row["coefficient"] for row in rows) + 1
        tr = truth[:k]
        if not good:
            s = ReplicationSummary(np.full(k, np.nan), np.full(k, np.nan), np.full(k, np.nan),
                                   np.full(k, np.nan), None, replications=0)
        else:
            est = np.full((len(good), k), np.nan)
            se = np.full((len(good), k), np.nan)
            objs, fails = [], 0
            pos = {r: i for i, r in enumerate(good)}
            for row in rows:
                if row["replication"] in pos:
                    est[pos[row["replication"]], row["coefficient"]] = row["estimate"]
                    se[pos[row["replication"]], row["coefficient"]] = row["std_err"]
            for r in good:
                first = next(row for row in rows if row["replication"] == r)
                objs.append(first["obj_norm"])
                fails += not first["chi2_ok"]
            have_se = bool(np.all(np.isfinite(se)))
            s = summarize(est, tr, se if have_se else None, objs)
            s.chi2_failures = fails
        s.errors = len(errors)
        out[name] = s
    return out


# ---------------------------------------------------------------- config files

def solver_config_from_dict(d: dict | None) -> SolverConfig:
    d = dict(d or {})
    if "jacobian" in d:
        d["jacobian"] = JacobianMode(**d["jacobian"])
    if "covering" in d:
        d["covering"] = None if d["covering"] in (None, False, "none") else CoveringSpec(**d["covering"])
    if "stop" in d:
        d["stop"] = StoppingRule(**d["stop"])
    return SolverConfig(**d)


def spec_from_dict(d: dict) -> ExperimentSpec:
    d = dict(d)
    d["solver"] = solver_config_from_dict(d.get("solver"))
    if d.get("baseline") is not None:
        d["baseline"] = solver_config_from_dict(d["baseline"])
    return ExperimentSpec(**d)


def spec_to_dict(spec: ExperimentSpec) -> dict[str, Any]:
    return asdict(spec)


def load_spec(path: str) -> ExperimentSpec:
    """Read an ExperimentSpec from a JSON or TOML file."""
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    else:
        with open(path) as fh:
            data = json.load(fh)
    return spec_from_dict(data)
