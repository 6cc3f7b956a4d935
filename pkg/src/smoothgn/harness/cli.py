"""Command-line entry point: ``smoothgn <subcommand> [options]``."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace

import numpy as np

from ..covering import CoveringSequence, ParamBox, default_probes, discrepancy
from ..momentum import TABLE_GAMMAS, momentum_table
from ..solver import solve
from ..stopping import chi2_quantile
from .experiment import build_instance, load_spec, run_replications, _reseed


def _out_dir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_solve(args) -> int:
    spec = load_spec(args.config)
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    inst = build_instance(spec.problem_kind, spec.problem_params, spec.master_seed, 0)
    cfg = _reseed(spec.solver, spec.master_seed, 0)
    res = solve(inst.problem, None, cfg, theta0=inst.theta0)
    path = os.path.join(_out_dir(args), "trace.csv")
    res.to_csv(path)
    print(path)
    print(json.dumps({"theta_best": res.theta_best.tolist(), "best_obj_norm": res.best_obj_norm,
                      "iterations": res.iterations_run, "stopped_by": res.stopped_by}))
    return 0


def cmd_replicate(args) -> int:
    spec = load_spec(args.config)
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    out = args.out or spec.output_path or "."
    spec = replace(spec, output_path=out)
    result = run_replications(spec, workers=args.workers)
    print(os.path.join(out, "replications.csv"))
    print(os.path.join(out, "summary.csv"))
    for name, s in result.summaries.items():
        print(f"{name}: avg={np.round(s.avg[:3], 4).tolist()} std={np.round(s.std[:3], 4).tolist()} "
              f"size={None if s.size is None else np.round(s.size[:3], 3).tolist()} errors={s.errors}")
    return 0


def cmd_momentum_table(args) -> int:
    rows = momentum_table(args.gammas or TABLE_GAMMAS)
    fh = open(os.path.join(_out_dir(args), "momentum_table.csv"), "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    for row in rows:
        w.writerow({k: f"{v:.4f}" for k, v in row.items()})
    if fh is not sys.stdout:
        fh.close()
    return 0


def cmd_cover(args) -> int:
    box = ParamBox.cube(args.lo, args.hi, args.dim)
    seq = CoveringSequence(args.kind, box, seed=args.seed or 0, skip_first=not args.no_skip,
                           shift=args.shift)
    pts = seq.take(args.k)
    fh = open(os.path.join(_out_dir(args), "cover.csv"), "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow([f"theta_{i}" for i in range(args.dim)])
    w.writerows(pts.tolist())
    if fh is not sys.stdout:
        fh.close()
    if args.discrepancy:
        d = discrepancy(pts, default_probes(box, args.probes))
        print(json.dumps({"kind": args.kind, "k": args.k, "discrepancy_estimate": d}), file=sys.stderr)
    return 0


def cmd_chi2(args) -> int:
    q = chi2_quantile(args.p, args.level)
    print(json.dumps({"p": args.p, "level": args.level, "quantile": q,
                      "threshold": q / args.n if args.n else None}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smoothgn", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=False):
        if config:
            p.add_argument("--config", required=True, help="experiment spec (.json or .toml)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", default=None, help="output directory")

    p = sub.add_parser("solve", help="single run, writes trace.csv")
    common(p, config=True)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("replicate", help="Monte-Carlo replications -> CSV")
    common(p, config=True)
    p.set_defaults(fn=cmd_replicate)

    p = sub.add_parser("momentum-table", help="optimal momentum for a grid of learning rates")
    common(p)
    p.add_argument("--gammas", type=float, nargs="*")
    p.set_defaults(fn=cmd_momentum_table)

    p = sub.add_parser("cover", help="dump covering points, optionally estimate discrepancy")
    common(p)
    p.add_argument("--kind", choices=("sobol", "halton", "uniform"), default="sobol")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("-k", type=int, default=256)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--no-skip", action="store_true", help="keep the index-0 point")
    p.add_argument("--shift", action="store_true", help="seeded digital shift (Sobol)")
    p.add_argument("--discrepancy", action="store_true")
    p.add_argument("--probes", type=int, default=2 ** 14)
    p.set_defaults(fn=cmd_cover)

    p = sub.add_parser("chi2", help="chi-square quantile / stopping threshold")
    common(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(fn=cmd_chi2)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # noqa: BLE001 - reported as a machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
