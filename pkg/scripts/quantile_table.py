"""Sample-quantile Monte Carlo: sample quantile vs sGN (local step) vs smoothed GMM.

    python scripts/quantile_table.py --reps 500 --out results/quantile
"""
import argparse
import os

from smoothgn.harness.experiment import ExperimentSpec, run_replications
from smoothgn.solver import JacobianMode, SolverConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/quantile")
    args = ap.parse_args()

    print(f"{'eps':>5} {'estimator':>16} {'avg':>7} {'std':>7} {'size':>7}")
    for eps in (0.5, 0.2, 0.1):
        cfg = SolverConfig(gamma=0.1, eps=eps, jacobian=JacobianMode("closed_form"), covering=None, b_max=200)
        spec = ExperimentSpec("quantile", {"n": 250, "t": 0.7}, cfg, baseline=cfg, replications=args.reps,
                              master_seed=args.seed, output_path=os.path.join(args.out, f"eps_{eps}"))
        res = run_replications(spec, workers=args.workers)
        for name, s in res.summaries.items():
            print(f"{eps:>5} {name:>16} {s.avg[0]:7.3f} {s.std[0]:7.3f} {s.size[0]:7.3f}")


if __name__ == "__main__":
    main()
