"""Two-basin toy: success rate of sGN with and without the global step."""
import argparse

import numpy as np

from smoothgn.covering import CoveringSpec
from smoothgn.harness.experiment import ExperimentSpec, run_replications
from smoothgn.solver import JacobianMode, SolverConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--kind", choices=("sobol", "halton", "uniform"), default="sobol")
    ap.add_argument("--b-max", type=int, default=200)
    ap.add_argument("--seed", type=int, default=77)
    args = ap.parse_args()

    grid = np.linspace(-3, 3, 100_001)
    target = grid[np.argmin((grid ** 2 - 1) ** 2 + (0.5 * (grid - 1)) ** 2)]
    for label, cov in (("global", CoveringSpec(args.kind, shift=args.kind == "sobol")), ("local", None)):
        cfg = SolverConfig(gamma=0.1, eps=0.1, jacobian=JacobianMode("monte_carlo", L=25), covering=cov,
                           b_max=args.b_max)
        res = run_replications(ExperimentSpec("toy", {}, cfg, replications=args.reps, master_seed=args.seed))
        est = np.array([r["estimate"] for r in res.records])
        print(f"{label:>7}: {np.mean(np.abs(est - target) <= 1e-2):.0%} within 1e-2 of {target:.5f}")


if __name__ == "__main__":
    main()
