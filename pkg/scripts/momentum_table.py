"""Optimal heavy-ball momentum for a grid of learning rates, written as CSV."""
import argparse
import csv
import sys

from smoothgn.momentum import TABLE_GAMMAS, momentum_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gammas", type=float, nargs="*", default=list(TABLE_GAMMAS))
    ap.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    args = ap.parse_args()
    rows = momentum_table(args.gammas)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows({k: round(v, 4) for k, v in row.items()} for row in rows)


if __name__ == "__main__":
    main()
