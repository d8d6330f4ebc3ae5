"""Solve time against sparsity on the simplex family (CSV of r, seconds, iterations)."""

import argparse
import sys

from sparselp.bench import sparsity_sweep, sweep_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--r", type=int, nargs="+", default=[2000, 4000, 6000, 8000, 10000])
    ap.add_argument("--instances", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()

    sweep = sparsity_sweep(args.n, args.r, args.instances, seed=args.seed)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            sweep_to_csv(sweep, fh)
    else:
        sweep_to_csv(sweep, sys.stdout)


if __name__ == "__main__":
    main()
