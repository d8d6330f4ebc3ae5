"""Planted-family benchmark at n=1000, m=500 over several sparsity levels."""

import argparse
import sys

from sparselp.bench import run_bench
from sparselp.generators import RANDOM_PLANTED, GenSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--m", type=int, default=500)
    ap.add_argument("--r", type=int, nargs="+", default=[10, 25, 50, 100])
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="CSV path (default: stdout)")
    args = ap.parse_args()

    specs = [GenSpec(RANDOM_PLANTED, args.n, args.m, r, seed=args.seed) for r in args.r]
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        run_bench(specs, args.instances, out=out)
    finally:
        if args.out:
            out.close()


if __name__ == "__main__":
    main()
