"""Simplex-family benchmark with r = 5% of n."""

import argparse
import sys

from sparselp.bench import run_bench
from sparselp.generators import SIMPLEX, GenSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[5000, 10000])
    ap.add_argument("--ratio", type=float, default=0.05)
    ap.add_argument("--u", type=float, default=1.0)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()

    specs = [GenSpec(SIMPLEX, n, 1, max(1, int(args.ratio * n)), u=args.u, seed=args.seed) for n in args.n]
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        run_bench(specs, args.instances, out=out)
    finally:
        if args.out:
            out.close()


if __name__ == "__main__":
    main()
