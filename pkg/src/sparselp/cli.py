"""Command-line entry point: ``sparselp {solve,gen,oracle,bench}``.

Exit codes: 0 success, 1 solver failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench
from .core import SparseLPError, load_problem, save_problem, save_vector
from .dual_primal import RestrictedInfeasible, solve
from .generators import FAMILIES, RANDOM_PLANTED, GenSpec, gen_random_planted, gen_simplex
from .oracle import TooLarge, enumerate_optimal
from .spadmm import SolverConfig, residuals

EXIT_OK, EXIT_SOLVER, EXIT_INPUT = 0, 1, 2


def _cmd_solve(args) -> int:
    problem = load_problem(args.instance)
    config = SolverConfig(sigma=args.sigma, tau=args.tau, tol=args.tol, maxiter=args.maxiter)
    trace = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        sol = solve(problem, config, trace=trace)
    except RestrictedInfeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    finally:
        if trace is not None:
            trace.close()
    st = sol.dual_stats
    print(f"objective    {sol.objective:.12g}")
    print(f"dual value   {sol.dual_objective:.12g}")
    print(f"certificate  {sol.certificate.kind}")
    if sol.certificate.index_set is not None:
        print(f"index set    {list(sol.certificate.index_set)}")
    print(f"zeta         {st.zeta:.3e}")
    print(f"eta          {st.eta:.3e}")
    print(f"iterations   {st.iterations} ({st.status})")
    out = Path(args.out) if args.out else Path(args.instance).with_suffix(".solution.json")
    save_vector(sol.x, out)
    print(f"solution     {out}")
    return EXIT_OK if st.converged else EXIT_SOLVER


def _cmd_gen(args) -> int:
    m = 1 if args.family == "simplex" else args.m
    if m is None:
        raise SparseLPError("--m is required for the random family")
    spec = GenSpec(args.family, args.n, m, args.r, u=args.u, seed=args.seed)
    if spec.family == RANDOM_PLANTED:
        problem, xopt = gen_random_planted(spec)
    else:
        problem, xopt = gen_simplex(spec), None
    save_problem(problem, args.out)
    if args.xopt:
        if xopt is None:
            raise SparseLPError("--xopt applies to the random family only")
        save_vector(xopt, args.xopt)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    problem = load_problem(args.instance)
    res = enumerate_optimal(problem)
    if not res.feasible:
        print("infeasible: no support of size r admits a feasible point")
        return EXIT_SOLVER
    print(f"optimum      {res.optimum:.12g}")
    print(f"index sets   {json.dumps([list(I) for I in res.optimal_index_sets])}")
    print(f"minimizer    {json.dumps([float(v) for v in np.round(res.minimizers[0], 12)])}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    cfg = bench.BenchConfig.load(args.config)
    record_time = cfg.record_time and not args.no_time
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        rows = bench.run_bench(cfg.specs, cfg.instances, cfg.solver, cfg.success_rel_err,
                               record_time=record_time, out=fh)
    for row in rows:
        print(",".join(row.csv_fields()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparselp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance with the dual-primal method")
    s.add_argument("instance")
    s.add_argument("--sigma", type=float, default=1.0)
    s.add_argument("--tau", type=float, default=1.618)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--maxiter", type=int, default=5000)
    s.add_argument("--trace", help="CSV file for per-iteration zeta, eta, theta")
    s.add_argument("--out", help="solution JSON (default: <instance>.solution.json)")
    s.set_defaults(func=_cmd_solve)

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--u", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--xopt", help="also write the planted solution (random family)")
    g.set_defaults(func=_cmd_gen)

    o = sub.add_parser("oracle", help="exhaustive ground truth (n <= 25)")
    o.add_argument("instance")
    o.set_defaults(func=_cmd_oracle)

    b = sub.add_parser("bench", help="run a benchmark configuration")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--no-time", action="store_true", help="leave mean_cpu_s empty (byte-reproducible CSV)")
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SparseLPError, TooLarge, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
