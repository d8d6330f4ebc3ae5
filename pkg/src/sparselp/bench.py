"""Benchmark harness over the generated instance families."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from os import PathLike
from typing import Mapping, Sequence, TextIO

import numpy as np

from .dual_primal import RestrictedInfeasible, Solution, solve
from .generators import RANDOM_PLANTED, SIMPLEX, GenSpec, gen_random_planted, gen_simplex, instance_rng
from .oracle import ENUM_MAX_N, enumerate_optimal
from .spadmm import SolverConfig

CSV_HEADER = ("family", "n", "m", "r", "instances", "mean_iters", "success_rate", "mean_cpu_s")

# sigma = 1 is slow on the one-row simplex family; 0.1 came out of a sweep
FAMILY_DEFAULTS = {
    RANDOM_PLANTED: SolverConfig(),
    SIMPLEX: SolverConfig(sigma=0.1),
}


@dataclass
class BenchRow:
    family: str
    n: int
    m: int
    r: int
    instances: int
    mean_iterations: float
    success_rate: float
    mean_cpu_seconds: float | None

    def csv_fields(self) -> list[str]:
        t = "" if self.mean_cpu_seconds is None else f"{self.mean_cpu_seconds:.6f}"
        return [
            self.family, str(self.n), str(self.m), str(self.r), str(self.instances),
            repr(float(self.mean_iterations)), repr(float(self.success_rate)), t,
        ]


@dataclass
class InstanceRecord:
    spec: GenSpec
    index: int
    success: bool
    iterations: int
    seconds: float
    objective: float
    certificate: str
    dual_status: str
    reference: float
    max_theta: float = float("-inf")
    x: np.ndarray | None = field(default=None, repr=False)


def make_instance(spec: GenSpec, index: int):
    rng = instance_rng(spec.seed, index)
    if spec.family == RANDOM_PLANTED:
        return gen_random_planted(spec, rng)
    return gen_simplex(spec, rng), None


def _config_for(spec: GenSpec, config) -> SolverConfig:
    if isinstance(config, SolverConfig):
        return config
    if config is None:
        return FAMILY_DEFAULTS[spec.family]
    return config.get(spec.family, FAMILY_DEFAULTS[spec.family])


def run_instance(spec: GenSpec, index: int, config: SolverConfig, success_rel_err: float = 1e-2,
                 track_theta: bool = False) -> InstanceRecord:
    problem, xopt = make_instance(spec, index)
    thetas = []
    cb = (lambda k, it, zeta, eta, theta: thetas.append(theta)) if track_theta else None
    t0 = time.perf_counter()
    try:
        sol: Solution | None = solve(problem, config, callback=cb)
    except RestrictedInfeasible:
        sol = None
    seconds = time.perf_counter() - t0
    max_theta = max(thetas) if thetas else float("-inf")
    if sol is None:
        return InstanceRecord(spec, index, False, -1, seconds, float("inf"), "RestrictedInfeasible",
                              "", float("nan"), max_theta)

    if spec.family == RANDOM_PLANTED:
        reference = float(problem.c @ xopt)
        nx = np.linalg.norm(sol.x)
        success = bool(nx > 0 and np.linalg.norm(sol.x - xopt) / nx < success_rel_err)
    elif spec.n <= ENUM_MAX_N:
        reference = enumerate_optimal(problem).optimum
        success = sol.objective <= reference + 1e-6
    else:
        reference = float("nan")
        success = sol.certificate.certified
    return InstanceRecord(spec, index, success, sol.dual_stats.iterations, seconds, sol.objective,
                          sol.certificate.kind, sol.dual_stats.status, reference, max_theta, sol.x)


def run_bench(
    specs: Sequence[GenSpec],
    per_spec_instances: int,
    config: SolverConfig | Mapping[str, SolverConfig] | None = None,
    success_rel_err: float = 1e-2,
    record_time: bool = True,
    out: TextIO | None = None,
    records: list | None = None,
    track_theta: bool = False,
) -> list[BenchRow]:
    """Solve ``per_spec_instances`` instances per spec and aggregate.

    Instance ``i`` of a spec is drawn from ``SeedSequence([spec.seed, i])``.
    With ``record_time=False`` the timing column is left empty so the CSV is
    reproducible byte for byte.
    """
    if per_spec_instances < 1:
        raise ValueError("per_spec_instances must be at least 1")
    rows = []
    writer = csv.writer(out, lineterminator="\n") if out is not None else None
    if writer:
        writer.writerow(CSV_HEADER)
    for spec in specs:
        cfg = _config_for(spec, config)
        recs = [run_instance(spec, i, cfg, success_rel_err, track_theta) for i in range(per_spec_instances)]
        if records is not None:
            records.extend(recs)
        row = BenchRow(
            family=spec.family, n=spec.n, m=spec.m, r=spec.r, instances=per_spec_instances,
            mean_iterations=float(np.mean([r.iterations for r in recs])),
            success_rate=sum(r.success for r in recs) / per_spec_instances,
            mean_cpu_seconds=float(np.mean([r.seconds for r in recs])) if record_time else None,
        )
        rows.append(row)
        if writer:
            writer.writerow(row.csv_fields())
    return rows


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.csv_fields())
    return buf.getvalue()


def sparsity_sweep(n: int, rs: Sequence[int], instances: int, config: SolverConfig | None = None,
                   seed: int = 0, u: float = 1.0) -> list[tuple[int, float, float]]:
    """Mean solve time and iterations of the simplex family across sparsity levels.

    Every r reuses the same instance seeds, so only r changes along the sweep.
    Returns ``(r, mean_cpu_seconds, mean_iterations)`` triples.
    """
    cfg = config or FAMILY_DEFAULTS[SIMPLEX]
    out = []
    for r in rs:
        spec = GenSpec(SIMPLEX, n, 1, r, u=u, seed=seed)
        recs = [run_instance(spec, i, cfg) for i in range(instances)]
        out.append((r, float(np.mean([x.seconds for x in recs])), float(np.mean([x.iterations for x in recs]))))
    return out


def sweep_to_csv(sweep, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("r", "mean_cpu_s", "mean_iters"))
    for r, t, k in sweep:
        w.writerow((r, f"{t:.6f}", repr(k)))


# ----------------------------------------------------------------------------
# JSON bench configuration
# ----------------------------------------------------------------------------

_SOLVER_KEYS = {"sigma", "tau", "tol", "maxiter", "y_mode", "rng_seed"}


def _solver_config(d: Mapping, base: SolverConfig | None = None) -> SolverConfig:
    unknown = set(d) - _SOLVER_KEYS
    if unknown:
        raise ValueError(f"unknown solver options {sorted(unknown)}")
    kwargs = dict(base.__dict__) if base is not None else {}
    kwargs.update(d)
    return SolverConfig(**kwargs)


@dataclass
class BenchConfig:
    specs: list
    instances: int = 20
    success_rel_err: float = 1e-2
    solver: dict = field(default_factory=dict)
    record_time: bool = True

    @classmethod
    def load(cls, path: str | PathLike) -> "BenchConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        specs = []
        for s in data["specs"]:
            s = dict(s)
            family = s.pop("family")
            family = {"RandomPlanted": RANDOM_PLANTED, "SimplexConstrained": SIMPLEX}.get(family, family)
            specs.append(GenSpec(family=family, **s))
        solver = {}
        by_family = data.get("solver_by_family", {})
        common = data.get("solver", {})
        for fam, default in FAMILY_DEFAULTS.items():
            cfg = _solver_config(common, default)
            solver[fam] = _solver_config(by_family.get(fam, {}), cfg)
        return cls(
            specs=specs,
            instances=int(data.get("instances", 20)),
            success_rel_err=float(data.get("success_rel_err", 1e-2)),
            solver=solver,
            record_time=bool(data.get("record_time", True)),
        )
