"""Dual-primal recovery: from a dual solution to a certified primal point.

1. Solve the dual with the sPADMM.  If the primal estimate ``-w`` has at
   most r significant entries and is feasible, return it.
2. Otherwise rank ``l ∘ z*`` with ``z* = A^T y* - c``, take the top r
   indices as the support, and solve the LP restricted to it.  The sign and
   gap pattern of ``l ∘ z*`` decides whether that support is provably optimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .core import Problem, SparseLPError, is_feasible, support_size
from .oracle import INFEASIBLE, OPTIMAL, simplex_box_lp
from .spadmm import SolverConfig, SolveStats, TraceCallback, solve_dual
from .sparse_proj import sort_desc

SPARSE_MULTIPLIER = "SparseMultiplier"
ZERO_SOLUTION = "ZeroSolution"
CASE_A = "IndexSetCaseA"
CASE_B = "IndexSetCaseB"
CASE_C = "IndexSetCaseC"
UNCERTIFIED = "Uncertified"
CERTIFIED_KINDS = (SPARSE_MULTIPLIER, ZERO_SOLUTION, CASE_A, CASE_B, CASE_C)

RECOVERY_FEASTOL = 1e-6


class RestrictedInfeasible(SparseLPError):
    """The LP restricted to the selected support has no feasible point."""


@dataclass(frozen=True)
class Certificate:
    kind: str
    index_set: tuple[int, ...] | None = None
    detail: str = ""

    @property
    def certified(self) -> bool:
        return self.kind != UNCERTIFIED


@dataclass
class Solution:
    x: np.ndarray
    objective: float
    certificate: Certificate
    dual_stats: SolveStats
    dual_objective: float
    y: np.ndarray | None = None
    z_star: np.ndarray | None = None
    w: np.ndarray | None = None


def default_certify_tol(problem: Problem, z_star) -> float:
    return 1e-6 * (1.0 + float(np.max(np.abs(problem.l * np.asarray(z_star)))))


def certify(problem: Problem, z_star, tol: float | None = None) -> Certificate:
    """Check the sufficient conditions for ``{t_1..t_r}`` to be an optimal support.

    ``t`` orders ``l ∘ z*`` non-increasingly (stable).  ``z* < 0`` makes 0
    optimal; otherwise the top-r set is certified when exactly r entries are
    positive (A), more than r are positive with a strict gap after the r-th
    (B), or fewer than r are positive and the (r+1)-th is negative (C).
    Comparisons use the margin ``tol``.  When r = n the (r+1)-th entry is
    taken as -inf.
    """
    z_star = np.asarray(z_star, dtype=float)
    r, n = problem.r, problem.n
    if tol is None:
        tol = default_certify_tol(problem, z_star)
    lz = problem.l * z_star
    t = sort_desc(lz)
    top = tuple(sorted(int(i) for i in t[:r]))
    if np.all(z_star < -tol):
        return Certificate(ZERO_SOLUTION, None, "all entries of z* are negative")
    npos = int(np.count_nonzero(z_star > tol))
    next_lz = lz[t[r]] if r < n else -np.inf
    next_z = z_star[t[r]] if r < n else -np.inf
    if npos == r:
        return Certificate(CASE_A, top, f"exactly r={r} positive entries")
    if npos > r:
        if lz[t[r - 1]] > next_lz + tol:
            return Certificate(CASE_B, top, f"strict gap {lz[t[r - 1]] - next_lz:.3g} after the r-th entry")
        return Certificate(UNCERTIFIED, None, f"{npos} positive entries with a tie at position r")
    if 0 < npos < r:
        if next_z < -tol:
            return Certificate(CASE_C, top, f"{npos} positive entries and z*_(r+1) < 0")
        return Certificate(UNCERTIFIED, None, f"{npos} positive entries but z*_(r+1) = {next_z:.3g}")
    return Certificate(UNCERTIFIED, None, "no positive entries and not all negative")


def top_r_support(problem: Problem, z_star) -> tuple[int, ...]:
    t = sort_desc(problem.l * np.asarray(z_star, dtype=float))
    return tuple(sorted(int(i) for i in t[: problem.r]))


@dataclass
class RestrictedResult:
    x: np.ndarray | None
    value: float
    status: str

    def __iter__(self):
        return iter((self.x, self.value, self.status))


def restricted_lp(problem: Problem, I) -> RestrictedResult:
    """Solve ``min c^T x`` over ``{Ax = b, 0 <= x <= l, supp(x) ⊆ I}``."""
    I = np.asarray(sorted(set(int(i) for i in I)), dtype=int)
    if I.size == 0:
        raise ValueError("the support must be nonempty")
    res = simplex_box_lp(problem.A[:, I], problem.b, problem.c[I], problem.l[I])
    if res.status != OPTIMAL:
        return RestrictedResult(None, float("inf"), INFEASIBLE)
    x = np.zeros(problem.n)
    x[I] = res.x
    return RestrictedResult(x, float(problem.c @ x), OPTIMAL)


def multiplier_threshold(w) -> float:
    return 1e-6 * (1.0 + float(np.max(np.abs(w)))) if np.size(w) else 0.0


def solve(
    problem: Problem,
    config: SolverConfig | None = None,
    trace: TextIO | None = None,
    callback: TraceCallback | None = None,
) -> Solution:
    """Dual solve followed by primal recovery; see the module docstring."""
    config = config or SolverConfig()
    it, stats = solve_dual(problem, config, trace=trace, callback=callback)
    theta = stats.theta_y
    z_star = problem.A.T @ it.y - problem.c

    x_hat = it.primal_estimate
    thresh = multiplier_threshold(x_hat)
    if support_size(x_hat, thresh) <= problem.r:
        x = np.clip(np.where(np.abs(x_hat) > thresh, x_hat, 0.0), 0.0, problem.l)
        if is_feasible(problem, x, RECOVERY_FEASTOL):
            return Solution(
                x, problem.objective(x), Certificate(SPARSE_MULTIPLIER, None, "multiplier is r-sparse"),
                stats, theta, it.y, z_star, it.w,
            )

    cert = certify(problem, z_star)
    support = top_r_support(problem, z_star)
    res = restricted_lp(problem, support)
    if res.status != OPTIMAL:
        raise RestrictedInfeasible(f"no feasible point supported on {support} ({cert.kind})")
    return Solution(res.x, res.value, cert, stats, theta, it.y, z_star, it.w)
