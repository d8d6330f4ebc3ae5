"""Independent ground truth for small instances.

Nothing here touches the ADMM or the ``searching`` routine:

* ``simplex_box_lp`` is a two-phase bounded-variable primal simplex for
  ``min c^T x  s.t.  Ax = b, 0 <= x <= l``.
* ``enumerate_optimal`` solves the restricted LP on every support of size r.
* ``prox_oracle_kyfan`` evaluates the prox of ``lam*||.||_(r)`` through the
  Moreau decomposition ``prox(w) = w - Pi_B(w)`` with B the scaled dual ball
  ``{|mu_i| <= lam, sum |mu_i| <= lam*r}``.
* ``check_phat_point`` measures a multiplier against the convexified primal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .core import Problem, SparseLPError, SparsityOutOfRange

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"

ENUM_MAX_N = 25


class CycleDetected(SparseLPError):
    pass


class TooLarge(SparseLPError):
    pass


@dataclass
class LPResult:
    x: np.ndarray | None
    value: float
    status: str
    iterations: int = 0
    duals: np.ndarray | None = None
    dual_bound: float = float("nan")

    def __iter__(self):
        # unpacks as (x, value, status)
        return iter((self.x, self.value, self.status))


def _compress_rows(A: np.ndarray, b: np.ndarray, tol: float):
    """Replace a rank-deficient system by an equivalent full-row-rank one.

    Returns ``(A', b', T, consistent)`` with ``A' = T A``, ``b' = T b``.
    """
    m, n = A.shape
    if m == 0:
        return A, b, np.zeros((0, 0)), True
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    scale = max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.count_nonzero(s > tol * scale * max(m, n)))
    if rank == m:
        return A, b, np.eye(m), True
    Ur = U[:, :rank]
    resid = b - Ur @ (Ur.T @ b)
    consistent = np.linalg.norm(resid) <= 1e-9 * (1.0 + np.linalg.norm(b))
    T = Ur.T
    return T @ A, T @ b, T, consistent


class _BoundedSimplex:
    """Revised primal simplex over ``Mx = rhs, 0 <= x <= upper``.

    Pricing is Dantzig's rule; after a run of degenerate pivots it falls
    back to Bland's smallest-index rule until the objective moves again,
    which rules out cycling.
    """

    DEGENERATE_SWITCH = 8

    def __init__(self, M, rhs, upper, basis, tol=1e-9):
        self.M = M
        self.rhs = rhs
        self.upper = upper
        self.tol = tol
        self.basis = list(basis)
        n = M.shape[1]
        self.at_upper = np.zeros(n, dtype=bool)
        self.iterations = 0

    def nonbasic_x(self) -> np.ndarray:
        x = np.where(self.at_upper, self.upper, 0.0)
        x[self.basis] = 0.0
        return x

    def primal(self) -> np.ndarray:
        x = self.nonbasic_x()
        B = self.M[:, self.basis]
        x[self.basis] = np.linalg.solve(B, self.rhs - self.M @ x)
        return x

    def run(self, cost: np.ndarray, max_iter: int):
        M, tol, upper = self.M, self.tol, self.upper
        n = M.shape[1]
        degenerate_run = 0
        in_basis = np.zeros(n, dtype=bool)
        while True:
            if self.iterations >= max_iter:
                raise CycleDetected(f"simplex exceeded {max_iter} iterations")
            in_basis[:] = False
            in_basis[self.basis] = True
            B = M[:, self.basis]
            x = self.primal()
            xB = x[self.basis]
            pi = np.linalg.solve(B.T, cost[self.basis])
            d = cost - M.T @ pi
            # improving: at lower with d < 0, at upper with d > 0; fixed vars never move
            movable = ~in_basis & (upper > 0)
            cand = movable & (((~self.at_upper) & (d < -tol)) | (self.at_upper & (d > tol)))
            idx = np.flatnonzero(cand)
            if idx.size == 0:
                return x, pi, d
            if degenerate_run >= self.DEGENERATE_SWITCH:
                j = int(idx[0])
            else:
                j = int(idx[np.argmax(np.abs(d[idx]))])
            sign = -1.0 if self.at_upper[j] else 1.0
            col = np.linalg.solve(B, M[:, j])
            # x_B(t) = x_B - sign * t * col, t >= 0
            delta = sign * col
            ub = upper[self.basis]
            with np.errstate(divide="ignore", invalid="ignore"):
                t_low = np.where(delta > tol, np.maximum(xB, 0.0) / delta, np.inf)
                t_up = np.where(
                    (delta < -tol) & np.isfinite(ub), np.maximum(ub - xB, 0.0) / -delta, np.inf
                )
            t_all = np.minimum(t_low, t_up)
            best_t = float(upper[j])
            leave = -1
            if t_all.size and t_all.min() < best_t:
                best_t = float(t_all.min())
                # Bland tie-break on the leaving variable
                ties = np.flatnonzero(t_all <= best_t + tol)
                leave = int(ties[np.argmin(np.asarray(self.basis)[ties])])
            leave_to_upper = leave >= 0 and t_up[leave] < t_low[leave]
            if not np.isfinite(best_t):
                raise SparseLPError("unbounded direction in a box-constrained LP")
            self.iterations += 1
            degenerate_run = degenerate_run + 1 if best_t <= tol else 0
            if leave < 0:
                # bound flip of the entering variable
                self.at_upper[j] = not self.at_upper[j]
                continue
            out = self.basis[leave]
            self.at_upper[out] = leave_to_upper
            self.basis[leave] = j
            self.at_upper[j] = False


def simplex_box_lp(A, b, c, l, tol: float = 1e-9, max_iter: int | None = None) -> LPResult:
    """Solve ``min c^T x  s.t.  Ax = b, 0 <= x <= l`` to an exact vertex.

    Returns an ``LPResult`` (unpacks as ``(x, value, status)``) carrying the
    row duals of the final basis and the matching dual bound
    ``b^T pi + sum_j l_j * min(d_j, 0)``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    l = np.asarray(l, dtype=float).reshape(-1)
    m, n = A.shape
    if b.size != m or c.size != n or l.size != n:
        raise ValueError("inconsistent LP dimensions")
    if np.any(l <= 0):
        raise ValueError("upper bounds must be positive")

    Ar, br, T, consistent = _compress_rows(A, b, tol)
    if not consistent:
        return LPResult(None, float("inf"), INFEASIBLE)
    mr = Ar.shape[0]
    if mr == 0:
        x = np.where(c < 0, l, 0.0)
        return LPResult(x, float(c @ x), OPTIMAL, 0, np.zeros(m), float(c @ x))

    flip = np.where(br < 0, -1.0, 1.0)
    M = np.hstack([Ar * flip[:, None], np.eye(mr)])
    rhs = br * flip
    upper = np.concatenate([l, np.full(mr, np.inf)])
    art = list(range(n, n + mr))
    if max_iter is None:
        max_iter = 50 * (n + mr) + 1000

    lp = _BoundedSimplex(M, rhs, upper, art, tol=tol)
    phase1 = np.concatenate([np.zeros(n), np.ones(mr)])
    x, _, _ = lp.run(phase1, max_iter)
    infeas = float(x[n:].sum())
    if infeas > 1e-9 * (1.0 + np.abs(rhs).sum()):
        return LPResult(None, float("inf"), INFEASIBLE, lp.iterations)

    # artificials stay in the model, pinned to zero
    lp.upper = np.concatenate([l, np.zeros(mr)])
    lp.at_upper[n:] = False
    cost = np.concatenate([c, np.zeros(mr)])
    x, pi_r, d = lp.run(cost, max_iter)
    xs = np.clip(x[:n], 0.0, l)
    value = float(c @ xs)
    # map duals back to the original rows: pi = T^T (flip * pi_r)
    pi = T.T @ (flip * pi_r)
    dn = d[:n]
    dual_bound = float(b @ pi + np.sum(l * np.minimum(dn, 0.0)))
    return LPResult(xs, value, OPTIMAL, lp.iterations, pi, dual_bound)


# ----------------------------------------------------------------------------
# exhaustive support enumeration
# ----------------------------------------------------------------------------


@dataclass
class EnumResult:
    optimum: float
    minimizers: list = field(default_factory=list)
    optimal_index_sets: list = field(default_factory=list)
    feasible: bool = True


def solve_on_support(problem: Problem, I) -> LPResult:
    """Solve the LP restricted to columns ``I`` and embed the solution."""
    I = np.asarray(I, dtype=int)
    res = simplex_box_lp(problem.A[:, I], problem.b, problem.c[I], problem.l[I])
    if res.status != OPTIMAL:
        return res
    x = np.zeros(problem.n)
    x[I] = res.x
    res.x = x
    res.value = float(problem.c @ x)
    return res


def enumerate_optimal(problem: Problem, rtol: float = 1e-9) -> EnumResult:
    """Global optimum by solving the LP on every support of size r."""
    n, r = problem.n, problem.r
    if n > ENUM_MAX_N:
        raise TooLarge(f"n = {n} exceeds the enumeration limit {ENUM_MAX_N}")
    results = []
    for I in combinations(range(n), r):
        res = solve_on_support(problem, I)
        if res.status == OPTIMAL:
            results.append((res.value, I, res.x))
    if not results:
        return EnumResult(float("inf"), [], [], feasible=False)
    best = min(v for v, _, _ in results)
    thresh = best + rtol * max(1.0, abs(best))
    hits = [(I, x) for v, I, x in results if v <= thresh]
    return EnumResult(
        optimum=best,
        minimizers=[x for _, x in hits],
        optimal_index_sets=[I for I, _ in hits],
    )


def enumeration_size(n: int, r: int) -> int:
    return comb(n, r)


# ----------------------------------------------------------------------------
# Moreau-identity prox oracle
# ----------------------------------------------------------------------------


def _clip_sum(a: np.ndarray, nu: float, lam: float) -> float:
    return float(np.clip(a - nu, 0.0, lam).sum())


def project_dual_ball(w, lam: float, r: int) -> np.ndarray:
    """Project onto ``{mu : |mu_i| <= lam, sum |mu_i| <= lam * r}``.

    The projection is ``sign(w) * clip(|w| - nu, 0, lam)`` with the smallest
    ``nu >= 0`` meeting the budget.  The clipped sum is piecewise linear and
    non-increasing in ``nu`` with kinks at ``|w_i|`` and ``|w_i| - lam``, so
    ``nu`` comes from a scan over the sorted kinks and one interpolation.
    """
    w = np.asarray(w, dtype=float)
    a = np.abs(w)
    budget = lam * r
    if _clip_sum(a, 0.0, lam) <= budget:
        return np.sign(w) * np.minimum(a, lam)
    kinks = np.unique(np.concatenate([a, a - lam, [0.0]]))
    kinks = kinks[kinks >= 0.0]
    vals = np.array([_clip_sum(a, k, lam) for k in kinks])
    # vals is non-increasing; find the segment where it crosses the budget
    j = int(np.flatnonzero(vals <= budget)[0])
    lo, hi = kinks[j - 1], kinks[j]
    flo, fhi = vals[j - 1], vals[j]
    nu = hi if flo == fhi else lo + (flo - budget) * (hi - lo) / (flo - fhi)
    return np.sign(w) * np.clip(a - nu, 0.0, lam)


def prox_oracle_kyfan(w, lam: float, r: int) -> np.ndarray:
    """Prox of ``lam * ||.||_(r)`` at ``w`` via ``w - Pi_B(w)``."""
    w = np.asarray(w, dtype=float)
    if not 1 <= r <= w.size:
        raise SparsityOutOfRange(f"r = {r} outside [1, {w.size}]")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return w - project_dual_ball(w, lam, r)


def prox_oracle_sparse_l1(w, lam: float, r: int) -> np.ndarray:
    """Oracle for ``prox_sparse_l1``: Ky-Fan prox on ``[w]_+``, identity on negatives."""
    w = np.asarray(w, dtype=float)
    neg = w < 0
    out = w.copy()
    pos = ~neg
    if np.any(pos):
        wp = w[pos]
        out[pos] = prox_oracle_kyfan(wp, lam, min(r, wp.size))
    return out


# ----------------------------------------------------------------------------
# convexified primal (dual of the reformulated dual)
# ----------------------------------------------------------------------------


@dataclass
class PhatReport:
    objective: float
    equality_residual: float
    lower_violation: float
    upper_violation: float
    budget: float
    budget_violation: float
    printed_budget_violation: float
    violated: list

    @property
    def feasible(self) -> bool:
        return not self.violated


def check_phat_point(problem: Problem, w, tol: float = 1e-8) -> PhatReport:
    """Residuals of ``w`` against ``{Aw = b, 0 <= w <= l, sum w_i/l_i <= r}``.

    ``printed_budget_violation`` measures ``sum w_i/l_i - 1``, the r-free
    budget, for comparison; it does not affect ``violated``.
    """
    w = np.asarray(w, dtype=float)
    eq = float(np.linalg.norm(problem.A @ w - problem.b))
    lo = float(max(0.0, -w.min()))
    hi = float(max(0.0, (w - problem.l).max()))
    budget = float(np.sum(w / problem.l))
    violated = []
    if eq > tol:
        violated.append("equality")
    if lo > tol:
        violated.append("lower")
    if hi > tol:
        violated.append("upper")
    if budget - problem.r > tol:
        violated.append("budget")
    return PhatReport(
        objective=float(problem.c @ w),
        equality_residual=eq,
        lower_violation=lo,
        upper_violation=hi,
        budget=budget,
        budget_violation=max(0.0, budget - problem.r),
        printed_budget_violation=max(0.0, budget - 1.0),
        violated=violated,
    )
