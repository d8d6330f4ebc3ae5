"""Sparse nonnegative projections and the Ky-Fan r-norm proximal mapping.

Notation: ``||z||_(r)`` is the sum of the r largest absolute entries of z,
and ``h(z) = ||Pi_{S(r) ∩ R^n_+}(z)||_1`` is the sum of the r largest entries
of ``[z]_+``.  ``prox_sparse_l1`` evaluates the proximal mapping of
``lambda * h``; on the nonnegative sorted block this reduces to the prox of
``lambda * ||.||_(r)``, which ``searching`` computes exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import IndexOutOfRange, SparseLPError, SparsityOutOfRange


class NotSorted(SparseLPError):
    pass


class NonMonotoneInput(SparseLPError):
    pass


def _check_r(r: int, n: int) -> None:
    if not 1 <= r <= n:
        raise SparsityOutOfRange(f"r = {r} outside [1, {n}]")


def sort_desc(v: np.ndarray) -> np.ndarray:
    """Stable non-increasing argsort; ties keep ascending original index."""
    return np.argsort(-v, kind="stable")


# ----------------------------------------------------------------------------
# projections and closed-form minima
# ----------------------------------------------------------------------------


def project_sparse_nonneg(z, r: int) -> tuple[np.ndarray, float]:
    """Project ``z`` onto ``S(r) ∩ R^n_+``.

    Keeps ``[z]_+`` on the r largest entries (stable tie-break) and returns
    the projection together with its l1 norm, which does not depend on how
    ties are broken.
    """
    z = np.asarray(z, dtype=float)
    _check_r(r, z.size)
    top = sort_desc(z)[:r]
    pi = np.zeros_like(z)
    pi[top] = np.maximum(z[top], 0.0)
    return pi, float(pi.sum())


def top_r_plus_sum(z, r: int) -> float:
    """Sum of the r largest entries of ``[z]_+``."""
    z = np.asarray(z, dtype=float)
    n = z.size
    _check_r(r, n)
    zp = np.maximum(z, 0.0)
    if r == n:
        return float(zp.sum())
    # partition puts the r largest in the tail; their sum is order-free
    return float(np.partition(zp, n - r)[n - r:].sum())


def closed_form_box_min(p, l, I: Iterable[int]) -> float:
    """Minimum of ``p^T x`` over ``0 <= x <= l`` with ``supp(x) ⊆ I``."""
    p = np.asarray(p, dtype=float)
    l = np.asarray(l, dtype=float)
    idx = np.asarray(sorted(set(int(i) for i in I)), dtype=int)
    if idx.size and (idx[0] < 0 or idx[-1] >= p.size):
        raise IndexOutOfRange(f"index set not contained in [0, {p.size})")
    if idx.size == 0:
        return 0.0
    return -float(np.maximum(-l[idx] * p[idx], 0.0).sum())


def sparse_box_min(p, l, r: int) -> float:
    """Minimum of ``p^T x`` over ``C(l; r) = {0 <= x <= l, ||x||_0 <= r}``."""
    p = np.asarray(p, dtype=float)
    l = np.asarray(l, dtype=float)
    return -top_r_plus_sum(-l * p, r)


# ----------------------------------------------------------------------------
# subdifferential of the Ky-Fan norm
# ----------------------------------------------------------------------------


def kyfan_subdiff_contains(z, mu, r: int, tol: float = 1e-9) -> bool:
    """Test ``mu ∈ ∂||z||_(r)`` for a sorted nonnegative ``z``.

    Entries of ``z`` within ``tol`` of ``z_r`` form the plateau
    ``r0 < i <= r1`` (1-based).  When ``z_r > 0`` the multiplier is 1 above
    the plateau, 0 below it, and in [0, 1] with sum ``r - r0`` on it.  When
    ``z_r = 0`` it is 1 on the first r0 entries and the tail lies in [0, 1]
    with sum at most ``r - r0``.
    """
    z = np.asarray(z, dtype=float)
    mu = np.asarray(mu, dtype=float)
    n = z.size
    if mu.shape != z.shape:
        raise ValueError("z and mu must have the same shape")
    if r < 1:
        raise SparsityOutOfRange(f"r = {r} must be positive")
    if np.any(np.diff(z) > tol) or np.any(z < -tol):
        raise NotSorted("z must be nonnegative and non-increasing")
    if n == 0:
        return True
    if r > n:
        # ||.||_(r) is the l1 norm here
        pos = z > tol
        return bool(
            np.all(np.abs(mu[pos] - 1.0) <= tol)
            and np.all(mu[~pos] >= -tol)
            and np.all(mu[~pos] <= 1.0 + tol)
        )
    zr = z[r - 1]
    r0 = int(np.count_nonzero(z > zr + tol))
    r1 = int(np.count_nonzero(z >= zr - tol))
    if np.any(np.abs(mu[:r0] - 1.0) > tol):
        return False
    if zr > tol:
        plateau = mu[r0:r1]
        return bool(
            np.all(np.abs(mu[r1:]) <= tol)
            and np.all(plateau >= -tol)
            and np.all(plateau <= 1.0 + tol)
            and abs(plateau.sum() - (r - r0)) <= tol * max(1, r1 - r0)
        )
    tail = mu[r0:]
    return bool(
        np.all(tail >= -tol)
        and np.all(tail <= 1.0 + tol)
        and tail.sum() <= (r - r0) + tol * max(1, n - r0)
    )


# ----------------------------------------------------------------------------
# Searching: exact prox of lambda * ||.||_(r) on a sorted nonnegative vector
# ----------------------------------------------------------------------------


@dataclass
class SearchState:
    """Prefix sums and the active (r0, r1, theta) of the search.

    ``guarded[j]`` is the 1-based ``w_plus_j`` with ``guarded[0] = +inf`` and
    ``guarded[n1 + 1] = 0``.  ``r1`` and ``theta`` are None for the
    zero-plateau case.
    """

    prefix: np.ndarray
    guarded: np.ndarray
    r: int
    lam: float
    r0: int | None = None
    r1: int | None = None
    theta: float | None = None

    @classmethod
    def start(cls, lam: float, w_plus: np.ndarray, r: int) -> "SearchState":
        n1 = w_plus.size
        prefix = np.zeros(n1 + 1)
        np.cumsum(w_plus, out=prefix[1:])
        guarded = np.empty(n1 + 2)
        guarded[0] = np.inf
        guarded[1:-1] = w_plus
        guarded[-1] = 0.0
        return cls(prefix=prefix, guarded=guarded, r=r, lam=lam)

    @property
    def n1(self) -> int:
        return self.prefix.size - 1

    @property
    def slack(self) -> float:
        # rounding allowance for tests on prefix-sum differences
        return 1e-12 * (self.prefix[-1] + self.lam * self.r + 1.0)


def _zero_plateau_r0(st: SearchState) -> int | None:
    # z_r = 0 case: w_{r0} > lam >= w_{r0+1} and lam*(r - r0) >= sum_{j > r0} w_j
    r, lam, g, s = st.r, st.lam, st.guarded, st.prefix
    r0 = np.arange(r - 1, -1, -1)
    ok = (g[r0] > lam) & (lam >= g[r0 + 1]) & (lam * (r - r0) >= s[-1] - s[r0] - st.slack)
    hits = np.flatnonzero(ok)
    return int(r0[hits[0]]) if hits.size else None


def _plateau_r1(st: SearchState, r0: np.ndarray) -> np.ndarray:
    """Plateau end for each r0, or ``n1 + 1`` if no r1 in [r, n1] fits.

    With ``gap(k) = sum_{r0 < j <= k} (w_j - w_{k+1})``, which is
    non-decreasing in k, the conditions ``w_{r1} >= theta > w_{r1+1}`` read
    ``gap(r1 - 1) <= lam*(r - r0) < gap(r1)``; r1 is the first k >= r with
    ``gap(k) > lam*(r - r0)``.
    """
    r, lam, g, s, n1 = st.r, st.lam, st.guarded, st.prefix, st.n1
    budget = lam * (r - r0)

    def gap(k):
        return s[k] - s[r0] - (k - r0) * g[k + 1]

    lo = np.full(r0.shape, r)
    hi = np.full(r0.shape, n1 + 1)
    active = lo < hi
    while np.any(active):
        mid = (lo + hi) // 2
        midc = np.minimum(mid, n1)
        above = gap(midc) > budget
        hi = np.where(active & above, mid, hi)
        lo = np.where(active & ~above, mid + 1, lo)
        active = lo < hi
    # r1 = r additionally needs w_r >= theta, i.e. gap(r - 1) <= budget
    first_ok = gap(np.full(r0.shape, r - 1)) <= budget + st.slack
    return np.where(first_ok, lo, n1 + 1)


def _theta(st: SearchState, r0, r1):
    return (st.prefix[r1] - st.prefix[r0] - st.lam * (st.r - r0)) / (r1 - r0)


def searching(lam: float, w_plus, r: int) -> np.ndarray:
    """Minimize ``0.5*||z - w_plus||^2 + lam*||z||_(r)`` exactly.

    ``w_plus`` must be nonnegative and non-increasing with ``r <= len``.
    The zero-plateau case (``z_r = 0``) is tried first over r0 = r-1, ..., 0;
    then the positive plateau, for r0 descending, with r1 located by a
    vectorized bisection instead of a linear scan.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    w_plus = np.asarray(w_plus, dtype=float)
    n1 = w_plus.size
    _check_r(r, n1)
    if np.any(w_plus < 0) or np.any(np.diff(w_plus) > 0):
        raise NonMonotoneInput("w_plus must be nonnegative and non-increasing")
    st = SearchState.start(float(lam), w_plus, r)
    return _search(st)


def _search(st: SearchState) -> np.ndarray:
    r, lam, n1 = st.r, st.lam, st.n1
    w = st.guarded[1:-1]

    r0 = _zero_plateau_r0(st)
    if r0 is not None:
        st.r0 = r0
        z = np.zeros(n1)
        z[:r0] = w[:r0] - lam
        return z

    r0s = np.arange(r - 1, -1, -1)
    r1s = _plateau_r1(st, r0s)
    found = r1s <= n1
    r1c = np.minimum(r1s, n1)
    theta = _theta(st, r0s, r1c)
    g = st.guarded
    # same interval test as w_{r0} > lam + theta >= w_{r0+1}, with theta
    # carrying prefix-sum rounding; the slack keeps boundary cases admissible
    eps = st.slack
    ok = found & (g[r0s] > lam + theta - eps) & (lam + theta >= g[r0s + 1] - eps)
    hits = np.flatnonzero(ok)
    if hits.size:
        k = hits[0]
        st.r0, st.r1, st.theta = int(r0s[k]), int(r1s[k]), float(theta[k])
    else:
        # terminal pair of the scan: the whole block is one plateau
        st.r0, st.r1 = 0, n1
        st.theta = float(_theta(st, 0, n1))
    z = w.copy()
    z[: st.r0] -= lam
    z[st.r0 : st.r1] = st.theta
    return z


def soft_threshold_plus(w_plus, lam: float) -> np.ndarray:
    """Prox of ``lam * sum(z)`` over the positive block: ``[w - lam]_+``."""
    w_plus = np.asarray(w_plus, dtype=float)
    return np.where(w_plus > lam, w_plus - lam, 0.0)


@dataclass(frozen=True)
class SortedSplit:
    perm: np.ndarray
    w_plus: np.ndarray
    w_minus: np.ndarray

    @classmethod
    def of(cls, w) -> "SortedSplit":
        w = np.asarray(w, dtype=float)
        perm = sort_desc(w)
        ws = w[perm]
        n1 = int(np.count_nonzero(ws >= 0))
        return cls(perm=perm, w_plus=ws[:n1], w_minus=ws[n1:])

    def unsort(self, sorted_values: np.ndarray) -> np.ndarray:
        out = np.empty_like(sorted_values)
        out[self.perm] = sorted_values
        return out


def prox_sparse_l1(w, lam: float, r: int) -> np.ndarray:
    """Proximal mapping of ``lam * ||Pi_{S(r) ∩ R^n_+}(.)||_1`` at ``w``.

    Negative entries of ``w`` are left untouched.  The nonnegative block is
    soft-thresholded when ``r >= n1`` and handed to ``searching`` otherwise.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    w = np.asarray(w, dtype=float)
    _check_r(r, w.size)
    split = SortedSplit.of(w)
    n1 = split.w_plus.size
    if n1 == 0:
        return w.copy()
    if r >= n1:
        zhat = soft_threshold_plus(split.w_plus, lam)
    else:
        zhat = _search(SearchState.start(float(lam), split.w_plus, r))
    return split.unsort(np.concatenate([zhat, split.w_minus]))


def prox_objective(z, w, lam: float, r: int) -> float:
    z = np.asarray(z, dtype=float)
    return 0.5 * float(np.sum((z - w) ** 2)) + lam * top_r_plus_sum(z, r)
