"""Semi-proximal ADMM on the reformulated Lagrangian dual.

The dual of the sparse LP is

    max_y  theta(y) = b^T y - h(l ∘ (A^T y - c)),

with h the sum of the r largest entries of ``[.]_+``.  Splitting
``z = A^T y - c`` gives the two-block problem

    min  -b^T y + h(l ∘ z)   s.t.  A^T y - z = c,

solved here with multiplier ``w``.  With the augmented Lagrangian
``... - w^T (A^T y - z - c) + sigma/2 ||A^T y - z - c||^2``, stationarity in y
gives ``A w = -b``, so ``-w`` (see ``primal_estimate``) converges to a
solution of the convexified primal.  One iteration is

    y <- argmin L_sigma(y, z; w) + sigma/2 ||y - y_k||_P^2
    z <- argmin L_sigma(y, z; w) + sigma/2 ||z - z_k||_Q^2
    w <- w - tau * sigma * (A^T y - z - c)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, TextIO

import numpy as np
from scipy.linalg import LinAlgError, cho_solve

from .core import Problem, SparseLPError
from .sparse_proj import prox_sparse_l1, top_r_plus_sum

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

CONVERGED = "Converged"
MAXITER = "MaxIterReached"


class DegenerateMatrix(SparseLPError):
    pass


class InvalidConfig(SparseLPError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    sigma: float = 1.0
    tau: float = 1.618
    tol: float = 1e-8
    maxiter: int = 5000
    y_mode: str = "auto"  # auto | factorize | spectral
    rng_seed: int = 0

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidConfig(f"sigma must be positive, got {self.sigma}")
        if not 0 < self.tau < GOLDEN:
            raise InvalidConfig(f"tau must lie in (0, {GOLDEN:.6f}), got {self.tau}")
        if not self.tol > 0:
            raise InvalidConfig(f"tol must be positive, got {self.tol}")
        if int(self.maxiter) != self.maxiter or self.maxiter < 1:
            raise InvalidConfig(f"maxiter must be a positive integer, got {self.maxiter}")
        if self.y_mode not in ("auto", "factorize", "spectral"):
            raise InvalidConfig(f"unknown y_mode {self.y_mode!r}")


@dataclass
class Iterate:
    y: np.ndarray
    z: np.ndarray
    w: np.ndarray

    @classmethod
    def initial(cls, problem: Problem) -> "Iterate":
        # (0, -c) satisfies A^T y - z = c exactly
        return cls(np.zeros(problem.m), -np.array(problem.c), np.zeros(problem.n))

    def copy(self) -> "Iterate":
        return Iterate(self.y.copy(), self.z.copy(), self.w.copy())

    @property
    def primal_estimate(self) -> np.ndarray:
        return -self.w


@dataclass
class SolveStats:
    iterations: int
    zeta: float
    eta: float
    theta_y: float
    status: str

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


# ----------------------------------------------------------------------------
# dual objective and stopping measures
# ----------------------------------------------------------------------------


def eval_dual_objective(problem: Problem, y) -> float:
    """``theta(y) = b^T y - h(l ∘ (A^T y - c))``, a lower bound on the primal value."""
    y = np.asarray(y, dtype=float)
    return float(problem.b @ y) - top_r_plus_sum(problem.l * (problem.A.T @ y - problem.c), problem.r)


def _eta(cw: float, theta: float) -> float:
    return abs(cw - theta) / max(1.0, abs(cw), abs(theta))


def residuals(problem: Problem, it: Iterate) -> tuple[float, float]:
    """Relative infeasibility and relative duality gap of an iterate.

    ``zeta = ||A^T y - z - c|| / (1 + ||c||)`` and
    ``eta = |c^T x - theta(y)| / max(1, |c^T x|, |theta(y)|)`` with the
    primal estimate ``x = -w``.
    """
    c = problem.c
    zeta = float(np.linalg.norm(problem.A.T @ it.y - it.z - c)) / (1.0 + float(np.linalg.norm(c)))
    return zeta, _eta(-float(c @ it.w), eval_dual_objective(problem, it.y))


# ----------------------------------------------------------------------------
# y-update
# ----------------------------------------------------------------------------


@dataclass
class YUpdateKernel:
    mode: str  # "factorized" or "spectral"
    chol: tuple | None = None
    lambda_max: float = float("nan")

    def apply_P(self, A: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.mode == "factorized":
            return np.zeros_like(y)
        return self.lambda_max * y - A @ (A.T @ y)


def power_iteration(M: np.ndarray, seed: int, tol: float = 1e-12, maxiter: int = 10000) -> float:
    """Largest eigenvalue of a symmetric PSD matrix, padded by the final residual.

    Any eigenvalue lies within ``||Mv - rho v||`` of the Rayleigh quotient
    ``rho``; adding that residual keeps ``lambda I - M`` safely PSD.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[0])
    v /= np.linalg.norm(v)
    rho = 0.0
    for _ in range(maxiter):
        Mv = M @ v
        rho_new = float(v @ Mv)
        nrm = np.linalg.norm(Mv)
        if nrm == 0.0:
            return 0.0
        v_new = Mv / nrm
        done = abs(rho_new - rho) <= tol * abs(rho_new)
        v, rho = v_new, rho_new
        if done:
            break
    Mv = M @ v
    rho = float(v @ Mv)
    return rho + float(np.linalg.norm(Mv - rho * v))


def build_y_kernel(problem: Problem, config: SolverConfig) -> YUpdateKernel:
    """Cholesky of ``AA^T`` when it is well conditioned enough, else a spectral bound.

    The factorization is accepted when every pivot exceeds
    ``1e-12 * trace(AA^T) / m``; otherwise ``P = lambda_max I - AA^T``.
    """
    A = problem.A
    m = problem.m
    AAt = A @ A.T
    trace = float(np.trace(AAt)) if m else 0.0
    if m == 0 or not trace > 1e-300:
        raise DegenerateMatrix("AA^T is numerically zero")
    if config.y_mode in ("auto", "factorize"):
        pivot_floor = 1e-12 * trace / m
        try:
            L = np.linalg.cholesky(AAt)
        except np.linalg.LinAlgError:
            L = None
        if L is not None and np.min(np.diag(L)) ** 2 > pivot_floor:
            return YUpdateKernel("factorized", chol=(L, True))
        if config.y_mode == "factorize":
            raise DegenerateMatrix("AA^T is singular; use y_mode='spectral' or 'auto'")
    lam = power_iteration(AAt, config.rng_seed)
    return YUpdateKernel("spectral", lambda_max=lam)


def update_y(kernel: YUpdateKernel, problem: Problem, config: SolverConfig, it: Iterate) -> np.ndarray:
    """Minimize the augmented Lagrangian (plus the P-term) in y.

    Stationarity reads ``sigma (AA^T + P) y = A(w + sigma z + sigma c) + b + sigma P y_k``.
    """
    A, sigma = problem.A, config.sigma
    rhs = A @ (it.w + sigma * (it.z + problem.c)) + problem.b
    if kernel.mode == "factorized":
        try:
            return cho_solve(kernel.chol, rhs) / sigma
        except LinAlgError as exc:  # pragma: no cover - guarded by build_y_kernel
            raise DegenerateMatrix(str(exc)) from None
    return (rhs + sigma * kernel.apply_P(A, it.y)) / (sigma * kernel.lambda_max)


# ----------------------------------------------------------------------------
# z-update
# ----------------------------------------------------------------------------


@dataclass
class ZUpdateKernel:
    uniform: bool
    l0: float
    l_min: float
    L_diag: np.ndarray
    lambda_eff: float
    Q_diag: np.ndarray = field(repr=False, default=None)


def build_z_kernel(problem: Problem, config: SolverConfig) -> ZUpdateKernel:
    l = problem.l
    l_min = float(l.min())
    if problem.uniform_bound:
        l0 = float(l[0])
        return ZUpdateKernel(True, l0, l_min, l, l0 / config.sigma, np.zeros_like(l))
    return ZUpdateKernel(
        False, float("nan"), l_min, l, l_min**2 / config.sigma, (l / l_min) ** 2 - 1.0
    )


def update_z(zk: ZUpdateKernel, problem: Problem, config: SolverConfig, Aty: np.ndarray, it: Iterate) -> np.ndarray:
    """Exact z-minimization given ``Aty = A^T y_{k+1}``.

    Uniform bounds take ``Q = 0`` and a single prox.  Otherwise
    ``Q = L^2 / l_min^2 - I`` makes the quadratic isotropic in ``u = L z``:
    ``u = prox_{(l_min^2/sigma) h}(l_min^2 * w_tilde)`` with
    ``w_tilde = L^{-1}(A^T y - c + Q z_k - w/sigma)``.
    """
    sigma, r = config.sigma, problem.r
    v = Aty - problem.c - it.w / sigma
    if zk.uniform:
        return prox_sparse_l1(v, zk.lambda_eff, r)
    w_tilde = (v + zk.Q_diag * it.z) / zk.L_diag
    u = prox_sparse_l1(zk.l_min**2 * w_tilde, zk.lambda_eff, r)
    return u / zk.L_diag


def update_w(config: SolverConfig, Aty: np.ndarray, z_next: np.ndarray, it: Iterate, problem: Problem) -> np.ndarray:
    return it.w - config.tau * config.sigma * (Aty - z_next - problem.c)


# ----------------------------------------------------------------------------
# main loop
# ----------------------------------------------------------------------------

TraceCallback = Callable[[int, Iterate, float, float, float], None]


def solve_dual(
    problem: Problem,
    config: SolverConfig | None = None,
    trace: TextIO | None = None,
    callback: TraceCallback | None = None,
    init: Iterate | None = None,
) -> tuple[Iterate, SolveStats]:
    """Run the sPADMM until ``zeta < tol`` and ``eta < tol`` or ``maxiter``.

    ``trace`` receives CSV lines ``iter,zeta,eta,theta``; ``callback`` is
    called with ``(k, iterate, zeta, eta, theta)`` after every iteration.
    """
    config = config or SolverConfig()
    ykernel = build_y_kernel(problem, config)
    zkernel = build_z_kernel(problem, config)
    A, c = problem.A, problem.c
    cnorm1 = 1.0 + float(np.linalg.norm(c))
    it = init.copy() if init is not None else Iterate.initial(problem)

    if trace is not None:
        trace.write("iter,zeta,eta,theta\n")
    zeta = eta = theta = float("nan")
    status = MAXITER
    k = 0
    for k in range(1, config.maxiter + 1):
        y = update_y(ykernel, problem, config, it)
        Aty = A.T @ y
        z = update_z(zkernel, problem, config, Aty, it)
        w = update_w(config, Aty, z, it, problem)
        it = Iterate(y, z, w)

        zeta = float(np.linalg.norm(Aty - z - c)) / cnorm1
        theta = float(problem.b @ y) - top_r_plus_sum(problem.l * (Aty - c), problem.r)
        eta = _eta(-float(c @ w), theta)
        if trace is not None:
            trace.write(f"{k},{zeta:.17g},{eta:.17g},{theta:.17g}\n")
        if callback is not None:
            callback(k, it, zeta, eta, theta)
        if zeta < config.tol and eta < config.tol:
            status = CONVERGED
            break
    return it, SolveStats(k, zeta, eta, theta, status)
