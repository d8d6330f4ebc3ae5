"""Random instance families used in the benchmarks.

Both families draw from ``numpy.random.Generator`` (PCG64 bit generator,
ziggurat normals) seeded per instance, so a (spec, seed) pair always
reproduces the same instance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Problem

RANDOM_PLANTED = "random"
SIMPLEX = "simplex"
FAMILIES = (RANDOM_PLANTED, SIMPLEX)


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    m: int
    r: int
    u: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not 1 <= self.r <= self.n:
            raise ValueError(f"need 1 <= r <= n, got r={self.r}, n={self.n}")
        if self.family == SIMPLEX:
            if self.m != 1:
                raise ValueError("the simplex family has exactly one row (m = 1)")
            if not self.u > 0:
                raise ValueError("u must be positive")
        elif not 1 <= self.m < self.n:
            raise ValueError(f"the planted family needs 1 <= m < n, got m={self.m}, n={self.n}")


def instance_rng(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def gen_random_planted(spec: GenSpec, rng: np.random.Generator | None = None) -> tuple[Problem, np.ndarray]:
    """Gaussian ``A`` with a planted nonnegative sparse solution of cost zero.

    The support size is uniform on ``1..r``; nonzeros are ``|N(0, 1)|``;
    ``l`` is ``max(xopt)`` everywhere and ``c`` is 1 off the support, 0 on it.
    """
    if spec.family != RANDOM_PLANTED:
        raise ValueError("spec is not a planted-family spec")
    rng = rng if rng is not None else instance_rng(spec.seed)
    n, m = spec.n, spec.m
    support = rng.permutation(n)
    k = int(np.ceil(rng.random() * spec.r)) or 1
    xopt = np.zeros(n)
    xopt[support[:k]] = np.abs(rng.standard_normal(k))
    A = rng.standard_normal((m, n))
    b = A @ xopt
    l = np.full(n, xopt.max())
    c = np.ones(n)
    c[xopt > 0] = 0.0
    return Problem(A, b, c, l, spec.r), xopt


def gen_simplex(spec: GenSpec, rng: np.random.Generator | None = None) -> Problem:
    """``min c^T x  s.t.  e^T x = 1, 0 <= x <= u, ||x||_0 <= r`` with Gaussian c."""
    if spec.family != SIMPLEX:
        raise ValueError("spec is not a simplex-family spec")
    rng = rng if rng is not None else instance_rng(spec.seed)
    n = spec.n
    c = rng.standard_normal(n)
    return Problem(np.ones((1, n)), [1.0], c, np.full(n, float(spec.u)), spec.r)
