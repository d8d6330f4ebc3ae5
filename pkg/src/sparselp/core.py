"""Problem data, validation, feasibility and the JSON instance format.

An instance is

    min c^T x   s.t.  A x = b,  0 <= x <= l,  ||x||_0 <= r

with dense ``A`` (m x n), ``l > 0`` and ``1 <= r <= n``.  Indices are
0-based everywhere in the library; the JSON ``A_sparse`` triplets are the
one place that uses 1-based indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from os import PathLike
from typing import Iterable, Sequence

import numpy as np

DEFAULT_FEASTOL = 1e-8


class SparseLPError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SparseLPError):
    pass


class NonPositiveBound(SparseLPError):
    pass


class SparsityOutOfRange(SparseLPError):
    pass


class NonFiniteEntry(SparseLPError):
    pass


class ParseError(SparseLPError):
    pass


class IndexOutOfRange(SparseLPError):
    pass


def _frozen(a, ndim: int, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise DimensionMismatch(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Problem:
    """A sparse LP instance.  Arrays are copied and made read-only."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    l: np.ndarray
    r: int

    def __post_init__(self):
        object.__setattr__(self, "A", _frozen(self.A, 2, "A"))
        object.__setattr__(self, "b", _frozen(self.b, 1, "b"))
        object.__setattr__(self, "c", _frozen(self.c, 1, "c"))
        object.__setattr__(self, "l", _frozen(self.l, 1, "l"))
        if isinstance(self.r, (bool, np.bool_)) or int(self.r) != self.r:
            raise SparsityOutOfRange(f"r must be an integer, got {self.r!r}")
        object.__setattr__(self, "r", int(self.r))
        validate(self)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def uniform_bound(self) -> bool:
        """True when every entry of ``l`` is bit-identical."""
        return bool(np.all(self.l == self.l[0]))

    def objective(self, x) -> float:
        return float(self.c @ np.asarray(x, dtype=float))


def validate(problem: Problem) -> None:
    """Raise on the first violated instance invariant, return None otherwise."""
    A, b, c, l, r = problem.A, problem.b, problem.c, problem.l, problem.r
    m, n = A.shape
    if b.shape != (m,):
        raise DimensionMismatch(f"b has length {b.shape[0]}, expected m={m}")
    if c.shape != (n,):
        raise DimensionMismatch(f"c has length {c.shape[0]}, expected n={n}")
    if l.shape != (n,):
        raise DimensionMismatch(f"l has length {l.shape[0]}, expected n={n}")
    if n == 0:
        raise DimensionMismatch("n must be positive")
    for name, arr in (("A", A), ("b", b), ("c", c), ("l", l)):
        if not np.all(np.isfinite(arr)):
            raise NonFiniteEntry(f"{name} contains non-finite entries")
    bad = np.flatnonzero(l <= 0)
    if bad.size:
        raise NonPositiveBound(f"l[{bad[0]}] = {l[bad[0]]} is not positive")
    if not 1 <= r <= n:
        raise SparsityOutOfRange(f"r = {r} outside [1, {n}]")


def index_set(indices: Iterable[int], n: int) -> tuple[int, ...]:
    """Normalize ``indices`` to a sorted tuple of distinct ints in [0, n)."""
    out = sorted({int(i) for i in indices})
    if out and (out[0] < 0 or out[-1] >= n):
        raise IndexOutOfRange(f"index set {out} not contained in [0, {n})")
    return tuple(out)


def support_size(x, feastol: float = DEFAULT_FEASTOL) -> int:
    return int(np.count_nonzero(np.abs(np.asarray(x)) > feastol))


def is_feasible(problem: Problem, x, feastol: float = DEFAULT_FEASTOL) -> bool:
    """Check ``Ax = b``, ``0 <= x <= l`` and ``||x||_0 <= r`` up to ``feastol``.

    The support is counted with the magnitude threshold ``feastol``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise DimensionMismatch(f"x has shape {x.shape}, expected ({problem.n},)")
    if np.linalg.norm(problem.A @ x - problem.b) > feastol:
        return False
    if np.any(x < -feastol) or np.any(x > problem.l + feastol):
        return False
    return support_size(x, feastol) <= problem.r


# ----------------------------------------------------------------------------
# JSON instance format
# ----------------------------------------------------------------------------


def _real(v: float) -> float:
    # 17 significant digits round-trips every double
    return float(f"{v:.17g}")


def problem_to_dict(problem: Problem) -> dict:
    return {
        "m": problem.m,
        "n": problem.n,
        "r": problem.r,
        "A": [[_real(v) for v in row] for row in problem.A],
        "b": [_real(v) for v in problem.b],
        "c": [_real(v) for v in problem.c],
        "l": [_real(v) for v in problem.l],
    }


def _vector(data: dict, key: str, length: int) -> np.ndarray:
    if key not in data:
        raise ParseError(f"missing field {key!r}")
    try:
        arr = np.array(data[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field {key!r} is not a real vector: {exc}") from None
    if arr.ndim != 1:
        raise ParseError(f"field {key!r} must be a flat list")
    if arr.shape[0] != length:
        raise DimensionMismatch(f"{key} has length {arr.shape[0]}, expected {length}")
    return arr


def _int_field(data: dict, key: str) -> int:
    if key not in data:
        raise ParseError(f"missing field {key!r}")
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"field {key!r} must be an integer, got {v!r}")
    return v


def problem_from_dict(data) -> Problem:
    if not isinstance(data, dict):
        raise ParseError("instance must be a JSON object")
    m = _int_field(data, "m")
    n = _int_field(data, "n")
    r = _int_field(data, "r")
    if m < 0 or n < 1:
        raise DimensionMismatch(f"invalid dimensions m={m}, n={n}")
    if "A" in data:
        try:
            A = np.array(data["A"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"field 'A' is not a real matrix: {exc}") from None
        if m == 0 and A.size == 0:
            A = np.zeros((0, n))
        if A.shape != (m, n):
            raise DimensionMismatch(f"A has shape {A.shape}, expected ({m}, {n})")
    elif "A_sparse" in data:
        A = np.zeros((m, n))
        try:
            triplets = [(int(i), int(j), float(v)) for i, j, v in data["A_sparse"]]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"field 'A_sparse' must hold [i, j, v] triplets: {exc}") from None
        for i, j, v in triplets:
            if not (1 <= i <= m and 1 <= j <= n):
                raise IndexOutOfRange(f"A_sparse entry ({i}, {j}) outside {m}x{n}")
            A[i - 1, j - 1] += v
    else:
        raise ParseError("missing field 'A' (or 'A_sparse')")
    b = _vector(data, "b", m)
    c = _vector(data, "c", n)
    l = _vector(data, "l", n)
    return Problem(A, b, c, l, r)


def load_problem(path: str | PathLike) -> Problem:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return problem_from_dict(data)


def save_problem(problem: Problem, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(problem_to_dict(problem), fh)
        fh.write("\n")


def save_vector(x: Sequence[float], path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([_real(float(v)) for v in x], fh)
        fh.write("\n")


def load_vector(path: str | PathLike) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        try:
            return np.array(json.load(fh), dtype=float)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}") from None


def example1() -> Problem:
    """The 2 x 4 instance whose optimal set is {(1,1,0,0), (0,0,1,1)}."""
    A = [[1.0, -1.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0]]
    return Problem(A, [0.0, 0.0], [-1.0] * 4, [1.0] * 4, 2)

