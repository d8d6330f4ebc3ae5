"""Dual-primal solver for linear programs with a cardinality constraint."""

from .core import (
    DimensionMismatch,
    IndexOutOfRange,
    NonFiniteEntry,
    NonPositiveBound,
    ParseError,
    Problem,
    SparseLPError,
    SparsityOutOfRange,
    example1,
    is_feasible,
    load_problem,
    save_problem,
    validate,
)
from .dual_primal import Certificate, RestrictedInfeasible, Solution, certify, restricted_lp, solve
from .oracle import enumerate_optimal, prox_oracle_kyfan, simplex_box_lp
from .spadmm import DegenerateMatrix, Iterate, SolverConfig, SolveStats, eval_dual_objective, solve_dual
from .sparse_proj import prox_sparse_l1, searching, top_r_plus_sum

__all__ = [
    "Certificate", "DegenerateMatrix", "DimensionMismatch", "IndexOutOfRange", "Iterate",
    "NonFiniteEntry", "NonPositiveBound", "ParseError", "Problem", "RestrictedInfeasible",
    "Solution", "SolveStats", "SolverConfig", "SparseLPError", "SparsityOutOfRange",
    "certify", "enumerate_optimal", "eval_dual_objective", "example1", "is_feasible",
    "load_problem", "prox_oracle_kyfan", "prox_sparse_l1", "restricted_lp", "save_problem",
    "searching", "simplex_box_lp", "solve", "solve_dual", "top_r_plus_sum", "validate",
]
