import numpy as np
import pytest

from sparselp.core import Problem, is_feasible
from sparselp.dual_primal import (
    CASE_A,
    CASE_B,
    CASE_C,
    CERTIFIED_KINDS,
    SPARSE_MULTIPLIER,
    UNCERTIFIED,
    ZERO_SOLUTION,
    RestrictedInfeasible,
    certify,
    restricted_lp,
    solve,
)
from sparselp.generators import RANDOM_PLANTED, GenSpec, gen_random_planted, instance_rng
from sparselp.oracle import INFEASIBLE, OPTIMAL, enumerate_optimal
from sparselp.spadmm import SolverConfig, solve_dual


def unit(n, r):
    return Problem(np.ones((1, n)), [0.0], np.zeros(n), np.ones(n), r)


# --- certify --------------------------------------------------------------------


def test_certify_example1(ex1):
    assert certify(ex1, np.ones(4)).kind == UNCERTIFIED


def test_certify_zero_solution():
    assert certify(unit(2, 1), np.array([-1.0, -2.0])).kind == ZERO_SOLUTION


def test_certify_case_b():
    cert = certify(unit(4, 2), np.array([3.0, 2.0, 1.0, -1.0]))
    assert cert.kind == CASE_B and cert.index_set == (0, 1)


def test_certify_case_a_and_c():
    cert = certify(unit(4, 2), np.array([-1.0, 2.0, -3.0, 0.5]))
    assert cert.kind == CASE_A and cert.index_set == (1, 3)
    cert = certify(unit(4, 3), np.array([-1.0, 2.0, -3.0, -0.5]))
    assert cert.kind == CASE_C and cert.index_set == (0, 1, 3)


def test_certify_uncertified_branches():
    # tie at position r among positives
    assert certify(unit(3, 1), np.array([2.0, 2.0, 1.0])).kind == UNCERTIFIED
    # fewer than r positives but the next entry is zero
    assert certify(unit(4, 2), np.array([2.0, 0.0, 0.0, -1.0])).kind == UNCERTIFIED


def test_certify_uses_weighted_order():
    p = Problem(np.ones((1, 3)), [0.0], np.zeros(3), [1.0, 5.0, 1.0], 1)
    cert = certify(p, np.array([3.0, 1.0, 0.5]))
    assert cert.kind == CASE_B and cert.index_set == (1,)


def test_certify_full_support():
    cert = certify(unit(3, 3), np.array([1.0, 2.0, 3.0]))
    assert cert.kind == CASE_A and cert.index_set == (0, 1, 2)


def test_certify_scale_invariance(rng):
    p = Problem(np.ones((1, 6)), [0.0], np.zeros(6), rng.uniform(0.5, 2, 6), 2)
    for _ in range(200):
        z = rng.standard_normal(6).round(1)
        alpha = rng.uniform(0.1, 10)
        base = certify(p, z, tol=1e-9)
        scaled = certify(p, alpha * z, tol=alpha * 1e-9)
        assert (base.kind, base.index_set) == (scaled.kind, scaled.index_set)


# --- restricted LP ----------------------------------------------------------------


def test_restricted_examples(ex1):
    x, value, status = restricted_lp(ex1, [0, 1])
    assert status == OPTIMAL and value == -2.0
    np.testing.assert_array_equal(x, [1, 1, 0, 0])

    x, value, status = restricted_lp(ex1, [0, 2])
    assert status == OPTIMAL and value == 0.0
    np.testing.assert_array_equal(x, 0.0)

    p = Problem(ex1.A, [1.0, 0.0], ex1.c, ex1.l, ex1.r)
    assert restricted_lp(p, [2]).status == INFEASIBLE
    with pytest.raises(ValueError):
        restricted_lp(p, [])


# --- end to end ---------------------------------------------------------------------


def test_solve_example1(ex1):
    sol = solve(ex1)
    assert sol.certificate.kind == UNCERTIFIED
    assert sol.objective == pytest.approx(-2.0, abs=1e-6)
    assert sol.dual_objective == pytest.approx(-2.0, abs=1e-6)
    np.testing.assert_allclose(sol.x, [1, 1, 0, 0], atol=1e-6)
    np.testing.assert_allclose(sol.z_star, np.ones(4), atol=1e-4)


def test_duality_gap_counterexample():
    # the dual only sees the convex hull of the sparse set: a positive gap is possible
    p = Problem([[1.0, -1.0]], [0.0], [-1.0, -1.0], [1.0, 1.0], 1)
    assert enumerate_optimal(p).optimum == 0.0
    _, stats = solve_dual(p, SolverConfig(maxiter=20000))
    assert stats.theta_y == pytest.approx(-1.0, abs=1e-6)
    sol = solve(p)
    assert is_feasible(p, sol.x, 1e-6)
    assert sol.objective == pytest.approx(0.0, abs=1e-9)
    assert sol.certificate.kind == UNCERTIFIED


def test_solve_raises_on_infeasible_support():
    # support chosen by the ranking cannot reach b
    p = Problem([[1.0, 1.0, 0.0]], [1.5], [-5.0, 0.0, -10.0], [1.0, 1.0, 1.0], 1)
    with pytest.raises(RestrictedInfeasible):
        solve(p, SolverConfig(maxiter=3000))


def test_solve_planted_medium():
    spec = GenSpec(RANDOM_PLANTED, 200, 100, 20, seed=0)
    p, xopt = gen_random_planted(spec, instance_rng(0, 0))
    sol = solve(p)
    assert sol.objective == pytest.approx(0.0, abs=1e-6)
    assert np.linalg.norm(sol.x - xopt) / np.linalg.norm(sol.x) < 1e-2
    assert sol.certificate.kind == SPARSE_MULTIPLIER


def _small_random(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    m = int(rng.integers(1, min(4, n - 1) + 1))
    r = int(rng.integers(1, n + 1))
    A = rng.standard_normal((m, n))
    x0 = np.zeros(n)
    x0[rng.choice(n, r, replace=False)] = rng.uniform(0, 1, r)
    c = rng.standard_normal(n)
    return Problem(A, A @ x0, c, np.ones(n), r)


@pytest.mark.parametrize("seed", range(60))
def test_certified_results_are_optimal(seed):
    p = _small_random(seed)
    try:
        sol = solve(p, SolverConfig(maxiter=20000))
    except RestrictedInfeasible:
        return
    assert is_feasible(p, sol.x, 1e-6)
    opt = enumerate_optimal(p).optimum
    assert sol.objective >= opt - 1e-6
    if sol.certificate.kind in CERTIFIED_KINDS and sol.dual_stats.converged:
        assert sol.objective == pytest.approx(opt, abs=1e-6)


def test_strict_gap_instance_is_case_b():
    # unique optimum with a strict top-r gap in l∘z*
    p = Problem([[1.0, 1.0, 1.0, 1.0]], [1.0], [-3.0, -2.0, -1.0, 0.5], [1.0] * 4, 1)
    sol = solve(p)
    assert sol.objective == pytest.approx(enumerate_optimal(p).optimum, abs=1e-6)
    assert sol.certificate.certified


def test_solve_is_deterministic(ex1):
    a, b = solve(ex1), solve(ex1)
    assert a.x.tobytes() == b.x.tobytes() and a.dual_stats == b.dual_stats
