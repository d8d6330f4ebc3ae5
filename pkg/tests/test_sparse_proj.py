from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparselp.core import SparsityOutOfRange
from sparselp.oracle import prox_oracle_kyfan, prox_oracle_sparse_l1
from sparselp.sparse_proj import (
    NonMonotoneInput,
    NotSorted,
    SortedSplit,
    closed_form_box_min,
    kyfan_subdiff_contains,
    project_sparse_nonneg,
    prox_objective,
    prox_sparse_l1,
    searching,
    sparse_box_min,
    top_r_plus_sum,
)

vals = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def vec(min_size=1, max_size=10, elements=vals):
    return st.integers(min_size, max_size).flatmap(lambda n: arrays(float, (n,), elements=elements))


# --- brute-force references --------------------------------------------------


def brute_projection_distance(z, r):
    """Smallest squared distance from z to S(r) ∩ R^n_+ over every support."""
    n = z.size
    best = np.inf
    for k in range(r + 1):
        for I in combinations(range(n), k):
            p = np.zeros(n)
            p[list(I)] = np.maximum(z[list(I)], 0)
            best = min(best, float(np.sum((p - z) ** 2)))
    return best


def brute_top_r_plus(z, r):
    return max(sum(max(z[i], 0.0) for i in I) for I in combinations(range(z.size), r))


def brute_box_min(p, l, I):
    # coordinates decouple: each x_i in [0, l_i] minimizes p_i x_i
    return sum(min(0.0, p[i] * l[i]) for i in I)


# --- projection and top-r sums ------------------------------------------------


@pytest.mark.parametrize(
    "z, r, pi, l1",
    [
        ([1, -2, 3], 2, [1, 0, 3], 4),
        ([-1, -5], 1, [0, 0], 0),
        ([2, 2, 0], 1, [2, 0, 0], 2),
    ],
)
def test_project_examples(z, r, pi, l1):
    z = np.array(z, float)
    got, got_l1 = project_sparse_nonneg(z, r)
    np.testing.assert_array_equal(got, pi)
    assert got_l1 == l1
    assert np.sum((got - z) ** 2) == pytest.approx(brute_projection_distance(z, r))


def test_project_rejects_bad_r():
    with pytest.raises(SparsityOutOfRange):
        project_sparse_nonneg([1.0, 2.0], 3)
    with pytest.raises(SparsityOutOfRange):
        top_r_plus_sum([1.0], 0)


@given(vec(max_size=8), st.data())
def test_projection_is_nearest(z, data):
    r = data.draw(st.integers(1, z.size))
    pi, l1 = project_sparse_nonneg(z, r)
    assert np.count_nonzero(pi) <= r and np.all(pi >= 0)
    assert np.sum((pi - z) ** 2) <= brute_projection_distance(z, r) + 1e-9
    assert l1 == pytest.approx(top_r_plus_sum(z, r), abs=1e-12)


@pytest.mark.parametrize("z, r, expected", [([1, -2, 3], 2, 4), ([5, 4, 3], 3, 12), ([0, 0, 0], 2, 0)])
def test_top_r_plus_sum_examples(z, r, expected):
    assert top_r_plus_sum(np.array(z, float), r) == expected


@given(vec(), st.data())
def test_top_r_plus_sum_matches_enumeration(z, data):
    r = data.draw(st.integers(1, z.size))
    assert top_r_plus_sum(z, r) == pytest.approx(brute_top_r_plus(z, r), abs=1e-9)


# --- box minima ---------------------------------------------------------------


def test_closed_form_examples():
    assert closed_form_box_min([-1.0, 2.0], [1.0, 1.0], [0, 1]) == -1.0
    assert closed_form_box_min([3.0, -7.0], [1.0, 2.0], []) == 0.0
    assert closed_form_box_min([-1.0] * 4, [1.0] * 4, [0, 1]) == -2.0


def test_sparse_box_min_examples():
    assert sparse_box_min([-1.0] * 4, [1.0] * 4, 2) == -2.0
    assert sparse_box_min([0.0, 1.0, 3.0], [1.0, 2.0, 3.0], 2) == 0.0


def test_sparse_box_min_six_dim_enumeration(rng):
    for _ in range(20):
        p = rng.standard_normal(6)
        l = rng.uniform(0.1, 3.0, 6)
        expected = min(closed_form_box_min(p, l, I) for I in combinations(range(6), 3))
        assert sparse_box_min(p, l, 3) == pytest.approx(expected, abs=1e-12)


@given(vec(max_size=9), st.data())
def test_sparse_box_min_matches_support_enumeration(p, data):
    n = p.size
    l = data.draw(arrays(float, (n,), elements=st.floats(0.01, 10)))
    r = data.draw(st.integers(1, n))
    expected = min(brute_box_min(p, l, I) for I in combinations(range(n), r))
    assert sparse_box_min(p, l, r) == pytest.approx(expected, abs=1e-9)
    assert closed_form_box_min(p, l, range(n)) == pytest.approx(brute_box_min(p, l, range(n)), abs=1e-9)


# --- Ky-Fan subdifferential ---------------------------------------------------


@pytest.mark.parametrize(
    "z, mu, r, expected",
    [
        ([2, 1], [1, 0], 1, True),
        ([1, 1], [0.5, 0.5], 1, True),
        ([1, 0], [1, 2], 2, False),
        ([2, 1], [0.5, 0.5], 1, False),
        ([0, 0], [0.3, 0.3], 1, True),
        ([0, 0], [0.6, 0.6], 1, False),
    ],
)
def test_kyfan_subdiff_examples(z, mu, r, expected):
    assert kyfan_subdiff_contains(np.array(z, float), np.array(mu, float), r) is expected


def test_kyfan_subdiff_requires_sorted():
    with pytest.raises(NotSorted):
        kyfan_subdiff_contains(np.array([1.0, 2.0]), np.array([0.0, 1.0]), 1)


# --- searching ----------------------------------------------------------------


@pytest.mark.parametrize(
    "w, lam, r, expected",
    [
        ([3, 1], 1, 1, [2, 1]),
        ([0.5, 0.2], 1, 1, [0, 0]),
        ([3, 2, 1], 1, 2, [2, 1, 1]),
    ],
)
def test_searching_examples(w, lam, r, expected):
    w = np.array(w, float)
    got = searching(lam, w, r)
    np.testing.assert_allclose(got, expected, atol=1e-15)
    np.testing.assert_allclose(prox_oracle_kyfan(w, lam, r), expected, atol=1e-15)


def test_searching_boundary_case_from_rounding():
    # plateau-length-one boundary where exact comparisons pick the wrong case
    w = np.array([15.1, 14.9, 7.8, 5.4, 3.55, 2.15])
    got = searching(0.39, w, 4)
    np.testing.assert_allclose(got, prox_oracle_kyfan(w, 0.39, 4), atol=1e-12)


def test_searching_input_checks():
    with pytest.raises(NonMonotoneInput):
        searching(1.0, np.array([1.0, 2.0]), 1)
    with pytest.raises(NonMonotoneInput):
        searching(1.0, np.array([1.0, -1.0]), 1)
    with pytest.raises(SparsityOutOfRange):
        searching(1.0, np.array([2.0, 1.0]), 3)
    with pytest.raises(ValueError):
        searching(0.0, np.array([2.0, 1.0]), 1)


sorted_plus = vec(min_size=2, max_size=12, elements=st.floats(0, 20)).map(lambda v: np.sort(v)[::-1].copy())


@given(sorted_plus, st.floats(0.01, 10), st.data())
def test_searching_subgradient_and_oracle(w, lam, data):
    r = data.draw(st.integers(1, w.size - 1))
    z = searching(lam, w, r)
    assert np.all(z >= 0) and np.all(np.diff(z) <= 1e-12)
    assert kyfan_subdiff_contains(z, (w - z) / lam, r, 1e-9)
    assert np.max(np.abs(z - prox_oracle_kyfan(w, lam, r))) <= 1e-9 * (1 + w.max())


def test_searching_plateau_ties():
    # heavy ties stress the plateau bookkeeping
    w = np.array([4.0, 4.0, 4.0, 2.0, 2.0, 2.0, 0.0])
    for r in range(1, 7):
        for lam in (0.1, 0.5, 1.0, 2.0, 10.0):
            z = searching(lam, w, r)
            np.testing.assert_allclose(z, prox_oracle_kyfan(w, lam, r), atol=1e-12)


# --- full prox ----------------------------------------------------------------


@pytest.mark.parametrize(
    "w, lam, r, expected",
    [
        ([3, -1, 1], 1, 1, [2, -1, 1]),
        ([-2, -3], 0.7, 1, [-2, -3]),
        ([-2, -3], 5.0, 2, [-2, -3]),
        ([2, 0.5], 1, 2, [1, 0]),
    ],
)
def test_prox_examples(w, lam, r, expected):
    got = prox_sparse_l1(np.array(w, float), lam, r)
    np.testing.assert_allclose(got, expected, atol=1e-15)


def test_prox_example_objective_drop():
    w = np.array([3.0, -1.0, 1.0])
    z = prox_sparse_l1(w, 1.0, 1)
    assert prox_objective(z, w, 1.0, 1) == pytest.approx(2.5)
    assert prox_objective(w, w, 1.0, 1) == pytest.approx(3.0)


@given(vec(max_size=12), st.floats(0.01, 10), st.data())
def test_prox_matches_moreau_oracle(w, lam, data):
    r = data.draw(st.integers(1, w.size))
    z = prox_sparse_l1(w, lam, r)
    ref = prox_oracle_sparse_l1(w, lam, r)
    assert np.max(np.abs(z - ref)) <= 1e-9 * (1 + np.abs(w).max())


@given(vec(max_size=8), st.floats(0.05, 5), st.data())
def test_prox_objective_dominance(w, lam, data):
    r = data.draw(st.integers(1, w.size))
    z = prox_sparse_l1(w, lam, r)
    f = prox_objective(z, w, lam, r)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**31)))
    for scale in (1e-3, 1e-1, 1.0):
        for _ in range(33):
            zp = z + scale * rng.standard_normal(w.size)
            assert f <= prox_objective(zp, w, lam, r) + 1e-12 * (1 + abs(f))


@given(vec(max_size=10), st.floats(0.05, 5), st.floats(0.01, 100), st.data())
def test_prox_positive_homogeneity(w, lam, alpha, data):
    r = data.draw(st.integers(1, w.size))
    a = prox_sparse_l1(alpha * w, alpha * lam, r)
    b = alpha * prox_sparse_l1(w, lam, r)
    assert np.max(np.abs(a - b)) <= 1e-9 * (1 + alpha * np.abs(w).max())


def test_sorted_split_roundtrip():
    w = np.array([0.0, -1.0, 3.0, -1.0, 3.0, 2.0])
    s = SortedSplit.of(w)
    np.testing.assert_array_equal(s.w_plus, [3.0, 3.0, 2.0, 0.0])
    np.testing.assert_array_equal(s.w_minus, [-1.0, -1.0])
    np.testing.assert_array_equal(s.perm, [2, 4, 5, 0, 1, 3])
    np.testing.assert_array_equal(s.unsort(np.concatenate([s.w_plus, s.w_minus])), w)


def test_prox_large_vector_against_oracle(rng):
    w = rng.standard_normal(20000)
    for r in (1, 50, 2000, 9000):
        z = prox_sparse_l1(w, 0.3, r)
        np.testing.assert_allclose(z, prox_oracle_sparse_l1(w, 0.3, r), atol=1e-10)
