import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opholder import functions as fn
from opholder.matrix_calc import (DividedDiffTable, bsf_residual, decompose, divided_diff,
                                  divided_diff_explicit, doi, dd_symbol, eig, frechet_derivative,
                                  from_json_matrix, func_of, is_unitary, laurent_func_of,
                                  lemma_m_moi, moi, op_finite_diff, schur_norm_bounds,
                                  spectral_norm, to_json_matrix, unitary_eig, unitary_second_diff)
from opholder.sampling import hermitian, hermitian_direction, trial_rng, unitary, unitary_near

seeds = st.integers(0, 2 ** 31)


def test_eig_residual_and_sign_convention(rng):
    A = hermitian(rng, 6)
    s = eig(A)
    assert spectral_norm(A @ s.vectors - s.vectors * s.values) < 1e-13
    for v in s.vectors.T:
        first = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
        assert abs(first.imag) < 1e-14 and first.real > 0


def test_unitary_eig_reconstructs(rng):
    U = unitary(rng, 5)
    s = unitary_eig(U)
    assert np.allclose(np.abs(s.values), 1)
    assert spectral_norm(s.matrix() - U) < 1e-12
    assert is_unitary(s.vectors)


def test_func_of_matches_polynomial(rng):
    A = hermitian(rng, 5)
    p = fn.polynomial([1.0, 2.0, -1.0])
    assert np.allclose(func_of(A, p), np.eye(5) + 2 * A - A @ A)


def test_laurent_func_of_agrees_with_spectral(rng):
    U = unitary(rng, 4)
    f = fn.trig_polynomial({-2: 0.3, 0: 1.0, 3: -0.5j})
    assert spectral_norm(laurent_func_of(U, f) - func_of(U, f)) < 1e-12


@given(st.lists(st.floats(-2, 2), min_size=2, max_size=5, unique=True))
def test_divided_diff_matches_explicit(nodes):
    if min(abs(a - b) for i, a in enumerate(nodes) for b in nodes[i + 1:]) < 1e-2:
        return
    f = fn.exp_fn()
    assert np.isclose(divided_diff(f, nodes), divided_diff_explicit(f, nodes), rtol=1e-7, atol=1e-9)


@given(st.floats(-1, 1), st.integers(1, 4))
def test_confluent_divided_diff_is_taylor(x, k):
    f = fn.exp_fn()
    assert np.isclose(divided_diff(f, [x] * (k + 1)), math.exp(x) / math.factorial(k), rtol=1e-9)


def test_polynomial_divided_diff_exact():
    p = fn.power(4)
    # D^2 t^4 at (a, b, c) = complete homogeneous symmetric polynomial of degree 2
    a, b, c = 0.3, -1.2, 0.3
    h2 = a * a + b * b + c * c + a * b + a * c + b * c
    assert np.isclose(divided_diff(p, [a, b, c]), h2, rtol=1e-14)
    assert DividedDiffTable.build(p, [a, b]).order == 1


def test_divided_diff_order_mismatch():
    with pytest.raises(ValueError):
        divided_diff(fn.exp_fn(), [0.0, 1.0], k=3)


@given(seeds)
def test_bsf_random(seed):
    rng = trial_rng(seed, 0)
    n = int(rng.integers(2, 7))
    f = fn.polynomial(list(rng.standard_normal(int(rng.integers(2, 7)))))
    assert bsf_residual(f, hermitian(rng, n), hermitian_direction(rng, n, 0.3)) <= 1e-9


def test_bsf_smooth_nonpolynomial(rng):
    assert bsf_residual(fn.sin_fn(), hermitian(rng, 5), hermitian_direction(rng, 5, 0.2)) <= 1e-9


def test_frechet_derivative_matches_difference_quotient(rng):
    A, H = hermitian(rng, 4), hermitian_direction(rng, 4)
    f = fn.exp_fn()
    h = 1e-6
    fd = (func_of(A + h * H, f) - func_of(A - h * H, f)) / (2 * h)
    assert spectral_norm(frechet_derivative(f, A, H) - fd) < 1e-7


def test_doi_shape_check(rng):
    with pytest.raises(ValueError):
        doi(dd_symbol(fn.exp_fn()), hermitian(rng, 3), hermitian(rng, 3), np.zeros((2, 3)))


@pytest.mark.parametrize("m", [2, 3])
def test_lemma_m(m):
    worst = 0.0
    for i in range(30):
        rng = trial_rng(m, i)
        n = int(rng.integers(2, 5))
        f = fn.polynomial(list(rng.standard_normal(int(rng.integers(1, 7)) + 1)))
        A, K = hermitian(rng, n), hermitian_direction(rng, n, rng.uniform(0.05, 1))
        lhs, rhs = op_finite_diff(f, A, K, m), lemma_m_moi(f, A, K, m)
        # degree below m makes both sides vanish; scale by ||K||^m then
        scale = max(spectral_norm(lhs), spectral_norm(K) ** m)
        worst = max(worst, spectral_norm(lhs - rhs) / scale)
    assert worst <= 1e-8


def test_moi_guards(rng):
    A = hermitian(rng, 3)
    with pytest.raises(ValueError):
        moi(fn.exp_fn(), 2, [A, A], [A, A])
    with pytest.raises(ValueError):
        moi(fn.exp_fn(), 5, [A] * 6, [A] * 5)


def test_moi_order_one_is_doi(rng):
    A, B, X = hermitian(rng, 4), hermitian(rng, 4), hermitian(rng, 4)
    f = fn.power(3)
    assert spectral_norm(moi(f, 1, [A, B], [X]) - doi(dd_symbol(f), A, B, X)) < 1e-12


def test_three_point_unitary_expansion(rng):
    f = fn.trig_polynomial({-2: 1.0, 1: 0.5j, 3: 0.25})
    for _ in range(5):
        U = unitary(rng, 4)
        V = unitary_near(rng, np.eye(4), 0.4)
        assert unitary_second_diff(f, U, V)["residual"] <= 1e-10


def test_schur_bounds_bracket(rng):
    Phi = np.ones((4, 4))
    b = schur_norm_bounds(Phi)
    assert abs(b["lower"] - 1) < 1e-9 and abs(b["upper"] - 1) < 1e-9
    lam = np.sort(rng.uniform(-1, 1, 6))
    P = np.asarray(decompose(np.diag(lam)).values)
    D = np.array([[divided_diff(fn.power(3), [a, c]) for c in P] for a in P])
    b = schur_norm_bounds(D)
    assert b["lower"] <= b["upper"] + 1e-12
    assert b["lower"] >= np.max(np.abs(D)) - 1e-12


def test_schur_bounds_zero():
    assert schur_norm_bounds(np.zeros((3, 3)))["upper"] == 0.0


def test_json_round_trip(rng):
    M = hermitian(rng, 3)
    assert np.array_equal(from_json_matrix(json.loads(json.dumps(to_json_matrix(M)))), M)
