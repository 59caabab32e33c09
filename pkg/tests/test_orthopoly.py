import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from levygauss import combinatorics as comb
from levygauss import orthopoly as op

from _oracles import (
    gamma_moments,
    gaussian_moments,
    hermite_rodrigues,
    monic_orthogonal,
    poisson_moments,
    poly_eval,
    trim,
)

RATES = [Fraction(1, 2), Fraction(1), Fraction(3)]
rationals = st.fractions(min_value=-4, max_value=4, max_denominator=6)
positive = st.fractions(min_value=Fraction(1, 6), max_value=4, max_denominator=6)


# -- point values ----------------------------------------------------------------

def test_hermite_examples():
    assert op.hermite(0, 2.5, 1.7) == 1
    assert op.hermite(2, 1, 2) == 3
    assert op.hermite(3, 1, 2) == 2


def test_charlier_examples():
    assert op.charlier(0, 0.7, 3) == 1
    assert op.charlier(2, 1, 1) == -1
    assert op.charlier(3, 1, 0) == -1
    for n in range(8):
        assert op.charlier(n, Fraction(5, 3), 0) == Fraction(-5, 3) ** n
    assert op.charlier(1, Fraction(2, 7), Fraction(9, 4)) == Fraction(9, 4) - Fraction(2, 7)


def test_laguerre_examples():
    assert op.laguerre(0, 3, 1.5) == 1
    assert op.laguerre(1, 1, 2) == 0
    assert op.charlier(2, 1, 1) == 2 * op.laguerre(2, -1, 1) == -1


def test_domain_errors():
    for fn in (op.hermite, op.charlier):
        with pytest.raises(op.DomainError):
            fn(2, 0, 1.0)
        with pytest.raises(op.DomainError):
            fn(2, -1, 1.0)
    with pytest.raises(op.DomainError):
        op.GaussianWeight(0)
    with pytest.raises(op.DomainError):
        op.PoissonWeight(-2)


def test_exact_inputs_give_exact_outputs():
    assert isinstance(op.hermite(5, Fraction(1, 3), Fraction(2, 5)), Fraction)
    assert isinstance(op.charlier(5, 2, 3), Fraction)


def test_vectorised_evaluation():
    x = np.linspace(-2, 2, 7)
    assert np.allclose(op.hermite(3, 1.0, x), x**3 - 3 * x)


# -- independent oracles ---------------------------------------------------------------

@pytest.mark.parametrize("a", RATES)
def test_hermite_matches_rodrigues(a):
    for n in range(11):
        assert trim(op.hermite_coefficients(n, a)) == hermite_rodrigues(n, a)


@pytest.mark.parametrize("a", RATES)
def test_hermite_is_monic_orthogonal_for_gaussian_moments(a):
    basis = monic_orthogonal(gaussian_moments(a, 20), 9)
    for n, p in enumerate(basis):
        assert trim(op.hermite_coefficients(n, a)) == p


@pytest.mark.parametrize("a", RATES)
def test_charlier_is_monic_orthogonal_for_poisson_moments(a):
    basis = monic_orthogonal(poisson_moments(a, 20), 9)
    for n, p in enumerate(basis):
        assert trim(op.charlier_coefficients(n, a)) == p


@pytest.mark.parametrize("alpha", [0, 1, 2])
def test_laguerre_matches_gamma_orthogonal_polynomials(alpha):
    basis = monic_orthogonal(gamma_moments(alpha, 16), 7)
    for n, p in enumerate(basis):
        want = [c * (-1) ** n * math.factorial(n) for c in op.laguerre_coefficients(n, alpha)]
        assert trim(want) == p


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 20), positive, rationals)
def test_recurrence_and_definitional_sums_agree_exactly(n, a, x):
    assert op.hermite(n, a, x) == op.hermite_sum(n, a, x) == poly_eval(op.hermite_coefficients(n, a), x)
    assert op.charlier(n, a, x) == op.charlier_sum(n, a, x) == poly_eval(op.charlier_coefficients(n, a), x)
    assert op.laguerre(n, a, x) == op.laguerre_sum(n, a, x)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 20), st.floats(0.2, 4.0), st.floats(-4.0, 8.0))
def test_float_path_matches_exact_path(n, a, x):
    # relative to the sum of absolute monomial terms, the natural conditioning scale
    fa, fx = Fraction(a), Fraction(x)
    for fast, exact, coeffs in ((op.hermite, op.hermite_sum, op.hermite_coefficients),
                                (op.charlier, op.charlier_sum, op.charlier_coefficients)):
        want = float(exact(n, fa, fx))
        scale = float(poly_eval([abs(c) for c in coeffs(n, fa)], abs(fx)))
        assert abs(fast(n, a, x) - want) <= 1e-10 * max(1.0, scale)


# -- combinatorial forms ------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 7), positive, rationals)
def test_hermite_as_cycle_index(n, a, x):
    t = [x, -a] + [0] * max(0, n - 2)
    assert comb.augmented_cycle_index(n, t) == op.hermite(n, a, x)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 7), positive, rationals)
def test_charlier_as_cycle_index(n, a, x):
    t = [x - a] + [x if k % 2 else -x for k in range(2, n + 1)]
    assert comb.augmented_cycle_index(n, t) == op.charlier(n, a, x)


@pytest.mark.parametrize("a", RATES)
def test_charlier_laguerre_identity(a):
    for n in range(11):
        for k in range(11):
            assert op.charlier(n, a, k) == math.factorial(n) * op.laguerre(n, k - n, a)


@pytest.mark.parametrize("a", RATES)
def test_charlier_reflection(a):
    assert all(op.charlier_reflection_check(n, k, a) for n in range(11) for k in range(11))


# -- quadrature and inner products -----------------------------------------------------

def test_gauss_hermite_rule_moments():
    z, w = op.gauss_hermite_rule(200)
    assert len(z) == 200 and math.isclose(w.sum(), 1.0, rel_tol=1e-14)
    mom = gaussian_moments(1, 41)
    for j in range(0, 41, 2):
        assert math.isclose(float(np.dot(w, z**j)), float(mom[j]), rel_tol=1e-10)


def test_gauss_hermite_rule_is_cached():
    assert op.gauss_hermite_rule(200) is op.gauss_hermite_rule(200)


@pytest.mark.parametrize("a", [0.3, 1.0, 5.0])
@pytest.mark.parametrize("degree", [0, 6, 24])
def test_poisson_truncation_tail_bound(a, degree):
    K = op.poisson_truncation(a, degree, 1e-16)
    # tail of sum_k P_a(k) (k+1)^degree beyond K
    ks = np.arange(K + 1, K + 400)
    tail = math.fsum(stats.poisson.pmf(ks, a) * (ks + 1.0) ** degree)
    assert tail < 1e-16 * max(1.0, float(np.sum(stats.poisson.pmf(np.arange(K + 1), a) * (np.arange(K + 1) + 1.0) ** degree)))


def test_poisson_pmf_matches_scipy():
    assert np.allclose(op.poisson_pmf(2.5, 40), stats.poisson.pmf(np.arange(41), 2.5), rtol=1e-12, atol=0)


def test_inner_product_examples():
    g1, p = op.GaussianWeight(1.0), op.PoissonWeight(1.3)
    h3 = op.hermite_coefficients(3, 1.0)
    assert math.isclose(op.weighted_inner_product(h3, h3, g1).value, 6.0, rel_tol=1e-12)
    c2, c3 = op.charlier_coefficients(2, 1.3), op.charlier_coefficients(3, 1.3)
    assert abs(op.weighted_inner_product(c2, c3, p).value) < 1e-12
    for w in (g1, p):
        assert math.isclose(op.weighted_inner_product([1], [1], w).value, 1.0, rel_tol=1e-14)


def test_inner_product_precision_warning():
    h = op.hermite_coefficients(12, 1.0)
    res = op.weighted_inner_product(h, h, op.GaussianWeight(1.0), resolution=10)
    assert res.precision_warning
    assert not op.weighted_inner_product(h, h, op.GaussianWeight(1.0)).precision_warning
    c = op.charlier_coefficients(6, 2.0)
    assert op.weighted_inner_product(c, c, op.PoissonWeight(2.0), resolution=5).precision_warning


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_orthonormality_sweep(a):
    for w, coeffs in ((op.GaussianWeight(a), op.hermite_coefficients), (op.PoissonWeight(a), op.charlier_coefficients)):
        cs = [coeffs(n, a) for n in range(13)]
        for n in range(13):
            for m in range(13):
                v = op.weighted_inner_product(cs[n], cs[m], w).value / (a**n * math.factorial(n))
                assert abs(v - (n == m)) < 1e-8


# -- generating functions --------------------------------------------------------------

def test_generating_function_examples():
    assert op.generating_function_residual("hermite", 1.0, 1.0, 0.0, 5) == 0
    assert op.generating_function_residual("charlier", 1.0, 2.0, 0.0, 5) == 0
    assert op.generating_function_residual("hermite", 1.0, 1.0, 0.5, 30) < 1e-12
    assert op.generating_function_residual("charlier", 1.0, 2.0, 0.5, 30) < 1e-12


@pytest.mark.parametrize("family, point", [("hermite", 1.3), ("charlier", 3.0)])
def test_generating_function_residual_decreases(family, point):
    r = [op.generating_function_residual(family, 1.5, point, 0.6, N) for N in range(0, 30, 3)]
    assert all(b <= a for a, b in zip(r, r[1:]))


def test_generating_function_rejects_unknown_family():
    with pytest.raises(ValueError):
        op.generating_function_residual("legendre", 1.0, 0.0, 0.1, 3)


def test_charlier_float_path_stable_at_small_counts():
    # (-a)^n is the minimal solution of the forward recurrence at x = 0
    for n in (12, 20):
        assert math.isclose(op.charlier(n, 0.93, 0.0), (-0.93) ** n, rel_tol=1e-12)
    k = np.arange(6)
    assert np.allclose(op.charlier(15, 1.7, k), [float(op.charlier(15, Fraction(1.7), int(v))) for v in k], rtol=1e-11)
