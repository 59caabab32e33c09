import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levygauss import finite_base as fb
from levygauss import orthopoly as op
from levygauss import single_point as sp

weights = st.lists(st.floats(0.2, 3.0), min_size=1, max_size=4)


def test_base_validation():
    with pytest.raises(op.DomainError):
        fb.FiniteBase([])
    with pytest.raises(op.DomainError):
        fb.FiniteBase([1.0, 0.0])
    base = fb.FiniteBase([0.5, 1, 2])
    assert base.m == 3 and base.total_mass == 3.5


def test_multi_index_order():
    idx = fb.multi_indices(2, 2)
    assert idx == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    for m, d in [(1, 5), (3, 4), (4, 3)]:
        assert len(fb.multi_indices(m, d)) == math.comb(m + d, d)


# -- kernel ----------------------------------------------------------------------

def test_kernel_finite_examples():
    base = fb.FiniteBase([1.0, 1.0])
    assert math.isclose(fb.kernel_finite((1, 0), (0.0, 0.0), base), 2 * math.exp(-1), rel_tol=1e-15)
    base3 = fb.FiniteBase([0.5, 1.0, 2.0])
    x = (0.1, -0.4, 0.7)
    want = math.prod(math.exp(-a / 2 - xj) for a, xj in zip(base3.weights, x))
    assert math.isclose(fb.kernel_finite((0, 0, 0), x, base3), want, rel_tol=1e-14)


@given(weights.flatmap(lambda w: st.tuples(
    st.just(w),
    st.lists(st.integers(0, 6), min_size=len(w), max_size=len(w)),
    st.lists(st.floats(-2, 2), min_size=len(w), max_size=len(w)))))
def test_kernel_separates(args):
    w, k, x = args
    base = fb.FiniteBase(w)
    want = math.prod(sp.kernel_1d(kj, xj, a) for kj, xj, a in zip(k, x, w))
    assert fb.kernel_finite(k, x, base) == pytest.approx(want, rel=1e-14, abs=1e-300)


def test_kernel_dimension_mismatch():
    with pytest.raises(ValueError):
        fb.kernel_finite((0, 1), (0.0,), fb.FiniteBase([1.0, 1.0]))


# -- multiplicative functionals ------------------------------------------------------

def test_vacuum_image():
    base = fb.FiniteBase([0.7, 1.3])
    img = fb.multiplicative_image_finite([0, 0], base)
    for k in itertools.product(range(4), repeat=2):
        assert img(k) == 1


@pytest.mark.parametrize("c", [-0.6, 0.1, 0.9])
def test_single_cell_closed_sum(c):
    base = fb.FiniteBase([1.0])
    img = fb.multiplicative_image_finite([c], base)
    assert abs(img.inner(img) - math.exp(c * c)) < 1e-12 * math.exp(c * c)


def test_two_cell_example():
    base = fb.FiniteBase([1.0, 2.0])
    h, g = fb.multiplicative_image_finite([0.3, -0.2], base), fb.multiplicative_image_finite([0.1, 0.5], base)
    want = math.exp(1 * 0.03 + 2 * (-0.1))
    assert abs(h.inner(g) - want) < 1e-10
    assert abs(h.inner_grid(g) - want) < 1e-10


complex_h = st.complex_numbers(max_magnitude=0.7, allow_nan=False, allow_infinity=False)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(0.2, 2.0), complex_h, complex_h), min_size=1, max_size=3))
def test_multiplicative_isometry(cells):
    base = fb.FiniteBase([c[0] for c in cells])
    h = [c[1] for c in cells]
    g = [c[2] for c in cells]
    got = fb.multiplicative_image_finite(h, base).inner(fb.multiplicative_image_finite(g, base))
    want = fb.gaussian_multiplicative_inner(h, g, base)
    assert abs(got - want) <= 1e-10 * abs(want)


def test_real_h_gives_real_inner_product():
    base = fb.FiniteBase([0.5, 1.5])
    img = fb.multiplicative_image_finite([0.4, -0.3], base)
    assert img.inner(img).imag == 0


def test_inner_rejects_other_base():
    a = fb.multiplicative_image_finite([0.1], fb.FiniteBase([1.0]))
    b = fb.multiplicative_image_finite([0.1], fb.FiniteBase([2.0]))
    with pytest.raises(ValueError):
        a.inner(b)


# -- tensor products and unitarity -------------------------------------------------------

@settings(max_examples=10, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.floats(-1, 1), min_size=1, max_size=4),
       st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.floats(-1, 1), min_size=1, max_size=4))
def test_coefficient_inner_product_matches_poisson_sum(c, d):
    base = fb.FiniteBase([0.6, 1.4])
    F, G = fb.ChaosCoefficients(c, base), fb.ChaosCoefficients(d, base)
    want = F.inner(G)
    assert abs(F.poisson_inner_series(G) - want) <= 1e-9 * max(1.0, abs(want))


def test_coefficients_evaluate_as_products():
    base = fb.FiniteBase([0.5, 2.0])
    F = fb.ChaosCoefficients({(1, 2): 3.0}, base)
    assert F.evaluate_gauss((0.3, -1.0)) == pytest.approx(3 * op.hermite(1, 0.5, 0.3) * op.hermite(2, 2.0, -1.0))
    assert F.evaluate_poisson((2, 1)) == pytest.approx(3 * op.charlier(1, 0.5, 2) * op.charlier(2, 2.0, 1))


@pytest.mark.parametrize("method", ["tensor", "quadrature"])
def test_unitarity_single_cell(method):
    assert fb.unitarity_defect(fb.FiniteBase([1.0]), 6, method).defect < 1e-6


@pytest.mark.parametrize("method", ["tensor", "quadrature"])
def test_unitarity_three_cells(method):
    rep = fb.unitarity_defect(fb.FiniteBase([0.5, 1.0, 2.0]), 4, method)
    assert len(rep.indices) == 35
    assert rep.defect < 1e-6


def test_unitarity_vacuum_block():
    assert fb.unitarity_defect(fb.FiniteBase([0.5, 2.0]), 0).defect < 1e-13


def test_unitarity_cap():
    with pytest.raises(ValueError):
        fb.unitarity_defect(fb.FiniteBase([1.0] * 4), 6, cap=100)


def test_tensor_and_quadrature_grams_agree():
    base = fb.FiniteBase([0.5, 2.0])
    t = fb.unitarity_defect(base, 3, "tensor").gram
    q = fb.unitarity_defect(base, 3, "quadrature").gram
    assert np.max(np.abs(t - q)) < 1e-9


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_refinement_consistency(a):
    assert fb.refinement_defect(a, 4) < 1e-8
