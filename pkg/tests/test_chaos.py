import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levygauss import chaos
from levygauss import combinatorics as comb
from levygauss import orthopoly as op
from levygauss import processes as pr

P3 = pr.Partition([0.3, 0.5, 0.2])


def step(values, P=P3):
    return chaos.StepFunction(P, values)


def counts_in(P, config):
    return np.bincount(P.cell_of(config.locations), minlength=P.cells)


# -- step functions ------------------------------------------------------------------

def test_step_function_basics():
    f = step([1.0, -2.0, 4.0])
    assert f.integral() == pytest.approx(0.3 - 1.0 + 0.8)
    assert f.pairing(f) == pytest.approx(0.3 + 2.0 + 3.2)
    assert np.array_equal(f(np.array([0.1, 0.5, 0.95])), [1.0, -2.0, 4.0])
    assert chaos.StepFunction.indicator([0, 2], P3).values == (1.0, 0.0, 1.0)
    assert f.restrict([1]).values == (0, -2.0, 0)
    with pytest.raises(ValueError):
        step([1.0, 2.0])
    with pytest.raises(ValueError):
        step([1.0, math.nan, 0.0])


def test_complex_inner_is_hermitian():
    f, g = step([1j, 1.0, 0.0]), step([1.0, 1j, 2.0])
    assert f.inner(g) == pytest.approx(np.conj(g.inner(f)))


# -- generalized Hermite -------------------------------------------------------------------

def test_hermite_low_orders():
    f1, f2 = step([1.0, -0.5, 2.0]), step([0.2, 0.7, -1.0])
    w = pr.sample_white_noise(P3, seed=1)
    x1, x2 = w.cell_values @ f1.array, w.cell_values @ f2.array
    assert chaos.generalized_hermite([], w) == 1.0
    assert chaos.generalized_hermite([f1], w) == pytest.approx(x1)
    assert chaos.generalized_hermite([f1, f2], w) == pytest.approx(x1 * x2 - f1.pairing(f2))


@pytest.mark.parametrize("n", range(1, 7))
def test_hermite_equal_arguments(n):
    f = step([1.0, -0.5, 2.0])
    for seed in range(3):
        w = pr.sample_white_noise(P3, seed=seed)
        want = op.hermite(n, f.pairing(f), float(w.cell_values @ f.array))
        assert chaos.generalized_hermite([f] * n, w) == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_hermite_partition_mismatch():
    w = pr.sample_white_noise(P3, seed=0)
    with pytest.raises(chaos.PartitionMismatchError):
        chaos.generalized_hermite([step([1, 1, 1]), chaos.StepFunction(pr.Partition.uniform(3), [1, 1, 1])], w)
    other = pr.sample_white_noise(pr.Partition.uniform(3), seed=0)
    with pytest.raises(chaos.PartitionMismatchError):
        chaos.generalized_hermite([step([1, 1, 1])], other)


def test_hermite_needs_white_noise():
    c = pr.sample_poisson_config(1.0, seed=0)
    with pytest.raises(chaos.RealizationTypeError):
        chaos.generalized_hermite([step([1, 1, 1])], c)


# -- generalized Charlier -------------------------------------------------------------------

def test_charlier_low_orders():
    f, g = step([1.0, -0.5, 2.0]), step([0.2, 0.7, -1.0])
    c = pr.sample_poisson_config(3.0, seed=4)
    fx, gx = f(c.locations), g(c.locations)
    c1f = fx.sum() - f.integral()
    c1g = gx.sum() - g.integral()
    assert chaos.generalized_charlier([f], c) == pytest.approx(c1f)
    assert chaos.generalized_charlier([f, g], c) == pytest.approx(c1f * c1g - np.sum(fx * gx))


@pytest.mark.parametrize("n", range(1, 6))
def test_charlier_equal_indicator_arguments(n):
    P = pr.Partition([0.6, 1.0, 0.4])
    A = chaos.StepFunction.indicator([0, 2], P)
    for seed in range(3):
        c = pr.sample_poisson_config(P.total_mass, seed=seed)
        k = int(counts_in(P, c)[[0, 2]].sum())
        assert chaos.generalized_charlier([A] * n, c) == pytest.approx(float(op.charlier(n, 1, k)), abs=1e-9)


def test_charlier_three_points_in_unit_cell():
    P = pr.Partition([1.0, 1.0])
    A = chaos.StepFunction.indicator([0], P)
    c = pr.PointConfiguration([0.1, 0.2, 0.3, 0.8])
    assert chaos.generalized_charlier([A, A], c) == pytest.approx(1.0)
    assert chaos.rota_integral([A, A], chaos.DiagonalMeasures.POISSON, c) == pytest.approx(1.0)


def test_charlier_cap():
    f = step([1, 1, 1])
    c = pr.sample_poisson_config(1.0, seed=0)
    with pytest.raises(comb.SizeLimitError):
        chaos.generalized_charlier([f] * 9, c)
    with pytest.raises(comb.SizeLimitError):
        chaos.generalized_charlier([f] * 7, c, cap=chaos.MC_CAP)


# -- combinatorial integral -------------------------------------------------------------

@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_rota_matches_both_functionals(n, seed):
    gen = np.random.default_rng(seed)
    fs = [step(gen.normal(size=3).tolist()) for _ in range(n)]
    w = pr.sample_white_noise(P3, seed)
    c = pr.sample_poisson_config(P3.total_mass, seed)
    assert chaos.rota_integral(fs, chaos.DiagonalMeasures.GAUSSIAN, w) == pytest.approx(
        chaos.generalized_hermite(fs, w), rel=1e-12, abs=1e-12)
    assert chaos.rota_integral(fs, chaos.DiagonalMeasures.POISSON, c) == pytest.approx(
        chaos.generalized_charlier(fs, c), rel=1e-12, abs=1e-12)


def test_rota_gaussian_order_three_has_no_long_cycles():
    fs = [step([1.0, 0.5, -1.0]), step([0.3, -0.2, 2.0]), step([-1.0, 1.0, 0.4])]
    w = pr.sample_white_noise(P3, seed=9)
    x = [w.cell_values @ f.array for f in fs]
    p = lambda i, j: fs[i].pairing(fs[j])  # noqa: E731
    want = x[0] * x[1] * x[2] - p(0, 1) * x[2] - p(0, 2) * x[1] - p(1, 2) * x[0]
    assert chaos.rota_integral(fs, chaos.DiagonalMeasures.GAUSSIAN, w) == pytest.approx(want)


def test_rota_poisson_order_two_brute_force():
    f, g = step([1.0, -0.5, 2.0]), step([0.2, 0.7, -1.0])
    c = pr.sample_poisson_config(4.0, seed=17)
    fx, gx = f(c.locations), g(c.locations)
    off = sum(fx[i] * gx[j] for i in range(len(c)) for j in range(len(c)) if i != j)
    want = off - f.integral() * gx.sum() - g.integral() * fx.sum() + f.integral() * g.integral()
    assert chaos.rota_integral([f, g], chaos.DiagonalMeasures.POISSON, c) == pytest.approx(want)


def test_rota_type_mismatch():
    w = pr.sample_white_noise(P3, seed=0)
    c = pr.sample_poisson_config(1.0, seed=0)
    f = step([1, 1, 1])
    with pytest.raises(chaos.RealizationTypeError):
        chaos.rota_integral([f], chaos.DiagonalMeasures.POISSON, w)
    with pytest.raises(chaos.RealizationTypeError):
        chaos.rota_integral([f], chaos.DiagonalMeasures.GAUSSIAN, c)


# -- logarithm -------------------------------------------------------------------------------

def test_log_examples():
    h = step([0.5, -0.3, 0.2])
    zero = pr.WhiteNoiseSample(np.zeros(3), P3)
    assert chaos.log_multiplicative("gauss", h, zero) == 0
    P1 = pr.Partition([1.0])
    c = 0.4
    cfg = pr.PointConfiguration([0.1, 0.5, 0.7])
    assert chaos.log_multiplicative("poisson", chaos.StepFunction.constant(c, P1), cfg) == pytest.approx(3 * c - c)
    assert chaos.log_multiplicative("poisson", h, cfg) == pytest.approx(chaos.generalized_charlier([h], cfg))


def test_log_is_additive_and_linear():
    h = step([0.5, -0.3, 0.2])
    g = step([0.1, 0.9, -0.6])
    cfg = pr.sample_poisson_config(1.0, seed=3)
    parts = sum(chaos.log_multiplicative("poisson", h.restrict([j]), cfg) for j in range(3))
    assert parts == pytest.approx(chaos.log_multiplicative("poisson", h, cfg))
    w = pr.sample_white_noise(P3, seed=3)
    lin = chaos.log_multiplicative("gauss", step((2 * h.array - g.array).tolist()), w)
    assert lin == pytest.approx(2 * chaos.log_multiplicative("gauss", h, w) - chaos.log_multiplicative("gauss", g, w))


def test_multiplicative_functionals_have_unit_mean():
    h = step([0.5, -0.3, 0.2])
    for kind, real in (("gauss", pr.sample_white_noise(P3, 5, 100_000)),
                       ("poisson", pr.sample_poisson_configs(P3.total_mass, 100_000, 5))):
        v = chaos.multiplicative_functional(kind, h, real)
        assert abs(v.mean() - 1) < 3 * v.std(ddof=1) / math.sqrt(v.size)


@pytest.mark.parametrize("kind", ["gauss", "poisson"])
@pytest.mark.parametrize("c, a", [(0.5, 1.0), (-0.3, 2.0), (0.8, 0.25)])
def test_log_cell_identity(kind, c, a):
    r = chaos.log_cell_identity(kind, c, a)
    assert r.error < 1e-10
    assert r.closed_form == pytest.approx(math.expm1(c * c * a) - c * c * a)


@pytest.mark.parametrize("kind", ["gauss", "poisson"])
def test_log_profile_converges(kind):
    h = chaos.StepFunction(pr.Partition.uniform(2), [0.8, -0.4])
    parts = [pr.Partition.uniform(2**i) for i in range(5)]
    rows = chaos.log_convergence_profile(kind, h, parts, 100_000, seed=77)
    d = [r.distance2 for r in rows]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert d[-1] / d[0] < 0.2
    assert all(b / a <= 0.75 for a, b in zip(d, d[1:]))
    # delta halves with each dyadic step
    assert [r.delta for r in rows[1:]] == pytest.approx([rows[1].delta / 2**i for i in range(4)])
    for r in rows:
        assert abs(r.distance2 - r.exact) < 4 * r.stderr + 1e-12


def test_log_profile_zero_function():
    h = chaos.StepFunction.constant(0.0, pr.Partition.uniform(1))
    rows = chaos.log_convergence_profile("poisson", h, [pr.Partition.uniform(2**i) for i in range(3)], 1000, seed=1)
    assert all(r.distance2 == 0 for r in rows)


# -- Gram matrices ---------------------------------------------------------------------------

FS = [step([1.0, -0.5, 2.0]), step([0.2, 0.7, -1.0]), step([0.5, 0.5, -0.5])]


def test_exact_gram_order_two():
    G = chaos.chaos_gram_exact([2], FS)
    p = lambda i, j: FS[i].pairing(FS[j])  # noqa: E731
    assert G[0, 0] == pytest.approx(p(0, 0) * p(1, 1) + p(0, 1) ** 2)


@pytest.mark.parametrize("kind", ["gauss", "poisson"])
def test_gram_mc(kind):
    g = chaos.chaos_gram_mc(kind, [0, 1, 2, 3], FS, 100_000, seed=81)
    exact = chaos.chaos_gram_exact([0, 1, 2, 3], FS)
    z = np.abs(g.mean - exact) / np.where(g.stderr > 0, g.stderr, 1)
    assert np.all(z < 3.5)
    for i in range(4):
        for j in range(4):
            if i != j:
                assert abs(g.mean[i, j]) < 3 * g.stderr[i, j] + 1e-15


def test_gram_unit_indicator_gauss():
    P = pr.Partition([1.0])
    f = chaos.StepFunction.constant(1.0, P)
    g = chaos.chaos_gram_mc("gauss", [1], [f], 100_000, seed=82)
    assert abs(g.mean[0, 0] - 1) < 3 * g.stderr[0, 0]


def test_gram_order_limit():
    with pytest.raises(ValueError):
        chaos.chaos_gram_mc("gauss", [4], FS * 2, 10, seed=0)


@pytest.mark.parametrize("kind", ["gauss", "poisson"])
def test_multiplicative_isometry_mc(kind):
    P = pr.Partition.uniform(4)
    h1 = chaos.StepFunction(P, [0.5, -0.3, 0.2, 0.8])
    h2 = chaos.StepFunction(P, [0.2, 0.6, -0.5, 0.1])
    est = chaos.multiplicative_inner_mc(kind, h1, h2, 100_000, seed=83)
    assert est.exact == pytest.approx(math.exp(h1.pairing(h2)))
    assert est.z < 3


def test_batch_and_single_evaluations_agree():
    fs = FS[:3]
    batch = pr.sample_poisson_configs(P3.total_mass, 20, seed=84)
    vec = chaos.generalized_charlier(fs, batch)
    assert np.allclose(vec, [chaos.generalized_charlier(fs, batch[i]) for i in range(20)])
    wn = pr.sample_white_noise(P3, 84, 20)
    vec = chaos.generalized_hermite(fs, wn)
    assert np.allclose(vec, [chaos.generalized_hermite(fs, pr.WhiteNoiseSample(r, P3)) for r in wn.cell_values])
