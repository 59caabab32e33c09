"""Named verification suites behind the command line.

Every check is a function of a :class:`Context` returning a
:class:`CheckResult`.  Checks draw randomness only from seeds derived from
``(global seed, check id)``, so reports are reproducible byte for byte.
"""
from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import stats

from . import chaos, combinatorics as comb, finite_base, levy_isometry as li, nonfock, orthopoly as op
from . import processes as pr, rng, single_point as sp

MC_SIGMAS = 3.0


@dataclass(frozen=True)
class Context:
    seed: int = 42
    samples: int = 100_000
    tolerance_scale: float = 1.0
    workers: int | None = None

    def derived_seed(self, check_id: str) -> int:
        ss = np.random.SeedSequence(self.seed, spawn_key=(zlib.crc32(check_id.encode()),))
        return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass(frozen=True)
class CheckResult:
    id: str
    identity: str
    passed: bool
    value: float
    tolerance: float
    seed: int | None = None

    def as_dict(self) -> dict:
        return {"id": self.id, "identity": self.identity, "status": "pass" if self.passed else "fail",
                "value": self.value, "tolerance": self.tolerance, "seed": self.seed}


@dataclass(frozen=True)
class Check:
    id: str
    identity: str
    fn: Callable[[Context, int], tuple[float, float, bool]]
    random: bool = False

    def run(self, ctx: Context) -> CheckResult:
        seed = ctx.derived_seed(self.id) if self.random else None
        value, tol, ok = self.fn(ctx, seed)
        return CheckResult(self.id, self.identity, bool(ok), float(value), float(tol), seed)


def _at_most(value, tol):
    return value, tol, value <= tol


def _mc(z_values, ctx):
    z = float(np.max(z_values))
    tol = MC_SIGMAS * ctx.tolerance_scale
    return z, tol, z <= tol


# -- identities ----------------------------------------------------------------------

def _hermite_cycle_index(ctx, seed):
    bad = 0
    for n in range(8):
        for a, x in itertools.product([Fraction(1, 2), Fraction(1), Fraction(3)], [Fraction(-2), Fraction(1, 3), Fraction(5, 2)]):
            t = [x, -a] + [0] * max(0, n - 2)
            bad += comb.augmented_cycle_index(n, t) != op.hermite(n, a, x)
    return bad, 0, bad == 0


def _charlier_cycle_index(ctx, seed):
    bad = 0
    for n in range(8):
        for a, x in itertools.product([Fraction(1, 2), Fraction(1), Fraction(3)], [Fraction(0), Fraction(2), Fraction(7, 3)]):
            t = [x - a] + [x if k % 2 else -x for k in range(2, n + 1)]
            bad += comb.augmented_cycle_index(n, t) != op.charlier_sum(n, a, x)
    return bad, 0, bad == 0


def _cycle_index_gf(ctx, seed):
    N = 10
    t = [Fraction(k * k - 3, k + 2) for k in range(1, N + 1)]
    # coefficients of exp(S), S = sum t_i z^i / i, by summing powers of S
    S = [Fraction(0)] + [t[i - 1] / i for i in range(1, N + 1)]
    coeff = [Fraction(0)] * (N + 1)
    power = [Fraction(1)] + [Fraction(0)] * N
    for k in range(N + 1):
        coeff = [c + p / math.factorial(k) for c, p in zip(coeff, power)]
        power = [sum(power[j] * S[i - j] for j in range(i + 1)) for i in range(N + 1)]
    bad = sum(comb.augmented_cycle_index(n, t, "recurrence") != coeff[n] * math.factorial(n) for n in range(N + 1))
    bad += sum(comb.augmented_cycle_index(n, t, "enumerate") != coeff[n] * math.factorial(n) for n in range(8))
    return bad, 0, bad == 0


def _charlier_laguerre(ctx, seed):
    bad = 0
    for a in (Fraction(1, 2), Fraction(1), Fraction(3)):
        for n in range(11):
            for k in range(11):
                bad += op.charlier(n, a, k) != math.factorial(n) * op.laguerre(n, k - n, a)
    return bad, 0, bad == 0


def _involution_counts(ctx, seed):
    bad = sum(len(comb.enumerate_involutions(n)) != len(comb.enumerate_partitions_le2(range(n)))
              or len(comb.enumerate_involutions(n)) != comb.involution_count(n) for n in range(9))
    return bad, 0, bad == 0


def _orthogonality(ctx, seed):
    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        for w, coeffs in ((op.GaussianWeight(a), op.hermite_coefficients), (op.PoissonWeight(a), op.charlier_coefficients)):
            cs = [coeffs(n, a) for n in range(13)]
            for n in range(13):
                for m in range(n, 13):
                    v = op.weighted_inner_product(cs[n], cs[m], w).value / (a**n * math.factorial(n))
                    worst = max(worst, abs(v - (n == m)))
    return _at_most(worst, 1e-8 * ctx.tolerance_scale)


# -- isometry ------------------------------------------------------------------------

def _kernel_gram_1d(ctx, seed):
    return _at_most(max(sp.kernel_gram_1d(a, 8).defect for a in (0.5, 1.0, 2.0)), 1e-6 * ctx.tolerance_scale)


def _kernel_gram_finite(ctx, seed):
    return _at_most(finite_base.unitarity_defect(finite_base.FiniteBase((0.5, 1, 2)), 4).defect, 1e-6 * ctx.tolerance_scale)


def _identity_normalization(ctx, seed):
    ok = True
    worst = 0.0
    for a, x, k in ((Fraction(1, 2), Fraction(0), 1), (Fraction(2), Fraction(1, 2), 2)):
        v = sp.resolve_identity_normalization(a, x, k, N=300)
        ok &= v.certified == "denominator"
        worst = max(worst, abs(v.denominator_sum - v.closed_form))
    return worst, 1e-8 * ctx.tolerance_scale, ok and worst <= 1e-8 * ctx.tolerance_scale


def _multiplicative_finite(ctx, seed):
    base = finite_base.FiniteBase((1.0, 2.0, 0.5))
    hs = [(0.3, -0.2, 0.5), (0.1, 0.5, -0.4), (0.25 + 0.1j, -0.3, 0.2j)]
    worst = 0.0
    for h, g in itertools.product(hs, repeat=2):
        got = finite_base.multiplicative_image_finite(h, base).inner(finite_base.multiplicative_image_finite(g, base))
        want = finite_base.gaussian_multiplicative_inner(h, g, base)
        worst = max(worst, abs(got - want) / abs(want))
    return _at_most(worst, 1e-10 * ctx.tolerance_scale)


def _refinement(ctx, seed):
    return _at_most(max(finite_base.refinement_defect(a, 4) for a in (0.5, 1.0, 2.0)), 1e-8 * ctx.tolerance_scale)


def _multiplicative_mc(ctx, seed):
    P = pr.Partition.uniform(4)
    h1 = chaos.StepFunction(P, [0.5, -0.3, 0.2, 0.8])
    h2 = chaos.StepFunction(P, [0.2, 0.6, -0.5, 0.1])
    z = [chaos.multiplicative_inner_mc(k, h1, h2, ctx.samples, seed + i, ctx.workers).z
         for i, k in enumerate(("gauss", "poisson"))]
    return _mc(z, ctx)


# -- processes -----------------------------------------------------------------------

def _poisson_mean(ctx, seed):
    b = pr.sample_poisson_configs(1.0, ctx.samples, seed, ctx.workers)
    return _mc([abs(b.counts.mean() - 1.0) / math.sqrt(1.0 / ctx.samples)], ctx)


def _white_noise_variance(ctx, seed):
    P = pr.Partition([0.7, 0.3])
    v = pr.sample_white_noise(P, seed, ctx.samples, ctx.workers).cell_values
    z = []
    for j, a in enumerate(P.masses):
        sq = v[:, j] ** 2
        z.append(abs(sq.mean() - a) / (sq.std(ddof=1) / math.sqrt(ctx.samples)))
    return _mc(z, ctx)


def _gamma_exact_laplace(ctx, seed):
    g = pr.exact_gamma_increments(pr.Partition([1.0]), seed, ctx.samples, ctx.workers)[:, 0]
    z = []
    for c in (0.5, 1.0, 2.0):
        v = np.exp(-c * g)
        z.append(abs(v.mean() - 1 / (1 + c)) / (v.std(ddof=1) / math.sqrt(ctx.samples)))
    return _mc(z, ctx)


def _gamma_truncated_mean(ctx, seed):
    eps = 1e-6
    b = pr.sample_levy_batch(pr.LevySpec.gamma(), ctx.samples, seed, 1.0, eps, ctx.workers)
    s = b.sum_over_points(b.marks)
    return _mc([abs(s.mean() - math.exp(-eps)) / (s.std(ddof=1) / math.sqrt(ctx.samples))], ctx)


def _lk_poisson(ctx, seed):
    err = max(abs(pr.levy_khintchine_exponent(pr.LevySpec.poisson(), y) - (np.exp(1j * y) - 1))
              for y in np.linspace(-3, 3, 13))
    return _at_most(err, 1e-12 * ctx.tolerance_scale)


LK_SPECS = {
    "gaussian": pr.LevySpec.gaussian(1.0),
    "poisson": pr.LevySpec.poisson(),
    "two-atom": pr.LevySpec(0.3, 0.0, pr.FiniteAtomic((1.0, -2.0), (0.7, 0.4))),
}


def lk_characteristic_z(spec: pr.LevySpec, samples: int, seed: int, mass: float = 1.0,
                        ys=(0.5, 1.0, 2.0), workers=None) -> list[float]:
    """|z| scores of the empirical characteristic function, real and imaginary parts."""
    inc = pr.sample_levy_increments(spec, pr.Partition([mass]), samples, seed, None, workers)[:, 0]
    out = []
    for y in ys:
        target = np.exp(mass * pr.levy_khintchine_exponent(spec, y))
        e = np.exp(1j * y * inc)
        for part, tv in ((e.real, target.real), (e.imag, target.imag)):
            se = part.std(ddof=1) / math.sqrt(samples)
            out.append(abs(part.mean() - tv) / se if se > 0 else (0.0 if part.mean() == tv else math.inf))
    return out


def _lk_mc(ctx, seed):
    z = []
    for i, spec in enumerate(LK_SPECS.values()):
        z += lk_characteristic_z(spec, ctx.samples, seed + i, workers=ctx.workers)
    return _mc(z, ctx)


def _determinism(ctx, seed):
    a = pr.sample_levy_batch(pr.LevySpec.gamma(), 20_000, seed, 1.0, 1e-3, workers=1)
    b = pr.sample_levy_batch(pr.LevySpec.gamma(), 20_000, seed, 1.0, 1e-3, workers=4)
    same = np.array_equal(a.counts, b.counts) and np.array_equal(a.locations, b.locations) and np.array_equal(a.marks, b.marks)
    return (0 if same else 1), 0, same


# -- chaos ---------------------------------------------------------------------------

def _equal_args(ctx, seed):
    P = pr.Partition([0.3, 0.5, 0.2])
    f = chaos.StepFunction(P, [1.0, -0.5, 2.0])
    w = pr.sample_white_noise(P, seed)
    c = pr.sample_poisson_configs(2.0, 1, seed)[0]
    P2 = pr.Partition([0.6, 1.0, 0.4])
    A2 = chaos.StepFunction.indicator([0, 2], P2)
    N = float(np.bincount(P2.cell_of(c.locations), minlength=3)[[0, 2]].sum())
    worst = 0.0
    for n in range(1, 6):
        h = op.hermite(n, f.pairing(f), float(w.cell_values @ f.array))
        worst = max(worst, abs(chaos.generalized_hermite([f] * n, w) - h) / max(1, abs(h)))
        ch = op.charlier(n, 1.0, N)
        worst = max(worst, abs(chaos.generalized_charlier([A2] * n, c) - ch) / max(1, abs(ch)))
    return _at_most(worst, 1e-12 * ctx.tolerance_scale)


def _rota_agreement(ctx, seed):
    gen = rng.make_rng(seed, 0)
    P = pr.Partition([0.2, 0.5, 0.3])
    worst = 0.0
    for n in range(1, 7):
        fs = [chaos.StepFunction(P, gen.normal(size=3).tolist()) for _ in range(n)]
        w = pr.sample_white_noise(P, seed + n)
        c = pr.sample_poisson_configs(P.total_mass, 1, seed + n)[0]
        g1, g2 = chaos.generalized_hermite(fs, w), chaos.rota_integral(fs, chaos.DiagonalMeasures.GAUSSIAN, w)
        c1, c2 = chaos.generalized_charlier(fs, c), chaos.rota_integral(fs, chaos.DiagonalMeasures.POISSON, c)
        worst = max(worst, abs(g1 - g2) / max(1, abs(g1)), abs(c1 - c2) / max(1, abs(c1)))
    return _at_most(worst, 1e-12 * ctx.tolerance_scale)


def _log_cell(ctx, seed):
    worst = max(chaos.log_cell_identity(k, c, a).error for k in ("gauss", "poisson")
                for c, a in ((0.5, 1.0), (-0.3, 2.0), (0.8, 0.25)))
    return _at_most(worst, 1e-10 * ctx.tolerance_scale)


def log_profile_rows(kind: str, samples: int, seed: int, workers=None):
    h = chaos.StepFunction(pr.Partition.uniform(2), [0.8, -0.4])
    return chaos.log_convergence_profile(kind, h, [pr.Partition.uniform(2**i) for i in range(5)], samples, seed, workers)


def _log_profile(ctx, seed):
    worst_ratio = 0.0
    monotone = True
    for i, kind in enumerate(("gauss", "poisson")):
        rows = log_profile_rows(kind, ctx.samples, seed + i, ctx.workers)
        d = [r.distance2 for r in rows]
        monotone &= all(b < a for a, b in zip(d, d[1:]))
        worst_ratio = max(worst_ratio, d[-1] / d[0])
    tol = 0.2 * ctx.tolerance_scale
    return worst_ratio, tol, monotone and worst_ratio < tol


def _chaos_gram(ctx, seed):
    P = pr.Partition([0.3, 0.5, 0.2])
    fs = [chaos.StepFunction(P, v) for v in ([1.0, -0.5, 2.0], [0.2, 0.7, -1.0], [0.5, 0.5, -0.5])]
    z = []
    orders = [0, 1, 2, 3]
    for i, kind in enumerate(("gauss", "poisson")):
        g = chaos.chaos_gram_mc(kind, orders, fs, ctx.samples, seed + i, ctx.workers)
        for a, b in itertools.combinations(range(len(orders)), 2):
            z.append(abs(g.mean[a, b]) / g.stderr[a, b])
    return _mc(z, ctx)


# -- levy ----------------------------------------------------------------------------

def _jump_basis(ctx, seed):
    basis = li.build_jump_basis(pr.LevySpec.gamma(), 4)
    worst = 0.0
    for n in range(5):
        want = [float(c) * (-1) ** n * math.factorial(n) for c in op.laguerre_coefficients(n, 1)]
        worst = max(worst, max(abs(float(a) - b) for a, b in zip(basis.coefficients[n], want)))
    return _at_most(worst, 1e-8 * ctx.tolerance_scale)


def _dimension(ctx, seed):
    got = (li.dimension_invariant(pr.LevySpec.poisson()),
           li.dimension_invariant(pr.LevySpec.subordinator(pr.FiniteAtomic((1.0, 2.0, 3.0), (1.0, 1.0, 1.0)))),
           li.dimension_invariant(pr.LevySpec.gamma()))
    ok = got == (1, 3, math.inf)
    return (0 if ok else 1), 0, ok


def _dirac_reduction(ctx, seed):
    p = pr.sample_poisson_configs(2.0, 5000, seed)
    d = pr.sample_levy_batch(pr.LevySpec.poisson(), 5000, seed, 2.0)
    ok = np.array_equal(p.counts, d.counts) and np.array_equal(p.locations, d.locations) and np.all(d.marks == 1.0)
    return (0 if ok else 1), 0, ok


def _gamma_laplace(ctx, seed):
    a = chaos.StepFunction(pr.Partition.uniform(2), [0.5, 1.5])
    return _mc([li.subordinator_laplace_mc(pr.LevySpec.gamma(), a, ctx.samples, seed, 1e-6, ctx.workers).z], ctx)


def _vnk(ctx, seed):
    a = chaos.StepFunction.constant(1.0, pr.Partition.uniform(1))
    g = li.vnk_gram_mc(pr.LevySpec.gamma(), [(0, 1), (1, 1), (1, 2), (2, 1), (2, 2)], ctx.samples, seed, a, 1e-6, ctx.workers)
    off = [g.z[i, j] for i, j in itertools.combinations(range(len(g.pairs)), 2)]
    return _mc(off, ctx)


# -- nonfock -------------------------------------------------------------------------

def _nonfock_triple(ctx, seed):
    maj, ex2, xor = nonfock.VotingScheme.majority(), nonfock.VotingScheme.example2(), nonfock.VotingScheme.xor()
    ok = all(nonfock.validate_scheme(s).valid for s in (maj, ex2, xor))
    for s in (maj, ex2):
        v = nonfock.is_abundant(s)
        ok &= v.abundant and len(set(nonfock.compose_word(s, v.witness))) == 1
        ok &= nonfock.antiadditive_solution_dim(s) == 1
    ok &= not nonfock.is_abundant(xor).abundant
    ok &= any(sol.g_values() == (1, -1) and sol.f_values() == (1, -1) for sol in nonfock.antimultiplicative_search(xor, 2))
    return (0 if ok else 1), 0, ok


def _ballots(ctx, seed):
    worst = 1.0
    for i, s in enumerate((nonfock.VotingScheme.majority(), nonfock.VotingScheme.example2())):
        tree = nonfock.sample_ballots(s, 3, seed + i, ctx.samples, ctx.workers)
        for level in tree.levels:
            counts = np.bincount(level[:, 0], minlength=s.r)
            worst = min(worst, stats.chisquare(counts).pvalue)
    tol = 0.01 / ctx.tolerance_scale
    return worst, tol, worst >= tol


SUITES: dict[str, list[Check]] = {
    "identities": [
        Check("hermite-cycle-index", "Hermite polynomials as augmented cycle index at (x, -a, 0, ...)", _hermite_cycle_index),
        Check("charlier-cycle-index", "Charlier polynomials as augmented cycle index at (x-a, -x, x, ...)", _charlier_cycle_index),
        Check("cycle-index-gf", "exponential generating function of the augmented cycle index", _cycle_index_gf),
        Check("charlier-laguerre", "C_n^a(k) = n! L_n^(k-n)(a)", _charlier_laguerre),
        Check("involution-partitions", "involutions <-> partitions into blocks of size <= 2", _involution_counts),
        Check("orthogonality", "Hermite and Charlier orthogonality with norms a^n n!", _orthogonality),
    ],
    "isometry": [
        Check("kernel-gram-1d", "kernel-mapped Charlier basis is orthonormal", _kernel_gram_1d),
        Check("kernel-gram-finite", "product kernel on three cells is unitary on degree <= 4", _kernel_gram_finite),
        Check("identity-normalization", "Hermite-Charlier kernel series certified with a^n in the denominator", _identity_normalization),
        Check("multiplicative-finite", "closed Poisson sums give exp of the Gaussian inner product", _multiplicative_finite),
        Check("refinement", "splitting a cell preserves inner products", _refinement),
        Check("multiplicative-mc", "E[M_h1 M_h2] = exp(h1, h2) by Monte Carlo", _multiplicative_mc, True),
    ],
    "processes": [
        Check("poisson-mean", "Poisson count mean", _poisson_mean, True),
        Check("white-noise-variance", "white noise cell variances equal cell masses", _white_noise_variance, True),
        Check("gamma-exact-laplace", "Laplace transform of Gamma(1) increments", _gamma_exact_laplace, True),
        Check("gamma-truncated-mean", "first moment of truncated gamma jumps", _gamma_truncated_mean, True),
        Check("lk-poisson", "Levy-Khintchine exponent of the Poisson spec is e^{iy} - 1", _lk_poisson),
        Check("lk-mc", "characteristic functions of sampled increments", _lk_mc, True),
        Check("worker-determinism", "samples do not depend on the number of workers", _determinism, True),
    ],
    "chaos": [
        Check("equal-arguments", "equal arguments give ordinary Hermite / Charlier polynomials", _equal_args, True),
        Check("rota-agreement", "diagonal-measure integral equals the generalized polynomials", _rota_agreement, True),
        Check("log-cell", "E|F - 1 - G|^2 = e^m - 1 - m on one cell", _log_cell),
        Check("log-profile", "sum (F_Ak - 1) approaches LOG F under dyadic refinement", _log_profile, True),
        Check("chaos-gram", "chaoses of different orders are orthogonal", _chaos_gram, True),
    ],
    "levy": [
        Check("jump-basis-gamma", "gamma jump basis is monic Laguerre L^(1)", _jump_basis),
        Check("dimension", "dimension invariant equals support size of the Levy measure", _dimension),
        Check("dirac-reduction", "Dirac(1) Levy spec reproduces the Poisson sampler", _dirac_reduction, True),
        Check("gamma-laplace", "E exp(-<a, gamma>) = exp(-int log(1 + a))", _gamma_laplace, True),
        Check("vnk-gram", "chaos blocks V_{n,k} are mutually orthogonal", _vnk, True),
    ],
    "nonfock": [
        Check("scheme-verdicts", "majority / example-2 / XOR verdicts", _nonfock_triple),
        Check("ballot-marginals", "ballot levels are uniform (min chi-square p-value)", _ballots, True),
    ],
}

SUITE_NAMES = tuple(SUITES) + ("all",)


def checks_for(name: str) -> list[Check]:
    if name == "all":
        return [c for checks in SUITES.values() for c in checks]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    return SUITES[name]


def run_suite(name: str, ctx: Context) -> list[CheckResult]:
    return [c.run(ctx) for c in checks_for(name)]
