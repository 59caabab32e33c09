"""Functionals of Levy processes built from marked Poisson configurations.

A jump ``(x, t)`` of the process is a point of ``[0, 1] x R`` with
intensity ``nu x Pi``.  Chaos bases come from polynomials orthogonal with
respect to ``t^2 dPi(t)`` (plus ``sigma^2`` at ``t = 0`` for a Gaussian
part), computed exactly from the moments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import special

from .chaos import MCEstimate, StepFunction
from .combinatorics import cycles, enumerate_permutations
from .orthopoly import DomainError
from .processes import (
    ConfigurationBatch,
    FiniteAtomic,
    GammaMeasure,
    LevySpec,
    PointConfiguration,
    sample_levy_batch,
)


class DivergentCompensatorError(DomainError):
    """``int int h dnu dPi`` diverges for the requested test function."""


# -- jump polynomials ----------------------------------------------------------

def _moment_sequence(spec: LevySpec, count: int) -> list[Fraction]:
    """Exact moments ``int t^j (t^2 dPi + sigma^2 delta_0)`` for ``j < count``."""
    pi = spec.levy_measure
    out = []
    for j in range(count):
        if pi is None:
            mu = Fraction(0)
        elif isinstance(pi, GammaMeasure):
            mu = Fraction(math.factorial(j + 1))
        elif isinstance(pi, FiniteAtomic):
            mu = sum((Fraction(m) * Fraction(t) ** (j + 2) for t, m in zip(pi.atoms, pi.masses)), Fraction(0))
        else:
            raise DomainError(f"moments of {type(pi).__name__} are not available")
        if j == 0:
            mu += Fraction(spec.gaussian_variance)
        out.append(mu)
    return out


@dataclass(frozen=True)
class JumpPolynomialBasis:
    """Monic orthogonal polynomials ``P_0, P_1, ...`` for ``t^2 dPi``.

    ``coefficients[k]`` lists the coefficients of ``P_k`` from the constant
    term upward; ``norms[k]`` is ``int P_k^2 t^2 dPi``.
    """

    coefficients: tuple[tuple[Fraction, ...], ...]
    norms: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.coefficients)

    def evaluate(self, k: int, t) -> np.ndarray:
        c = [float(v) for v in self.coefficients[k]]
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), c)

    def normalized_coefficients(self, k: int) -> np.ndarray:
        return np.array([float(v) for v in self.coefficients[k]]) / math.sqrt(float(self.norms[k]))


def build_jump_basis(spec: LevySpec, K: int) -> JumpPolynomialBasis:
    """Exact Gram-Schmidt on ``1, t, ..., t^K`` under ``t^2 dPi`` (and ``sigma^2 delta_0``).

    Stops early when the next polynomial has zero norm, so the length of
    the result is ``min(K + 1, support size)``.
    """
    mu = _moment_sequence(spec, 2 * K + 1)

    def inner(p, q):
        return sum((a * b * mu[i + j] for i, a in enumerate(p) for j, b in enumerate(q)), Fraction(0))

    coeffs: list[tuple[Fraction, ...]] = []
    norms: list[Fraction] = []
    for n in range(K + 1):
        p = [Fraction(0)] * n + [Fraction(1)]
        for q, nq in zip(coeffs, norms):
            r = inner(p, q) / nq
            p = [pi - r * (q[i] if i < len(q) else 0) for i, pi in enumerate(p)]
        nrm = inner(p, p)
        if nrm == 0:
            break
        if nrm < 0:
            raise DomainError("moment matrix is not positive definite")
        coeffs.append(tuple(p))
        norms.append(nrm)
    return JumpPolynomialBasis(tuple(coeffs), tuple(norms))


def dimension_invariant(spec: LevySpec) -> float:
    """Number of points in the support of ``t^2 dPi + sigma^2 delta_0``; ``math.inf`` for Gamma."""
    pi = spec.levy_measure
    d = 1 if spec.gaussian_variance > 0 else 0
    if pi is None:
        return d
    return d + pi.support_size


# -- marked test functions -----------------------------------------------------

@dataclass(frozen=True)
class MarkedTestFunction:
    """``h(x, t) = a(x) q(t)`` with ``a`` a step function and ``q`` a polynomial (low degree first)."""

    a: StepFunction
    poly: tuple[float, ...]

    @classmethod
    def jump_basis_element(cls, a: StepFunction, basis: JumpPolynomialBasis, k: int) -> "MarkedTestFunction":
        """``a(x) t P_{k-1}(t)`` for ``k >= 1``."""
        if k < 1:
            raise ValueError("k counts powers of t and starts at 1")
        return cls(a, (0.0,) + tuple(float(c) for c in basis.coefficients[k - 1]))

    def __call__(self, x, t) -> np.ndarray:
        return self.a(x) * np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), self.poly)

    def product_poly(self, other: "MarkedTestFunction") -> tuple[float, ...]:
        return tuple(np.polynomial.polynomial.polymul(self.poly, other.poly))


def jump_integral(spec: LevySpec, poly: Sequence[float], eps: float | None = None) -> float:
    """``int_{|t| > eps} q(t) dPi(t)``; raises when it diverges."""
    pi = spec.levy_measure
    if pi is None:
        return 0.0
    if isinstance(pi, FiniteAtomic):
        t = np.array([s for s in pi.atoms if eps is None or abs(s) > eps])
        m = np.array([w for s, w in zip(pi.atoms, pi.masses) if eps is None or abs(s) > eps])
        return float(np.dot(m, np.polynomial.polynomial.polyval(t, poly))) if t.size else 0.0
    if isinstance(pi, GammaMeasure):
        total = 0.0
        for j, c in enumerate(poly):
            if c == 0:
                continue
            if j == 0 and (eps is None or eps <= 0):
                raise DivergentCompensatorError("a constant-in-t term is not integrable against e^-t/t")
            # int_eps^inf t^(j-1) e^-t dt
            val = float(special.exp1(eps)) if j == 0 else math.gamma(j) * (
                float(special.gammaincc(j, eps)) if eps else 1.0)
            total += c * val
        return total
    raise DomainError(f"unsupported Levy measure {type(pi).__name__}")


def _point_values(h: MarkedTestFunction, batch: ConfigurationBatch | PointConfiguration) -> np.ndarray:
    return h(batch.locations, batch.mark_values())


def _as_batch(config) -> ConfigurationBatch:
    if isinstance(config, PointConfiguration):
        return ConfigurationBatch([len(config)], config.locations, config.mark_values())
    return config


def levy_multiplicative(h: MarkedTestFunction, config, spec: LevySpec, eps: float | None = None):
    """``prod (1 + h(x_i, t_i)) exp(-int int h dnu dPi)``, normalized to unit mean."""
    batch = _as_batch(config)
    comp = h.a.integral() * jump_integral(spec, h.poly, eps)
    out = batch.prod_over_points(1 + _point_values(h, batch)) * math.exp(-comp)
    return out[0] if isinstance(config, PointConfiguration) else out


def levy_multiplicative_inner_mc(spec: LevySpec, h1: MarkedTestFunction, h2: MarkedTestFunction, samples: int,
                                 seed: int, eps: float | None = None, workers: int | None = None) -> MCEstimate:
    """``E[M_h1 M_h2]`` against ``exp(int int h1 h2 dnu dPi)``."""
    batch = sample_levy_batch(spec, samples, seed, h1.a.partition.total_mass, eps, workers)
    v = levy_multiplicative(h1, batch, spec, eps) * levy_multiplicative(h2, batch, spec, eps)
    exact = math.exp(h1.a.pairing(h2.a) * jump_integral(spec, h1.product_poly(h2), eps))
    return MCEstimate(float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples)), exact)


# -- chaos blocks ------------------------------------------------------------------

def generalized_charlier_marked(fs: Sequence[MarkedTestFunction], batch: ConfigurationBatch, spec: LevySpec,
                                eps: float | None = None) -> np.ndarray:
    """Generalized Charlier functional on ``[0, 1] x R`` with intensity ``nu x Pi``."""
    n = len(fs)
    if n == 0:
        return np.ones(batch.n)
    vals = [_point_values(f, batch) for f in fs]
    comps = [f.a.integral() * jump_integral(spec, f.poly, eps) for f in fs]
    memo: dict[frozenset, np.ndarray] = {}

    def factor(cyc):
        key = frozenset(cyc)
        if key not in memo:
            s = batch.sum_over_points(np.prod([vals[i] for i in cyc], axis=0))
            memo[key] = s - comps[cyc[0]] if len(cyc) == 1 else s
        return memo[key]

    total = np.zeros(batch.n)
    for g in enumerate_permutations(n):
        cs = cycles(g)
        term = (-1.0) ** (n - len(cs))
        for c in cs:
            term = term * factor(c)
        total = total + term
    return total


@dataclass(frozen=True)
class VnkGram:
    pairs: tuple[tuple[int, int], ...]
    mean: np.ndarray
    stderr: np.ndarray
    exact: np.ndarray
    samples: int

    @property
    def z(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.abs(self.mean - self.exact) / self.stderr
        return np.where(self.stderr > 0, z, np.where(self.mean == self.exact, 0.0, np.inf))


def vnk_gram_mc(spec: LevySpec, pairs: Sequence[tuple[int, int]], samples: int, seed: int,
                a: StepFunction, eps: float | None = None, workers: int | None = None) -> VnkGram:
    """Monte Carlo Gram matrix of ``I_n(f_k, ..., f_k)`` with ``f_k(x, t) = a(x) t P_{k-1}(t)``.

    ``(0, k)`` denotes the constant functional.  The exact column uses
    ``E[I_n(f)^2] = n! (int int f^2)^n`` and zero across distinct pairs.
    """
    if any(n > 3 or k > 3 for n, k in pairs):
        raise ValueError("orders n and powers k are limited to 3")
    basis = build_jump_basis(spec, 2)
    for n, k in pairs:
        if n > 0 and k > len(basis):
            raise DomainError(f"jump basis has only {len(basis)} elements, cannot form k={k}")
    batch = sample_levy_batch(spec, samples, seed, a.partition.total_mass, eps, workers)
    X = []
    for n, k in pairs:
        if n == 0:
            X.append(np.ones(samples))
            continue
        f = MarkedTestFunction.jump_basis_element(a, basis, k)
        X.append(generalized_charlier_marked([f] * n, batch, spec, eps))
    m = len(pairs)
    mean, se, exact = np.empty((m, m)), np.empty((m, m)), np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            prod = X[i] * X[j]
            mean[i, j] = prod.mean()
            se[i, j] = prod.std(ddof=1) / math.sqrt(samples)
    for i, (n, k) in enumerate(pairs):
        for j, (n2, k2) in enumerate(pairs):
            if n == n2 == 0:
                exact[i, j] = 1.0
            elif n == n2 and (k == k2):
                exact[i, j] = math.factorial(n) * (a.pairing(a) * float(basis.norms[k - 1])) ** n
    return VnkGram(tuple(pairs), mean, se, exact, samples)


# -- Laplace transform of subordinators -----------------------------------------

def subordinator_laplace_exact(spec: LevySpec, a: StepFunction) -> float:
    """``E exp(-sum a(x_i) t_i) = exp(sum_j nu_j int (e^{-a_j t} - 1) dPi)``; Gamma gives ``exp(-int log(1 + a) dnu)``."""
    pi = spec.levy_measure
    if isinstance(pi, GammaMeasure):
        return math.exp(-float(np.dot(np.log1p(a.array), a.partition.masses)))
    if isinstance(pi, FiniteAtomic):
        t, m = np.asarray(pi.atoms), np.asarray(pi.masses)
        inner = np.array([np.dot(m, np.expm1(-aj * t)) for aj in a.array])
        return math.exp(float(np.dot(inner, a.partition.masses)))
    raise DomainError("a jump measure is required")


def subordinator_laplace_mc(spec: LevySpec, a: StepFunction, samples: int, seed: int,
                            eps: float | None = None, workers: int | None = None) -> MCEstimate:
    batch = sample_levy_batch(spec, samples, seed, a.partition.total_mass, eps, workers)
    s = batch.sum_over_points(a(batch.locations) * batch.mark_values())
    v = np.exp(-s)
    return MCEstimate(float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples)), subordinator_laplace_exact(spec, a))
