"""Hermite, Charlier and Laguerre polynomials with their reference measures.

Conventions
-----------
``hermite(n, a, x)``
    Monic Hermite polynomial orthogonal for N(0, a); ``H_2 = x**2 - a``.
``charlier(n, a, x)``
    Monic Charlier polynomial orthogonal for Poisson(a); ``C_1 = x - a``.
``laguerre(n, alpha, t)``
    Standard generalized Laguerre polynomial ``L_n^(alpha)``.

Each family has two evaluation paths: a three-term recurrence and the
explicit finite sum (``*_sum``).  With ``int`` or
:class:`~fractions.Fraction` arguments both paths are exact.  Floats and
arrays use the recurrence, except for Charlier: there the forward
recurrence is unstable for small ``x`` (``(-a)^n`` is its minimal
solution), so floats go through a compensated sum over falling factorials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.special import gammaln

DEFAULT_NODES = 200
POISSON_TAIL_TOL = 1e-16


class DomainError(ValueError):
    """Parameter outside the domain of a polynomial family or measure."""


@dataclass(frozen=True)
class GaussianWeight:
    """The centred normal law with variance ``a``."""

    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"variance must be positive, got {self.a}")


@dataclass(frozen=True)
class PoissonWeight:
    """The Poisson law with rate ``a`` on the nonnegative integers."""

    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"rate must be positive, got {self.a}")


def _exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def _as_exact(v):
    return Fraction(v) if _exact(v) else v


def _check_positive(a, what="a"):
    if not a > 0:
        raise DomainError(f"{what} must be positive, got {a}")


def _check_degree(n):
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a nonnegative integer, got {n}")


# -- Hermite -----------------------------------------------------------------

def hermite(n: int, a, x):
    """``H_n^a(x)`` via ``H_{k+1} = x H_k - a k H_{k-1}``."""
    _check_degree(n)
    _check_positive(a)
    if _exact(a, x):
        a, x = Fraction(a), Fraction(x)
    else:
        x = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
        a = float(a)
    prev, cur = 0 * x + 1, x
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, x * cur - a * k * prev
    return cur


def hermite_sum(n: int, a, x):
    """``H_n^a(x) = sum_j n! / (j! (n-2j)! 2^j) (-a)^j x^(n-2j)``."""
    _check_degree(n)
    _check_positive(a)
    a, x = _as_exact(a), _as_exact(x)
    total = 0
    for j in range(n // 2 + 1):
        coef = math.factorial(n) // (math.factorial(j) * math.factorial(n - 2 * j) * 2**j)
        total = total + coef * (-a) ** j * x ** (n - 2 * j)
    return total


def hermite_coefficients(n: int, a) -> list:
    """Monomial coefficients of ``H_n^a``, lowest degree first."""
    _check_degree(n)
    _check_positive(a)
    a = _as_exact(a)
    coefs = [0] * (n + 1)
    for j in range(n // 2 + 1):
        c = math.factorial(n) // (math.factorial(j) * math.factorial(n - 2 * j) * 2**j)
        coefs[n - 2 * j] = c * (-a) ** j
    return coefs


# -- Charlier ----------------------------------------------------------------

def charlier(n: int, a, x):
    """``C_n^a(x)``; exact via ``C_{k+1} = (x - k - a) C_k - a k C_{k-1}``, floats via a compensated sum."""
    _check_degree(n)
    _check_positive(a)
    if not _exact(a, x):
        if np.isscalar(x):
            return _charlier_float(n, float(a), float(x))
        xs = np.asarray(x, dtype=float)
        return np.array([_charlier_float(n, float(a), float(v)) for v in xs.ravel()]).reshape(xs.shape)
    a, x = Fraction(a), Fraction(x)
    prev, cur = 0 * x + 1, x - a
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, (x - k - a) * cur - a * k * prev
    return cur


def _charlier_float(n: int, a: float, x: float) -> float:
    terms, ff = [], 1.0
    for j in range(n + 1):
        terms.append((-1) ** (n - j) * math.comb(n, j) * a ** (n - j) * ff)
        ff *= x - j
    return math.fsum(terms)


def _falling(x, j):
    out = 1
    for i in range(j):
        out = out * (x - i)
    return out


def charlier_sum(n: int, a, x):
    """``C_n^a(x) = a^n sum_j (-1)^(n-j) binom(n, j) a^(-j) x(x-1)...(x-j+1)``."""
    _check_degree(n)
    _check_positive(a)
    a, x = _as_exact(a), _as_exact(x)
    total = 0
    for j in range(n + 1):
        total = total + (-1) ** (n - j) * math.comb(n, j) * a ** (n - j) * _falling(x, j)
    return total


def charlier_coefficients(n: int, a) -> list:
    """Monomial coefficients of ``C_n^a``, lowest degree first."""
    _check_degree(n)
    _check_positive(a)
    a = _as_exact(a)
    coefs = [0] * (n + 1)
    for j in range(n + 1):
        # falling factorial x^(j) = sum_i s(j, i) x^i with signed Stirling numbers
        falling = [1]
        for i in range(j):
            falling = [0] + falling
            for d in range(len(falling) - 1):
                falling[d] -= i * falling[d + 1]
        w = (-1) ** (n - j) * math.comb(n, j) * a ** (n - j)
        for d, s in enumerate(falling):
            coefs[d] = coefs[d] + w * s
    return coefs


# -- Laguerre ----------------------------------------------------------------

def laguerre(n: int, alpha, t):
    """``L_n^(alpha)(t)`` via ``(k+1) L_{k+1} = (2k+1+alpha-t) L_k - (k+alpha) L_{k-1}``."""
    _check_degree(n)
    if _exact(alpha, t):
        alpha, t = Fraction(alpha), Fraction(t)
    else:
        t = np.asarray(t, dtype=float) if not np.isscalar(t) else float(t)
        alpha = float(alpha)
    prev, cur = 0 * t + 1, 1 + alpha - t
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - t) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def laguerre_sum(n: int, alpha, t):
    """``L_n^(alpha)(t) = sum_j (-1)^j binom(n + alpha, n - j) t^j / j!``."""
    _check_degree(n)
    alpha, t = _as_exact(alpha), _as_exact(t)
    total = 0
    for j in range(n + 1):
        binom = Fraction(1) if _exact(alpha) else 1.0
        for i in range(1, n - j + 1):
            binom = binom * (alpha + j + i) / i
        total = total + (-1) ** j * binom * t**j / math.factorial(j)
    return total


def laguerre_coefficients(n: int, alpha) -> list:
    """Monomial coefficients of ``L_n^(alpha)``, lowest degree first."""
    _check_degree(n)
    alpha = _as_exact(alpha)
    coefs = []
    for j in range(n + 1):
        binom = Fraction(1) if _exact(alpha) else 1.0
        for i in range(1, n - j + 1):
            binom = binom * (alpha + j + i) / i
        coefs.append((-1) ** j * binom / math.factorial(j))
    return coefs


# -- quadrature and series ---------------------------------------------------

@lru_cache(maxsize=8)
def gauss_hermite_rule(n_nodes: int = DEFAULT_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights integrating against N(0, 1); weights sum to one.

    Nodes are eigenvalues of the Jacobi matrix of the monic Hermite
    recurrence.  Weights use ``w_i = 1 / (n p_{n-1}(x_i)^2)`` with ``p_k`` the
    orthonormal polynomials, evaluated with running rescaling so extreme nodes
    keep full relative precision instead of inheriting eigenvector round-off.
    The arrays are read-only.
    """
    if n_nodes < 1:
        raise ValueError("need at least one node")
    off = np.sqrt(np.arange(1, n_nodes, dtype=float))
    nodes = eigvalsh_tridiagonal(np.zeros(n_nodes), off)
    nodes = 0.5 * (nodes - nodes[::-1])  # the rule is symmetric
    log_scale = np.zeros(n_nodes)
    prev, cur = np.zeros(n_nodes), np.ones(n_nodes)
    for k in range(n_nodes - 1):
        prev, cur = cur, (nodes * cur - math.sqrt(k) * prev) / math.sqrt(k + 1)
        big = np.abs(cur) > 1e100
        if big.any():
            cur[big] *= 1e-100
            prev[big] *= 1e-100
            log_scale[big] += math.log(1e100)
    log_w = -math.log(n_nodes) - 2.0 * (np.log(np.abs(cur)) + log_scale)
    weights = np.exp(log_w)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def poisson_truncation(a: float, degree: int = 0, tol: float = POISSON_TAIL_TOL) -> int:
    """Smallest ``K`` with ``sum_{k>K} P_a(k) (1+k)^degree <= tol``.

    Once ``k + 1 >= max(2 e a, degree)`` consecutive terms shrink at least
    by half, so the tail beyond ``k`` is bounded by the ``k``-th term.
    """
    _check_positive(a)
    start = max(2 * math.e * a, degree)
    log_tol = math.log(tol)
    k = 0
    log_p = -a
    while True:
        if k + 1 >= start and log_p + degree * math.log1p(k) <= log_tol:
            return k
        k += 1
        log_p += math.log(a) - math.log(k)


def poisson_pmf(a: float, K: int) -> np.ndarray:
    """``P_a(k)`` for ``k = 0..K`` in floating point."""
    k = np.arange(K + 1)
    return np.exp(-a + k * math.log(a) - gammaln(k + 1))


@dataclass(frozen=True)
class InnerProduct:
    value: float
    precision_warning: bool
    resolution: int


def weighted_inner_product(p: Sequence, q: Sequence, w, resolution: int = DEFAULT_NODES) -> InnerProduct:
    """Inner product of two polynomials given by monomial coefficients.

    Gaussian weights use a ``resolution``-node Gauss-Hermite rule, which is
    exact up to degree ``2 * resolution - 1``.  Poisson weights sum the series
    up to :func:`poisson_truncation` for the combined degree; ``resolution``
    then caps the number of terms.  Exceeding either limit sets
    ``precision_warning`` instead of raising.
    """
    p = np.asarray([float(c) for c in p])
    q = np.asarray([float(c) for c in q])
    degree = len(p) + len(q) - 2
    if isinstance(w, GaussianWeight):
        nodes, weights = gauss_hermite_rule(resolution)
        x = math.sqrt(w.a) * nodes
        vals = np.polynomial.polynomial.polyval(x, p) * np.polynomial.polynomial.polyval(x, q)
        return InnerProduct(float(np.dot(weights, vals)), degree > 2 * resolution - 1, resolution)
    if isinstance(w, PoissonWeight):
        K = poisson_truncation(w.a, degree)
        warn = K + 1 > resolution
        K = min(K, resolution - 1)
        k = np.arange(K + 1, dtype=float)
        vals = np.polynomial.polynomial.polyval(k, p) * np.polynomial.polynomial.polyval(k, q)
        return InnerProduct(float(np.dot(poisson_pmf(w.a, K), vals)), warn, K + 1)
    raise TypeError(f"unsupported weight {w!r}")


def generating_function_residual(family: str, a: float, point: float, t: float, N: int) -> float:
    """``|sum_{n<=N} P_n(point) t^n / n! - closed form|`` for one family.

    Closed forms are ``exp(t x - a t^2 / 2)`` (Hermite) and
    ``(1 + t)^y exp(-t a)`` (Charlier).
    """
    _check_positive(a)
    if family == "hermite":
        closed = math.exp(t * point - a * t * t / 2)
        poly = hermite
    elif family == "charlier":
        closed = (1 + t) ** point * math.exp(-t * a)
        poly = charlier
    else:
        raise ValueError(f"unknown family {family!r}")
    partial = math.fsum(poly(n, a, point) * t**n / math.factorial(n) for n in range(N + 1))
    return abs(partial - closed)


def charlier_reflection_check(n: int, k: int, a) -> bool:
    """Exact test of ``(-1)^n C_n^a(k) / a^n == (-1)^k C_k^a(n) / a^k``."""
    a = Fraction(a)
    lhs = Fraction((-1) ** n) * charlier(n, a, k) / a**n
    rhs = Fraction((-1) ** k) * charlier(k, a, n) / a**k
    return lhs == rhs
