"""The isometry between L2(N(0, a)) and L2(Poisson(a)) on one cell.

On a single cell of mass ``a`` the canonical map sends ``H_n^a`` to
``C_n^a``.  Its inverse is an integral operator against the Poisson law with
kernel ``K^a(k, x) = exp(-a/2 - x) H_k^a(x + 2a) / a^k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .orthopoly import (
    DomainError,
    charlier,
    gauss_hermite_rule,
    hermite,
    poisson_pmf,
    poisson_truncation,
)

KERNEL_TAIL_TOL = 1e-12


class PrecisionError(RuntimeError):
    """A truncated series cannot meet its tail bound."""


@dataclass
class GaussFunctional1D:
    """Finite Hermite expansion ``sum_n c_n H_n^a(x)``."""

    hermite_coeffs: Mapping[int, float]
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("variance must be positive")

    @property
    def degree(self) -> int:
        return max(self.hermite_coeffs, default=0)

    def __call__(self, x):
        return sum(c * hermite(n, self.a, x) for n, c in self.hermite_coeffs.items())


@dataclass
class PoissonFunctional1D:
    """Values ``b_0, ..., b_K`` of a function on the nonnegative integers."""

    values: np.ndarray
    a: float
    truncation: int = field(init=False)

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("rate must be positive")
        self.values = np.asarray(self.values)
        self.truncation = len(self.values) - 1

    @classmethod
    def from_callable(cls, f: Callable, a: float, truncation: int | None = None) -> "PoissonFunctional1D":
        K = poisson_truncation(a, 0, KERNEL_TAIL_TOL) if truncation is None else truncation
        return cls(np.array([f(k) for k in range(K + 1)]), a)

    def inner(self, other: "PoissonFunctional1D") -> complex | float:
        """``e^-a sum_k a^k / k! b_k conj(b'_k)`` over the common range."""
        K = min(self.truncation, other.truncation)
        return np.sum(poisson_pmf(self.a, K) * self.values[: K + 1] * np.conj(other.values[: K + 1]))


def kernel_1d(k: int, x, a: float):
    """``K^a(k, x)``; vectorised over ``x``."""
    if not a > 0:
        raise DomainError("a must be positive")
    x = np.asarray(x, dtype=float)
    out = np.exp(-a / 2 - x) * hermite(k, a, x + 2 * a) / a**k
    return out if out.ndim else float(out)


def _scaled_hermite_table(y: np.ndarray, a: float, K: int) -> np.ndarray:
    """Rows ``H_k^a(y) / k!`` for ``k = 0..K`` without overflow."""
    u = np.empty((K + 1,) + y.shape)
    u[0] = 1.0
    if K >= 1:
        u[1] = y
    for k in range(1, K):
        u[k + 1] = (y * u[k] - a * u[k - 1]) / (k + 1)
    return u


def kernel_series_cutoff(y_max: float, a: float, degree: int = 0, tol: float = 1e-20) -> int:
    """Index beyond which ``sum_k |H_k^a(y)| / k! (k + 1 + a)^degree`` is below ``tol``.

    Uses ``|H_k^a(y)| / k! <= exp(2|y| + 2a) / 2^k`` (Cauchy bound at radius 2).
    """
    log_c = 2 * abs(y_max) + 2 * a
    K = 0
    while True:
        log_term = log_c - K * math.log(2) + degree * math.log(K + 1 + a)
        if K > 2 * degree and log_term + math.log(2) <= math.log(tol):
            return K
        K += 1


def inverse_kernel_weights(x, a: float, K: int) -> np.ndarray:
    """Matrix ``P_a(k) K^a(k, x)`` with rows ``k = 0..K`` and columns over ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = _scaled_hermite_table(x + 2 * a, a, K)
    return math.exp(-1.5 * a) * np.exp(-x)[None, :] * u


def apply_inverse_isometry_1d(F: PoissonFunctional1D, x, truncation: int | None = None):
    """``sum_{k<=K} P_a(k) K^a(k, x) F(k)``, the Gaussian-side image of ``F``.

    Raises :class:`PrecisionError` when the Poisson mass beyond the
    truncation exceeds ``1e-12``.
    """
    K = F.truncation if truncation is None else min(truncation, F.truncation)
    needed = poisson_truncation(F.a, 0, KERNEL_TAIL_TOL)
    if K < needed:
        raise PrecisionError(f"truncation {K} leaves Poisson tail above {KERNEL_TAIL_TOL}; need {needed}")
    scalar = np.ndim(x) == 0
    w = inverse_kernel_weights(x, F.a, K)
    out = F.values[: K + 1] @ w
    return out[0] if scalar else out


def isometry_coefficients_1d(F: GaussFunctional1D, truncation: int | None = None) -> PoissonFunctional1D:
    """Image of a Hermite expansion: ``k -> sum_n c_n C_n^a(k)``."""
    K = truncation
    if K is None:
        K = poisson_truncation(F.a, 2 * F.degree, KERNEL_TAIL_TOL)
    k = np.arange(K + 1, dtype=float)
    values = sum(c * charlier(n, F.a, k) for n, c in F.hermite_coeffs.items())
    return PoissonFunctional1D(np.asarray(values, dtype=float) * np.ones(K + 1), F.a)


def multiplicative_image_1d(t: complex, a: float, truncation: int | None = None) -> PoissonFunctional1D:
    """Image of ``exp(t x - a t^2 / 2)``: ``k -> exp(-a t) (1 + t)^k``."""
    K = poisson_truncation(a, 0, 1e-16) + 20 if truncation is None else truncation
    k = np.arange(K + 1)
    return PoissonFunctional1D(np.exp(-a * t) * (1 + t) ** k, a)


# -- the Hermite/Charlier kernel identity ------------------------------------

@dataclass(frozen=True)
class IdentityVerdict:
    """Which normalization of ``sum_n H_n^a(x) C_n^a(k) w_n`` reproduces the kernel."""

    a: float
    x: float
    k: int
    terms: int
    closed_form: float
    numerator_sum: float  # w_n = a^n / n!
    denominator_sum: float  # w_n = 1 / (a^n n!)
    numerator_matches: bool
    denominator_matches: bool
    tolerance: float

    @property
    def certified(self) -> str | None:
        if self.numerator_matches and self.denominator_matches:
            return "both"
        if self.denominator_matches:
            return "denominator"
        if self.numerator_matches:
            return "numerator"
        return None

    @property
    def consistent(self) -> bool:
        return self.certified is not None


def resolve_identity_normalization(a, x, k: int, N: int = 300, tol: float = 1e-8) -> IdentityVerdict:
    """Sum both candidate series to ``N`` terms and compare with the kernel.

    The two candidates differ only in whether ``a^n`` multiplies or divides
    the ``n``-th term.  Partial sums are formed exactly in rational
    arithmetic (``x`` and ``a`` are converted with :class:`Fraction`), so
    cancellation cannot blur the verdict.
    """
    if not a > 0:
        raise DomainError("a must be positive")
    fa, fx = Fraction(a), Fraction(x)
    num = Fraction(0)
    den = Fraction(0)
    h_prev, h_cur = Fraction(0), Fraction(1)  # H_{-1}, H_0
    c_prev, c_cur = Fraction(0), Fraction(1)
    fact = 1
    for n in range(N + 1):
        if n > 0:
            fact *= n
        prod = h_cur * c_cur
        num += prod * fa**n / fact
        den += prod / (fa**n * fact)
        h_prev, h_cur = h_cur, fx * h_cur - fa * n * h_prev
        c_prev, c_cur = c_cur, (k - n - fa) * c_cur - fa * n * c_prev
    closed = kernel_1d(k, float(x), float(a))
    scale = max(1.0, abs(closed))
    num_f, den_f = float(num), float(den)
    return IdentityVerdict(
        a=float(a), x=float(x), k=k, terms=N + 1, closed_form=closed,
        numerator_sum=num_f, denominator_sum=den_f,
        numerator_matches=abs(num_f - closed) <= tol * scale,
        denominator_matches=abs(den_f - closed) <= tol * scale,
        tolerance=tol,
    )


# -- unitarity on truncated blocks -------------------------------------------

@dataclass(frozen=True)
class KernelGram:
    """Gram data for the kernel-mapped orthonormal Charlier basis.

    ``gram[n, m] = <Phi^-1 c_n, Phi^-1 c_m>`` and
    ``overlap[n, m] = <h_n, Phi^-1 c_m>`` in L2(N(0, a)), where ``c_n`` and
    ``h_n`` are the orthonormalized Charlier and Hermite polynomials.
    """

    a: float
    max_degree: int
    gram: np.ndarray
    overlap: np.ndarray

    @property
    def defect(self) -> float:
        return float(np.max(np.abs(self.gram - np.eye(self.max_degree + 1))))

    @property
    def overlap_defect(self) -> float:
        return float(np.max(np.abs(self.overlap - np.eye(self.max_degree + 1))))


def kernel_images(a: float, max_degree: int, x: np.ndarray) -> np.ndarray:
    """Values of ``Phi^-1`` applied to normalized ``C_0..C_d`` at points ``x``.

    Returns shape ``(len(x), max_degree + 1)``.
    """
    x = np.asarray(x, dtype=float)
    y_max = float(np.max(np.abs(x + 2 * a)))
    K = max(kernel_series_cutoff(y_max, a, max_degree), poisson_truncation(a, 2 * max_degree, KERNEL_TAIL_TOL))
    w = inverse_kernel_weights(x, a, K)
    k = np.arange(K + 1, dtype=float)
    cols = []
    for n in range(max_degree + 1):
        c_n = charlier(n, a, k) / math.sqrt(a**n * math.factorial(n))
        cols.append(c_n @ w)
    return np.stack(cols, axis=1)


def kernel_gram_1d(a: float, max_degree: int = 8, nodes: int = 200) -> KernelGram:
    """Gram matrices of kernel-mapped Charlier functions by Gauss-Hermite quadrature."""
    z, wq = gauss_hermite_rule(nodes)
    x = math.sqrt(a) * z
    V = kernel_images(a, max_degree, x)
    H = np.stack([hermite(n, a, x) / math.sqrt(a**n * math.factorial(n)) for n in range(max_degree + 1)], axis=1)
    gram = V.T @ (wq[:, None] * V)
    overlap = H.T @ (wq[:, None] * V)
    return KernelGram(a, max_degree, gram, overlap)
