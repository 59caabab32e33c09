"""The isometry on a base of finitely many weighted points.

Each cell ``j`` carries an independent N(0, a_j) coordinate on the Gaussian
side and an independent Poisson(a_j) count on the Poisson side, so every
object here is a tensor product of the single-point ones.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .orthopoly import DomainError, charlier, gauss_hermite_rule, hermite, poisson_pmf, poisson_truncation
from .single_point import kernel_1d, kernel_gram_1d, kernel_images

MultiIndex = tuple[int, ...]

BLOCK_CAP = 2000


@dataclass(frozen=True)
class FiniteBase:
    """Ordered cell weights ``a_1, ..., a_m``."""

    weights: tuple[float, ...]

    def __init__(self, weights: Sequence[float]):
        w = tuple(float(a) for a in weights)
        if not w:
            raise DomainError("a finite base needs at least one cell")
        if any(not a > 0 for a in w):
            raise DomainError(f"cell weights must be positive, got {w}")
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)

    def _check(self, v: Sequence) -> None:
        if len(v) != self.m:
            raise ValueError(f"expected length {self.m}, got {len(v)}")


def multi_indices(m: int, max_total_degree: int) -> list[MultiIndex]:
    """All length-``m`` indices of total degree at most ``d``, by degree then lexicographically."""
    out: list[MultiIndex] = []
    for total in range(max_total_degree + 1):
        block = [k for k in itertools.product(range(total + 1), repeat=m) if sum(k) == total]
        out.extend(sorted(block))
    return out


def kernel_finite(k: Sequence[int], x: Sequence[float], base: FiniteBase) -> float:
    base._check(k)
    base._check(x)
    return math.prod(kernel_1d(kj, xj, aj) for kj, xj, aj in zip(k, x, base.weights))


# -- multiplicative functionals ----------------------------------------------

@dataclass(frozen=True)
class MultiplicativeImage:
    """Poisson-side image ``k -> prod_j exp(-a_j h_j) (1 + h_j)^{k_j}`` of ``exp(<h, x> - sum a_j h_j^2 / 2)``."""

    h: tuple[complex, ...]
    base: FiniteBase

    def __call__(self, k: Sequence[int]) -> complex:
        self.base._check(k)
        return complex(np.prod([np.exp(-a * hj) * (1 + hj) ** kj for a, hj, kj in zip(self.base.weights, self.h, k)]))

    def _series_truncation(self, other: "MultiplicativeImage", j: int) -> int:
        a = self.base.weights[j]
        rate = a * max(1.0, abs(1 + self.h[j]) * abs(1 + other.h[j]))
        return poisson_truncation(rate, 0, 1e-18) + 10

    def inner(self, other: "MultiplicativeImage") -> complex:
        """Closed Poisson sums, one per cell; the second argument is conjugated."""
        if other.base != self.base:
            raise ValueError("images live on different bases")
        total = 1 + 0j
        for j, a in enumerate(self.base.weights):
            K = self._series_truncation(other, j)
            k = np.arange(K + 1)
            terms = poisson_pmf(a, K) * self._coord(k, j) * np.conj(other._coord(k, j))
            total *= complex(math.fsum(terms.real), math.fsum(terms.imag))
        return total

    def inner_grid(self, other: "MultiplicativeImage", K: int | None = None) -> complex:
        """Brute-force sum over the full truncated grid of counts (small ``m`` only)."""
        m = self.base.m
        if K is None:
            K = max(self._series_truncation(other, j) for j in range(m))
        if (K + 1) ** m > 10**6:
            raise ValueError("grid too large for brute-force summation")
        pm = [poisson_pmf(a, K) for a in self.base.weights]
        acc_r, acc_i = [], []
        for k in itertools.product(range(K + 1), repeat=m):
            w = math.prod(p[kj] for p, kj in zip(pm, k))
            v = w * self(k) * np.conj(other(k))
            acc_r.append(v.real)
            acc_i.append(v.imag)
        return complex(math.fsum(acc_r), math.fsum(acc_i))

    def _coord(self, k: np.ndarray, j: int) -> np.ndarray:
        a, hj = self.base.weights[j], self.h[j]
        return np.exp(-a * hj) * (1 + hj) ** k


def multiplicative_image_finite(h: Sequence[complex], base: FiniteBase) -> MultiplicativeImage:
    base._check(h)
    return MultiplicativeImage(tuple(complex(v) for v in h), base)


def gaussian_multiplicative_inner(h: Sequence[complex], g: Sequence[complex], base: FiniteBase) -> complex:
    """Gaussian-side value ``exp(sum_j a_j h_j conj(g_j))``."""
    return complex(np.exp(sum(a * hj * np.conj(gj) for a, hj, gj in zip(base.weights, h, g))))


# -- chaos coefficients ------------------------------------------------------

@dataclass
class ChaosCoefficients:
    """Finite expansion in the product bases ``prod_j H_{k_j}^{a_j}`` / ``prod_j C_{k_j}^{a_j}``."""

    entries: Mapping[MultiIndex, complex]
    base: FiniteBase

    def __post_init__(self):
        for k in self.entries:
            self.base._check(k)

    def norm_weight(self, k: MultiIndex) -> float:
        return math.prod(a**kj * math.factorial(kj) for a, kj in zip(self.base.weights, k))

    def inner(self, other: "ChaosCoefficients") -> complex:
        """Inner product from orthogonality of the product basis (same on both sides)."""
        return sum(c * np.conj(other.entries.get(k, 0)) * self.norm_weight(k) for k, c in self.entries.items())

    def evaluate_gauss(self, x: Sequence) -> complex:
        return sum(c * math.prod(hermite(kj, a, xj) for kj, a, xj in zip(k, self.base.weights, x)) for k, c in self.entries.items())

    def evaluate_poisson(self, counts: Sequence) -> complex:
        return sum(c * math.prod(charlier(kj, a, nj) for kj, a, nj in zip(k, self.base.weights, counts)) for k, c in self.entries.items())

    def poisson_inner_series(self, other: "ChaosCoefficients", K: int | None = None) -> complex:
        """Inner product of the Poisson-side images by summing over a truncated count grid."""
        m = self.base.m
        deg = max((sum(k) for k in itertools.chain(self.entries, other.entries)), default=0)
        if K is None:
            K = max(poisson_truncation(a, 2 * deg, 1e-16) for a in self.base.weights)
        pm = [poisson_pmf(a, K) for a in self.base.weights]
        acc = []
        for n in itertools.product(range(K + 1), repeat=m):
            w = math.prod(p[nj] for p, nj in zip(pm, n))
            acc.append(w * self.evaluate_poisson(n) * np.conj(other.evaluate_poisson(n)))
        return complex(math.fsum(np.real(acc)), math.fsum(np.imag(acc)))


# -- unitarity ---------------------------------------------------------------

@dataclass(frozen=True)
class UnitarityReport:
    base: FiniteBase
    indices: list[MultiIndex]
    gram: np.ndarray

    @property
    def defect(self) -> float:
        return float(np.max(np.abs(self.gram - np.eye(len(self.indices)))))


def unitarity_defect(base: FiniteBase, max_total_degree: int, method: str = "tensor",
                     cap: int = BLOCK_CAP, nodes: int | None = None) -> UnitarityReport:
    """Gram matrix of kernel-mapped orthonormal product Charlier functions.

    ``method="tensor"`` multiplies per-cell Gram matrices from
    :func:`kernel_gram_1d` (200-node rule); ``method="quadrature"`` evaluates
    the product kernel images on a full tensor Gauss-Hermite grid.
    """
    idx = multi_indices(base.m, max_total_degree)
    if len(idx) > cap:
        raise ValueError(f"block of {len(idx)} multi-indices exceeds cap {cap}")
    d = max_total_degree
    if method == "tensor":
        grams = [kernel_gram_1d(a, d).gram for a in base.weights]
        G = np.empty((len(idx), len(idx)))
        for p, k in enumerate(idx):
            for q, l in enumerate(idx):
                G[p, q] = math.prod(g[kj, lj] for g, kj, lj in zip(grams, k, l))
        return UnitarityReport(base, idx, G)
    if method == "quadrature":
        n_nodes = nodes or max(40, 2 * d + 20)
        if n_nodes**base.m > 10**6:
            raise ValueError("tensor grid too large")
        z, w = gauss_hermite_rule(n_nodes)
        per_cell = [kernel_images(a, d, math.sqrt(a) * z) for a in base.weights]  # (nodes, d+1)
        V = np.empty((n_nodes**base.m, len(idx)))
        W = np.ones(n_nodes**base.m)
        for j in range(base.m):
            shape = [1] * base.m
            shape[j] = n_nodes
            W = (W.reshape([n_nodes] * base.m) * w.reshape(shape)).ravel()
        for p, k in enumerate(idx):
            col = np.ones([n_nodes] * base.m)
            for j, kj in enumerate(k):
                shape = [1] * base.m
                shape[j] = n_nodes
                col = col * per_cell[j][:, kj].reshape(shape)
            V[:, p] = col.ravel()
        return UnitarityReport(base, idx, V.T @ (W[:, None] * V))
    raise ValueError(f"unknown method {method!r}")


# -- refinement --------------------------------------------------------------

def split_hermite(n: int, a: float) -> ChaosCoefficients:
    """Expansion of ``H_n^a(x_1 + x_2)`` on two cells of weight ``a/2``."""
    return ChaosCoefficients({(j, n - j): math.comb(n, j) for j in range(n + 1)}, FiniteBase((a / 2, a / 2)))


def refinement_defect(a: float, max_degree: int, K: int | None = None) -> float:
    """Largest discrepancy after splitting one cell in half.

    Compares, for ``n, m <= max_degree``, the coarse inner products
    ``delta_nm a^n n!`` with the inner products of the split expansions
    summed over the fine Poisson grid, and checks pointwise that the split
    expansion evaluates to ``C_n^a(k_1 + k_2)``.
    """
    fine = [split_hermite(n, a) for n in range(max_degree + 1)]
    if K is None:
        K = poisson_truncation(a / 2, 2 * max_degree, 1e-16)
    worst = 0.0
    for n in range(max_degree + 1):
        for m in range(n, max_degree + 1):
            coarse = a**n * math.factorial(n) if n == m else 0.0
            got = fine[n].poisson_inner_series(fine[m], K).real
            worst = max(worst, abs(got - coarse) / max(1.0, a**n * math.factorial(n)))
        for k1, k2 in itertools.product(range(6), repeat=2):
            got = fine[n].evaluate_poisson((k1, k2)).real
            want = charlier(n, a, k1 + k2)
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    return worst
