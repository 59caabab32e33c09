"""Chaos functionals of white noise and of the Poisson process on [0, 1].

Test functions are step functions on a :class:`~levygauss.processes.Partition`,
so every pairing against a realization reduces to cell data: white-noise
cell values on the Gaussian side, cell counts on the Poisson side.  All
evaluators are vectorised over a batch of realizations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .combinatorics import cycles, enumerate_involutions, enumerate_permutations
from .orthopoly import charlier, gauss_hermite_rule, hermite, poisson_pmf, poisson_truncation
from .processes import (
    ConfigurationBatch,
    Partition,
    PointConfiguration,
    WhiteNoiseSample,
    sample_poisson_configs,
    sample_white_noise,
)

EXACT_CAP = 8
MC_CAP = 6


class PartitionMismatchError(ValueError):
    """Test functions and realization live on different partitions."""


class RealizationTypeError(TypeError):
    """A Gaussian rule was given a point configuration or vice versa."""


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on the cells of a partition."""

    partition: Partition
    values: tuple

    def __init__(self, partition: Partition, values: Sequence):
        if len(values) != partition.cells:
            raise ValueError(f"need {partition.cells} values, got {len(values)}")
        vals = tuple(values)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("step function values must be finite")
        object.__setattr__(self, "partition", partition)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, c: float, partition: Partition) -> "StepFunction":
        return cls(partition, [c] * partition.cells)

    @classmethod
    def indicator(cls, cells: Sequence[int], partition: Partition) -> "StepFunction":
        return cls(partition, [1.0 if j in set(cells) else 0.0 for j in range(partition.cells)])

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values)

    def __call__(self, x) -> np.ndarray:
        return self.array[self.partition.cell_of(np.asarray(x))]

    def integral(self) -> float:
        return complex(np.dot(self.array, self.partition.masses)) if np.iscomplexobj(self.array) \
            else float(np.dot(self.array, self.partition.masses))

    def pairing(self, other: "StepFunction"):
        """Bilinear ``int f g dnu``."""
        _same(self, other)
        return np.dot(self.array * other.array, self.partition.masses)

    def inner(self, other: "StepFunction"):
        """Hermitian ``int f conj(g) dnu``."""
        _same(self, other)
        return np.dot(self.array * np.conj(other.array), self.partition.masses)

    def restrict(self, cells: Sequence[int]) -> "StepFunction":
        keep = set(cells)
        return StepFunction(self.partition, [v if j in keep else 0 for j, v in enumerate(self.values)])


def _same(*fs: StepFunction) -> Partition:
    p = fs[0].partition
    if any(f.partition != p for f in fs[1:]):
        raise PartitionMismatchError("test functions use different partitions")
    return p


# -- realizations as cell data -----------------------------------------------

def _gauss_cells(fs: Sequence[StepFunction], sample) -> np.ndarray:
    if not isinstance(sample, WhiteNoiseSample):
        raise RealizationTypeError("Gaussian functionals need a WhiteNoiseSample")
    p = _same(*fs)
    if sample.partition is not None and sample.partition != p:
        raise PartitionMismatchError("white noise sampled on a different partition")
    vals = np.asarray(sample.cell_values)
    if vals.shape[-1] != p.cells:
        raise PartitionMismatchError("white noise has the wrong number of cells")
    return vals


def _poisson_counts(fs: Sequence[StepFunction], config) -> np.ndarray:
    p = _same(*fs)
    if isinstance(config, PointConfiguration):
        return np.bincount(p.cell_of(config.locations), minlength=p.cells).astype(float)
    if isinstance(config, ConfigurationBatch):
        return config.cell_sums(p)
    raise RealizationTypeError("Poisson functionals need a point configuration")


# -- generalized Hermite and Charlier ------------------------------------------

def generalized_hermite(fs: Sequence[StepFunction], sample: WhiteNoiseSample, cap: int = EXACT_CAP):
    """Sum over involutions of ``prod <f_i, eta>`` (fixed points) times ``prod -(f_j, f_k)`` (2-cycles)."""
    n = len(fs)
    if n == 0:
        return 1.0
    eta = _gauss_cells(fs, sample)
    lin = [eta @ f.array for f in fs]
    total = 0
    for g in enumerate_involutions(n, cap):
        term = 1
        for i in range(n):
            j = g[i]
            if j == i:
                term = term * lin[i]
            elif j > i:
                term = term * -fs[i].pairing(fs[j])
        total = total + term
    return total


def _cycle_sum(fs: Sequence[StepFunction], members: Sequence[int], counts: np.ndarray):
    prod = np.ones(fs[0].partition.cells, dtype=np.result_type(*[f.array for f in fs], float))
    for i in members:
        prod = prod * fs[i].array
    return counts @ prod


def generalized_charlier(fs: Sequence[StepFunction], config, cap: int = EXACT_CAP):
    """Signed sum over all permutations of cycle sums over the configuration.

    Fixed points of ``i`` contribute ``sum_x f_i(x) - int f_i``; a cycle
    ``(i_1 ... i_k)`` with ``k >= 2`` contributes ``sum_x prod f_{i_j}(x)``.
    """
    n = len(fs)
    if n == 0:
        return 1.0
    counts = _poisson_counts(fs, config)
    memo: dict[frozenset, np.ndarray] = {}

    def factor(cyc):
        key = frozenset(cyc)
        if key not in memo:
            s = _cycle_sum(fs, cyc, counts)
            memo[key] = s - fs[cyc[0]].integral() if len(cyc) == 1 else s
        return memo[key]

    total = 0
    for g in enumerate_permutations(n, cap):
        cs = cycles(g)
        term = (-1) ** (n - len(cs))
        for c in cs:
            term = term * factor(c)
        total = total + term
    return total


# -- combinatorial stochastic integral ---------------------------------------

class DiagonalMeasures(Enum):
    """Diagonal-measure rules: Gaussian (second diagonal nu, higher zero) or Poisson (all higher ones omega)."""

    GAUSSIAN = "gaussian"
    POISSON = "poisson"


def rota_integral(fs: Sequence[StepFunction], diag: DiagonalMeasures, realization, cap: int = EXACT_CAP):
    """``sum_g (-1)^{n-c(g)} prod_cycles int prod_{i in cycle} f_i dDelta_{|cycle|}``.

    Each cycle of length ``k`` is integrated against the ``k``-th diagonal
    measure of the chosen rule.
    """
    n = len(fs)
    if diag is DiagonalMeasures.GAUSSIAN:
        eta = _gauss_cells(fs, realization)
        masses = np.asarray(fs[0].partition.masses)

        def integrate(prod, k):
            if k == 1:
                return eta @ prod
            return np.dot(prod, masses) if k == 2 else 0.0
    elif diag is DiagonalMeasures.POISSON:
        if isinstance(realization, WhiteNoiseSample):
            raise RealizationTypeError("Poisson rule needs a point configuration")
        counts = _poisson_counts(fs, realization)
        masses = np.asarray(fs[0].partition.masses)

        def integrate(prod, k):
            return counts @ prod - (np.dot(prod, masses) if k == 1 else 0.0)
    else:
        raise ValueError(f"unknown rule {diag!r}")
    if n == 0:
        return 1.0
    total = 0
    for g in enumerate_permutations(n, cap):
        cs = cycles(g)
        term = (-1) ** (n - len(cs))
        for c in cs:
            prod = np.prod([fs[i].array for i in c], axis=0)
            term = term * integrate(prod, len(c))
        total = total + term
    return total


def chaos_functional(kind: str, fs: Sequence[StepFunction], realization, cap: int = EXACT_CAP):
    if kind == "gauss":
        return generalized_hermite(fs, realization, cap)
    if kind == "poisson":
        return generalized_charlier(fs, realization, cap)
    raise ValueError(f"kind must be 'gauss' or 'poisson', got {kind!r}")


# -- multiplicative functionals and their logarithm --------------------------

def log_multiplicative(kind: str, h: StepFunction, realization):
    """Additive functional attached to ``h``: ``<h, eta>`` or ``sum_x h(x) - int h``."""
    if kind == "gauss":
        return _gauss_cells([h], realization) @ h.array
    if kind == "poisson":
        return _poisson_counts([h], realization) @ h.array - h.integral()
    raise ValueError(f"kind must be 'gauss' or 'poisson', got {kind!r}")


def multiplicative_functional(kind: str, h: StepFunction, realization):
    """Normalized multiplicative functional with unit mean."""
    if kind == "gauss":
        return np.exp(_gauss_cells([h], realization) @ h.array - h.pairing(h) / 2)
    if kind == "poisson":
        counts = _poisson_counts([h], realization)
        return np.prod((1 + h.array) ** counts, axis=-1) * np.exp(-h.integral())
    raise ValueError(f"kind must be 'gauss' or 'poisson', got {kind!r}")


@dataclass(frozen=True)
class CellIdentity:
    kind: str
    m: float
    series: float
    closed_form: float

    @property
    def error(self) -> float:
        return abs(self.series - self.closed_form)


def log_cell_identity(kind: str, c: float, a: float) -> CellIdentity:
    """``E|F - 1 - G|^2`` for constant ``h = c`` on one cell of mass ``a``, summed directly.

    The Poisson side sums over the count law; the Gaussian side uses a
    200-node Gauss-Hermite rule.  Both are compared with ``e^m - 1 - m``,
    ``m = c^2 a``.
    """
    m = c * c * a
    if kind == "poisson":
        K = poisson_truncation(a * (1 + abs(c)) ** 2, 4, 1e-18) + 20
        k = np.arange(K + 1)
        F = (1 + c) ** k * math.exp(-c * a)
        G = c * k - c * a
        series = math.fsum(poisson_pmf(a, K) * (F - 1 - G) ** 2)
    elif kind == "gauss":
        z, w = gauss_hermite_rule(200)
        x = math.sqrt(a) * z
        F = np.exp(c * x - c * c * a / 2)
        series = math.fsum(w * (F - 1 - c * x) ** 2)
    else:
        raise ValueError(f"kind must be 'gauss' or 'poisson', got {kind!r}")
    return CellIdentity(kind, m, series, math.expm1(m) - m)


@dataclass(frozen=True)
class ProfileRow:
    cells: int
    delta: float
    distance2: float
    stderr: float
    exact: float


def _common_refinement(partitions: Sequence[Partition], h: StepFunction, mass: float) -> Partition:
    edges = sorted(set().union(*[p.edges for p in partitions], h.partition.edges))
    return Partition.from_edges(edges, mass)


def log_convergence_profile(kind: str, h: StepFunction, partitions: Sequence[Partition], samples: int,
                            seed: int, workers: int | None = None) -> list[ProfileRow]:
    """Mean-square distance between ``sum_k (F_{A_k} - 1)`` and ``LOG F`` along a partition sweep.

    All partitions are evaluated on common random numbers: one batch of
    realizations on the common refinement, aggregated per partition.  Each
    row also carries the exact value ``sum_k (e^{m_k} - 1 - m_k)``.
    """
    mass = h.partition.total_mass
    fine = _common_refinement(partitions, h, mass)
    mids = (np.asarray(fine.edges[:-1]) + np.asarray(fine.edges[1:])) / 2
    hv = h(mids)
    fm = np.asarray(fine.masses)
    if kind == "gauss":
        cell_data = sample_white_noise(fine, seed, samples, workers).cell_values
        log_f = cell_data @ hv
    elif kind == "poisson":
        batch = sample_poisson_configs(mass, samples, seed, workers)
        cell_data = batch.cell_sums(fine)
        log_f = cell_data @ hv - np.dot(hv, fm)
    else:
        raise ValueError(f"kind must be 'gauss' or 'poisson', got {kind!r}")
    rows = []
    for p in partitions:
        owner = p.cell_of(mids)
        S = np.zeros(samples)
        m_cells = np.zeros(p.cells)
        for k in range(p.cells):
            sel = owner == k
            mk = float(np.dot(hv[sel] ** 2, fm[sel]))
            m_cells[k] = mk
            if kind == "gauss":
                Fk = np.exp(cell_data[:, sel] @ hv[sel] - mk / 2)
            else:
                Fk = np.prod((1 + hv[sel]) ** cell_data[:, sel], axis=1) * math.exp(-float(np.dot(hv[sel], fm[sel])))
            S += Fk - 1
        d2 = (S - log_f) ** 2
        rows.append(ProfileRow(p.cells, float(m_cells.max()), float(d2.mean()),
                               float(d2.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.nan,
                               math.fsum(np.expm1(m_cells) - m_cells)))
    return rows


# -- Gram matrices ---------------------------------------------------------------

def _permanent(M: np.ndarray):
    n = M.shape[0]
    if n == 0:
        return 1.0
    return sum(math.prod(M[i, g[i]] for i in range(n)) for g in enumerate_permutations(n))


def chaos_gram_exact(orders: Sequence[int], fs: Sequence[StepFunction]) -> np.ndarray:
    """``E[I_n I_m]``: zero across orders, a permanent of pairings within an order."""
    G = np.zeros((len(orders), len(orders)))
    for a, n in enumerate(orders):
        for b, m in enumerate(orders):
            if n == m:
                P = np.array([[fs[i].pairing(fs[j]) for j in range(m)] for i in range(n)])
                G[a, b] = _permanent(P)
    return G


@dataclass(frozen=True)
class GramEstimate:
    orders: tuple[int, ...]
    mean: np.ndarray
    stderr: np.ndarray
    samples: int


def chaos_gram_mc(kind: str, orders: Sequence[int], fs: Sequence[StepFunction], samples: int, seed: int,
                  workers: int | None = None) -> GramEstimate:
    """Monte Carlo Gram matrix of chaos elements ``I_n(f_1, ..., f_n)`` for the given orders."""
    if max(orders) > 3 or max(orders) > len(fs):
        raise ValueError("orders must be at most 3 and at most the number of test functions")
    p = _same(*fs)
    if kind == "gauss":
        real = sample_white_noise(p, seed, samples, workers)
    elif kind == "poisson":
        real = sample_poisson_configs(p.total_mass, samples, seed, workers)
    else:
        raise ValueError(f"kind must be 'gauss' or 'poisson', got {kind!r}")
    X = np.stack([np.broadcast_to(np.asarray(chaos_functional(kind, fs[:n], real, MC_CAP), dtype=float), (samples,))
                  for n in orders])
    k = len(orders)
    mean = np.empty((k, k))
    se = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            prod = X[i] * X[j]
            mean[i, j] = prod.mean()
            se[i, j] = prod.std(ddof=1) / math.sqrt(samples)
    return GramEstimate(tuple(orders), mean, se, samples)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    exact: float

    @property
    def z(self) -> float:
        return abs(self.mean - self.exact) / self.stderr if self.stderr > 0 else (0.0 if self.mean == self.exact else math.inf)


def multiplicative_inner_mc(kind: str, h1: StepFunction, h2: StepFunction, samples: int, seed: int,
                            workers: int | None = None) -> MCEstimate:
    """``E[M_h1 M_h2]`` by Monte Carlo against ``exp(int h1 h2 dnu)`` (real ``h``)."""
    p = _same(h1, h2)
    if kind == "gauss":
        real = sample_white_noise(p, seed, samples, workers)
    else:
        real = sample_poisson_configs(p.total_mass, samples, seed, workers)
    v = multiplicative_functional(kind, h1, real) * multiplicative_functional(kind, h2, real)
    return MCEstimate(float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples)), float(math.exp(h1.pairing(h2))))
