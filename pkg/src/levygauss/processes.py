"""Samplers and exact laws on the base space X = [0, 1].

The control measure is ``nu = mass * Lebesgue``.  Point processes are
sampled in bulk as :class:`ConfigurationBatch` objects (flat arrays plus
offsets); single configurations are :class:`PointConfiguration`.

Examples
--------
>>> from levygauss.processes import LevySpec, sample_levy_batch
>>> batch = sample_levy_batch(LevySpec.poisson(), n=4, seed=1, mass=2.0)
>>> batch.counts.shape
(4,)
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from . import rng as _rng
from .orthopoly import DomainError


class TruncationRequiredError(ValueError):
    """An infinite Levy measure was sampled without a positive jump cutoff."""


class TransportError(ValueError):
    """A jump-size map is undefined at some mark."""


# -- configurations ----------------------------------------------------------

@dataclass
class PointConfiguration:
    """Finitely many points of [0, 1], optionally carrying real marks."""

    locations: np.ndarray
    marks: np.ndarray | None = None

    def __post_init__(self):
        self.locations = np.asarray(self.locations, dtype=float)
        if self.marks is not None:
            self.marks = np.asarray(self.marks, dtype=float)
            if self.marks.shape != self.locations.shape:
                raise ValueError("marks and locations differ in length")
        if self.locations.size and (self.locations.min() < 0 or self.locations.max() > 1):
            raise ValueError("locations must lie in [0, 1]")

    def __len__(self) -> int:
        return self.locations.size

    def mark_values(self) -> np.ndarray:
        return np.ones_like(self.locations) if self.marks is None else self.marks

    def to_csv(self, path: str | Path | None = None) -> str:
        """Write ``x,mark`` lines (with header); returns the text."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "mark"])
        for x, t in zip(self.locations, self.mark_values()):
            w.writerow([repr(float(x)), repr(float(t))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> "PointConfiguration":
        return cls.from_csv_text(Path(path).read_text())

    @classmethod
    def from_csv_text(cls, text: str) -> "PointConfiguration":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
        if rows and rows[0][0].strip() == "x":
            rows = rows[1:]
        x = np.array([float(r[0]) for r in rows])
        t = np.array([float(r[1]) for r in rows])
        return cls(x, t)


@dataclass
class ConfigurationBatch:
    """``n`` configurations stored as flat arrays; sample ``i`` owns ``offsets[i]:offsets[i+1]``."""

    counts: np.ndarray
    locations: np.ndarray
    marks: np.ndarray | None = None
    offsets: np.ndarray = field(init=False)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.offsets = np.concatenate([[0], np.cumsum(self.counts)])
        if self.offsets[-1] != self.locations.size:
            raise ValueError("counts do not match the number of points")

    @property
    def n(self) -> int:
        return self.counts.size

    def __getitem__(self, i: int) -> PointConfiguration:
        s = slice(self.offsets[i], self.offsets[i + 1])
        return PointConfiguration(self.locations[s], None if self.marks is None else self.marks[s])

    def mark_values(self) -> np.ndarray:
        return np.ones_like(self.locations) if self.marks is None else self.marks

    def _reduce(self, ufunc, values: np.ndarray, empty: float) -> np.ndarray:
        out = np.full(self.n, empty, dtype=np.result_type(values, float))
        nz = self.counts > 0
        if nz.any():
            out[nz] = ufunc.reduceat(values, self.offsets[:-1][nz])
        return out

    def sum_over_points(self, values: np.ndarray) -> np.ndarray:
        return self._reduce(np.add, np.asarray(values), 0.0)

    def prod_over_points(self, values: np.ndarray) -> np.ndarray:
        return self._reduce(np.multiply, np.asarray(values), 1.0)

    def cell_sums(self, partition: "Partition", values: np.ndarray | None = None) -> np.ndarray:
        """Per-sample, per-cell sums of ``values`` (default: counts); shape ``(n, cells)``."""
        vals = np.ones_like(self.locations) if values is None else np.asarray(values)
        owner = np.repeat(np.arange(self.n), self.counts)
        key = owner * partition.cells + partition.cell_of(self.locations)
        flat = np.bincount(key, weights=vals, minlength=self.n * partition.cells)
        return flat.reshape(self.n, partition.cells)

    @classmethod
    def concatenate(cls, parts: Sequence["ConfigurationBatch"]) -> "ConfigurationBatch":
        marks = None if parts[0].marks is None else np.concatenate([p.marks for p in parts])
        return cls(np.concatenate([p.counts for p in parts]), np.concatenate([p.locations for p in parts]), marks)


# -- partitions of [0, 1] ----------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Cells ``[e_j, e_{j+1})`` of [0, 1] with masses ``nu(cell_j)``."""

    masses: tuple[float, ...]
    edges: tuple[float, ...]

    def __init__(self, masses: Sequence[float], edges: Sequence[float] | None = None):
        m = tuple(float(v) for v in masses)
        if not m or any(v < 0 for v in m):
            raise DomainError("cell masses must be nonnegative and at least one cell is needed")
        if edges is None:
            total = math.fsum(m)
            cum = np.cumsum(m) / total if total > 0 else np.linspace(0, 1, len(m) + 1)[1:]
            edges = (0.0, *cum[:-1].tolist(), 1.0)
        e = tuple(float(v) for v in edges)
        if len(e) != len(m) + 1 or e[0] != 0.0 or e[-1] != 1.0 or any(b < a for a, b in zip(e, e[1:])):
            raise DomainError("edges must increase from 0 to 1, one more than cells")
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "edges", e)

    @classmethod
    def uniform(cls, cells: int, total_mass: float = 1.0) -> "Partition":
        return cls([total_mass / cells] * cells, np.linspace(0, 1, cells + 1).tolist())

    @classmethod
    def from_edges(cls, edges: Sequence[float], total_mass: float = 1.0) -> "Partition":
        return cls((np.diff(edges) * total_mass).tolist(), edges)

    @property
    def cells(self) -> int:
        return len(self.masses)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    def cell_of(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(np.asarray(self.edges), x, side="right") - 1
        return np.clip(idx, 0, self.cells - 1)

    def refine(self) -> "Partition":
        """Split every cell in two halves of equal mass."""
        e = np.asarray(self.edges)
        mids = (e[:-1] + e[1:]) / 2
        edges = np.empty(2 * self.cells + 1)
        edges[0::2], edges[1::2] = e, mids
        masses = np.repeat(np.asarray(self.masses) / 2, 2)
        return Partition(masses.tolist(), edges.tolist())


@dataclass(frozen=True)
class WhiteNoiseSample:
    """Cell values of white noise; shape ``(cells,)`` or ``(n, cells)`` for a batch."""

    cell_values: np.ndarray
    partition: Partition | None = None


# -- Levy measures -----------------------------------------------------------

class LevyMeasure:
    """Interface for jump-intensity measures on the real line minus zero."""

    finite: bool = True

    def mass_above(self, eps: float | None) -> float:
        raise NotImplementedError

    def sample_marks(self, gen: np.random.Generator, n: int, eps: float | None) -> np.ndarray | None:
        raise NotImplementedError

    def integrate(self, f: Callable[[np.ndarray], np.ndarray], eps: float | None = None) -> complex:
        raise NotImplementedError

    def moment(self, j: int) -> float:
        """``int t^j dPi``."""
        raise NotImplementedError

    @property
    def support_size(self) -> float:
        raise NotImplementedError

    def cdf(self, t: np.ndarray, eps: float | None = None) -> np.ndarray:
        """Normalized distribution function of the (truncated) measure."""
        raise NotImplementedError


@dataclass(frozen=True)
class FiniteAtomic(LevyMeasure):
    atoms: tuple[float, ...]
    masses: tuple[float, ...]

    def __post_init__(self):
        if len(self.atoms) != len(self.masses):
            raise DomainError("atoms and masses differ in length")
        if any(not m > 0 for m in self.masses):
            raise DomainError("atom masses must be positive")
        if any(t == 0 for t in self.atoms):
            raise DomainError("a Levy measure has no atom at zero")

    def _p(self) -> np.ndarray:
        p = np.asarray(self.masses, dtype=float)
        return p / p.sum()

    def mass_above(self, eps=None) -> float:
        return math.fsum(m for t, m in zip(self.atoms, self.masses) if eps is None or abs(t) > eps)

    def sample_marks(self, gen, n, eps=None):
        if len(self.atoms) == 1:
            return np.full(n, float(self.atoms[0]))
        return np.asarray(self.atoms, dtype=float)[gen.choice(len(self.atoms), size=n, p=self._p())]

    def integrate(self, f, eps=None):
        t = np.asarray(self.atoms, dtype=float)
        return complex(np.sum(np.asarray(self.masses) * f(t)))

    def moment(self, j: int) -> float:
        return math.fsum(m * t**j for t, m in zip(self.atoms, self.masses))

    @property
    def support_size(self) -> int:
        return len(set(self.atoms))

    def cdf(self, t, eps=None):
        order = np.argsort(self.atoms)
        a = np.asarray(self.atoms, dtype=float)[order]
        cum = np.cumsum(self._p()[order])
        idx = np.searchsorted(a, t, side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        order = np.argsort(self.atoms)
        a = np.asarray(self.atoms, dtype=float)[order]
        cum = np.cumsum(self._p()[order])
        cum[-1] = 1.0
        return a[np.minimum(np.searchsorted(cum, u, side="left"), len(a) - 1)]


def Dirac(t0: float = 1.0, mass: float = 1.0) -> FiniteAtomic:
    return FiniteAtomic((float(t0),), (float(mass),))


@dataclass(frozen=True)
class GammaMeasure(LevyMeasure):
    """Density ``exp(-t) / t`` on ``t > 0``."""

    finite = False

    def mass_above(self, eps=None) -> float:
        if eps is None or eps <= 0:
            return math.inf
        return float(special.exp1(eps))

    def sample_marks(self, gen, n, eps=None):
        if eps is None or eps <= 0:
            raise TruncationRequiredError("gamma jumps need a cutoff eps > 0")
        knee = max(eps, 1.0)
        low = float(special.exp1(eps) - special.exp1(knee)) if eps < 1 else 0.0
        high = float(special.exp1(knee))
        from_low = gen.random(n) < low / (low + high)
        out = np.empty(n)
        n_low = int(from_low.sum())
        if n_low:
            # proposal dt/t on (eps, 1], accept with prob exp(-t)
            out[from_low] = _rejection(gen, n_low, lambda k: eps * (1 / eps) ** gen.random(k), lambda t: np.exp(-t))
        if n - n_low:
            # proposal exp(-(t - knee)) on (knee, inf), accept with prob knee / t
            out[~from_low] = _rejection(gen, n - n_low, lambda k: knee + gen.exponential(size=k), lambda t: knee / t)
        return out

    def integrate(self, f, eps=None):
        lo = 0.0 if eps is None else eps

        def part(g):
            return integrate.quad(lambda t: g(f(np.asarray(t))) * math.exp(-t) / t, lo, 1, limit=200)[0] + \
                integrate.quad(lambda t: g(f(np.asarray(t))) * math.exp(-t) / t, 1, np.inf, limit=200)[0]

        return complex(part(np.real), part(np.imag))

    def moment(self, j: int) -> float:
        if j < 1:
            return math.inf
        return float(math.factorial(j - 1))

    @property
    def support_size(self) -> float:
        return math.inf

    def cdf(self, t, eps=None):
        if eps is None or eps <= 0:
            raise TruncationRequiredError("normalized law needs eps > 0")
        t = np.maximum(np.asarray(t, dtype=float), eps)
        e = special.exp1(eps)
        return (e - special.exp1(t)) / e


def _rejection(gen: np.random.Generator, n: int, propose, accept_prob) -> np.ndarray:
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        k = int(need * 1.7) + 16
        t = propose(k)
        ok = t[gen.random(k) < accept_prob(t)][:need]
        out[filled:filled + ok.size] = ok
        filled += ok.size
    return out


def gamma_drift() -> float:
    """``int t/(1+t^2) exp(-t)/t dt`` in closed form via sine/cosine integrals."""
    si, ci = special.sici(1.0)
    return float(ci * math.sin(1) - (si - math.pi / 2) * math.cos(1))


# -- Levy triples ------------------------------------------------------------

@dataclass(frozen=True)
class LevySpec:
    """Levy-Khintchine triple: drift, Gaussian variance and jump measure (per unit of ``nu``)."""

    drift: float = 0.0
    gaussian_variance: float = 0.0
    levy_measure: LevyMeasure | None = None

    def __post_init__(self):
        if self.gaussian_variance < 0:
            raise DomainError("Gaussian variance must be nonnegative")

    @classmethod
    def gaussian(cls, variance: float = 1.0) -> "LevySpec":
        return cls(0.0, variance, None)

    @classmethod
    def poisson(cls) -> "LevySpec":
        return cls(0.5, 0.0, Dirac(1.0))

    @classmethod
    def subordinator(cls, measure: LevyMeasure) -> "LevySpec":
        """Pure-jump spec whose exponent is ``int (e^{ity} - 1) dPi``."""
        return cls(compensator(measure), 0.0, measure)

    @classmethod
    def gamma(cls) -> "LevySpec":
        return cls.subordinator(GammaMeasure())


def compensator(measure: LevyMeasure | None, eps: float | None = None) -> float:
    """``int_{|t|>eps} t / (1 + t^2) dPi``."""
    if measure is None:
        return 0.0
    if isinstance(measure, GammaMeasure):
        if eps is None or eps <= 0:
            return gamma_drift()
        return float(integrate.quad(lambda t: math.exp(-t) / (1 + t * t), eps, np.inf, limit=200)[0])
    if isinstance(measure, FiniteAtomic):
        return math.fsum(m * t / (1 + t * t) for t, m in zip(measure.atoms, measure.masses) if eps is None or abs(t) > eps)
    return measure.integrate(lambda t: t / (1 + t * t), eps).real


def levy_khintchine_exponent(spec: LevySpec, y: float) -> complex:
    """``log phi(y) = icy - sigma^2 y^2 / 2 + int (e^{ity} - 1 - ity/(1+t^2)) dPi(t)``."""
    if not np.isfinite(y):
        raise DomainError("y must be finite")
    out = 1j * spec.drift * y - spec.gaussian_variance * y * y / 2
    if spec.levy_measure is None or y == 0:
        return complex(out)
    if not isinstance(spec.levy_measure, (FiniteAtomic, GammaMeasure)):
        raise DomainError(f"unsupported Levy measure {type(spec.levy_measure).__name__}")
    out += spec.levy_measure.integrate(lambda t: np.expm1(1j * t * y) - 1j * t * y / (1 + t * t))
    return complex(out)


# -- samplers ----------------------------------------------------------------

def _points_block(seed: int, b: int, size: int, rate: float, mark_fn=None) -> ConfigurationBatch:
    gen = _rng.make_rng(seed, _rng.POINTS, b)
    counts = gen.poisson(rate, size) if rate > 0 else np.zeros(size, dtype=np.int64)
    locs = gen.random(int(counts.sum()))
    marks = mark_fn(gen, locs.size) if mark_fn is not None else None
    return ConfigurationBatch(counts, locs, marks)


def sample_poisson_configs(mass: float, n: int, seed: int, workers: int | None = None) -> ConfigurationBatch:
    """``n`` independent Poisson configurations on [0, 1] with intensity ``mass * dx``."""
    if mass < 0:
        raise DomainError("mass must be nonnegative")
    parts = _rng.run_blocks(n, lambda b, s: _points_block(seed, b, s, mass), workers)
    return ConfigurationBatch.concatenate(parts) if parts else ConfigurationBatch(np.zeros(0), np.zeros(0))


def sample_poisson_config(mass: float, seed: int) -> PointConfiguration:
    return sample_poisson_configs(mass, 1, seed)[0]


def sample_white_noise(partition: Partition, seed: int, n: int | None = None,
                       workers: int | None = None) -> WhiteNoiseSample:
    """Independent N(0, mass_j) cell values; a batch of shape ``(n, cells)`` when ``n`` is given."""
    sd = np.sqrt(np.asarray(partition.masses))

    def block(b, s):
        return _rng.make_rng(seed, _rng.WHITE_NOISE, b).standard_normal((s, partition.cells)) * sd

    if n is None:
        return WhiteNoiseSample(block(0, 1)[0], partition)
    parts = _rng.run_blocks(n, block, workers)
    return WhiteNoiseSample(np.concatenate(parts) if parts else np.zeros((0, partition.cells)), partition)


def sample_levy_batch(spec: LevySpec, n: int, seed: int, mass: float = 1.0, eps: float | None = None,
                      workers: int | None = None) -> ConfigurationBatch:
    """Jumps of a Levy spec as marked Poisson configurations on [0, 1] x R.

    Points are Poisson with intensity ``mass * dx * Pi`` restricted to
    ``|t| > eps``.  Counts and locations come from the same stream as
    :func:`sample_poisson_configs`, so ``Pi = Dirac(1)`` reproduces it
    exactly for the same seed.  The Gaussian part and drift are ignored here;
    see :func:`sample_levy_increments`.
    """
    pi = spec.levy_measure
    if pi is None:
        return ConfigurationBatch(np.zeros(n), np.zeros(0), np.zeros(0))
    if not pi.finite and (eps is None or eps <= 0):
        raise TruncationRequiredError("an infinite Levy measure needs a jump cutoff eps > 0")
    if isinstance(pi, FiniteAtomic) and eps is not None:
        keep = [(t, m) for t, m in zip(pi.atoms, pi.masses) if abs(t) > eps]
        pi = FiniteAtomic(tuple(t for t, _ in keep), tuple(m for _, m in keep)) if keep else None
        if pi is None:
            return ConfigurationBatch(np.zeros(n), np.zeros(0), np.zeros(0))
    rate = mass * pi.mass_above(eps)
    mark_fn = lambda gen, k: pi.sample_marks(gen, k, eps)  # noqa: E731
    parts = _rng.run_blocks(n, lambda b, s: _points_block(seed, b, s, rate, mark_fn), workers)
    return ConfigurationBatch.concatenate(parts)


def sample_levy(spec: LevySpec, eps: float | None, seed: int, mass: float = 1.0) -> PointConfiguration:
    return sample_levy_batch(spec, 1, seed, mass, eps)[0]


def sample_levy_increments(spec: LevySpec, partition: Partition, n: int, seed: int,
                           eps: float | None = None, workers: int | None = None) -> np.ndarray:
    """Cell increments ``c nu_j + sigma W_j + (jumps in cell j) - nu_j int_{>eps} t/(1+t^2) dPi``.

    Shape ``(n, cells)``.  The base intensity is ``partition.total_mass``.
    """
    m = np.asarray(partition.masses)
    out = np.zeros((n, partition.cells)) + spec.drift * m
    if spec.gaussian_variance > 0:
        gen_noise = _rng.run_blocks(
            n, lambda b, s: _rng.make_rng(seed, _rng.GAUSS_PART, b).standard_normal((s, partition.cells)), workers)
        out += np.concatenate(gen_noise) * np.sqrt(spec.gaussian_variance * m)
    if spec.levy_measure is not None:
        batch = sample_levy_batch(spec, n, seed, partition.total_mass, eps, workers)
        out += batch.cell_sums(partition, batch.mark_values())
        out -= m * compensator(spec.levy_measure, eps)
    return out


def exact_gamma_increments(partition: Partition, seed: int, n: int | None = None,
                           workers: int | None = None) -> np.ndarray:
    """Independent Gamma(nu_j, 1) increments of the gamma process; ``(n, cells)`` if ``n`` given."""
    shape = np.asarray(partition.masses)

    def block(b, s):
        return _rng.make_rng(seed, _rng.GAMMA_EXACT, b).gamma(np.broadcast_to(shape, (s, partition.cells)))

    if n is None:
        return block(0, 1)[0]
    return np.concatenate(_rng.run_blocks(n, block, workers))


# -- jump-size transport -----------------------------------------------------

def transport_jump_sizes(config: PointConfiguration | ConfigurationBatch, T: Callable[[np.ndarray], np.ndarray]):
    """Apply ``T`` to every mark; locations are untouched."""
    marks = config.mark_values()
    try:
        with np.errstate(all="ignore"):
            new = np.asarray(T(marks), dtype=float)
    except Exception as exc:  # noqa: BLE001
        raise TransportError(f"jump map failed: {exc}") from exc
    if new.shape != marks.shape or not np.all(np.isfinite(new)):
        raise TransportError("jump map is undefined at some mark")
    if isinstance(config, ConfigurationBatch):
        return ConfigurationBatch(config.counts, config.locations, new)
    return PointConfiguration(config.locations, new)


def quantile_transport(source: LevyMeasure, target: FiniteAtomic, eps: float | None = None) -> Callable:
    """Monotone map pushing the normalized ``source`` law onto the normalized ``target`` law."""
    def T(t):
        return target.quantile(np.clip(source.cdf(t, eps), 0.0, 1.0))
    return T
