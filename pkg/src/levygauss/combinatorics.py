"""Exact enumeration over the symmetric group.

Permutations are tuples in 0-based one-line notation: ``g[i]`` is the image
of ``i``.  Everything here works with any scalar type supporting ``+`` and
``*`` (ints, :class:`fractions.Fraction`, sympy expressions, floats).
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Sequence

Permutation = tuple[int, ...]
CycleType = tuple[int, ...]

DEFAULT_CAP = 10
ENUMERATION_CAP = 8


class SizeLimitError(ValueError):
    """Requested enumeration exceeds the configured size cap."""


def _check_cap(n: int, cap: int) -> None:
    if n < 0:
        raise ValueError(f"size must be nonnegative, got {n}")
    if n > cap:
        raise SizeLimitError(f"size {n} exceeds cap {cap}")


def is_permutation(g: Sequence[int]) -> bool:
    return sorted(g) == list(range(len(g)))


def compose(g: Permutation, h: Permutation) -> Permutation:
    """Return ``g o h`` (apply ``h`` first)."""
    return tuple(g[h[i]] for i in range(len(h)))


def cycles(g: Permutation) -> list[tuple[int, ...]]:
    """Cycles of ``g``, each starting at its smallest element, sorted by that element."""
    seen = [False] * len(g)
    out = []
    for start in range(len(g)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        j = g[start]
        while j != start:
            cyc.append(j)
            seen[j] = True
            j = g[j]
        out.append(tuple(cyc))
    return out


def cycle_type(g: Permutation) -> CycleType:
    """Multiplicities ``(c_1, ..., c_n)`` of cycle lengths; ``sum(k * c_k) == n``."""
    if not is_permutation(g):
        raise ValueError(f"not a permutation: {g!r}")
    counts = [0] * len(g)
    for cyc in cycles(g):
        counts[len(cyc) - 1] += 1
    return tuple(counts)


def num_cycles(g: Permutation) -> int:
    return len(cycles(g))


def involution_count(n: int) -> int:
    """Telephone numbers ``I(n) = I(n-1) + (n-1) I(n-2)``."""
    a, b = 1, 1
    for k in range(2, n + 1):
        a, b = b, b + (k - 1) * a
    return b


def enumerate_involutions(n: int, cap: int = DEFAULT_CAP) -> list[Permutation]:
    """All ``g`` in S_n with ``g*g == id``."""
    _check_cap(n, cap)
    out: list[Permutation] = []

    def rec(img: list[int | None]) -> None:
        try:
            i = img.index(None)
        except ValueError:
            out.append(tuple(img))  # type: ignore[arg-type]
            return
        img[i] = i
        rec(img)
        for j in range(i + 1, n):
            if img[j] is None:
                img[i], img[j] = j, i
                rec(img)
                img[j] = None
        img[i] = None

    rec([None] * n)
    return out


def enumerate_permutations(n: int, cap: int = ENUMERATION_CAP) -> list[Permutation]:
    _check_cap(n, cap)
    return list(itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def cycle_type_census(n: int) -> tuple[tuple[CycleType, int], ...]:
    """``(cycle type, number of permutations)`` pairs, by brute-force enumeration of S_n."""
    census = Counter(cycle_type(g) for g in enumerate_permutations(n))
    return tuple(sorted(census.items(), reverse=True))


def _cycle_index_enumerated(n: int, t: Sequence):
    total = 0
    for ctype, count in cycle_type_census(n):
        term = count
        for k, c in enumerate(ctype):
            if c:
                term = term * t[k] ** c
        total = total + term
    return total


def _cycle_index_recurrence(n: int, t: Sequence):
    # n Z_n / n! = sum_k t_k Z_{n-k} / (n-k)!, from d/dz of exp(sum t_i z^i / i)
    z = [1]
    for m in range(1, n + 1):
        acc = 0
        for k in range(1, m + 1):
            acc = acc + (math.factorial(m - 1) // math.factorial(m - k)) * t[k - 1] * z[m - k]
        z.append(acc)
    return z[n]


def augmented_cycle_index(n: int, t: Sequence, method: str = "auto"):
    """Evaluate ``sum over g in S_n of prod_k t_k ** c_k(g)``.

    Parameters
    ----------
    n : int
        Degree of the symmetric group.
    t : sequence
        Values ``t_1, t_2, ...``; at least ``n`` entries are required.
    method : {"auto", "enumerate", "recurrence"}
        ``auto`` enumerates S_n for ``n <= 8`` and falls back to the
        exponential-formula recurrence above that.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if len(t) < n:
        raise ValueError(f"need at least {n} values of t, got {len(t)}")
    if method == "auto":
        method = "enumerate" if n <= ENUMERATION_CAP else "recurrence"
    if method == "enumerate":
        return _cycle_index_enumerated(n, t)
    if method == "recurrence":
        return _cycle_index_recurrence(n, t)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class PartitionLe2:
    """A set partition into singletons and unordered pairs."""

    singletons: tuple
    pairs: tuple

    @property
    def num_pairs(self) -> int:
        return len(self.pairs)

    def blocks(self) -> list[tuple]:
        return [(s,) for s in self.singletons] + [tuple(p) for p in self.pairs]


def enumerate_partitions_le2(ground: Sequence[Hashable], cap: int = DEFAULT_CAP) -> list[PartitionLe2]:
    """All partitions of ``ground`` into blocks of size one or two."""
    items = list(ground)
    _check_cap(len(items), cap)
    if len(set(items)) != len(items):
        raise ValueError("ground set has repeated elements")
    out: list[PartitionLe2] = []

    def rec(rest: list, singles: list, pairs: list) -> None:
        if not rest:
            out.append(PartitionLe2(tuple(singles), tuple(pairs)))
            return
        x, tail = rest[0], rest[1:]
        rec(tail, singles + [x], pairs)
        for i, y in enumerate(tail):
            rec(tail[:i] + tail[i + 1:], singles, pairs + [(x, y)])

    rec(items, [], [])
    return out


def involution_to_partition(g: Permutation) -> PartitionLe2:
    if compose(g, g) != tuple(range(len(g))):
        raise ValueError("not an involution")
    singles = tuple(i for i in range(len(g)) if g[i] == i)
    pairs = tuple((i, g[i]) for i in range(len(g)) if g[i] > i)
    return PartitionLe2(singles, pairs)
