"""Hierarchical voting schemes on m-ary trees.

A scheme is a symmetric map ``phi: {0..r-1}^m -> {0..r-1}``.  Ballots are
trees whose leaves are i.i.d. uniform votes and whose internal nodes hold
``phi`` of their children.  This module checks the combinatorial conditions
that decide whether such a scheme carries nonconstant additive or
multiplicative functionals.

Text format for schemes::

    # comment lines start with '#'
    m r
    v_0 v_1 ...        # one value per multiset, in
                       # itertools.combinations_with_replacement order
"""
from __future__ import annotations

import itertools
import json
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import rng as _rng

MAX_LEAVES = 4096


class IncompleteTableError(ValueError):
    """The table does not assign a value to every argument tuple."""


@dataclass(frozen=True)
class VotingScheme:
    """Dense table ``phi[a_1, ..., a_m]``; entries are in ``0..r-1``."""

    m: int
    r: int
    table: np.ndarray = field(compare=False)
    name: str = ""

    def __post_init__(self):
        if self.m < 2 or self.r < 2:
            raise ValueError("arity and alphabet size must both be at least 2")
        t = np.asarray(self.table)
        if t.shape != (self.r,) * self.m:
            raise IncompleteTableError(f"table shape {t.shape} is not {(self.r,) * self.m}")
        if t.min() < 0 or t.max() >= self.r:
            raise IncompleteTableError("table entries must lie in 0..r-1")
        t = t.astype(np.int64)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __eq__(self, other):
        return isinstance(other, VotingScheme) and (self.m, self.r) == (other.m, other.r) \
            and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.m, self.r, self.table.tobytes()))

    # constructors
    @classmethod
    def from_multiset_values(cls, m: int, r: int, values, name: str = "") -> "VotingScheme":
        keys = list(itertools.combinations_with_replacement(range(r), m))
        values = list(values)
        if len(values) != len(keys):
            raise IncompleteTableError(f"expected {len(keys)} values, got {len(values)}")
        t = np.empty((r,) * m, dtype=np.int64)
        for key, v in zip(keys, values):
            for perm in set(itertools.permutations(key)):
                t[perm] = v
        return cls(m, r, t, name)

    @classmethod
    def from_function(cls, m: int, r: int, fn, name: str = "") -> "VotingScheme":
        t = np.empty((r,) * m, dtype=np.int64)
        for a in itertools.product(range(r), repeat=m):
            t[a] = fn(*a)
        return cls(m, r, t, name)

    @classmethod
    def majority(cls) -> "VotingScheme":
        return cls.from_function(3, 2, lambda a, b, c: int(a + b + c >= 2), "majority")

    @classmethod
    def example2(cls) -> "VotingScheme":
        return cls(2, 3, np.array([[2, 2, 0], [2, 0, 1], [0, 1, 1]]), "example2")

    @classmethod
    def xor(cls) -> "VotingScheme":
        return cls.from_function(2, 2, lambda a, b: a ^ b, "xor")

    def __call__(self, *args: int) -> int:
        return int(self.table[args])

    def multiset_values(self) -> list[int]:
        return [int(self.table[k]) for k in itertools.combinations_with_replacement(range(self.r), self.m)]

    # sections
    def section_labels(self) -> list[tuple[int, ...]]:
        return list(itertools.combinations_with_replacement(range(self.r), self.m - 1))

    def section(self, fixed: tuple[int, ...]) -> tuple[int, ...]:
        """The map ``x -> phi(*fixed, x)`` as a tuple of images."""
        return tuple(int(self.table[tuple(fixed) + (x,)]) for x in range(self.r))

    # text format
    def to_text(self) -> str:
        head = f"# {self.name}\n" if self.name else ""
        return head + f"{self.m} {self.r}\n" + " ".join(map(str, self.multiset_values())) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "VotingScheme":
        tokens = []
        for line in text.splitlines():
            tokens.extend(line.split("#", 1)[0].split())
        if len(tokens) < 2:
            raise IncompleteTableError("missing 'm r' header")
        m, r = int(tokens[0]), int(tokens[1])
        return cls.from_multiset_values(m, r, [int(v) for v in tokens[2:]], name)

    @classmethod
    def read(cls, path: str | Path) -> "VotingScheme":
        return cls.from_text(Path(path).read_text(), Path(path).stem)


# -- validation ------------------------------------------------------------------

@dataclass(frozen=True)
class SchemeVerdict:
    symmetric: bool
    preimage_counts: dict
    expected_preimage: int
    balanced: bool

    @property
    def valid(self) -> bool:
        return self.symmetric and self.balanced


def validate_scheme(scheme: VotingScheme) -> SchemeVerdict:
    """Symmetry and balanced preimages (each value hit by ``r^{m-1}`` ordered tuples)."""
    t = scheme.table
    symmetric = all(np.array_equal(t, np.transpose(t, p)) for p in itertools.permutations(range(scheme.m)))
    counts = Counter(int(v) for v in t.ravel())
    preimage = {v: counts.get(v, 0) for v in range(scheme.r)}
    expected = scheme.r ** (scheme.m - 1)
    return SchemeVerdict(symmetric, preimage, expected, all(c == expected for c in preimage.values()))


def pushforward_distribution(scheme: VotingScheme) -> list[Fraction]:
    """Exact law of ``phi(U_1, ..., U_m)`` for i.i.d. uniform ``U_i``."""
    counts = Counter(int(v) for v in scheme.table.ravel())
    total = scheme.r ** scheme.m
    return [Fraction(counts.get(v, 0), total) for v in range(scheme.r)]


# -- abundance ---------------------------------------------------------------------

@dataclass(frozen=True)
class AbundanceVerdict:
    abundant: bool
    witness: tuple[tuple[int, ...], ...] | None  # section labels, applied first to last
    constant_value: int | None
    semigroup_size: int


def compose_word(scheme: VotingScheme, word) -> tuple[int, ...]:
    """Map obtained by applying the sections in ``word`` from first to last."""
    current = tuple(range(scheme.r))
    for label in word:
        s = scheme.section(tuple(label))
        current = tuple(s[x] for x in current)
    return current


def is_abundant(scheme: VotingScheme) -> AbundanceVerdict:
    """Breadth-first search of the semigroup generated by the sections for a constant map.

    Words are explored in order of length, so a returned witness is of
    minimal length.
    """
    labels = scheme.section_labels()
    gens = {lab: scheme.section(lab) for lab in labels}
    seen: dict[tuple[int, ...], tuple] = {}
    queue: deque = deque()
    for lab in labels:
        g = gens[lab]
        if g not in seen:
            seen[g] = (lab,)
            queue.append(g)
    while queue:
        f = queue.popleft()
        if len(set(f)) == 1:
            return AbundanceVerdict(True, seen[f], f[0], len(seen))
        for lab in labels:
            s = gens[lab]
            h = tuple(s[x] for x in f)
            if h not in seen:
                seen[h] = seen[f] + (lab,)
                queue.append(h)
    return AbundanceVerdict(False, None, None, len(seen))


# -- additive and multiplicative solutions ---------------------------------------

def _rank(rows: list[list[Fraction]]) -> int:
    rows = [r[:] for r in rows]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                factor = rows[i][c] / p
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def antiadditive_system(scheme: VotingScheme) -> list[list[Fraction]]:
    """Rows of ``f(phi(a)) - sum_i g(a_i) = 0``; unknowns ``f_0..f_{r-1}, g_0..g_{r-1}``."""
    r = scheme.r
    rows = []
    for a in itertools.combinations_with_replacement(range(r), scheme.m):
        row = [Fraction(0)] * (2 * r)
        row[int(scheme.table[a])] += 1
        for ai in a:
            row[r + ai] -= 1
        rows.append(row)
    return rows


def antiadditive_solution_dim(scheme: VotingScheme) -> int:
    """Dimension of the solution space of the additive equation; 1 means constants only."""
    return 2 * scheme.r - _rank(antiadditive_system(scheme))


@dataclass(frozen=True)
class MultiplicativeSolution:
    """Values in ``{0} U {L-th roots of unity}``, stored as exponents mod ``L`` (``None`` is zero)."""

    L: int
    f: tuple[int | None, ...]
    g: tuple[int | None, ...]

    @staticmethod
    def _value(e, L):
        if e is None:
            return 0
        if (2 * e) % L == 0:
            return 1 if e == 0 else -1
        return complex(np.exp(2j * np.pi * e / L))

    def f_values(self):
        return tuple(self._value(e, self.L) for e in self.f)

    def g_values(self):
        return tuple(self._value(e, self.L) for e in self.g)


def antimultiplicative_search(scheme: VotingScheme, L: int) -> list[MultiplicativeSolution]:
    """All nonconstant ``g`` with values in ``{0} U mu_L`` solving the product equation.

    For each ``g`` the value ``f(phi(a))`` is forced to ``prod g(a_i)``;
    the pair is kept when these forced values agree, so every returned
    solution is verified exactly in exponent arithmetic.
    """
    if not 1 <= L <= 12:
        raise ValueError("root order must be between 1 and 12")
    choices = [None] + list(range(L))
    tuples = list(itertools.combinations_with_replacement(range(scheme.r), scheme.m))
    out = []
    for g in itertools.product(choices, repeat=scheme.r):
        if len(set(g)) == 1:
            continue
        f: list = [0] * scheme.r
        assigned = [False] * scheme.r
        ok = True
        for a in tuples:
            if any(g[ai] is None for ai in a):
                val = None
            else:
                val = sum(g[ai] for ai in a) % L
            v = int(scheme.table[a])
            if assigned[v] and f[v] != val:
                ok = False
                break
            f[v], assigned[v] = val, True
        if ok:
            out.append(MultiplicativeSolution(L, tuple(f), tuple(g)))
    return out


def verify_multiplicative(scheme: VotingScheme, sol: MultiplicativeSolution, tol: float = 1e-12) -> bool:
    fv, gv = sol.f_values(), sol.g_values()
    for a in itertools.product(range(scheme.r), repeat=scheme.m):
        if abs(fv[int(scheme.table[a])] - np.prod([gv[ai] for ai in a])) > tol:
            return False
    return True


def balanced_schemes(m: int, r: int) -> list[VotingScheme]:
    """Every symmetric balanced scheme with the given arity and alphabet (small cases only)."""
    keys = list(itertools.combinations_with_replacement(range(r), m))
    if r ** len(keys) > 10**6:
        raise ValueError("too many tables to enumerate")
    out = []
    for vals in itertools.product(range(r), repeat=len(keys)):
        s = VotingScheme.from_multiset_values(m, r, vals)
        if validate_scheme(s).balanced:
            out.append(s)
    return out


# -- ballots ---------------------------------------------------------------------

@dataclass(frozen=True)
class BallotTree:
    """``levels[0]`` is the root, ``levels[d]`` the ``m^d`` leaves; arrays carry a leading sample axis."""

    m: int
    levels: tuple[np.ndarray, ...]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def is_consistent(self, scheme: VotingScheme) -> bool:
        return all(np.array_equal(self.levels[d], _parents(scheme, self.levels[d + 1]))
                   for d in range(self.depth))


def _parents(scheme: VotingScheme, children: np.ndarray) -> np.ndarray:
    n = children.shape[0]
    grouped = children.reshape(n, -1, scheme.m)
    flat = np.zeros(grouped.shape[:2], dtype=np.int64)
    for i in range(scheme.m):
        flat = flat * scheme.r + grouped[:, :, i]
    return scheme.table.ravel()[flat]


def sample_ballots(scheme: VotingScheme, depth: int, seed: int, n: int = 1,
                   workers: int | None = None) -> BallotTree:
    """``n`` independent ballot trees of the given depth."""
    leaves = scheme.m ** depth
    if depth < 0 or leaves > MAX_LEAVES:
        raise ValueError(f"depth {depth} gives {leaves} leaves, above the cap {MAX_LEAVES}")

    def block(b, s):
        return _rng.make_rng(seed, _rng.BALLOTS, b).integers(0, scheme.r, size=(s, leaves))

    level = np.concatenate(_rng.run_blocks(n, block, workers))
    levels = [level]
    for _ in range(depth):
        level = _parents(scheme, level)
        levels.append(level)
    return BallotTree(scheme.m, tuple(reversed(levels)))


# -- reports -----------------------------------------------------------------------

def scheme_report(scheme: VotingScheme, L_max: int = 6) -> dict:
    """JSON-ready summary of every check for one scheme."""
    v = validate_scheme(scheme)
    ab = is_abundant(scheme)
    sols = {L: antimultiplicative_search(scheme, L) for L in range(2, L_max + 1)}
    return {
        "name": scheme.name,
        "m": scheme.m,
        "r": scheme.r,
        "symmetric": v.symmetric,
        "balanced": v.balanced,
        "preimage_counts": {str(k): c for k, c in v.preimage_counts.items()},
        "expected_preimage": v.expected_preimage,
        "abundant": ab.abundant,
        "witness": [list(w) for w in ab.witness] if ab.witness else None,
        "antiadditive_dim": antiadditive_solution_dim(scheme),
        "multiplicative_solutions": {
            str(L): [{"f": list(s.f), "g": list(s.g)} for s in ss] for L, ss in sols.items()
        },
    }


def report_json(schemes) -> str:
    return json.dumps([scheme_report(s) for s in schemes], indent=2, sort_keys=True)
