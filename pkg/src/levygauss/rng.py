"""Counter-based random streams and block-parallel Monte Carlo.

Every generator is a Philox stream keyed by ``(seed, *stream_ids)``.  Bulk
sampling is cut into fixed-size blocks, block ``b`` always uses stream
``(seed, *stream_ids, b)``, and results are concatenated in block order, so
the output is bit-identical whatever the number of workers.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

BLOCK_SIZE = 8192

# stream identifiers
POINTS = 1
WHITE_NOISE = 2
GAMMA_EXACT = 3
GAUSS_PART = 4
BALLOTS = 5
CHAOS = 6

T = TypeVar("T")


def make_rng(seed: int, *stream_ids: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream_ids))
    return np.random.Generator(np.random.Philox(ss))


def block_sizes(n: int, block: int = BLOCK_SIZE) -> list[int]:
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    full, rest = divmod(n, block)
    return [block] * full + ([rest] if rest else [])


def run_blocks(n: int, fn: Callable[[int, int], T], workers: int | None = None,
               block: int = BLOCK_SIZE) -> list[T]:
    """Call ``fn(block_index, size)`` for every block and return results in block order."""
    sizes = block_sizes(n, block)
    if workers is None or workers <= 1 or len(sizes) <= 1:
        return [fn(b, s) for b, s in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))


def concat(parts: Sequence[np.ndarray], axis: int = 0) -> np.ndarray:
    return np.concatenate(list(parts), axis=axis) if parts else np.empty(0)
