"""Seeded, thread-count-independent chunked Monte Carlo helpers."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the work unit identified by `key`."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("SPARSECODE_THREADS", "1")))
    except ValueError:
        return 1


def chunk_sizes(total: int, chunk: int) -> list[int]:
    full, rest = divmod(total, chunk)
    return [chunk] * full + ([rest] if rest else [])


def run_chunks(fn, sizes, threads: int = 1) -> list:
    """Call ``fn(chunk_index, size)`` for every chunk; results in chunk order.

    Chunk boundaries depend only on `sizes`, never on `threads`.
    """
    args = list(enumerate(sizes))
    if threads > 1 and len(args) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(lambda a: fn(*a), args))
    return [fn(*a) for a in args]
