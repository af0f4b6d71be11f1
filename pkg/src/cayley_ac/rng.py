"""Seed derivation and deterministic parallel mapping.

Every random stream is keyed by ``(master_seed, *key)`` through numpy's
SeedSequence hashing, so a result depends only on the key, never on which
worker computed it or in what order.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def block_sizes(n: int, block: int) -> list[int]:
    """Split ``n`` items into fixed-size blocks (last one possibly short)."""
    if n < 0 or block <= 0:
        raise ValueError("n must be >= 0 and block > 0")
    full, rest = divmod(n, block)
    return [block] * full + ([rest] if rest else [])


def parallel_map(fn, tasks, workers: int = 1):
    """Ordered map; ``workers > 1`` uses processes. Output order is task order."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))
