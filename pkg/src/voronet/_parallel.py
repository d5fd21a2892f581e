"""Deterministic chunked execution, optionally across processes.

Replicates are split into fixed-size chunks; chunk i derives its own rng from
SeedSequence([root, i]), and partial results are merged in chunk order. The
output is therefore byte-identical for any worker count, and independent
chunks parallelize without shared state.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

DEFAULT_CHUNK = 2048


def chunk_plan(total: int, chunk_size: int):
    """(index, size) tasks covering ``total`` replicates."""
    out = []
    idx = 0
    done = 0
    while done < total:
        size = min(chunk_size, total - done)
        out.append((idx, size))
        idx += 1
        done += size
    return out


def root_entropy(seed) -> int:
    """A concrete integer root for seed derivation (fresh entropy when None)."""
    if seed is None:
        return int(np.random.SeedSequence().entropy)
    return int(seed)


def chunk_rng(root: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([root & ((1 << 128) - 1), index]))


def run_chunks(fn, tasks, n_jobs: int = 1):
    """Run ``fn(task)`` over tasks, preserving order; processes if n_jobs > 1."""
    if n_jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (8 * n_jobs))))
