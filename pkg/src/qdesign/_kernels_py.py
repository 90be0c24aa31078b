"""NumPy implementations of the coverage kernels.

Same signatures and results as the compiled ``_kernels`` module.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

# pair indices materialized per bincount call
_CHUNK = 1 << 22


def _pair_counts_rows(members: np.ndarray, npairs: int) -> np.ndarray:
    k = members.shape[1]
    lo, hi = np.triu_indices(k, 1)
    counts = np.zeros(npairs, dtype=np.int64)
    step = max(1, _CHUNK // max(1, len(lo)))
    for s in range(0, len(members), step):
        rows = members[s:s + step]
        a = rows[:, lo]
        b = rows[:, hi]
        counts += np.bincount((b * (b - 1) // 2 + a).ravel(), minlength=npairs)
    return counts


def pair_coverage(indptr, indices, v: int, threads: int = 1) -> np.ndarray:
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    npairs = v * (v - 1) // 2
    sizes = np.diff(indptr)
    jobs = []
    for k in np.unique(sizes):
        if k < 2:
            continue
        starts = indptr[:-1][sizes == k]
        members = indices[starts[:, None] + np.arange(k)]
        for part in np.array_split(members, max(1, threads)):
            if len(part):
                jobs.append(part)
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            shards = list(pool.map(lambda rows: _pair_counts_rows(rows, npairs), jobs))
    else:
        shards = [_pair_counts_rows(rows, npairs) for rows in jobs]
    return np.sum(shards, axis=0, dtype=np.int64) if shards else np.zeros(npairs, np.int64)


def subset_coverage(point_bits, subsets, threads: int = 1) -> np.ndarray:
    point_bits = np.asarray(point_bits, dtype=np.uint64)
    subsets = np.asarray(subsets, dtype=np.int64)
    out = np.empty(len(subsets), dtype=np.int64)
    step = max(1, _CHUNK // 8 // max(1, point_bits.shape[1]))
    for s in range(0, len(subsets), step):
        rows = subsets[s:s + step]
        acc = point_bits[rows[:, 0]].copy()
        for r in range(1, rows.shape[1]):
            acc &= point_bits[rows[:, r]]
        out[s:s + step] = np.bitwise_count(acc).sum(axis=1, dtype=np.int64)
    return out
