# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled coverage kernels.

Both kernels parallelize over their outer loop with OpenMP.  Pair counts are
accumulated into per-thread shards and summed at the end, so the result does
not depend on scheduling.
"""

import numpy as np

from cython.parallel cimport prange, threadid
from libc.stdint cimport int32_t, int64_t, uint32_t, uint64_t


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def pair_coverage(const int64_t[::1] indptr, const int32_t[::1] indices,
                  Py_ssize_t v, int threads=1):
    """Coverage count of every unordered pair ``{i < j}`` at triangular
    index ``j*(j-1)/2 + i``.  Members of each block must be ascending."""
    cdef Py_ssize_t npairs = v * (v - 1) // 2
    cdef Py_ssize_t nblocks = indptr.shape[0] - 1
    if threads < 1:
        threads = 1
    shards = np.zeros((threads, npairs), dtype=np.uint32)
    cdef uint32_t[:, ::1] sh = shards
    cdef Py_ssize_t blk, a, c, start, stop
    cdef int tid
    cdef int64_t j, base
    with nogil:
        for blk in prange(nblocks, num_threads=threads, schedule="static"):
            tid = threadid()
            start = indptr[blk]
            stop = indptr[blk + 1]
            for c in range(start + 1, stop):
                j = indices[c]
                base = j * (j - 1) // 2
                for a in range(start, c):
                    sh[tid, base + indices[a]] += 1
    return shards.sum(axis=0, dtype=np.int64)


def subset_coverage(const uint64_t[:, ::1] point_bits, const int64_t[:, ::1] subsets,
                    int threads=1):
    """Number of blocks containing each row of ``subsets``.

    ``point_bits[x]`` is the bitset of blocks that contain point ``x``.
    """
    cdef Py_ssize_t n = subsets.shape[0]
    cdef Py_ssize_t t = subsets.shape[1]
    cdef Py_ssize_t words = point_bits.shape[1]
    out = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] res = out
    cdef Py_ssize_t s, w, r
    cdef uint64_t acc
    cdef int64_t total
    if threads < 1:
        threads = 1
    with nogil:
        for s in prange(n, num_threads=threads, schedule="static"):
            total = 0
            for w in range(words):
                acc = point_bits[subsets[s, 0], w]
                for r in range(1, t):
                    acc = acc & point_bits[subsets[s, r], w]
                total = total + __builtin_popcountll(acc)
            res[s] = total
    return out
