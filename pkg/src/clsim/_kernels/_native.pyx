# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pairwise scoring kernels.

Mirror of ``_fallback.py``: same operations in the same order, so results
are bit-identical across backends (built with -ffp-contract=off).
Keep the two files in sync.
"""

from libc.math cimport sqrt
from libc.stdint cimport int64_t

BACKEND = "native"


cpdef double dense_cosine(const double[::1] a, const double[::1] b):
    """Cosine of two equal-length float64 vectors; 0.0 if either has zero norm."""
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double dot = 0.0, na = 0.0, nb = 0.0, c
    for i in range(n):
        dot += a[i] * b[i]
        na += a[i] * a[i]
        nb += b[i] * b[i]
    if na == 0.0 or nb == 0.0:
        return 0.0
    c = dot / (sqrt(na) * sqrt(nb))
    if c > 1.0:
        return 1.0
    if c < -1.0:
        return -1.0
    return c


cpdef double sparse_cosine(const int64_t[::1] ids_a, const double[::1] counts_a,
                           const int64_t[::1] ids_b, const double[::1] counts_b):
    """Cosine of two sparse count vectors given as (sorted ids, counts) pairs."""
    cdef Py_ssize_t i, j, la = ids_a.shape[0], lb = ids_b.shape[0]
    cdef double na = 0.0, nb = 0.0, dot = 0.0, c
    cdef int64_t ga, gb
    for i in range(la):
        na += counts_a[i] * counts_a[i]
    for j in range(lb):
        nb += counts_b[j] * counts_b[j]
    if na == 0.0 or nb == 0.0:
        return 0.0
    i = 0
    j = 0
    while i < la and j < lb:
        ga = ids_a[i]
        gb = ids_b[j]
        if ga == gb:
            dot += counts_a[i] * counts_b[j]
            i += 1
            j += 1
        elif ga < gb:
            i += 1
        else:
            j += 1
    c = dot / (sqrt(na) * sqrt(nb))
    if c > 1.0:
        return 1.0
    if c < -1.0:
        return -1.0
    return c


cpdef double set_overlap_ratio(const int64_t[::1] a, const int64_t[::1] b, bint jaccard):
    """Overlap of two sorted unique int id sets: |a∩b|/max(|a|,|b|), or Jaccard."""
    cdef Py_ssize_t i = 0, j = 0, la = a.shape[0], lb = b.shape[0]
    cdef Py_ssize_t inter = 0
    cdef int64_t x, y
    if la == 0 or lb == 0:
        return 0.0
    while i < la and j < lb:
        x = a[i]
        y = b[j]
        if x == y:
            inter += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    if jaccard:
        return inter / <double>(la + lb - inter)
    return inter / <double>(la if la > lb else lb)


cdef Py_ssize_t _bisect_left(const int64_t[::1] arr, int64_t value,
                             Py_ssize_t lo, Py_ssize_t hi):
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) // 2
        if arr[mid] < value:
            lo = mid + 1
        else:
            hi = mid
    return lo


cpdef double asa_translation_total(const int64_t[::1] src_ids, const int64_t[::1] tgt_ids,
                                   const int64_t[::1] row_starts,
                                   const int64_t[::1] pair_tgt_ids,
                                   const double[::1] pair_probs):
    """Sum of p(tgt|src) over all token pairs of two units (see _fallback.py)."""
    cdef Py_ssize_t i, j, lo, hi, pos
    cdef int64_t s, t
    cdef double total = 0.0
    for i in range(src_ids.shape[0]):
        s = src_ids[i]
        if s < 0:
            continue
        lo = <Py_ssize_t>row_starts[s]
        hi = <Py_ssize_t>row_starts[s + 1]
        for j in range(tgt_ids.shape[0]):
            t = tgt_ids[j]
            if t < 0:
                continue
            pos = _bisect_left(pair_tgt_ids, t, lo, hi)
            if pos < hi and pair_tgt_ids[pos] == t:
                total += pair_probs[pos]
    return total
