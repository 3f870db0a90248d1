"""Pure-Python pairwise scoring kernels.

Mirror of the compiled kernels in ``_native.pyx``.  Both backends perform
the same floating-point operations in the same order, so their results are
bit-identical (the extension is compiled with FMA contraction disabled).
Keep the two files in sync.
"""

from bisect import bisect_left
from math import sqrt

BACKEND = "python"


def _as_list(x):
    # ndarray scalars are slow to iterate; plain floats/ints are not
    return x.tolist() if hasattr(x, "tolist") else list(x)


def dense_cosine(a, b):
    """Cosine of two equal-length float64 vectors; 0.0 if either has zero norm."""
    a = _as_list(a)
    b = _as_list(b)
    dot = 0.0
    na = 0.0
    nb = 0.0
    for x, y in zip(a, b):
        dot += x * y
        na += x * x
        nb += y * y
    if na == 0.0 or nb == 0.0:
        return 0.0
    c = dot / (sqrt(na) * sqrt(nb))
    if c > 1.0:
        return 1.0
    if c < -1.0:
        return -1.0
    return c


def sparse_cosine(ids_a, counts_a, ids_b, counts_b):
    """Cosine of two sparse count vectors given as (sorted ids, counts) pairs."""
    ids_a = _as_list(ids_a)
    counts_a = _as_list(counts_a)
    ids_b = _as_list(ids_b)
    counts_b = _as_list(counts_b)
    na = 0.0
    for c in counts_a:
        na += c * c
    nb = 0.0
    for c in counts_b:
        nb += c * c
    if na == 0.0 or nb == 0.0:
        return 0.0
    dot = 0.0
    i = j = 0
    la = len(ids_a)
    lb = len(ids_b)
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


def set_overlap_ratio(a, b, jaccard):
    """Overlap of two sorted unique int id sets: |a∩b|/max(|a|,|b|), or Jaccard."""
    a = _as_list(a)
    b = _as_list(b)
    la = len(a)
    lb = len(b)
    if la == 0 or lb == 0:
        return 0.0
    inter = 0
    i = j = 0
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
        return inter / (la + lb - inter)
    return inter / (la if la > lb else lb)


def asa_translation_total(src_ids, tgt_ids, row_starts, pair_tgt_ids, pair_probs):
    """Sum of p(tgt|src) over all token pairs of two units.

    ``src_ids``/``tgt_ids`` are per-token dictionary ids (-1 for tokens absent
    from the dictionary).  ``row_starts``/``pair_tgt_ids``/``pair_probs`` is a
    CSR view of the dictionary with target ids sorted within each source row.
    """
    src_ids = _as_list(src_ids)
    tgt_ids = _as_list(tgt_ids)
    row_starts = _as_list(row_starts)
    pair_tgt_ids = _as_list(pair_tgt_ids)
    pair_probs = _as_list(pair_probs)
    total = 0.0
    for s in src_ids:
        if s < 0:
            continue
        lo = row_starts[s]
        hi = row_starts[s + 1]
        for t in tgt_ids:
            if t < 0:
                continue
            pos = bisect_left(pair_tgt_ids, t, lo, hi)
            if pos < hi and pair_tgt_ids[pos] == t:
                total += pair_probs[pos]
    return total
