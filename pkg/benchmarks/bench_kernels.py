"""Time the compiled scoring kernels against the pure-Python fallback.

Runs each kernel on realistic inputs with both backends, checks that the
results are bit-identical, and prints per-call times plus the speedup.

    python3 benchmarks/bench_kernels.py [--calls N] [--repeat R]
"""

import argparse
from time import perf_counter

import numpy as np

from clsim._kernels import _fallback

try:
    from clsim._kernels import _native
except ImportError:
    _native = None


def bench(fn, args_list, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = perf_counter()
        for args in args_list:
            fn(*args)
        best = min(best, perf_counter() - start)
    return best / len(args_list)


def dense_inputs(rng, calls):
    return [(rng.normal(size=300), rng.normal(size=300)) for _ in range(calls)]


def sparse_inputs(rng, calls):
    out = []
    for _ in range(calls):
        pair = []
        for _ in range(2):
            ids = np.unique(rng.integers(0, 5000, size=80)).astype(np.int64)
            counts = rng.integers(1, 6, size=len(ids)).astype(np.float64)
            pair.extend([ids, counts])
        out.append(tuple(pair))
    return out


def overlap_inputs(rng, calls):
    out = []
    for _ in range(calls):
        a = np.unique(rng.integers(0, 2000, size=40)).astype(np.int64)
        b = np.unique(rng.integers(0, 2000, size=40)).astype(np.int64)
        out.append((a, b, False))
    return out


def asa_inputs(rng, calls):
    n_src = 1000
    per_row = rng.integers(1, 8, size=n_src)
    row_starts = np.zeros(n_src + 1, dtype=np.int64)
    np.cumsum(per_row, out=row_starts[1:])
    n_pairs = int(row_starts[-1])
    pair_tgt_ids = np.empty(n_pairs, dtype=np.int64)
    for s in range(n_src):
        lo, hi = row_starts[s], row_starts[s + 1]
        pair_tgt_ids[lo:hi] = np.sort(rng.choice(3000, size=hi - lo, replace=False))
    pair_probs = rng.uniform(0.01, 0.5, size=n_pairs)
    out = []
    for _ in range(calls):
        src = rng.integers(-1, n_src, size=20).astype(np.int64)
        tgt = rng.integers(-1, 3000, size=20).astype(np.int64)
        out.append((src, tgt, row_starts, pair_tgt_ids, pair_probs))
    return out


KERNELS = [
    ("dense_cosine", dense_inputs),
    ("sparse_cosine", sparse_inputs),
    ("set_overlap_ratio", overlap_inputs),
    ("asa_translation_total", asa_inputs),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--calls", type=int, default=2000,
                        help="calls per kernel per round (default 2000)")
    parser.add_argument("--repeat", type=int, default=5,
                        help="rounds; the best one counts (default 5)")
    args = parser.parse_args()

    if _native is None:
        print("compiled extension not built; only the python backend is available")
        return

    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'python':>12}{'native':>12}{'speedup':>10}")
    for name, make_inputs in KERNELS:
        inputs = make_inputs(rng, args.calls)
        py_fn = getattr(_fallback, name)
        nat_fn = getattr(_native, name)
        for a in inputs[:50]:
            if py_fn(*a) != nat_fn(*a):
                raise SystemExit(f"{name}: backends disagree on {a!r}")
        t_py = bench(py_fn, inputs, args.repeat)
        t_nat = bench(nat_fn, inputs, args.repeat)
        print(f"{name:<24}{t_py * 1e6:>10.2f}us{t_nat * 1e6:>10.2f}us"
              f"{t_py / t_nat:>9.1f}x")


if __name__ == "__main__":
    main()
