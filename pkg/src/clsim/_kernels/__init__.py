"""Scoring kernels: compiled extension when available, pure Python otherwise.

The active backend is chosen once at import time.  Set CLSIM_PURE_PYTHON=1
to force the fallback even when the extension is built.  Both backends are
bit-identical; see ``benchmarks/bench_kernels.py`` for the speed difference.
"""

import os

if os.environ.get("CLSIM_PURE_PYTHON") == "1":
    from . import _fallback as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

BACKEND = _impl.BACKEND
dense_cosine = _impl.dense_cosine
sparse_cosine = _impl.sparse_cosine
set_overlap_ratio = _impl.set_overlap_ratio
asa_translation_total = _impl.asa_translation_total


def backend() -> str:
    """Name of the active kernel backend: "native" or "python"."""
    return BACKEND
