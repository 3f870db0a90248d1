"""Bilingual embedding space: loading, cosine, k-NN queries, unit aggregation.

The word-vector text format is the usual one (header ``vocab_count dim``,
then one ``token v1 ... v_dim`` row per word) except that every token is
prefixed with its language as ``lang:token``, marking the single shared
bilingual space.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .corpus import TextualUnit
from .errors import EmbeddingFormatError


class EmbeddingSpace:
    """Immutable (lang, surface) -> dense vector map in one shared space.

    Loaded spaces are bilingual by construction (the loader enforces two
    languages); programmatic construction accepts any entry map, which the
    toy fixtures in the test-suite rely on.
    """

    def __init__(self, entries: Mapping[tuple[str, str], "np.ndarray | list[float]"],
                 *, lowercase_fallback: bool = False, duplicates: int = 0):
        keys = list(entries.keys())
        if keys:
            first = np.asarray(entries[keys[0]], dtype=np.float64)
            dim = first.shape[0] if first.ndim == 1 else 0
        else:
            dim = 0
        if keys and dim == 0:
            raise EmbeddingFormatError("embedding vectors must be 1-dimensional")
        matrix = np.empty((len(keys), dim), dtype=np.float64)
        index = {}
        for row, key in enumerate(keys):
            lang, surface = key
            vec = np.asarray(entries[key], dtype=np.float64)
            if vec.shape != (dim,):
                raise EmbeddingFormatError(
                    f"vector for {lang}:{surface} has {vec.shape[0] if vec.ndim == 1 else '?'} "
                    f"components, expected {dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise EmbeddingFormatError(f"non-finite value in vector for {lang}:{surface}")
            matrix[row] = vec
            index[(lang, surface)] = row
        self._index = index
        self._matrix = matrix
        self._keys = keys
        self.dim = dim
        self.lowercase_fallback = lowercase_fallback
        self.duplicates = duplicates

    def __len__(self):
        return len(self._keys)

    def __contains__(self, key: tuple[str, str]):
        return key in self._index

    @property
    def langs(self) -> frozenset[str]:
        return frozenset(lang for lang, _ in self._keys)

    def lookup(self, lang: str, surface: str) -> np.ndarray | None:
        """Vector for (lang, surface), or None if out of vocabulary.

        With lowercase_fallback enabled, an exact miss retries the
        lowercased surface.
        """
        row = self._index.get((lang, surface))
        if row is None and self.lowercase_fallback:
            row = self._index.get((lang, surface.lower()))
        return self._matrix[row] if row is not None else None

    def vector(self, lang: str, surface: str) -> np.ndarray:
        vec = self.lookup(lang, surface)
        if vec is None:
            raise KeyError(f"{lang}:{surface} not in embedding space")
        return vec

    def items(self):
        """Iterate (lang, surface, vector) in insertion order."""
        for row, (lang, surface) in enumerate(self._keys):
            yield lang, surface, self._matrix[row]


def load_embeddings(path, *, lowercase_fallback: bool = False) -> EmbeddingSpace:
    """Load a ``lang:token``-prefixed word-vector text file.

    Duplicate tokens keep the last occurrence and increment the space's
    ``duplicates`` counter.  The loaded space must contain at least two
    languages.
    """
    path = str(path)
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline()
            fields = header.split()
            if len(fields) != 2:
                raise EmbeddingFormatError(f"{path}:1: header must be 'vocab_count dim', got {header.strip()!r}")
            try:
                declared, dim = int(fields[0]), int(fields[1])
            except ValueError:
                raise EmbeddingFormatError(f"{path}:1: non-integer header {header.strip()!r}") from None
            if dim <= 0:
                raise EmbeddingFormatError(f"{path}:1: dimension must be positive, got {dim}")
            entries: dict[tuple[str, str], np.ndarray] = {}
            duplicates = 0
            for line_no, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split(" ")
                token, values = parts[0], parts[1:]
                if ":" not in token:
                    raise EmbeddingFormatError(f"{path}:{line_no}: token {token!r} lacks a 'lang:' prefix")
                lang, surface = token.split(":", 1)
                if not lang or not surface:
                    raise EmbeddingFormatError(f"{path}:{line_no}: malformed token {token!r}")
                if len(values) != dim:
                    raise EmbeddingFormatError(
                        f"{path}:{line_no}: expected {dim} values for {token!r}, got {len(values)}"
                    )
                try:
                    vec = np.array([float(v) for v in values], dtype=np.float64)
                except ValueError:
                    raise EmbeddingFormatError(f"{path}:{line_no}: non-numeric value for {token!r}") from None
                if not np.all(np.isfinite(vec)):
                    raise EmbeddingFormatError(f"{path}:{line_no}: non-finite value for {token!r}")
                if (lang, surface) in entries:
                    duplicates += 1
                entries[(lang, surface)] = vec
    except OSError as e:
        raise EmbeddingFormatError(f"cannot read embeddings file {path}: {e}") from e

    if not entries:
        raise EmbeddingFormatError(f"{path}: no vectors found")
    space = EmbeddingSpace(entries, lowercase_fallback=lowercase_fallback, duplicates=duplicates)
    if len(space.langs) < 2:
        raise EmbeddingFormatError(f"{path}: bilingual space expected, found languages {sorted(space.langs)}")
    # a header count that disagrees with the actual row count is tolerated:
    # word-vector files in the wild are often sloppy about it
    return space


def cosine(a, b) -> float:
    """Cosine similarity in [-1, 1]; 0.0 when either vector has zero norm."""
    va = np.ascontiguousarray(a, dtype=np.float64)
    vb = np.ascontiguousarray(b, dtype=np.float64)
    if va.ndim != 1 or vb.ndim != 1:
        raise ValueError("cosine expects 1-dimensional vectors")
    if va.shape[0] != vb.shape[0]:
        raise ValueError(f"cosine length mismatch: {va.shape[0]} vs {vb.shape[0]}")
    return _kernels.dense_cosine(va, vb)


def top_k_neighbors(space: EmbeddingSpace, query, k: int,
                    lang_filter: str | None = None,
                    exclude: tuple[str, str] | None = None) -> list[tuple[str, str, float]]:
    """The k entries with highest cosine to the query vector, descending.

    Ties are broken by lexicographic (lang, surface) order for
    reproducibility.  ``exclude`` removes one exact (lang, surface) key,
    typically the query token itself.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(space) == 0:
        raise ValueError("empty embedding space")
    q = np.ascontiguousarray(query, dtype=np.float64)
    if q.shape != (space.dim,):
        raise ValueError(f"query has shape {q.shape}, expected ({space.dim},)")
    scored = []
    for lang, surface, vec in space.items():
        if lang_filter is not None and lang != lang_filter:
            continue
        if exclude is not None and (lang, surface) == exclude:
            continue
        scored.append((lang, surface, _kernels.dense_cosine(q, vec)))
    scored.sort(key=lambda t: (-t[2], t[0], t[1]))
    return scored[:k]


@dataclass(frozen=True)
class UnitVector:
    """Aggregated representation of one textual unit."""

    values: np.ndarray
    n_known: int


def unit_vector(space: EmbeddingSpace, unit: TextualUnit) -> UnitVector:
    """Componentwise sum of the vectors of the unit's in-vocabulary tokens.

    Out-of-vocabulary tokens contribute nothing; an all-OOV unit yields the
    zero vector with n_known = 0.
    """
    values = np.zeros(space.dim, dtype=np.float64)
    n_known = 0
    for tok in unit.tokens:
        vec = space.lookup(unit.lang, tok.surface)
        if vec is not None:
            values += vec
            n_known += 1
    return UnitVector(values, n_known)


def weighted_unit_vector(space: EmbeddingSpace, unit: TextualUnit,
                         weights: Mapping[str, float]) -> UnitVector:
    """Sum of POS-weight-scaled token vectors (the syntactic aggregation).

    ``weights`` maps each universal tag to a nonnegative weight.  With all
    weights equal to 1 this reduces exactly to unit_vector.
    """
    values = np.zeros(space.dim, dtype=np.float64)
    n_known = 0
    for tok in unit.tokens:
        vec = space.lookup(unit.lang, tok.surface)
        if vec is not None:
            w = weights[tok.upos]
            values += w * vec
            n_known += 1
    return UnitVector(values, n_known)
