"""The five cross-language similarity scorers.

Every scorer maps a pair of textual units to a real score where higher
means more similar:

  cl_c3g     character-trigram cosine over normalized strings
  cl_cts_we  concept-bag overlap, bags built from embedding neighbors
  cl_wes     cosine of summed word vectors
  cl_wess    cosine of POS-weighted summed word vectors
  cl_asa     translation-probability alignment score with a length model

Per-pair functions build their features on the fly; ``prepare_scorer``
caches per-unit features for a whole corpus so distance-matrix
construction only runs the pairwise kernels.  Both paths produce
bit-identical scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .corpus import TAG_ORDER, UNIVERSAL_TAGS, AlignedPairCorpus, TextualUnit
from .embeddings import EmbeddingSpace, top_k_neighbors, unit_vector, weighted_unit_vector
from .errors import DictionaryFormatError, MissingResourceError

METHODS = ("cl_c3g", "cl_cts_we", "cl_wes", "cl_wess", "cl_asa")


class PosWeights:
    """Nonnegative weight per universal POS tag (exactly the 12-tag set)."""

    def __init__(self, mapping):
        mapping = dict(mapping)
        extra = set(mapping) - UNIVERSAL_TAGS
        missing = UNIVERSAL_TAGS - set(mapping)
        if extra or missing:
            raise ValueError(
                f"POS weights must cover exactly the 12 universal tags "
                f"(missing: {sorted(missing)}, unexpected: {sorted(extra)})"
            )
        weights = {}
        for tag in TAG_ORDER:
            w = float(mapping[tag])
            if not math.isfinite(w) or w < 0.0:
                raise ValueError(f"weight for tag {tag!r} must be finite and >= 0, got {w}")
            weights[tag] = w
        self._weights = weights

    @classmethod
    def uniform(cls, value: float = 1.0) -> "PosWeights":
        return cls({tag: value for tag in TAG_ORDER})

    @classmethod
    def from_vector(cls, values) -> "PosWeights":
        values = list(values)
        if len(values) != len(TAG_ORDER):
            raise ValueError(f"expected {len(TAG_ORDER)} weights, got {len(values)}")
        return cls(dict(zip(TAG_ORDER, values)))

    def as_vector(self) -> np.ndarray:
        return np.array([self._weights[t] for t in TAG_ORDER], dtype=np.float64)

    def scaled(self, factor: float) -> "PosWeights":
        return PosWeights({t: w * factor for t, w in self._weights.items()})

    def __getitem__(self, tag: str) -> float:
        return self._weights[tag]

    def items(self):
        return self._weights.items()

    def __eq__(self, other):
        return isinstance(other, PosWeights) and self._weights == other._weights

    def __repr__(self):
        return f"PosWeights({self._weights!r})"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for tag in TAG_ORDER:
                fh.write(f"{tag}\t{self._weights[tag]!r}\n")

    @classmethod
    def load(cls, path) -> "PosWeights":
        mapping = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 2:
                    raise ValueError(f"{path}:{line_no}: expected 'tag<TAB>weight', got {line!r}")
                mapping[fields[0]] = float(fields[1])
        return cls(mapping)


@dataclass(frozen=True)
class _DictionaryView:
    """Interned CSR view of a dictionary for the pairwise kernel."""

    src_id: dict[str, int]
    tgt_id: dict[str, int]
    row_starts: np.ndarray
    pair_tgt_ids: np.ndarray
    pair_probs: np.ndarray


class BilingualDictionary:
    """Directional unigram translation table: (src, tgt) -> p(tgt|src)."""

    def __init__(self, table: dict[str, dict[str, float]]):
        if not table:
            raise DictionaryFormatError("empty bilingual dictionary")
        for src, targets in table.items():
            if not targets:
                raise DictionaryFormatError(f"source {src!r} has no translations")
            total = 0.0
            for tgt, p in targets.items():
                if not (0.0 < p <= 1.0):
                    raise DictionaryFormatError(f"p({tgt!r}|{src!r}) = {p} outside (0, 1]")
                total += p
            if total > 1.0 + 1e-6:
                raise DictionaryFormatError(f"probabilities for source {src!r} sum to {total} > 1")
        self._table = {src: dict(tgts) for src, tgts in table.items()}
        self._view: _DictionaryView | None = None

    @property
    def n_pairs(self) -> int:
        return sum(len(t) for t in self._table.values())

    def prob(self, src: str, tgt: str) -> float:
        return self._table.get(src, {}).get(tgt, 0.0)

    def sources(self):
        return self._table.keys()

    def view(self) -> _DictionaryView:
        if self._view is None:
            src_surfaces = sorted(self._table)
            tgt_surfaces = sorted({t for tgts in self._table.values() for t in tgts})
            src_id = {s: i for i, s in enumerate(src_surfaces)}
            tgt_id = {t: i for i, t in enumerate(tgt_surfaces)}
            starts = [0]
            tgt_ids: list[int] = []
            probs: list[float] = []
            for s in src_surfaces:
                row = sorted((tgt_id[t], p) for t, p in self._table[s].items())
                tgt_ids.extend(i for i, _ in row)
                probs.extend(p for _, p in row)
                starts.append(len(tgt_ids))
            self._view = _DictionaryView(
                src_id,
                tgt_id,
                np.array(starts, dtype=np.int64),
                np.array(tgt_ids, dtype=np.int64),
                np.array(probs, dtype=np.float64),
            )
        return self._view


def load_dictionary(path) -> BilingualDictionary:
    """Load a dictionary file (lines: src <TAB> tgt <TAB> probability)."""
    table: dict[str, dict[str, float]] = {}
    path = str(path)
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise DictionaryFormatError(f"{path}:{line_no}: expected 3 tab-separated fields, got {len(fields)}")
            src, tgt, prob_s = fields
            try:
                p = float(prob_s)
            except ValueError:
                raise DictionaryFormatError(f"{path}:{line_no}: non-numeric probability {prob_s!r}") from None
            row = table.setdefault(src, {})
            if tgt in row:
                raise DictionaryFormatError(f"{path}:{line_no}: duplicate pair ({src!r}, {tgt!r})")
            row[tgt] = p
    if not table:
        raise DictionaryFormatError(f"{path}: empty dictionary")
    return BilingualDictionary(table)


@dataclass
class Resources:
    """Everything a scorer might need, loaded once and shared."""

    space: EmbeddingSpace | None = None
    dictionary: BilingualDictionary | None = None
    pos_weights: PosWeights | None = None
    cts_k: int = 10
    cts_lang_filter: str | None = None
    cts_jaccard: bool = False
    asa_mu: float = 1.0
    asa_sigma: float = 0.3


# ---------------------------------------------------------------------------
# CL-C3G

def c3g_normalize(unit: TextualUnit) -> str:
    """Lowercase, keep letters/digits, drop the rest, join tokens by single spaces."""
    cleaned = []
    for tok in unit.tokens:
        kept = "".join(c for c in tok.surface.lower() if c.isalnum())
        if kept:
            cleaned.append(kept)
    return " ".join(cleaned)


def _trigram_counts(s: str) -> dict[str, int]:
    counts: dict[str, int] = {}
    for i in range(len(s) - 2):
        g = s[i : i + 3]
        counts[g] = counts.get(g, 0) + 1
    return counts


def _sparse_features(counts: dict[str, int], index: dict[str, int]):
    grams = sorted(counts)
    ids = np.array([index[g] for g in grams], dtype=np.int64)
    vals = np.array([float(counts[g]) for g in grams], dtype=np.float64)
    return ids, vals


def cl_c3g(ux: TextualUnit, uy: TextualUnit) -> float:
    """Cosine over character-trigram count vectors of normalized strings."""
    ca = _trigram_counts(c3g_normalize(ux))
    cb = _trigram_counts(c3g_normalize(uy))
    if not ca or not cb:
        return 0.0
    index = {g: i for i, g in enumerate(sorted(set(ca) | set(cb)))}
    ids_a, vals_a = _sparse_features(ca, index)
    ids_b, vals_b = _sparse_features(cb, index)
    return _kernels.sparse_cosine(ids_a, vals_a, ids_b, vals_b)


# ---------------------------------------------------------------------------
# CL-CTS-WE

def concept_bag(space: EmbeddingSpace, lang: str, surface: str, k: int = 10,
                lang_filter: str | None = None) -> frozenset[str]:
    """The word itself plus its top-k neighbor surfaces (language markers stripped).

    Out-of-vocabulary words have an empty bag.
    """
    vec = space.lookup(lang, surface)
    if vec is None:
        return frozenset()
    neighbors = top_k_neighbors(space, vec, k, lang_filter=lang_filter, exclude=(lang, surface))
    return frozenset([surface]).union(s for _, s, _ in neighbors)


def _unit_bag(space, unit, k, lang_filter, cache=None) -> frozenset[str]:
    out: set[str] = set()
    for tok in unit.tokens:
        key = (unit.lang, tok.surface)
        if cache is not None and key in cache:
            bag = cache[key]
        else:
            bag = concept_bag(space, unit.lang, tok.surface, k, lang_filter)
            if cache is not None:
                cache[key] = bag
        out |= bag
    return frozenset(out)


def _bag_overlap(bx: frozenset[str], by: frozenset[str], jaccard: bool) -> float:
    if not bx or not by:
        return 0.0
    index = {s: i for i, s in enumerate(sorted(bx | by))}
    a = np.array(sorted(index[s] for s in bx), dtype=np.int64)
    b = np.array(sorted(index[s] for s in by), dtype=np.int64)
    return _kernels.set_overlap_ratio(a, b, jaccard)


def cl_cts_we(space: EmbeddingSpace, ux: TextualUnit, uy: TextualUnit, k: int = 10,
              lang_filter: str | None = None, jaccard: bool = False) -> float:
    """Concept-bag overlap: |Bx ∩ By| / max(|Bx|, |By|) (or Jaccard).

    A unit's bag is the union of its tokens' concept bags; neighbor search
    spans both languages unless restricted by ``lang_filter``.
    """
    cache: dict = {}
    bx = _unit_bag(space, ux, k, lang_filter, cache)
    by = _unit_bag(space, uy, k, lang_filter, cache)
    return _bag_overlap(bx, by, jaccard)


# ---------------------------------------------------------------------------
# CL-WES / CL-WESS

def cl_wes(space: EmbeddingSpace, ux: TextualUnit, uy: TextualUnit) -> float:
    """Cosine between the summed word vectors of the two units."""
    vx = unit_vector(space, ux)
    vy = unit_vector(space, uy)
    return _kernels.dense_cosine(vx.values, vy.values)


def cl_wess(space: EmbeddingSpace, ux: TextualUnit, uy: TextualUnit,
            weights: PosWeights) -> float:
    """Cosine between POS-weighted summed word vectors of the two units."""
    vx = weighted_unit_vector(space, ux, weights)
    vy = weighted_unit_vector(space, uy, weights)
    return _kernels.dense_cosine(vx.values, vy.values)


# ---------------------------------------------------------------------------
# CL-ASA

def cl_asa(dictionary: BilingualDictionary, ux: TextualUnit, uy: TextualUnit,
           mu: float = 1.0, sigma: float = 0.3) -> float:
    """Translation-probability score with a Gaussian length-ratio factor.

    Directional: ux must be on the dictionary's source side.  The raw
    translation mass sum(p(y|x)) is normalized by |ux|*|uy| and damped by
    exp(-((|uy|/|ux| - mu) / sigma)^2 / 2).
    """
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    view = dictionary.view()
    src_ids = np.array([view.src_id.get(t.surface, -1) for t in ux.tokens], dtype=np.int64)
    tgt_ids = np.array([view.tgt_id.get(t.surface, -1) for t in uy.tokens], dtype=np.int64)
    total = _kernels.asa_translation_total(src_ids, tgt_ids, view.row_starts,
                                           view.pair_tgt_ids, view.pair_probs)
    t = total / (len(ux) * len(uy))
    z = (len(uy) / len(ux) - mu) / sigma
    return t * math.exp(-0.5 * z * z)


# ---------------------------------------------------------------------------
# Dispatch

_REQUIRED = {
    "cl_c3g": (),
    "cl_cts_we": ("space",),
    "cl_wes": ("space",),
    "cl_wess": ("space", "pos_weights"),
    "cl_asa": ("dictionary",),
}


def _require(method: str, resources: Resources):
    if method not in _REQUIRED:
        raise ValueError(f"unknown method {method!r} (known: {', '.join(METHODS)})")
    for attr in _REQUIRED[method]:
        if getattr(resources, attr) is None:
            raise MissingResourceError(f"method {method!r} requires resource {attr!r}")


def score_pair(method: str, resources: Resources, ux: TextualUnit, uy: TextualUnit) -> float:
    """Uniform dispatch over the five scorers; deterministic given identical inputs."""
    _require(method, resources)
    if method == "cl_c3g":
        return cl_c3g(ux, uy)
    if method == "cl_cts_we":
        return cl_cts_we(resources.space, ux, uy, k=resources.cts_k,
                         lang_filter=resources.cts_lang_filter, jaccard=resources.cts_jaccard)
    if method == "cl_wes":
        return cl_wes(resources.space, ux, uy)
    if method == "cl_wess":
        return cl_wess(resources.space, ux, uy, resources.pos_weights)
    return cl_asa(resources.dictionary, ux, uy, mu=resources.asa_mu, sigma=resources.asa_sigma)


# ---------------------------------------------------------------------------
# Prepared scorers (distance-matrix hot path)

class PreparedScorer:
    """Per-corpus feature cache; scores (source i, target j) cells via kernels."""

    method: str

    def score(self, i: int, j: int) -> float:
        raise NotImplementedError

    def score_row(self, i: int, cols) -> np.ndarray:
        out = np.empty(len(cols), dtype=np.float64)
        for pos, j in enumerate(cols):
            out[pos] = self.score(i, int(j))
        return out


class _PreparedC3G(PreparedScorer):
    method = "cl_c3g"

    def __init__(self, corpus: AlignedPairCorpus):
        src_counts = [_trigram_counts(c3g_normalize(u)) for u in corpus.source_units]
        tgt_counts = [_trigram_counts(c3g_normalize(u)) for u in corpus.target_units]
        vocab = sorted(set().union(*src_counts, *tgt_counts)) if (src_counts or tgt_counts) else []
        index = {g: i for i, g in enumerate(vocab)}
        self._src = [_sparse_features(c, index) for c in src_counts]
        self._tgt = [_sparse_features(c, index) for c in tgt_counts]

    def score(self, i, j):
        ids_a, vals_a = self._src[i]
        ids_b, vals_b = self._tgt[j]
        return _kernels.sparse_cosine(ids_a, vals_a, ids_b, vals_b)


class _PreparedCTS(PreparedScorer):
    method = "cl_cts_we"

    def __init__(self, corpus, space, k, lang_filter, jaccard):
        cache: dict = {}
        src_bags = [_unit_bag(space, u, k, lang_filter, cache) for u in corpus.source_units]
        tgt_bags = [_unit_bag(space, u, k, lang_filter, cache) for u in corpus.target_units]
        vocab = sorted(set().union(*src_bags, *tgt_bags)) if (src_bags or tgt_bags) else []
        index = {s: i for i, s in enumerate(vocab)}
        self._src = [np.array(sorted(index[s] for s in bag), dtype=np.int64) for bag in src_bags]
        self._tgt = [np.array(sorted(index[s] for s in bag), dtype=np.int64) for bag in tgt_bags]
        self._jaccard = jaccard

    def score(self, i, j):
        return _kernels.set_overlap_ratio(self._src[i], self._tgt[j], self._jaccard)


class _PreparedDense(PreparedScorer):
    def __init__(self, corpus, space, weights: PosWeights | None):
        if weights is None:
            self.method = "cl_wes"
            agg = lambda u: unit_vector(space, u).values
        else:
            self.method = "cl_wess"
            agg = lambda u: weighted_unit_vector(space, u, weights).values
        self._src = [agg(u) for u in corpus.source_units]
        self._tgt = [agg(u) for u in corpus.target_units]

    def score(self, i, j):
        return _kernels.dense_cosine(self._src[i], self._tgt[j])


class _PreparedASA(PreparedScorer):
    method = "cl_asa"

    def __init__(self, corpus, dictionary, mu, sigma):
        if sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        view = dictionary.view()
        self._view = view
        self._src_ids = [
            np.array([view.src_id.get(t.surface, -1) for t in u.tokens], dtype=np.int64)
            for u in corpus.source_units
        ]
        self._tgt_ids = [
            np.array([view.tgt_id.get(t.surface, -1) for t in u.tokens], dtype=np.int64)
            for u in corpus.target_units
        ]
        self._src_len = [len(u) for u in corpus.source_units]
        self._tgt_len = [len(u) for u in corpus.target_units]
        self._mu = mu
        self._sigma = sigma

    def score(self, i, j):
        view = self._view
        total = _kernels.asa_translation_total(self._src_ids[i], self._tgt_ids[j],
                                               view.row_starts, view.pair_tgt_ids, view.pair_probs)
        t = total / (self._src_len[i] * self._tgt_len[j])
        z = (self._tgt_len[j] / self._src_len[i] - self._mu) / self._sigma
        return t * math.exp(-0.5 * z * z)


def prepare_scorer(method: str, resources: Resources, corpus: AlignedPairCorpus) -> PreparedScorer:
    """Build the cached scorer used for distance-matrix construction.

    Scores agree bit-for-bit with the per-pair functions.
    """
    _require(method, resources)
    if method == "cl_c3g":
        return _PreparedC3G(corpus)
    if method == "cl_cts_we":
        return _PreparedCTS(corpus, resources.space, resources.cts_k,
                            resources.cts_lang_filter, resources.cts_jaccard)
    if method == "cl_wes":
        return _PreparedDense(corpus, resources.space, None)
    if method == "cl_wess":
        return _PreparedDense(corpus, resources.space, resources.pos_weights)
    return _PreparedASA(corpus, resources.dictionary, resources.asa_mu, resources.asa_sigma)
