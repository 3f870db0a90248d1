"""Shared builders for synthetic spaces, corpora, and matrices."""

import numpy as np
import pytest

from clsim import (
    AlignedPair,
    AlignedPairCorpus,
    DistanceMatrix,
    EmbeddingSpace,
    TaggedToken,
    TextualUnit,
)
from clsim.corpus import TAG_ORDER

WORDS = [
    ("cat", "chat"), ("dog", "chien"), ("house", "maison"), ("tree", "arbre"),
    ("car", "voiture"), ("apple", "pomme"), ("sky", "ciel"), ("book", "livre"),
    ("city", "ville"), ("water", "eau"), ("bird", "oiseau"), ("bread", "pain"),
    ("sun", "soleil"), ("moon", "lune"), ("road", "route"), ("door", "porte"),
]


def make_unit(uid, lang, words, tags=None, granularity="chunk"):
    if tags is None:
        tags = ["NOUN"] * len(words)
    tokens = tuple(TaggedToken(w, t) for w, t in zip(words, tags))
    return TextualUnit(uid, lang, granularity, tokens)


def make_space(dim=8, seed=0, noise=0.05, words=None):
    """Bilingual space where each fr vector is its en twin plus noise."""
    rng = np.random.default_rng(seed)
    entries = {}
    for en, fr in words or WORDS:
        v = rng.normal(size=dim)
        entries[("en", en)] = v
        entries[("fr", fr)] = v + noise * rng.normal(size=dim)
    return EmbeddingSpace(entries)


def make_corpus(n_pairs=8, unit_len=4, seed=0, name="synthetic", granularity="chunk",
                words=None, tags=None):
    """Aligned en-fr corpus whose pair i uses word window i..i+unit_len."""
    words = words or WORDS
    rng = np.random.default_rng(seed)
    pairs = []
    for i in range(n_pairs):
        picks = rng.integers(0, len(words), size=unit_len)
        en_words = [words[j][0] for j in picks]
        fr_words = [words[j][1] for j in picks]
        unit_tags = list(tags) if tags else [TAG_ORDER[j % len(TAG_ORDER)] for j in picks]
        src = make_unit(f"p{i}", "en", en_words, unit_tags, granularity)
        tgt = make_unit(f"p{i}", "fr", fr_words, unit_tags, granularity)
        pairs.append(AlignedPair(src, tgt))
    return AlignedPairCorpus(name, tuple(pairs))


def make_matrix(n=6, m=8, seed=0, method="test", scores=None, col_units=None):
    """A DistanceMatrix with arbitrary scores, gold in column 0."""
    rng = np.random.default_rng(seed)
    if col_units is None:
        col_units = np.empty((n, m), dtype=np.int64)
        col_units[:, 0] = np.arange(n)
        if m > 1:
            col_units[:, 1:] = rng.integers(0, n, size=(n, m - 1))
    if scores is None:
        scores = rng.random((n, m))
    return DistanceMatrix(method, seed, np.asarray(scores, dtype=np.float64),
                          np.asarray(col_units, dtype=np.int64),
                          np.zeros(n, dtype=np.int64))


def separable_matrix(n=6, m=8, seed=0, method="test"):
    """Gold-content cells way above everything else."""
    rng = np.random.default_rng(seed)
    mat = make_matrix(n, m, seed, method)
    scores = rng.uniform(0.0, 0.4, size=(n, m))
    relevant = mat.col_units == np.arange(n)[:, None]
    scores[relevant] = rng.uniform(0.8, 1.0, size=int(relevant.sum()))
    return DistanceMatrix(method, seed, scores, mat.col_units, mat.gold_col)


@pytest.fixture
def space():
    return make_space()


@pytest.fixture
def corpus():
    return make_corpus()
