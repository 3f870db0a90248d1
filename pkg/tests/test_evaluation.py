"""Distance matrices, threshold sweeps, folds, intervals, histograms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clsim import (
    DistanceMatrix,
    FoldResult,
    MissingResourceError,
    ReportRow,
    Resources,
    build_fold_matrices,
    build_matrix,
    confidence_interval,
    format_folds,
    format_histogram,
    format_report,
    histogram,
    prf,
    run_folds,
    score_pair,
    summarize,
    sweep_threshold,
)
from clsim.evaluation import TUNING_FOLDS
from clsim.embeddings import EmbeddingSpace

from conftest import make_corpus, make_matrix, make_unit, separable_matrix

# chi-square critical value, df=4, alpha=0.001
CHI2_CRIT_DF4 = 18.467


def hand_matrix(scores, col_units, gold_col=None, method="test", seed=0):
    scores = np.asarray(scores, dtype=np.float64)
    col_units = np.asarray(col_units, dtype=np.int64)
    if gold_col is None:
        gold_col = np.zeros(scores.shape[0], dtype=np.int64)
    return DistanceMatrix(method, seed, scores, col_units,
                          np.asarray(gold_col, dtype=np.int64))


class TestDistanceMatrix:
    def test_shape_validation(self):
        with pytest.raises(ValueError, match="equal-shape"):
            hand_matrix([[0.5, 0.5]], [[0]])
        with pytest.raises(ValueError, match="one entry per row"):
            hand_matrix([[0.5]], [[0]], gold_col=[0, 0])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            hand_matrix([[float("nan")]], [[0]])

    def test_gold_col_must_hit_own_unit(self):
        with pytest.raises(ValueError, match="own target"):
            hand_matrix([[0.5, 0.5]], [[1, 0]], gold_col=[0])

    def test_relevant_counts_duplicate_gold_picks(self):
        mat = hand_matrix([[0.9, 0.8, 0.1], [0.7, 0.2, 0.6]],
                          [[0, 0, 1], [1, 0, 1]], gold_col=[0, 0])
        assert mat.relevant().tolist() == [[True, True, False], [True, False, True]]
        assert (mat.n_rows, mat.n_cols) == (2, 3)


class TestBuildMatrix:
    def test_single_pair_m1(self):
        corpus = make_corpus(n_pairs=1, unit_len=3, seed=2)
        mat = build_matrix("cl_c3g", Resources(), corpus, m=1, seed=0)
        assert mat.scores.shape == (1, 1)
        expected = score_pair("cl_c3g", Resources(), corpus.source_units[0],
                              corpus.target_units[0])
        assert mat.scores[0, 0] == expected
        assert mat.gold_col.tolist() == [0]

    def test_deterministic(self):
        corpus = make_corpus(n_pairs=5, unit_len=3, seed=1)
        a = build_matrix("cl_c3g", Resources(), corpus, m=3, seed=42)
        b = build_matrix("cl_c3g", Resources(), corpus, m=3, seed=42)
        assert np.array_equal(a.scores, b.scores)
        assert np.array_equal(a.col_units, b.col_units)
        c = build_matrix("cl_c3g", Resources(), corpus, m=3, seed=43)
        assert not np.array_equal(a.col_units, c.col_units)

    def test_gold_in_column_zero(self):
        corpus = make_corpus(n_pairs=4, unit_len=3, seed=5)
        mat = build_matrix("cl_c3g", Resources(), corpus, m=6, seed=1)
        assert np.array_equal(mat.col_units[:, 0], np.arange(4))
        for i in range(4):
            assert mat.scores[i, 0] == score_pair(
                "cl_c3g", Resources(), corpus.source_units[i], corpus.target_units[i])

    def test_sampling_is_uniform(self):
        corpus = make_corpus(n_pairs=5, unit_len=2, seed=3)
        mat = build_matrix("cl_c3g", Resources(), corpus, m=1000, seed=11)
        sampled = mat.col_units[:, 1:].ravel()
        counts = np.bincount(sampled, minlength=5)
        expected = len(sampled) / 5.0
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < CHI2_CRIT_DF4

    def test_m_below_one(self):
        with pytest.raises(ValueError, match="m must be"):
            build_matrix("cl_c3g", Resources(), make_corpus(n_pairs=2), m=0)

    def test_missing_resource(self):
        with pytest.raises(MissingResourceError):
            build_matrix("cl_wes", Resources(), make_corpus(n_pairs=2), m=2)


class TestPrf:
    def test_retrieve_all_duplicate_free(self):
        # distractors cycle through the other units, so exactly N relevant cells
        n, m = 5, 4
        col_units = [[(i + d) % n for d in range(m)] for i in range(n)]
        mat = hand_matrix(np.random.default_rng(0).random((n, m)), col_units)
        p, r, f1 = prf(mat, float("-inf"))
        assert r == 1.0
        assert p == n / (n * m)

    def test_retrieve_all_with_duplicates(self):
        mat = hand_matrix([[0.9, 0.8, 0.1], [0.7, 0.2, 0.6]],
                          [[0, 0, 1], [1, 0, 1]], gold_col=[0, 0])
        p, r, f1 = prf(mat, float("-inf"))
        assert r == 1.0
        assert p == 4 / 6

    def test_retrieve_none(self):
        mat = make_matrix(n=3, m=4, seed=0)
        assert prf(mat, 2.0) == (0.0, 0.0, 0.0)

    def test_hand_2x2(self):
        mat = hand_matrix([[0.9, 0.1], [0.4, 0.8]], [[0, 1], [0, 1]], gold_col=[0, 1])
        assert prf(mat, 0.5) == (1.0, 1.0, 1.0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.floats(-0.5, 1.5))
    def test_ranges_and_harmonic_bound(self, seed, threshold):
        mat = make_matrix(n=5, m=7, seed=seed)
        p, r, f1 = prf(mat, threshold)
        for v in (p, r, f1):
            assert 0.0 <= v <= 1.0
        assert f1 <= max(p, r) + 1e-15


class TestSweep:
    def test_separable_hits_one(self):
        mat = separable_matrix(n=6, m=9, seed=4)
        threshold, f1 = sweep_threshold(mat)
        assert f1 == 1.0
        assert prf(mat, threshold) == (1.0, 1.0, 1.0)

    def test_all_equal_scores(self):
        mat = make_matrix(n=4, m=6, seed=2, scores=np.full((4, 6), 0.3))
        threshold, f1 = sweep_threshold(mat)
        n_rel = int(mat.relevant().sum())
        p = n_rel / (4 * 6)
        assert threshold == 0.3
        assert f1 == pytest.approx(2 * p / (p + 1.0))

    def test_matches_threshold_grid(self):
        rng = np.random.default_rng(7)
        for trial in range(5):
            mat = make_matrix(n=10, m=10, seed=int(rng.integers(1 << 30)))
            threshold, best = sweep_threshold(mat)
            lo, hi = mat.scores.min(), mat.scores.max()
            grid_best = max(prf(mat, t)[2] for t in np.linspace(lo, hi, 10_000))
            assert best >= grid_best
            assert prf(mat, threshold)[2] == best

    def test_tie_takes_larger_threshold(self):
        # f1 = 2/3 at both 0.9 (p=1, r=1/2) and 0.2 (p=1/2, r=1)
        mat = hand_matrix([[0.9, 0.2, 0.5, 0.5]], [[0, 0, 1, 1]])
        threshold, f1 = sweep_threshold(mat)
        assert threshold == 0.9
        assert f1 == pytest.approx(2.0 / 3.0)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_optimal_over_random_probes(self, seed):
        mat = make_matrix(n=6, m=8, seed=seed)
        _, best = sweep_threshold(mat)
        rng = np.random.default_rng(seed + 1)
        probes = rng.uniform(mat.scores.min() - 0.1, mat.scores.max() + 0.1, size=200)
        assert all(prf(mat, t)[2] <= best + 1e-15 for t in probes)

    def test_empty_matrix(self):
        mat = DistanceMatrix("t", 0, np.empty((0, 0)), np.empty((0, 0), dtype=np.int64),
                             np.empty(0, dtype=np.int64))
        with pytest.raises(ValueError, match="empty"):
            sweep_threshold(mat)


def orthogonal_setup(n_pairs=4):
    """Each pair built from its own private basis vectors: cl_wes separates it."""
    dim = 2 * n_pairs
    entries = {}
    words = []
    for i in range(dim):
        v = np.zeros(dim)
        v[i] = 1.0
        entries[("en", f"w{i}")] = v
        entries[("fr", f"v{i}")] = v
        words.append((f"w{i}", f"v{i}"))
    pairs = []
    from clsim import AlignedPair

    for i in range(n_pairs):
        en = [f"w{2 * i}", f"w{2 * i + 1}"]
        fr = [f"v{2 * i}", f"v{2 * i + 1}"]
        pairs.append(AlignedPair(make_unit(f"p{i}", "en", en),
                                 make_unit(f"p{i}", "fr", fr)))
    from clsim import AlignedPairCorpus

    return EmbeddingSpace(entries), AlignedPairCorpus("orthogonal", tuple(pairs))


class TestFolds:
    def test_single_fold_composition(self):
        corpus = make_corpus(n_pairs=4, unit_len=3, seed=6)
        res = Resources()
        results = run_folds("cl_c3g", res, corpus, folds=1, m=5, base_seed=9)
        assert len(results) == 1
        mat = build_matrix("cl_c3g", res, corpus, m=5, seed=9)
        threshold, _ = sweep_threshold(mat)
        p, r, f1 = prf(mat, threshold)
        assert results[0] == FoldResult(0, threshold, p, r, f1, True)

    def test_deterministic(self):
        corpus = make_corpus(n_pairs=4, unit_len=3, seed=6)
        a = run_folds("cl_c3g", Resources(), corpus, folds=4, m=6, base_seed=1)
        b = run_folds("cl_c3g", Resources(), corpus, folds=4, m=6, base_seed=1)
        assert a == b

    def test_fold_seed_offsets(self):
        corpus = make_corpus(n_pairs=4, unit_len=3, seed=6)
        mats = build_fold_matrices("cl_c3g", Resources(), corpus, folds=3, m=6, base_seed=10)
        assert [m.seed for m in mats] == [10, 11, 12]
        direct = build_matrix("cl_c3g", Resources(), corpus, m=6, seed=11)
        assert np.array_equal(mats[1].scores, direct.scores)

    def test_tuning_flags(self):
        corpus = make_corpus(n_pairs=3, unit_len=3, seed=0)
        results = run_folds("cl_c3g", Resources(), corpus, folds=5, m=4, base_seed=0)
        assert [f.tuning for f in results] == [True, True, False, False, False]
        assert TUNING_FOLDS == 2

    def test_separable_corpus_scores_one(self):
        space, corpus = orthogonal_setup(n_pairs=4)
        results = run_folds("cl_wes", Resources(space=space), corpus,
                            folds=4, m=20, base_seed=0)
        assert all(f.f1 == 1.0 for f in results)

    def test_folds_below_one(self):
        with pytest.raises(ValueError, match="folds"):
            run_folds("cl_c3g", Resources(), make_corpus(n_pairs=2), folds=0, m=2)


class TestConfidenceInterval:
    def test_zero_variance(self):
        assert confidence_interval([0.5, 0.5, 0.5]) == (0.5, 0.0)

    def test_hand_two_values(self):
        mean, half = confidence_interval([0.0, 1.0])
        assert mean == 0.5
        assert half == pytest.approx(1.96 * math.sqrt(0.5) / math.sqrt(2), rel=1e-6)
        assert half == pytest.approx(0.98, abs=1e-3)

    def test_single_value_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            confidence_interval([0.7])


class TestHistogram:
    def test_separable_two_bins(self):
        n, m = 6, 5
        col_units = np.tile(np.arange(m), (n, 1))
        col_units[:, 0] = np.arange(n)
        scores = np.zeros((n, m))
        rel = col_units == np.arange(n)[:, None]
        scores[rel] = 1.0
        mat = hand_matrix(scores, col_units)
        pair = histogram(mat, bins=2)
        assert pair.positives.tolist() == [0, 6]
        assert pair.negatives.sum() == 6
        assert pair.negatives[1] == 0

    def test_bins_one_counts_sample_sizes(self):
        mat = make_matrix(n=5, m=8, seed=3)
        pair = histogram(mat, bins=1)
        assert len(pair.positives) == 1
        assert pair.positives[0] == 5
        assert pair.negatives[0] == 5

    def test_conservation(self):
        mat = make_matrix(n=7, m=9, seed=1)
        pair = histogram(mat, bins=4)
        assert pair.positives.sum() == 7
        assert pair.negatives.sum() == 7
        assert len(pair.bin_edges) == 5

    def test_deterministic_and_seed_override(self):
        mat = make_matrix(n=6, m=8, seed=5)
        a = histogram(mat, bins=3)
        b = histogram(mat, bins=3)
        assert np.array_equal(a.negatives, b.negatives)
        c = histogram(mat, bins=3, seed=123)
        d = histogram(mat, bins=3, seed=123)
        assert np.array_equal(c.negatives, d.negatives)

    def test_caps_positives_at_1000(self):
        n = 1200
        rng = np.random.default_rng(0)
        col_units = np.empty((n, 2), dtype=np.int64)
        col_units[:, 0] = np.arange(n)
        col_units[:, 1] = (np.arange(n) + 1) % n
        mat = hand_matrix(rng.random((n, 2)), col_units)
        pair = histogram(mat, bins=3)
        assert pair.positives.sum() == 1000
        assert pair.negatives.sum() == 1000

    def test_bad_bins(self):
        with pytest.raises(ValueError, match="bins"):
            histogram(make_matrix(), bins=0)


def fake_folds(f1s, n_tuning=TUNING_FOLDS):
    return [FoldResult(i, 0.5, f, f, f, i < n_tuning) for i, f in enumerate(f1s)]


class TestSummarize:
    def test_aggregates_evaluation_folds_only(self):
        f1s = [0.1, 0.2] + [0.8] * 8
        row = summarize("cl_wes", "books", "chunk", fake_folds(f1s))
        assert row.folds == 8
        assert row.mean_f1 == pytest.approx(0.8)
        assert row.ci_half_width == 0.0

    def test_falls_back_to_all_folds(self):
        row = summarize("cl_wes", "books", "chunk", fake_folds([0.4, 0.6]))
        assert row.folds == 2
        assert row.mean_f1 == pytest.approx(0.5)

    def test_single_fold_zero_half_width(self):
        row = summarize("cl_wes", "books", "chunk", fake_folds([0.7], n_tuning=0))
        assert (row.folds, row.mean_f1, row.ci_half_width) == (1, 0.7, 0.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="no fold results"):
            summarize("cl_wes", "books", "chunk", [])


class TestFormats:
    def test_report_line(self):
        row = ReportRow("cl_wes", "books", "chunk", 0.9123456789, 0.01, 8)
        assert format_report([row]) == "cl_wes\tbooks\tchunk\t0.912346\t0.010000\t8\n"

    def test_folds_line(self):
        fold = FoldResult(3, 0.25, 1.0, 0.5, 2.0 / 3.0, False)
        line = format_folds([("cl_asa", "news", "sentence", fold)])
        assert line == "cl_asa\tnews\tsentence\t3\t0.250000\t1.000000\t0.500000\t0.666667\t0\n"

    def test_histogram_lines(self):
        mat = make_matrix(n=4, m=5, seed=0)
        pair = histogram(mat, bins=3)
        text = format_histogram(pair)
        lines = text.strip("\n").split("\n")
        assert len(lines) == 3
        for line in lines:
            lo, hi, pos, neg = line.split("\t")
            assert float(hi) > float(lo)
            int(pos), int(neg)
