"""Distance-matrix evaluation protocol.

Each source unit is scored against its aligned target (the gold cell)
plus m-1 targets sampled uniformly with replacement.  A retrieval
threshold is swept over the observed scores to maximize F1, the
procedure is repeated over seeded folds, and fold F1 values are
aggregated into mean +/- confidence half-width report rows.

Relevance is by unit identity: a cell is relevant when its sampled
target is the row's aligned counterpart, so a gold unit drawn again
among the distractors counts as relevant too.  Recall divides by the
total number of relevant cells, which makes retrieve-all recall exactly
1.0 even when such duplicates occur.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

import numpy as np

from .corpus import AlignedPairCorpus
from .methods import PreparedScorer, Resources, prepare_scorer

TUNING_FOLDS = 2


@dataclass(frozen=True)
class DistanceMatrix:
    """N x M score grid for one method and one seed.

    ``col_units[i, j]`` is the target-unit index scored in cell (i, j);
    ``gold_col[i]`` is the column holding row i's aligned target.
    """

    method: str
    seed: int
    scores: np.ndarray
    col_units: np.ndarray
    gold_col: np.ndarray

    def __post_init__(self):
        if self.scores.ndim != 2 or self.scores.shape != self.col_units.shape:
            raise ValueError("scores and col_units must be equal-shape 2-D arrays")
        if self.gold_col.shape != (self.scores.shape[0],):
            raise ValueError("gold_col must have one entry per row")
        if not np.isfinite(self.scores).all():
            raise ValueError("matrix contains non-finite scores")
        rows = np.arange(self.scores.shape[0])
        if not (self.col_units[rows, self.gold_col] == rows).all():
            raise ValueError("gold_col must point at each row's own target unit")

    @property
    def n_rows(self) -> int:
        return self.scores.shape[0]

    @property
    def n_cols(self) -> int:
        return self.scores.shape[1]

    def relevant(self) -> np.ndarray:
        """Boolean mask of cells whose target unit is the row's counterpart."""
        rows = np.arange(self.n_rows, dtype=np.int64)
        return self.col_units == rows[:, None]


def _matrix_from_scorer(scorer: PreparedScorer, n: int, m: int, seed: int) -> DistanceMatrix:
    rng = np.random.default_rng(seed)
    col_units = np.empty((n, m), dtype=np.int64)
    col_units[:, 0] = np.arange(n)
    if m > 1:
        col_units[:, 1:] = rng.integers(0, n, size=(n, m - 1))
    scores = np.empty((n, m), dtype=np.float64)
    for i in range(n):
        scores[i] = scorer.score_row(i, col_units[i])
    gold_col = np.zeros(n, dtype=np.int64)
    return DistanceMatrix(scorer.method, seed, scores, col_units, gold_col)


def build_matrix(method: str, resources: Resources, corpus: AlignedPairCorpus,
                 m: int = 1000, seed: int = 0) -> DistanceMatrix:
    """Score every source unit against its gold target plus m-1 sampled targets.

    The gold cell sits in column 0; the remaining columns are drawn
    uniformly with replacement from the corpus target side, row by row.
    Deterministic given the seed.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    scorer = prepare_scorer(method, resources, corpus)
    return _matrix_from_scorer(scorer, len(corpus.pairs), m, seed)


def prf(matrix: DistanceMatrix, threshold: float) -> tuple[float, float, float]:
    """Precision, recall, F1 for retrieval rule ``score >= threshold``."""
    retrieved = matrix.scores >= threshold
    relevant = matrix.relevant()
    n_retrieved = int(retrieved.sum())
    n_relevant_retrieved = int((retrieved & relevant).sum())
    n_relevant = int(relevant.sum())
    p = n_relevant_retrieved / n_retrieved if n_retrieved else 0.0
    r = n_relevant_retrieved / n_relevant if n_relevant else 0.0
    f1 = 2.0 * p * r / (p + r) if p + r > 0.0 else 0.0
    return p, r, f1


def sweep_threshold(matrix: DistanceMatrix) -> tuple[float, float]:
    """Find the threshold maximizing F1.

    Candidates are the distinct observed scores: F1 is piecewise constant
    between them, and the retrieve-all case is covered by the smallest
    score.  Ties go to the larger threshold.
    """
    if matrix.scores.size == 0:
        raise ValueError("empty matrix")
    flat = matrix.scores.ravel()
    rel = matrix.relevant().ravel()
    order = np.argsort(-flat, kind="stable")
    scores = flat[order]
    cum_rel = np.cumsum(rel[order].astype(np.int64))
    # last position of each distinct value in the descending order
    ends = np.append(np.nonzero(np.diff(scores))[0], len(scores) - 1)
    n_retrieved = (ends + 1).astype(np.float64)
    n_rel_ret = cum_rel[ends].astype(np.float64)
    n_relevant = float(cum_rel[-1])
    p = n_rel_ret / n_retrieved
    r = n_rel_ret / n_relevant
    denom = p + r
    f1 = np.where(denom > 0.0, 2.0 * p * r / np.where(denom > 0.0, denom, 1.0), 0.0)
    best = int(np.argmax(f1))  # first occurrence = largest threshold
    return float(scores[ends[best]]), float(f1[best])


@dataclass(frozen=True)
class FoldResult:
    fold_index: int
    threshold: float
    precision: float
    recall: float
    f1: float
    tuning: bool


def _fold_result(matrix: DistanceMatrix, fold_index: int) -> FoldResult:
    threshold, _ = sweep_threshold(matrix)
    p, r, f1 = prf(matrix, threshold)
    return FoldResult(fold_index, threshold, p, r, f1, fold_index < TUNING_FOLDS)


def build_fold_matrices(method: str, resources: Resources, corpus: AlignedPairCorpus,
                        folds: int = 10, m: int = 1000, base_seed: int = 0) -> list[DistanceMatrix]:
    """One matrix per fold; fold k uses seed base_seed + k."""
    if folds < 1:
        raise ValueError(f"folds must be >= 1, got {folds}")
    scorer = prepare_scorer(method, resources, corpus)
    n = len(corpus.pairs)
    return [_matrix_from_scorer(scorer, n, m, base_seed + k) for k in range(folds)]


def run_folds(method: str, resources: Resources, corpus: AlignedPairCorpus,
              folds: int = 10, m: int = 1000, base_seed: int = 0) -> list[FoldResult]:
    """Build, sweep, and score one matrix per fold.

    Folds 0 and 1 are flagged as tuning folds, the rest as evaluation
    folds.  Rerunning with the same base seed reproduces every fold.
    """
    matrices = build_fold_matrices(method, resources, corpus, folds, m, base_seed)
    return [_fold_result(mat, k) for k, mat in enumerate(matrices)]


def fold_results_from_matrices(matrices) -> list[FoldResult]:
    """Sweep and score pre-built per-fold matrices (fusion reuses this)."""
    return [_fold_result(mat, k) for k, mat in enumerate(matrices)]


def confidence_interval(values) -> tuple[float, float]:
    """Mean and 95% normal-approximation half-width (1.96 * s / sqrt(n))."""
    values = list(values)
    if len(values) < 2:
        raise ValueError(f"need at least 2 values, got {len(values)}")
    mean = statistics.fmean(values)
    half = 1.96 * statistics.stdev(values) / math.sqrt(len(values))
    return mean, half


@dataclass(frozen=True)
class HistogramPair:
    """Fingerprint histogram: gold-score and mismatch-score distributions."""

    bin_edges: np.ndarray
    positives: np.ndarray
    negatives: np.ndarray


def histogram(matrix: DistanceMatrix, bins: int, seed: int | None = None) -> HistogramPair:
    """Equal-width histograms of gold scores vs sampled mismatch scores.

    Positives are the gold-column scores (a sample of 1000 rows when the
    matrix has more).  Negatives are an equal-size uniform sample of
    non-relevant cells.  The sampling seed defaults to the matrix seed.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    rng = np.random.default_rng(matrix.seed if seed is None else seed)
    rows = np.arange(matrix.n_rows)
    positives = matrix.scores[rows, matrix.gold_col]
    if len(positives) > 1000:
        positives = positives[rng.choice(len(positives), size=1000, replace=False)]
    non_relevant = matrix.scores[~matrix.relevant()]
    size = min(len(positives), len(non_relevant))
    negatives = non_relevant[rng.choice(len(non_relevant), size=size, replace=False)] \
        if len(non_relevant) else non_relevant
    counted = np.concatenate([positives, negatives])
    edges = np.histogram_bin_edges(counted, bins=bins)
    pos_counts, _ = np.histogram(positives, bins=edges)
    neg_counts, _ = np.histogram(negatives, bins=edges)
    return HistogramPair(edges, pos_counts, neg_counts)


@dataclass(frozen=True)
class ReportRow:
    method: str
    corpus: str
    granularity: str
    mean_f1: float
    ci_half_width: float
    folds: int


def summarize(method: str, corpus_name: str, granularity: str, fold_results) -> ReportRow:
    """Aggregate fold F1 values into one report row.

    Averages over the evaluation folds when at least two exist, otherwise
    over every fold; a single fold reports a zero half-width.
    """
    selected = _aggregation_folds(fold_results)
    values = [f.f1 for f in selected]
    if len(values) >= 2:
        mean, half = confidence_interval(values)
    else:
        mean, half = values[0], 0.0
    return ReportRow(method, corpus_name, granularity, mean, half, len(values))


def _aggregation_folds(fold_results) -> list[FoldResult]:
    fold_results = list(fold_results)
    if not fold_results:
        raise ValueError("no fold results to aggregate")
    non_tuning = [f for f in fold_results if not f.tuning]
    return non_tuning if len(non_tuning) >= 2 else fold_results


def format_report(rows) -> str:
    """Report TSV: method, corpus, granularity, mean_f1, ci_half_width, folds."""
    lines = []
    for row in rows:
        lines.append("\t".join([
            row.method, row.corpus, row.granularity,
            f"{row.mean_f1:.6f}", f"{row.ci_half_width:.6f}", str(row.folds),
        ]))
    return "".join(line + "\n" for line in lines)


def format_folds(entries) -> str:
    """Per-fold TSV: method, corpus, granularity, fold, threshold, p, r, f1, tuning."""
    lines = []
    for method, corpus_name, granularity, fold in entries:
        lines.append("\t".join([
            method, corpus_name, granularity, str(fold.fold_index),
            f"{fold.threshold:.6f}", f"{fold.precision:.6f}",
            f"{fold.recall:.6f}", f"{fold.f1:.6f}", str(int(fold.tuning)),
        ]))
    return "".join(line + "\n" for line in lines)


def format_histogram(pair: HistogramPair) -> str:
    """Histogram TSV: bin_lo, bin_hi, positives, negatives."""
    lines = []
    for i in range(len(pair.positives)):
        lines.append("\t".join([
            f"{pair.bin_edges[i]:.6f}", f"{pair.bin_edges[i + 1]:.6f}",
            str(int(pair.positives[i])), str(int(pair.negatives[i])),
        ]))
    return "".join(line + "\n" for line in lines)
