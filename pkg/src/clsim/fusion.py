"""Combining per-pair scores from several methods.

Three strategies: arithmetic average, weighted sum with normalized
weights, and a decision-tree classifier trained with the C4.5 recipe
(gain-ratio splits, pessimistic error pruning).  Tree outputs feed the
distance-matrix protocol through a per-cell score equal to the reached
leaf's match fraction, so the usual threshold sweep applies unchanged.
"""

from __future__ import annotations

import math
import statistics
from collections import deque
from dataclasses import dataclass

import numpy as np

from .evaluation import DistanceMatrix

MATCH = "match"
MISMATCH = "mismatch"

FUSION_MODES = ("average", "weighted", "tree")


@dataclass(frozen=True)
class ScoreVector:
    """One method score per entry, optionally labeled for training."""

    entries: tuple[tuple[str, float], ...]
    label: bool | None = None

    def __post_init__(self):
        seen = set()
        for method, score in self.entries:
            if method in seen:
                raise ValueError(f"duplicate method {method!r} in score vector")
            seen.add(method)
            if not math.isfinite(score):
                raise ValueError(f"non-finite score for {method!r}: {score}")

    @property
    def methods(self) -> tuple[str, ...]:
        return tuple(m for m, _ in self.entries)

    @property
    def scores(self) -> tuple[float, ...]:
        return tuple(s for _, s in self.entries)

    def score(self, method: str) -> float:
        for m, s in self.entries:
            if m == method:
                return s
        raise KeyError(method)


class FusionWeights:
    """Per-method weights, nonnegative, normalized to sum to 1."""

    def __init__(self, mapping):
        mapping = dict(mapping)
        if not mapping:
            raise ValueError("empty weight map")
        total = 0.0
        for method, w in mapping.items():
            w = float(w)
            if not math.isfinite(w) or w < 0.0:
                raise ValueError(f"weight for {method!r} must be finite and >= 0, got {w}")
            total += w
        if total <= 0.0:
            raise ValueError("at least one weight must be positive")
        self._weights = {m: float(w) / total for m, w in mapping.items()}

    @classmethod
    def uniform(cls, methods) -> "FusionWeights":
        return cls({m: 1.0 for m in methods})

    def __getitem__(self, method: str) -> float:
        return self._weights[method]

    def __contains__(self, method: str) -> bool:
        return method in self._weights

    def items(self):
        return self._weights.items()

    def __eq__(self, other):
        return isinstance(other, FusionWeights) and self._weights == other._weights

    def __repr__(self):
        return f"FusionWeights({self._weights!r})"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for method, w in self._weights.items():
                fh.write(f"{method}\t{w!r}\n")

    @classmethod
    def load(cls, path) -> "FusionWeights":
        mapping = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 2:
                    raise ValueError(f"{path}:{line_no}: expected 'method<TAB>weight', got {line!r}")
                mapping[fields[0]] = float(fields[1])
        return cls(mapping)


def weighted_fusion(v: ScoreVector, w: FusionWeights) -> float:
    """Weighted mean of v's scores, renormalized over the methods present."""
    if not v.entries:
        raise ValueError("empty score vector")
    num = 0.0
    den = 0.0
    for method, score in v.entries:
        if method not in w:
            raise ValueError(f"no weight for method {method!r}")
        num += w[method] * score
        den += w[method]
    if den <= 0.0:
        raise ValueError("weights assign zero total mass to the vector's methods")
    return num / den


def average_fusion(v: ScoreVector) -> float:
    """Arithmetic mean of the scores (uniform weighted fusion)."""
    if not v.entries:
        raise ValueError("empty score vector")
    return weighted_fusion(v, FusionWeights.uniform(v.methods))


# ---------------------------------------------------------------------------
# C4.5 decision tree

@dataclass(frozen=True)
class Leaf:
    match_count: int
    mismatch_count: int

    def __post_init__(self):
        if self.match_count < 0 or self.mismatch_count < 0 or self.total == 0:
            raise ValueError("leaf distribution must be nonnegative and nonempty")

    @property
    def total(self) -> int:
        return self.match_count + self.mismatch_count

    @property
    def prediction(self) -> str:
        return MATCH if self.match_count > self.mismatch_count else MISMATCH

    @property
    def confidence(self) -> float:
        return max(self.match_count, self.mismatch_count) / self.total

    @property
    def match_fraction(self) -> float:
        return self.match_count / self.total


@dataclass(frozen=True)
class Split:
    method: str
    threshold: float
    left: "Leaf | Split"
    right: "Leaf | Split"


@dataclass(frozen=True)
class DecisionTree:
    root: "Leaf | Split"


def _entropy(n_match: int, n_mismatch: int) -> float:
    n = n_match + n_mismatch
    h = 0.0
    for c in (n_match, n_mismatch):
        if c:
            p = c / n
            h -= p * math.log2(p)
    return h


def _class_counts(rows) -> tuple[int, int]:
    n_match = sum(1 for r in rows if r.label)
    return n_match, len(rows) - n_match


def _split_stats(rows, method: str, threshold: float):
    left = [r for r in rows if r.score(method) <= threshold]
    right = [r for r in rows if r.score(method) > threshold]
    n = len(rows)
    gain = _entropy(*_class_counts(rows))
    split_info = 0.0
    for side in (left, right):
        if side:
            frac = len(side) / n
            gain -= frac * _entropy(*_class_counts(side))
            split_info -= frac * math.log2(frac)
    return left, right, gain, split_info


def gain_ratio(rows, method: str, threshold: float) -> float:
    """Information gain of the binary split divided by split information.

    Zero when the split puts every row on one side (split info 0).
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows")
    _, _, gain, split_info = _split_stats(rows, method, threshold)
    if split_info == 0.0:
        return 0.0
    return max(0.0, gain / split_info)


def _check_training_rows(rows):
    if not rows:
        raise ValueError("no training rows")
    methods = rows[0].methods
    method_set = set(methods)
    for r in rows:
        if r.label is None:
            raise ValueError("unlabeled training row")
        if set(r.methods) != method_set:
            raise ValueError("training rows disagree on the method set")
    n_match, n_mismatch = _class_counts(rows)
    if n_match == 0 or n_mismatch == 0:
        raise ValueError("training rows must contain both classes")
    return methods


def _grow(rows, methods, min_leaf: int):
    n_match, n_mismatch = _class_counts(rows)
    if n_match == 0 or n_mismatch == 0 or len(rows) < 2 * min_leaf:
        return Leaf(n_match, n_mismatch)
    best = None  # (ratio, split) with first-best kept on ties
    for method in methods:
        values = sorted({r.score(method) for r in rows})
        for lo, hi in zip(values, values[1:]):
            threshold = (lo + hi) / 2.0
            left, right, gain, split_info = _split_stats(rows, method, threshold)
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            if gain <= 0.0 or split_info == 0.0:
                continue
            ratio = gain / split_info
            if best is None or ratio > best[0]:
                best = (ratio, method, threshold, left, right)
    if best is None:
        return Leaf(n_match, n_mismatch)
    _, method, threshold, left, right = best
    return Split(method, threshold,
                 _grow(left, methods, min_leaf),
                 _grow(right, methods, min_leaf))


def _error_upper_bound(errors: int, n: int, z: float) -> float:
    """Pessimistic error count: n times the upper confidence bound on e/n."""
    f = errors / n
    z2 = z * z
    bound = (f + z2 / (2.0 * n) + z * math.sqrt(f / n - f * f / n + z2 / (4.0 * n * n)))
    return n * bound / (1.0 + z2 / n)


def _subtree_counts(node) -> tuple[int, int]:
    if isinstance(node, Leaf):
        return node.match_count, node.mismatch_count
    lm, lmm = _subtree_counts(node.left)
    rm, rmm = _subtree_counts(node.right)
    return lm + rm, lmm + rmm


def _estimated_errors(node, z: float) -> float:
    if isinstance(node, Leaf):
        return _error_upper_bound(min(node.match_count, node.mismatch_count), node.total, z)
    return _estimated_errors(node.left, z) + _estimated_errors(node.right, z)


def _prune(node, z: float):
    if isinstance(node, Leaf):
        return node
    pruned = Split(node.method, node.threshold, _prune(node.left, z), _prune(node.right, z))
    n_match, n_mismatch = _subtree_counts(pruned)
    as_leaf = Leaf(n_match, n_mismatch)
    leaf_err = _error_upper_bound(min(n_match, n_mismatch), n_match + n_mismatch, z)
    if leaf_err <= _estimated_errors(pruned, z):
        return as_leaf
    return pruned


def train_c45(rows, min_leaf: int = 2, confidence: float = 0.25,
              prune: bool = True) -> DecisionTree:
    """Grow a binary decision tree over method-score attributes.

    Splits maximize gain ratio over midpoint thresholds; growth stops on
    pure nodes, nodes below 2*min_leaf rows, or absent positive-gain
    splits.  Pessimistic error pruning (confidence factor as in the
    classic implementation) collapses subtrees that do not beat their
    merged leaf.  Ties are broken by method order, then lower threshold.
    """
    rows = list(rows)
    methods = _check_training_rows(rows)
    if min_leaf < 1:
        raise ValueError(f"min_leaf must be >= 1, got {min_leaf}")
    if not (0.0 < confidence <= 0.5):
        raise ValueError(f"confidence must be in (0, 0.5], got {confidence}")
    root = _grow(rows, methods, min_leaf)
    if prune:
        z = statistics.NormalDist().inv_cdf(1.0 - confidence)
        root = _prune(root, z)
    return DecisionTree(root)


def _route(tree: DecisionTree, v: ScoreVector) -> Leaf:
    node = tree.root
    while isinstance(node, Split):
        try:
            value = v.score(node.method)
        except KeyError:
            raise ValueError(f"score vector lacks attribute {node.method!r}") from None
        node = node.left if value <= node.threshold else node.right
    return node


def classify(tree: DecisionTree, v: ScoreVector) -> tuple[str, float]:
    """Route v to a leaf; return (majority class, majority fraction)."""
    leaf = _route(tree, v)
    return leaf.prediction, leaf.confidence


def tree_score(tree: DecisionTree, v: ScoreVector) -> float:
    """Match fraction of the reached leaf (monotone stand-in score)."""
    return _route(tree, v).match_fraction


def root_attributes(tree: DecisionTree, depth: int) -> list[str]:
    """Distinct attributes tested at levels 0..depth-1, breadth-first."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    out: list[str] = []
    queue = deque([(tree.root, 0)])
    while queue:
        node, level = queue.popleft()
        if isinstance(node, Leaf) or level >= depth:
            continue
        if node.method not in out:
            out.append(node.method)
        queue.append((node.left, level + 1))
        queue.append((node.right, level + 1))
    return out


# ---------------------------------------------------------------------------
# Tree serialization

def format_tree(tree: DecisionTree) -> str:
    """Indented one-node-per-line text; the first child is the <= branch."""
    lines: list[str] = []

    def emit(node, indent):
        pad = "  " * indent
        if isinstance(node, Leaf):
            lines.append(f"{pad}{node.prediction} ({node.match_count}, {node.mismatch_count})")
        else:
            lines.append(f"{pad}{node.method} <= {node.threshold!r}")
            emit(node.left, indent + 1)
            emit(node.right, indent + 1)

    emit(tree.root, 0)
    return "".join(line + "\n" for line in lines)


def parse_tree(text: str) -> DecisionTree:
    """Inverse of format_tree."""
    items: list[tuple[int, str]] = []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        stripped = raw.lstrip(" ")
        n_spaces = len(raw) - len(stripped)
        if n_spaces % 2:
            raise ValueError(f"odd indentation in tree line {raw!r}")
        items.append((n_spaces // 2, stripped))
    if not items:
        raise ValueError("empty tree text")

    pos = 0

    def parse_node(indent):
        nonlocal pos
        if pos >= len(items) or items[pos][0] != indent:
            raise ValueError("malformed tree text: missing node")
        _, line = items[pos]
        pos += 1
        if " <= " in line:
            method, _, thr = line.partition(" <= ")
            left = parse_node(indent + 1)
            right = parse_node(indent + 1)
            return Split(method, float(thr), left, right)
        label, _, counts = line.partition(" (")
        if label not in (MATCH, MISMATCH) or not counts.endswith(")"):
            raise ValueError(f"malformed tree leaf {line!r}")
        m, mm = (int(x) for x in counts[:-1].split(", "))
        leaf = Leaf(m, mm)
        if leaf.prediction != label:
            raise ValueError(f"leaf label {label!r} contradicts counts ({m}, {mm})")
        return leaf

    root = parse_node(0)
    if pos != len(items):
        raise ValueError("trailing content after tree root")
    return DecisionTree(root)


def save_tree(tree: DecisionTree, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_tree(tree))


def load_tree(path) -> DecisionTree:
    with open(path, encoding="utf-8") as fh:
        return parse_tree(fh.read())


# ---------------------------------------------------------------------------
# Matrix-level fusion

def _check_aligned(matrices) -> list[DistanceMatrix]:
    matrices = list(matrices)
    if not matrices:
        raise ValueError("no matrices to fuse")
    first = matrices[0]
    seen = set()
    for mat in matrices:
        if mat.method in seen:
            raise ValueError(f"duplicate method {mat.method!r} among matrices")
        seen.add(mat.method)
        if mat.scores.shape != first.scores.shape:
            raise ValueError("matrices differ in shape")
        if mat.seed != first.seed or not np.array_equal(mat.col_units, first.col_units):
            raise ValueError("matrices disagree on sampled columns; use one seed per fold")
    return matrices


def fuse_matrices(matrices, mode: str, weights: FusionWeights | None = None,
                  tree: DecisionTree | None = None) -> DistanceMatrix:
    """Cell-wise fusion of same-seed matrices into one matrix.

    The result's method tag is ``fusion:<mode>``; sampled columns carry
    over unchanged, so the evaluation protocol applies directly.
    """
    matrices = _check_aligned(matrices)
    if mode not in FUSION_MODES:
        raise ValueError(f"unknown fusion mode {mode!r} (known: {', '.join(FUSION_MODES)})")
    first = matrices[0]
    if mode == "average":
        fused = np.mean([m.scores for m in matrices], axis=0)
    elif mode == "weighted":
        if weights is None:
            raise ValueError("weighted fusion needs weights")
        num = np.zeros_like(first.scores)
        den = 0.0
        for mat in matrices:
            if mat.method not in weights:
                raise ValueError(f"no weight for method {mat.method!r}")
            num += weights[mat.method] * mat.scores
            den += weights[mat.method]
        if den <= 0.0:
            raise ValueError("weights assign zero total mass to the fused methods")
        fused = num / den
    else:
        if tree is None:
            raise ValueError("tree fusion needs a trained tree")
        fused = np.empty_like(first.scores)
        for i in range(first.n_rows):
            for j in range(first.n_cols):
                v = ScoreVector(tuple((m.method, float(m.scores[i, j])) for m in matrices))
                fused[i, j] = tree_score(tree, v)
    return DistanceMatrix(f"fusion:{mode}", first.seed, fused,
                          first.col_units.copy(), first.gold_col.copy())


def training_rows(matrices, seed: int | None = None) -> list[ScoreVector]:
    """Labeled rows from aligned matrices: gold cells positive, sampled
    non-relevant cells negative, balanced 1:1 (or as close as the matrix
    allows).  The sampling seed defaults to the matrices' shared seed.
    """
    matrices = _check_aligned(matrices)
    first = matrices[0]
    rng = np.random.default_rng(first.seed if seed is None else seed)
    rows: list[ScoreVector] = []
    for i in range(first.n_rows):
        gold_j = int(first.gold_col[i])
        rows.append(ScoreVector(
            tuple((m.method, float(m.scores[i, gold_j])) for m in matrices), label=True))
    non_relevant = np.flatnonzero(~first.relevant().ravel())
    k = min(first.n_rows, len(non_relevant))
    if k:
        for flat in non_relevant[rng.choice(len(non_relevant), size=k, replace=False)]:
            i, j = divmod(int(flat), first.n_cols)
            rows.append(ScoreVector(
                tuple((m.method, float(m.scores[i, j])) for m in matrices), label=False))
    return rows
