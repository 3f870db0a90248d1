"""Derivative-free weight tuning.

A bounded, restarted Nelder-Mead search maximizes F1-style objectives
over weight vectors: the 12 POS weights of the weighted-embedding scorer
and the per-method weights of weighted fusion.  Everything is seeded and
budgeted, and a larger budget never yields a worse best value: restart
points are drawn up front and each run's evaluation sequence only gets
truncated by its budget share, never reordered.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .corpus import AlignedPairCorpus
from .embeddings import EmbeddingSpace
from .errors import OptimizationError
from .evaluation import TUNING_FOLDS, build_fold_matrices, sweep_threshold
from .fusion import FusionWeights, fuse_matrices
from .methods import PosWeights, Resources


@dataclass(frozen=True)
class ObjectiveSpec:
    """A bounded maximization problem with an evaluation budget."""

    dimension: int
    bounds: tuple[tuple[float, float], ...]
    evaluator: Callable[[np.ndarray], float]
    budget: int
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if len(self.bounds) != self.dimension:
            raise ValueError(f"expected {self.dimension} bounds, got {len(self.bounds)}")
        for lo, hi in self.bounds:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"invalid bound ({lo}, {hi})")
        if self.budget < self.dimension + 2:
            raise ValueError(
                f"budget {self.budget} too small: the first simplex needs "
                f"{self.dimension + 1} evaluations plus one step"
            )


@dataclass(frozen=True)
class OptimizationResult:
    best_weights: np.ndarray
    best_value: float
    evaluations_used: int
    trace: list = field(repr=False)


class _BudgetExhausted(Exception):
    pass


class _Recorder:
    """Clamps, evaluates, and logs every probe against the global budget."""

    def __init__(self, spec: ObjectiveSpec):
        self._evaluator = spec.evaluator
        self._lo = np.array([b[0] for b in spec.bounds])
        self._hi = np.array([b[1] for b in spec.bounds])
        self.trace: list[tuple[np.ndarray, float]] = []
        self.cap = 0

    def clamp(self, x: np.ndarray) -> np.ndarray:
        return np.minimum(np.maximum(x, self._lo), self._hi)

    def __call__(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        if len(self.trace) >= self.cap:
            raise _BudgetExhausted
        x = self.clamp(x)
        value = float(self._evaluator(x))
        if not math.isfinite(value):
            raise OptimizationError(f"evaluator returned non-finite value {value}")
        self.trace.append((x.copy(), value))
        return x, value


def _nelder_mead(recorder: _Recorder, x0: np.ndarray, ftol: float = 1e-12,
                 xtol: float = 1e-12) -> None:
    """One simplex run; returns when converged or the budget share is gone."""
    n = len(x0)
    alpha = 1.0
    beta = 1.0 + 2.0 / n       # expansion
    gamma = 0.75 - 1.0 / (2 * n)  # contraction
    sigma = 1.0 - 1.0 / n      # shrink
    span = recorder._hi - recorder._lo

    simplex = [recorder(x0)]
    for i in range(n):
        step = np.zeros(n)
        h = 0.05 * span[i]
        if x0[i] + h > recorder._hi[i]:
            h = -h
        step[i] = h
        simplex.append(recorder(x0 + step))

    while True:
        simplex.sort(key=lambda p: -p[1])
        values = [v for _, v in simplex]
        points = np.array([p for p, _ in simplex])
        if (values[0] - values[-1] <= ftol
                and np.abs(points - points[0]).max() <= xtol):
            return
        worst_x, worst_v = simplex[-1]
        centroid = points[:-1].mean(axis=0)
        xr, fr = recorder(centroid + alpha * (centroid - worst_x))
        if fr > values[0]:
            xe, fe = recorder(centroid + beta * (xr - centroid))
            simplex[-1] = (xe, fe) if fe > fr else (xr, fr)
        elif fr > values[-2]:
            simplex[-1] = (xr, fr)
        elif fr > worst_v:
            xc, fc = recorder(centroid + gamma * (xr - centroid))
            if fc >= fr:
                simplex[-1] = (xc, fc)
            else:
                _shrink(recorder, simplex, sigma)
        else:
            xc, fc = recorder(centroid - gamma * (xr - centroid))
            if fc > worst_v:
                simplex[-1] = (xc, fc)
            else:
                _shrink(recorder, simplex, sigma)


def _shrink(recorder: _Recorder, simplex, sigma: float) -> None:
    best_x = simplex[0][0]
    for i in range(1, len(simplex)):
        simplex[i] = recorder(best_x + sigma * (simplex[i][0] - best_x))


def optimize(spec: ObjectiveSpec, initial, restarts: int = 3) -> OptimizationResult:
    """Maximize the objective from ``initial`` plus ``restarts`` random
    interior starts, sharing the evaluation budget across runs.

    The best point ever evaluated is returned.  Deterministic given the
    spec seed; the budget is a hard cap on evaluator calls.
    """
    if restarts < 0:
        raise ValueError(f"restarts must be >= 0, got {restarts}")
    initial = np.asarray(initial, dtype=np.float64)
    if initial.shape != (spec.dimension,):
        raise ValueError(f"initial point must have shape ({spec.dimension},)")
    lo = np.array([b[0] for b in spec.bounds])
    hi = np.array([b[1] for b in spec.bounds])
    if (initial < lo).any() or (initial > hi).any():
        raise ValueError("initial point outside bounds")

    rng = np.random.default_rng(spec.seed)
    starts = [initial]
    for _ in range(restarts):
        starts.append(lo + rng.random(spec.dimension) * (hi - lo))

    recorder = _Recorder(spec)
    for r, start in enumerate(starts):
        remaining = spec.budget - len(recorder.trace)
        if remaining <= 0:
            break
        share = -(-remaining // (len(starts) - r))  # ceil division
        recorder.cap = len(recorder.trace) + min(remaining, max(share, min(remaining, spec.dimension + 2)))
        try:
            _nelder_mead(recorder, start)
        except _BudgetExhausted:
            pass

    if not recorder.trace:
        raise OptimizationError("no evaluations performed")
    best_idx = max(range(len(recorder.trace)), key=lambda i: recorder.trace[i][1])
    best_x, best_v = recorder.trace[best_idx]
    return OptimizationResult(best_x, best_v, len(recorder.trace), recorder.trace)


def tune_pos_weights(space: EmbeddingSpace, corpus,
                     m: int = 1000, base_seed: int = 0, budget: int = 120,
                     restarts: int = 3, seed: int = 0) -> tuple[PosWeights, OptimizationResult]:
    """Find POS weights maximizing the weighted scorer's mean best F1 over
    the tuning folds of one corpus (or a sequence of corpora).

    The search starts at all-ones (the unweighted baseline, so the result
    never scores below it) and the returned weights are scaled so the
    largest equals 1, which leaves cosine scores unchanged.
    """
    corpora = [corpus] if isinstance(corpus, AlignedPairCorpus) else list(corpus)
    if not corpora:
        raise ValueError("no corpora to tune on")

    def evaluate(vec: np.ndarray) -> float:
        resources = Resources(space=space, pos_weights=PosWeights.from_vector(vec))
        return statistics.fmean(
            sweep_threshold(mat)[1]
            for c in corpora
            for mat in build_fold_matrices("cl_wess", resources, c,
                                           folds=TUNING_FOLDS, m=m, base_seed=base_seed)
        )

    dim = 12
    spec = ObjectiveSpec(dim, ((0.0, 1.0),) * dim, evaluate, budget, seed)
    result = optimize(spec, np.ones(dim), restarts=restarts)
    weights = PosWeights.from_vector(result.best_weights)
    peak = max(w for _, w in weights.items())
    if peak > 0.0:
        weights = weights.scaled(1.0 / peak)
    return weights, result


def tune_fusion_weights(fold_matrices: Sequence[Sequence], budget: int = 80,
                        restarts: int = 3, seed: int = 0) -> tuple[FusionWeights, OptimizationResult]:
    """Find per-method fusion weights maximizing mean best F1 over the
    given per-fold matrix groups (one group per tuning fold, one matrix
    per method, all sharing that fold's seed).

    Starts from uniform weights, so the result never scores below plain
    average fusion.
    """
    fold_matrices = [list(group) for group in fold_matrices]
    if not fold_matrices or not fold_matrices[0]:
        raise ValueError("need at least one fold of method matrices")
    methods = [mat.method for mat in fold_matrices[0]]
    for group in fold_matrices:
        if [mat.method for mat in group] != methods:
            raise ValueError("folds disagree on the method list")

    def evaluate(vec: np.ndarray) -> float:
        if vec.sum() <= 0.0:
            return -1.0
        weights = FusionWeights(dict(zip(methods, vec)))
        return statistics.fmean(
            sweep_threshold(fuse_matrices(group, "weighted", weights=weights))[1]
            for group in fold_matrices
        )

    dim = len(methods)
    spec = ObjectiveSpec(dim, ((0.0, 1.0),) * dim, evaluate, budget, seed)
    result = optimize(spec, np.ones(dim), restarts=restarts)
    best = result.best_weights
    if best.sum() <= 0.0:
        return FusionWeights.uniform(methods), result
    return FusionWeights(dict(zip(methods, best))), result
