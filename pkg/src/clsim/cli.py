"""Command-line entry point.

Subcommands wire corpora, embeddings, and dictionaries into seeded,
reproducible runs:

  evaluate   per-method fold evaluation, report + per-fold TSVs
  tune       optimize POS weights or fusion weights on the tuning folds
  fuse       evaluate average / weighted / decision-tree fusion
  histogram  score-distribution fingerprint for one method
  neighbors  debug: print a word's nearest embedding neighbors

Settings come from a JSON config file, individually overridable by
flags; all randomness flows from one base seed, and rerunning a command
with the same inputs reproduces its output files byte for byte.  A
failed command removes whatever files it already wrote and exits
nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, fields

from .corpus import GRANULARITIES, AlignedPairCorpus, load_tag_mapping, parse_corpus
from .embeddings import load_embeddings, top_k_neighbors
from .errors import ClsimError, ConfigError
from .evaluation import (
    TUNING_FOLDS,
    build_fold_matrices,
    build_matrix,
    fold_results_from_matrices,
    format_folds,
    format_histogram,
    format_report,
    histogram,
    run_folds,
    summarize,
)
from .fusion import FusionWeights, fuse_matrices, root_attributes, save_tree, train_c45, training_rows
from .methods import METHODS, PosWeights, Resources, load_dictionary
from .optimizer import tune_fusion_weights, tune_pos_weights

ROOT_DEPTH = 3  # tree levels listed in the root-attributes output


@dataclass
class RunConfig:
    """One run's settings: resource paths plus protocol parameters."""

    embeddings: str | None = None
    dictionary: str | None = None
    tag_mapping: str | None = None
    pos_weights: str | None = None
    fusion_weights: str | None = None
    corpora: dict[str, str] = field(default_factory=dict)
    methods: list[str] = field(default_factory=list)
    m: int = 1000
    folds: int = 10
    seed: int = 0
    granularity: str = "chunk"
    out: str = "out"
    bins: int = 20
    cts_k: int = 10
    budget: int = 120
    restarts: int = 3

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        data = {}
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    data = json.load(fh)
            except OSError as e:
                raise ConfigError(f"cannot read config {args.config}: {e}") from e
            except json.JSONDecodeError as e:
                raise ConfigError(f"config {args.config} is not valid JSON: {e}") from e
            if not isinstance(data, dict):
                raise ConfigError(f"config {args.config} must hold a JSON object")
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
        cfg = cls(**data)

        for name in ("embeddings", "dictionary", "tag_mapping", "pos_weights",
                     "fusion_weights", "m", "folds", "seed", "granularity", "out",
                     "bins", "cts_k", "budget", "restarts"):
            value = getattr(args, name, None)
            if value is not None:
                setattr(cfg, name, value)
        if getattr(args, "methods", None):
            cfg.methods = [m.strip() for m in args.methods.split(",") if m.strip()]
        for item in getattr(args, "corpus", None) or []:
            name, sep, path = item.partition("=")
            if not sep or not name or not path:
                raise ConfigError(f"--corpus expects name=path, got {item!r}")
            cfg.corpora = dict(cfg.corpora)
            cfg.corpora[name] = path
        return cfg

    def validate(self) -> None:
        if self.m < 1:
            raise ConfigError(f"m must be >= 1, got {self.m}")
        if self.folds < 1:
            raise ConfigError(f"folds must be >= 1, got {self.folds}")
        if self.granularity not in GRANULARITIES:
            raise ConfigError(f"granularity must be one of {GRANULARITIES}, got {self.granularity!r}")
        for method in self.methods:
            if method not in METHODS:
                raise ConfigError(f"unknown method {method!r} (known: {', '.join(METHODS)})")
        if not isinstance(self.corpora, dict):
            raise ConfigError("corpora must map names to paths")
        for path in [self.embeddings, self.dictionary, self.tag_mapping,
                     self.pos_weights, self.fusion_weights, *self.corpora.values()]:
            if path is not None and not os.path.isfile(path):
                raise ConfigError(f"file not found: {path}")


class _OutputSet:
    """Tracks written files so a failing command leaves nothing behind."""

    def __init__(self):
        self._written: list[str] = []

    def write(self, path: str, text: str) -> None:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        self._written.append(path)

    def register(self, path: str) -> None:
        """Track a file some other writer produced."""
        self._written.append(path)

    def discard(self) -> None:
        for path in self._written:
            try:
                os.remove(path)
            except OSError:
                pass
        self._written.clear()


def _load_corpora(cfg: RunConfig) -> list[tuple[str, AlignedPairCorpus]]:
    if not cfg.corpora:
        raise ConfigError("no corpora configured (use the corpora config key or --corpus name=path)")
    tag_map = load_tag_mapping(cfg.tag_mapping) if cfg.tag_mapping else None
    return [(name, parse_corpus(path, cfg.granularity, name=name, tag_map=tag_map))
            for name, path in cfg.corpora.items()]


def _load_resources(cfg: RunConfig, methods) -> Resources:
    resources = Resources(cts_k=cfg.cts_k)
    if any(m in ("cl_cts_we", "cl_wes", "cl_wess") for m in methods):
        if cfg.embeddings is None:
            raise ConfigError("the requested methods need an embeddings file")
        resources.space = load_embeddings(cfg.embeddings)
    if "cl_wess" in methods:
        if cfg.pos_weights:
            resources.pos_weights = PosWeights.load(cfg.pos_weights)
        else:
            print("note: no pos_weights file configured; using uniform weights", file=sys.stderr)
            resources.pos_weights = PosWeights.uniform()
    if "cl_asa" in methods:
        if cfg.dictionary is None:
            raise ConfigError("cl_asa needs a dictionary file")
        resources.dictionary = load_dictionary(cfg.dictionary)
    return resources


def _require_methods(cfg: RunConfig) -> list[str]:
    if not cfg.methods:
        raise ConfigError("no methods configured (use the methods config key or --methods)")
    return cfg.methods


def cmd_evaluate(cfg: RunConfig, outputs: _OutputSet) -> None:
    cfg.validate()
    methods = _require_methods(cfg)
    corpora = _load_corpora(cfg)
    resources = _load_resources(cfg, methods)
    report_rows = []
    fold_entries = []
    for method in methods:
        for name, corpus in corpora:
            results = run_folds(method, resources, corpus, folds=cfg.folds,
                                m=cfg.m, base_seed=cfg.seed)
            report_rows.append(summarize(method, name, cfg.granularity, results))
            fold_entries.extend((method, name, cfg.granularity, fr) for fr in results)
    outputs.write(os.path.join(cfg.out, "report.tsv"), format_report(report_rows))
    outputs.write(os.path.join(cfg.out, "folds.tsv"), format_folds(fold_entries))


def _format_trace(trace) -> str:
    lines = []
    for i, (weights, value) in enumerate(trace):
        parts = [str(i), f"{value:.6f}"] + [repr(float(w)) for w in weights]
        lines.append("\t".join(parts))
    return "".join(line + "\n" for line in lines)


def cmd_tune(cfg: RunConfig, target: str, outputs: _OutputSet) -> None:
    cfg.validate()
    corpora = _load_corpora(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    if target == "pos-weights":
        resources = _load_resources(cfg, ["cl_wes"])
        weights, result = tune_pos_weights(resources.space, [c for _, c in corpora],
                                           m=cfg.m, base_seed=cfg.seed,
                                           budget=cfg.budget, restarts=cfg.restarts)
        path = os.path.join(cfg.out, "pos_weights.tsv")
        weights.save(path)
        outputs.register(path)
    elif target == "fusion-weights":
        methods = _require_methods(cfg)
        resources = _load_resources(cfg, methods)
        groups = []
        for _, corpus in corpora:
            per_method = [build_fold_matrices(method, resources, corpus, folds=TUNING_FOLDS,
                                              m=cfg.m, base_seed=cfg.seed)
                          for method in methods]
            groups.extend([mats[k] for mats in per_method] for k in range(TUNING_FOLDS))
        weights, result = tune_fusion_weights(groups, budget=cfg.budget,
                                              restarts=cfg.restarts)
        path = os.path.join(cfg.out, "fusion_weights.tsv")
        weights.save(path)
        outputs.register(path)
    else:
        raise ConfigError(f"unknown tune target {target!r}")
    outputs.write(os.path.join(cfg.out, "tune_trace.tsv"), _format_trace(result.trace))
    print(f"tuned {target} with {result.evaluations_used} evaluations; "
          f"best objective {result.best_value:.6f}", file=sys.stderr)


def cmd_fuse(cfg: RunConfig, mode: str, outputs: _OutputSet) -> None:
    cfg.validate()
    if cfg.folds <= TUNING_FOLDS:
        raise ConfigError(
            f"fusion needs folds > {TUNING_FOLDS} (tuning folds plus at least "
            f"one evaluation fold), got {cfg.folds}"
        )
    methods = _require_methods(cfg)
    corpora = _load_corpora(cfg)
    resources = _load_resources(cfg, methods)
    weights = None
    if mode == "weighted":
        if not cfg.fusion_weights:
            raise ConfigError("weighted fusion needs a fusion_weights file")
        weights = FusionWeights.load(cfg.fusion_weights)

    report_rows = []
    fold_entries = []
    root_lines = []
    os.makedirs(cfg.out, exist_ok=True)
    for name, corpus in corpora:
        per_method = [build_fold_matrices(method, resources, corpus, folds=cfg.folds,
                                          m=cfg.m, base_seed=cfg.seed)
                      for method in methods]
        groups = [[mats[k] for mats in per_method] for k in range(cfg.folds)]
        tree = None
        if mode == "tree":
            rows = []
            for k in range(TUNING_FOLDS):
                rows.extend(training_rows(groups[k]))
            tree = train_c45(rows)
            tree_path = os.path.join(cfg.out, f"tree_{name}.txt")
            save_tree(tree, tree_path)
            outputs.register(tree_path)
            for pos, method in enumerate(root_attributes(tree, ROOT_DEPTH)):
                root_lines.append(f"{name}\t{pos}\t{method}\n")
        fused = [fuse_matrices(group, mode, weights=weights, tree=tree) for group in groups]
        results = fold_results_from_matrices(fused)
        report_rows.append(summarize(f"fusion:{mode}", name, cfg.granularity, results))
        fold_entries.extend((f"fusion:{mode}", name, cfg.granularity, fr) for fr in results)

    outputs.write(os.path.join(cfg.out, "report.tsv"), format_report(report_rows))
    outputs.write(os.path.join(cfg.out, "folds.tsv"), format_folds(fold_entries))
    if mode == "tree":
        outputs.write(os.path.join(cfg.out, "tree_roots.tsv"), "".join(root_lines))


def cmd_histogram(cfg: RunConfig, method: str, outputs: _OutputSet) -> None:
    cfg.validate()
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r} (known: {', '.join(METHODS)})")
    corpora = _load_corpora(cfg)
    resources = _load_resources(cfg, [method])
    for name, corpus in corpora:
        matrix = build_matrix(method, resources, corpus, m=cfg.m, seed=cfg.seed)
        pair = histogram(matrix, cfg.bins)
        outputs.write(os.path.join(cfg.out, f"histogram_{method}_{name}.tsv"),
                      format_histogram(pair))


def cmd_neighbors(cfg: RunConfig, word: str, k: int) -> None:
    if cfg.embeddings is None:
        raise ConfigError("neighbors needs an embeddings file")
    if not os.path.isfile(cfg.embeddings):
        raise ConfigError(f"file not found: {cfg.embeddings}")
    lang, sep, surface = word.partition(":")
    if not sep or not lang or not surface:
        raise ConfigError(f"--word expects lang:surface, got {word!r}")
    space = load_embeddings(cfg.embeddings)
    vec = space.lookup(lang, surface)
    if vec is None:
        raise ConfigError(f"word {word!r} not in the embedding space")
    for n_lang, n_surface, cos in top_k_neighbors(space, vec, k, exclude=(lang, surface)):
        print(f"{n_lang}:{n_surface}\t{cos:.6f}")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--methods", help="comma-separated method list")
    common.add_argument("--corpus", action="append", metavar="NAME=PATH",
                        help="add a corpus (repeatable; overrides config corpora)")
    common.add_argument("--embeddings")
    common.add_argument("--dictionary")
    common.add_argument("--tag-mapping", dest="tag_mapping")
    common.add_argument("--pos-weights", dest="pos_weights")
    common.add_argument("--fusion-weights", dest="fusion_weights")
    common.add_argument("--m", type=int)
    common.add_argument("--folds", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--granularity", choices=GRANULARITIES)
    common.add_argument("--out")
    common.add_argument("--bins", type=int)
    common.add_argument("--cts-k", dest="cts_k", type=int)
    common.add_argument("--budget", type=int)
    common.add_argument("--restarts", type=int)

    parser = argparse.ArgumentParser(prog="clsim",
                                     description="cross-language textual similarity toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("evaluate", parents=[common],
                   help="run the fold protocol for each method and corpus")
    p_tune = sub.add_parser("tune", parents=[common], help="optimize weights on the tuning folds")
    p_tune.add_argument("--target", choices=("pos-weights", "fusion-weights"), required=True)
    p_fuse = sub.add_parser("fuse", parents=[common], help="evaluate fused methods")
    p_fuse.add_argument("--mode", choices=("average", "weighted", "tree"), required=True)
    p_hist = sub.add_parser("histogram", parents=[common],
                            help="score-distribution fingerprint of one method")
    p_hist.add_argument("--method", required=True)
    p_nb = sub.add_parser("neighbors", parents=[common], help="print a word's nearest neighbors")
    p_nb.add_argument("--word", required=True, metavar="LANG:SURFACE")
    p_nb.add_argument("-k", type=int, default=10)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    outputs = _OutputSet()
    try:
        cfg = RunConfig.from_args(args)
        if args.command == "evaluate":
            cmd_evaluate(cfg, outputs)
        elif args.command == "tune":
            cmd_tune(cfg, args.target, outputs)
        elif args.command == "fuse":
            cmd_fuse(cfg, args.mode, outputs)
        elif args.command == "histogram":
            cmd_histogram(cfg, args.method, outputs)
        else:
            cmd_neighbors(cfg, args.word, args.k)
    except (ClsimError, OSError, ValueError) as e:
        outputs.discard()
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception:
        outputs.discard()
        raise
    return 0


if __name__ == "__main__":
    sys.exit(main())
