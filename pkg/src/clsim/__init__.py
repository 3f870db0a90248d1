"""Cross-language textual similarity toolkit.

Scores aligned chunk or sentence pairs across languages with five
methods (character 3-grams, embedding concept bags, summed and
POS-weighted embedding cosines, dictionary alignment), evaluates them
with a seeded distance-matrix + threshold-sweep protocol, tunes weights
with a bounded derivative-free optimizer, and fuses methods by
averaging, weighting, or a decision tree.
"""

from ._kernels import BACKEND as kernel_backend
from .corpus import (
    GRANULARITIES,
    PUNCT_TAG,
    TAG_ORDER,
    UNIVERSAL_TAGS,
    AlignedPair,
    AlignedPairCorpus,
    TaggedToken,
    TextualUnit,
    load_tag_mapping,
    normalize_tag,
    parse_corpus,
    serialize_corpus,
    write_corpus,
)
from .embeddings import (
    EmbeddingSpace,
    UnitVector,
    cosine,
    load_embeddings,
    top_k_neighbors,
    unit_vector,
    weighted_unit_vector,
)
from .errors import (
    ClsimError,
    ConfigError,
    CorpusFormatError,
    DictionaryFormatError,
    EmbeddingFormatError,
    MissingResourceError,
    OptimizationError,
    UnknownTagError,
)
from .evaluation import (
    DistanceMatrix,
    FoldResult,
    HistogramPair,
    ReportRow,
    build_fold_matrices,
    build_matrix,
    confidence_interval,
    format_folds,
    format_histogram,
    format_report,
    histogram,
    prf,
    run_folds,
    summarize,
    sweep_threshold,
)
from .fusion import (
    DecisionTree,
    FusionWeights,
    Leaf,
    ScoreVector,
    Split,
    average_fusion,
    classify,
    format_tree,
    fuse_matrices,
    gain_ratio,
    load_tree,
    parse_tree,
    root_attributes,
    save_tree,
    train_c45,
    training_rows,
    tree_score,
    weighted_fusion,
)
from .methods import (
    METHODS,
    BilingualDictionary,
    PosWeights,
    Resources,
    cl_asa,
    cl_c3g,
    cl_cts_we,
    cl_wes,
    cl_wess,
    load_dictionary,
    prepare_scorer,
    score_pair,
)
from .optimizer import (
    ObjectiveSpec,
    OptimizationResult,
    optimize,
    tune_fusion_weights,
    tune_pos_weights,
)

__version__ = "0.1.0"
