"""Categorical data clustering through co-occurrence link groups.

The pipeline: ingest a categorical table, emit one link per
(attribute, value) equivalence class, find entity groups that maximize a
generative link log-likelihood via noisy hill climbing, and resolve the
group chart into a hard clustering with outliers. k-modes and squeezer
baselines plus a confusion-matrix accuracy metric round out benchmarking.
"""

from .baselines import KModesConfig, SqueezerConfig, find_threshold_for_k, kmodes, squeezer
from .dataset import (
    CategoricalTable,
    IngestOptions,
    LabeledDataset,
    MissingPolicy,
    attribute_domains,
    load_table,
    loads_table,
    write_table,
)
from .errors import (
    BadAttributeError,
    BadConfigError,
    BadInputError,
    EmptyInputError,
    InvalidMoveError,
    LinkclustError,
    MalformedRowError,
    MetricUndefinedError,
    ThresholdNotFoundError,
)
from .evaluate import ConfusionMatrix, EvalReport, accuracy_error, confusion
from .groupmodel import (
    INNOCENT,
    OUTLIER_TOKEN,
    Chart,
    ClusteringResult,
    LinkModelParams,
    Move,
    ScoredAssignment,
    best_explanation,
    delta_for_move,
    entity_factor,
    format_chart,
    format_clustering,
    innocent_log_likelihood,
    link_group_log_likelihood,
    resolve_chart,
    total_log_likelihood,
)
from .hillclimb import (
    FitResult,
    OptimizeResult,
    OptimizerConfig,
    fit_lcbcdc,
    init_chart,
    optimize,
    restart_rng,
    run_restart,
    sweep,
)
from .transform import Link, LinkDataset, equivalence_classes, format_links, to_link_dataset

__version__ = "0.1.0"

__all__ = [
    "BadAttributeError",
    "BadConfigError",
    "BadInputError",
    "CategoricalTable",
    "Chart",
    "ClusteringResult",
    "ConfusionMatrix",
    "EmptyInputError",
    "EvalReport",
    "FitResult",
    "INNOCENT",
    "IngestOptions",
    "InvalidMoveError",
    "KModesConfig",
    "LabeledDataset",
    "Link",
    "LinkDataset",
    "LinkModelParams",
    "LinkclustError",
    "MalformedRowError",
    "MetricUndefinedError",
    "MissingPolicy",
    "Move",
    "OUTLIER_TOKEN",
    "OptimizeResult",
    "OptimizerConfig",
    "ScoredAssignment",
    "SqueezerConfig",
    "ThresholdNotFoundError",
    "accuracy_error",
    "attribute_domains",
    "best_explanation",
    "confusion",
    "delta_for_move",
    "entity_factor",
    "equivalence_classes",
    "find_threshold_for_k",
    "fit_lcbcdc",
    "format_chart",
    "format_clustering",
    "format_links",
    "init_chart",
    "innocent_log_likelihood",
    "kmodes",
    "link_group_log_likelihood",
    "load_table",
    "loads_table",
    "optimize",
    "resolve_chart",
    "restart_rng",
    "run_restart",
    "squeezer",
    "sweep",
    "to_link_dataset",
    "total_log_likelihood",
    "write_table",
]
