"""Fact checking over knowledge graphs via degree-weighted optimal paths."""

__version__ = "0.1.0"

from .calibration import (
    CvReport,
    FeatureMatrix,
    FeatureMode,
    FoldSpec,
    ModeComparison,
    build_feature_matrix,
    compare_modes,
    knn_classify,
    random_forest_classify,
    resolve_targets,
)
from .dictionary import EntityDictionary
from .errors import (
    FactGraphError,
    ParseError,
    ResolutionError,
    SnapshotError,
    ValidationError,
)
from .estimators import GraphFactChecker, TruthFeaturizer
from .evaluation import (
    CorpusEvaluation,
    CorrelationReport,
    RocReport,
    StatementMatrix,
    auroc,
    build_statement_matrix,
    evaluate_annotated_corpus,
    export_confusion_matrix,
    kendall_tau_b,
    rank_correlations,
    spearman_rho,
)
from .graph import EdgeExclusion, GraphStats, KnowledgeGraph, build_graph
from .ingest import (
    EdgeList,
    EdgeListBuilder,
    FilterConfig,
    IngestReport,
    RawTriple,
    Statement,
    apply_filters,
    build_edge_list,
    ingest_sources,
    load_annotated_corpus,
    parse_ntriples,
    read_tsv_edges,
)
from .proximity import (
    Closure,
    PathWitness,
    TruthResult,
    brute_force_truth,
    path_weight_metric,
    path_weight_ultrametric,
    truth_value,
    truth_value_direct_only,
    truth_value_matrix,
    truth_value_pairs,
)

__all__ = [
    "__version__",
    "EntityDictionary",
    "FactGraphError",
    "ParseError",
    "ResolutionError",
    "SnapshotError",
    "ValidationError",
    "RawTriple",
    "FilterConfig",
    "EdgeList",
    "EdgeListBuilder",
    "IngestReport",
    "Statement",
    "parse_ntriples",
    "apply_filters",
    "build_edge_list",
    "read_tsv_edges",
    "load_annotated_corpus",
    "ingest_sources",
    "KnowledgeGraph",
    "EdgeExclusion",
    "GraphStats",
    "build_graph",
    "Closure",
    "PathWitness",
    "TruthResult",
    "path_weight_metric",
    "path_weight_ultrametric",
    "truth_value",
    "truth_value_direct_only",
    "truth_value_pairs",
    "truth_value_matrix",
    "brute_force_truth",
    "StatementMatrix",
    "RocReport",
    "CorrelationReport",
    "CorpusEvaluation",
    "auroc",
    "spearman_rho",
    "kendall_tau_b",
    "rank_correlations",
    "build_statement_matrix",
    "evaluate_annotated_corpus",
    "export_confusion_matrix",
    "FeatureMode",
    "FeatureMatrix",
    "FoldSpec",
    "CvReport",
    "ModeComparison",
    "resolve_targets",
    "build_feature_matrix",
    "knn_classify",
    "random_forest_classify",
    "compare_modes",
    "GraphFactChecker",
    "TruthFeaturizer",
]
