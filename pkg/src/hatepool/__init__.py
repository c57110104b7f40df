"""Annotate multilingual web text for hate speech with a four-model LLM ensemble.

The pipeline: filter exported web-index records down to conversational
content, collect per-class token probabilities from four model endpoints,
combine them (majority vote, probability mean, or a boosted-tree
meta-learner), and evaluate the pooled labels against benchmark datasets.
"""

from .datasets import (
    BinaryLabel,
    DatasetSpec,
    LabeledExample,
    LabelMappingError,
    TrainingConfig,
    UnknownDatasetError,
    build_training_config,
    dataset_stats,
    load_registry,
    map_label,
)
from .ensemble import (
    ProbabilityVector,
    mean_hate_score,
    mean_label,
    model_votes,
    vote_hate_score,
    vote_label,
)
from .filtering import (
    FilterConfig,
    FilterStats,
    UrlParseError,
    WebRecord,
    filter_records,
    normalize_url_path,
    schema_type_match,
    subsample_by_language,
    url_keyword_match,
)
from .gateway import (
    AnnotationResult,
    AnnotatorEndpoint,
    QuarantinedText,
    annotate_batch,
    read_annotations,
    write_annotations,
)
from .gbdt import (
    BoostedTrees,
    MetaLearnerConfig,
    TreeNode,
    gbdt_fit,
    gbdt_predict_proba,
    gbdt_predict_raw,
    logistic_gradients,
    split_gain,
)
from .meta import (
    MetaLearnerModel,
    SingleClassError,
    load_model,
    predict_meta,
    predict_meta_many,
    save_model,
    train_meta,
    train_meta_on_vectors,
)
from .metrics import (
    ConfusionCounts,
    EvaluationReport,
    GroupSpec,
    PredictionRow,
    accuracy,
    apply_threshold,
    build_report,
    confusion,
    default_groups,
    delta_report,
    f1_from_counts,
    macro_f1,
    mean_probability_threshold,
    pooled_group_scores,
    render_report_table,
)
from .mockserver import MockAnnotatorServer, deterministic_weights
from .poolstats import PoolSummary, pool_statistics, render_pool_table
from .prompt import (
    DEFAULT_TEMPLATE_TEXT,
    ExtractionError,
    ModelProbability,
    PromptTemplate,
    extract_label_probabilities,
    render_prompt,
)

__all__ = [
    "AnnotationResult",
    "AnnotatorEndpoint",
    "BinaryLabel",
    "BoostedTrees",
    "ConfusionCounts",
    "DEFAULT_TEMPLATE_TEXT",
    "DatasetSpec",
    "EvaluationReport",
    "ExtractionError",
    "FilterConfig",
    "FilterStats",
    "GroupSpec",
    "LabelMappingError",
    "LabeledExample",
    "MetaLearnerConfig",
    "MetaLearnerModel",
    "MockAnnotatorServer",
    "ModelProbability",
    "PoolSummary",
    "PredictionRow",
    "ProbabilityVector",
    "PromptTemplate",
    "QuarantinedText",
    "SingleClassError",
    "TrainingConfig",
    "TreeNode",
    "UnknownDatasetError",
    "UrlParseError",
    "WebRecord",
    "accuracy",
    "annotate_batch",
    "apply_threshold",
    "build_report",
    "build_training_config",
    "confusion",
    "dataset_stats",
    "default_groups",
    "delta_report",
    "deterministic_weights",
    "extract_label_probabilities",
    "f1_from_counts",
    "filter_records",
    "gbdt_fit",
    "gbdt_predict_proba",
    "gbdt_predict_raw",
    "load_model",
    "load_registry",
    "logistic_gradients",
    "macro_f1",
    "map_label",
    "mean_hate_score",
    "mean_label",
    "mean_probability_threshold",
    "model_votes",
    "normalize_url_path",
    "pool_statistics",
    "pooled_group_scores",
    "predict_meta",
    "predict_meta_many",
    "read_annotations",
    "render_pool_table",
    "render_report_table",
    "render_prompt",
    "save_model",
    "schema_type_match",
    "split_gain",
    "subsample_by_language",
    "train_meta",
    "train_meta_on_vectors",
    "url_keyword_match",
    "vote_hate_score",
    "vote_label",
    "write_annotations",
]
