"""demet: a binary classifier that decides by entropy perturbation.

A candidate row is virtually inserted into each class pool; the class whose
total Shannon entropy drops (largest difference of entropy metrics) claims
the row. The package ships the full pipeline: CSV ingest with imputation,
fraction-of-max binning, optional one-hot expansion, incremental entropy
maintenance, model serialization, evaluation reports, and a CLI.
"""

__version__ = "0.1.0"

from .binning import (
    BIN_TOKENS,
    BinEdges,
    CategoricalTable,
    apply_bins,
    fit_bins,
    one_hot_expand,
    onehot_vocabulary,
)
from .classifier import (
    ClassifierModel,
    encode_table,
    fit,
    fit_pipeline,
    load_model,
    predict_batch,
    predict_one,
    resolve_label_mapping,
    save_model,
)
from .entropy import (
    CLASS_TAGS,
    NEGATIVE,
    POSITIVE,
    DemEvaluation,
    DemScores,
    EntropyProfile,
    PoolStats,
    attribute_entropy,
    build_pool,
    dem,
    entropy_profile,
    global_profile,
    verify_incremental,
)
from .errors import (
    DataError,
    DemetError,
    ModelFormatError,
    ParseError,
    SchemaError,
    UnfittableError,
)
from .evaluation import (
    EvaluationReport,
    accuracy_bars_data,
    entropy_per_attribute_data,
    entropy_table,
    evaluate,
    export_plot_data,
    metrics_from_confusion,
    report_from_dict,
)
from .ingest import MISSING_TOKEN, RawTable, impute, load_csv
from .schema import ColumnSpec, Schema, draft_schema, load_schema, schema_from_dict

__all__ = [
    "__version__",
    "BIN_TOKENS",
    "BinEdges",
    "CategoricalTable",
    "apply_bins",
    "fit_bins",
    "one_hot_expand",
    "onehot_vocabulary",
    "ClassifierModel",
    "encode_table",
    "fit",
    "fit_pipeline",
    "load_model",
    "predict_batch",
    "predict_one",
    "resolve_label_mapping",
    "save_model",
    "CLASS_TAGS",
    "NEGATIVE",
    "POSITIVE",
    "DemEvaluation",
    "DemScores",
    "EntropyProfile",
    "PoolStats",
    "attribute_entropy",
    "build_pool",
    "dem",
    "entropy_profile",
    "global_profile",
    "verify_incremental",
    "DataError",
    "DemetError",
    "ModelFormatError",
    "ParseError",
    "SchemaError",
    "UnfittableError",
    "EvaluationReport",
    "accuracy_bars_data",
    "entropy_per_attribute_data",
    "entropy_table",
    "evaluate",
    "export_plot_data",
    "metrics_from_confusion",
    "report_from_dict",
    "MISSING_TOKEN",
    "RawTable",
    "impute",
    "load_csv",
    "ColumnSpec",
    "Schema",
    "draft_schema",
    "load_schema",
    "schema_from_dict",
]
