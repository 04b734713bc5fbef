"""Cluster-ensemble clustering for mixed numeric and categorical data.

Split a mixed dataset into its pure categorical and pure numeric views,
cluster each view with an algorithm suited to it, then consolidate the two
label vectors with a weighted one-pass categorical clusterer whose attribute
weights are the views' original attribute counts.
"""

from .data import (
    Attribute,
    AttributeKind,
    DataError,
    MissingPolicy,
    MixedDataset,
    Row,
    Schema,
    apply_missing_policy,
    dump_csv,
    dump_schema,
    load_csv,
    load_schema,
    minmax_rescale,
    split_dataset,
)
from .evaluate import (
    EvaluationReport,
    SweepReport,
    accuracy,
    compare_views,
    partition_fingerprint,
    search_categorical_threshold,
    sweep_ensemble_threshold,
)
from .kmeans import NumericClustererConfig, kmeans
from .pipeline import (
    EnsembleDataset,
    PipelineConfig,
    RunReport,
    combine_labels,
    run_cebmdc,
)
from .squeezer import (
    ClusterStructure,
    Partition,
    SqueezerConfig,
    WeightVector,
    add_new_cluster_structure,
    add_tuple_to_cluster,
    normalize_threshold,
    similarity,
    squeezer,
)

__version__ = "0.1.0"

__all__ = [
    "Attribute",
    "AttributeKind",
    "ClusterStructure",
    "DataError",
    "EnsembleDataset",
    "EvaluationReport",
    "MissingPolicy",
    "MixedDataset",
    "NumericClustererConfig",
    "Partition",
    "PipelineConfig",
    "Row",
    "RunReport",
    "Schema",
    "SqueezerConfig",
    "SweepReport",
    "WeightVector",
    "accuracy",
    "add_new_cluster_structure",
    "add_tuple_to_cluster",
    "apply_missing_policy",
    "combine_labels",
    "compare_views",
    "dump_csv",
    "dump_schema",
    "kmeans",
    "load_csv",
    "load_schema",
    "minmax_rescale",
    "normalize_threshold",
    "partition_fingerprint",
    "run_cebmdc",
    "search_categorical_threshold",
    "similarity",
    "split_dataset",
    "squeezer",
    "sweep_ensemble_threshold",
]
