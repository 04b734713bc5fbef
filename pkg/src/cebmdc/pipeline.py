"""Divide-and-conquer pipeline for mixed data: split the dataset into its
categorical and numeric views, cluster each view, then consolidate the two
label vectors with weighted Squeezer.

The consolidation step sees only the two label columns, rendered as a
two-attribute categorical dataset whose attribute weights are the original
categorical and numeric attribute counts (each original attribute carries
equal importance, so a view's label speaks for that many attributes).

The numeric clusterer is pluggable: any callable (dataset, config) ->
Partition works; the deterministic k-means in this package is the default.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .data import (
    MISSING_TOKEN,
    Attribute,
    AttributeKind,
    DataError,
    MissingAction,
    MissingPolicy,
    MixedDataset,
    Row,
    Schema,
    _picker,
)
from .kmeans import NumericClustererConfig, kmeans
from .squeezer import (
    Partition,
    SqueezerConfig,
    WeightVector,
    normalize_threshold,
    squeezer,
)

NumericClusterer = Callable[[MixedDataset, NumericClustererConfig], Partition]

ENSEMBLE_ATTRIBUTES = ("categorical_label", "numeric_label")


class PipelineError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    """Settings for one end-to-end run.

    ``categorical_threshold`` is on the raw similarity scale of the
    unit-weighted categorical view; ``ensemble_threshold_norm`` is normalized
    to [0, 1] and mapped onto the ensemble weight total at run time.
    ``ensemble_weights`` overrides the default (m_c, m_n) weighting when set.
    """

    categorical_threshold: float
    numeric: NumericClustererConfig
    ensemble_threshold_norm: float
    missing_policy: Optional[MissingPolicy] = None
    ensemble_weights: Optional[tuple[float, float]] = None

    def __post_init__(self) -> None:
        if self.categorical_threshold < 0:
            raise PipelineError("categorical_threshold must be >= 0")
        if not 0.0 <= self.ensemble_threshold_norm <= 1.0:
            raise PipelineError("ensemble_threshold_norm must be in [0, 1]")


@dataclass(frozen=True)
class EnsembleDataset:
    """Two-attribute categorical rendering of a pair of partitions, plus the
    attribute weights to cluster it with."""

    dataset: MixedDataset
    weights: WeightVector


@dataclass(frozen=True)
class RunReport:
    """What a pipeline run did: view sizes, emergent cluster counts, the
    thresholds actually used, and stage wall-clock.

    Timings are in-memory only; the serialized report excludes them so that
    repeated runs produce byte-identical files.
    """

    n: int
    m_categorical: int
    m_numeric: int
    k_categorical: Optional[int]
    k_numeric: Optional[int]
    k_final: int
    categorical_threshold: Optional[float]
    ensemble_threshold_norm: Optional[float]
    ensemble_threshold_raw: Optional[float]
    ensemble_weight_categorical: Optional[float]
    ensemble_weight_numeric: Optional[float]
    degraded_view: Optional[str] = None
    seconds_categorical: float = field(default=0.0, compare=False)
    seconds_numeric: float = field(default=0.0, compare=False)
    seconds_ensemble: float = field(default=0.0, compare=False)
    seconds_total: float = field(default=0.0, compare=False)

    @property
    def seconds_stages(self) -> float:
        return self.seconds_categorical + self.seconds_numeric + self.seconds_ensemble

    def to_key_values(self) -> list[tuple[str, str]]:
        def fmt(v) -> str:
            if v is None:
                return "none"
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return [
            ("n", fmt(self.n)),
            ("m_c", fmt(self.m_categorical)),
            ("m_n", fmt(self.m_numeric)),
            ("k_c", fmt(self.k_categorical)),
            ("k_n", fmt(self.k_numeric)),
            ("k_final", fmt(self.k_final)),
            ("categorical_threshold", fmt(self.categorical_threshold)),
            ("ensemble_threshold_norm", fmt(self.ensemble_threshold_norm)),
            ("ensemble_threshold_raw", fmt(self.ensemble_threshold_raw)),
            ("ensemble_weight_categorical", fmt(self.ensemble_weight_categorical)),
            ("ensemble_weight_numeric", fmt(self.ensemble_weight_numeric)),
            ("degraded_view", fmt(self.degraded_view)),
        ]

    def to_dict(self) -> dict:
        return dict(self.to_key_values())


def prepare_views(
    ds: MixedDataset, policy: Optional[MissingPolicy]
) -> tuple[MixedDataset, MixedDataset]:
    """Missing-policy application, split, and numeric rescale in one step.

    Equivalent to apply_missing_policy -> treat-as-category for leftover
    missing categoricals -> split_dataset -> minmax_rescale(numeric view),
    fused into one row pass so pipeline glue stays far below the clustering
    stages' cost (the equivalence against the op composition is covered by
    tests). Missing categorical cells surviving the configured policy are
    kept as the reserved "?" category.
    """
    schema = ds.schema
    cat_idx = schema.indices_of_kind(AttributeKind.CATEGORICAL)
    num_idx = schema.indices_of_kind(AttributeKind.NUMERIC)
    pick_c, pick_n = _picker(cat_idx), _picker(num_idx)

    drop_pick = None
    fill_idx: set[int] = set()
    fill_value: object = None
    if policy is not None:
        if policy.action == MissingAction.DROP_ROWS:
            idxs = (
                tuple(range(schema.m)) if policy.target is None
                else schema.indices_of_kind(policy.target)
            )
            drop_pick = _picker(idxs) if idxs else None
        elif policy.action == MissingAction.FILL_NUMERIC:
            fill_idx = set(num_idx)
            fill_value = float(policy.fill_value)
        else:
            fill_idx = set(cat_idx)
            fill_value = policy.fill_token

    rows_c = []
    tids = []
    num_values = []
    for tid, values in ds.rows:
        if None in values:
            if drop_pick is not None and None in drop_pick(values):
                continue
            if fill_idx:
                values = tuple(
                    fill_value if (v is None and i in fill_idx) else v
                    for i, v in enumerate(values)
                )
            cvals = pick_c(values)
            if None in cvals:
                cvals = tuple(MISSING_TOKEN if v is None else v for v in cvals)
        else:
            cvals = pick_c(values)
        rows_c.append(Row(tid, cvals))
        tids.append(tid)
        num_values.append(pick_n(values))

    cat = MixedDataset._unchecked(schema.select(cat_idx), tuple(rows_c))

    # numeric view: column-wise (x - min)/(max - min), constant columns -> 0
    if num_idx and num_values:
        columns = list(zip(*num_values))
        for j, col in enumerate(columns):
            if None in col:
                tid = tids[col.index(None)]
                raise DataError(
                    f"missing numeric cell at tid={tid}, column "
                    f"{schema.names[num_idx[j]]!r}: apply a MissingPolicy before rescaling"
                )
            lo = min(col)
            span = max(col) - lo
            if span == 0.0:
                columns[j] = (0.0,) * len(col)
            else:
                columns[j] = tuple([(v - lo) / span for v in col])
        rows_n = tuple(map(Row, tids, zip(*columns)))
    else:
        rows_n = tuple(Row(t, ()) for t in tids) if not num_idx else ()
    num = MixedDataset._unchecked(schema.select(num_idx), rows_n)
    return cat, num


def combine_labels(
    part_categorical: Partition, part_numeric: Partition, m_c: int, m_n: int
) -> EnsembleDataset:
    """Render two partitions over the same tids as a 2-column categorical
    dataset, one row per tid in the categorical partition's scan order.

    Label tokens are source-prefixed ("c3" vs "n3") so the two columns can
    never collide on a value.
    """
    if part_categorical.labels.keys() != part_numeric.labels.keys():
        only_c = set(part_categorical.labels) - set(part_numeric.labels)
        only_n = set(part_numeric.labels) - set(part_categorical.labels)
        raise PipelineError(
            f"partitions cover different tids (categorical-only: {sorted(only_c)[:5]}, "
            f"numeric-only: {sorted(only_n)[:5]})"
        )
    cat_tokens = [f"c{i}" for i in range(part_categorical.k + 1)]
    num_tokens = [f"n{i}" for i in range(part_numeric.k + 1)]
    num_labels = part_numeric.labels
    rows = tuple(
        Row(tid, (cat_tokens[c], num_tokens[num_labels[tid]]))
        for tid, c in part_categorical.labels.items()
    )
    schema = Schema(
        tuple(Attribute(name, AttributeKind.CATEGORICAL) for name in ENSEMBLE_ATTRIBUTES)
    )
    return EnsembleDataset(
        MixedDataset._unchecked(schema, rows), WeightVector((float(m_c), float(m_n)))
    )


def run_cebmdc(
    ds: MixedDataset,
    cfg: PipelineConfig,
    numeric_clusterer: NumericClusterer = kmeans,
) -> tuple[Partition, RunReport]:
    """Full run: prepare views, cluster both, consolidate.

    Degenerate inputs with only one attribute kind skip the ensemble and
    return the lone view's partition directly.
    """
    t_start = time.perf_counter()
    cat, num = prepare_views(ds, cfg.missing_policy)
    m_c, m_n = cat.schema.m, num.schema.m
    if m_c == 0 and m_n == 0:
        raise PipelineError("dataset has no attributes")

    if m_n == 0:
        t0 = time.perf_counter()
        part = squeezer(
            cat, SqueezerConfig(cfg.categorical_threshold, WeightVector.unit(m_c))
        )
        t1 = time.perf_counter()
        report = RunReport(
            n=part.n,
            m_categorical=m_c,
            m_numeric=0,
            k_categorical=part.k,
            k_numeric=None,
            k_final=part.k,
            categorical_threshold=cfg.categorical_threshold,
            ensemble_threshold_norm=None,
            ensemble_threshold_raw=None,
            ensemble_weight_categorical=None,
            ensemble_weight_numeric=None,
            degraded_view="categorical-only",
            seconds_categorical=t1 - t0,
            seconds_total=time.perf_counter() - t_start,
        )
        return part, report

    if m_c == 0:
        t0 = time.perf_counter()
        part = numeric_clusterer(num, cfg.numeric)
        t1 = time.perf_counter()
        report = RunReport(
            n=part.n,
            m_categorical=0,
            m_numeric=m_n,
            k_categorical=None,
            k_numeric=part.k,
            k_final=part.k,
            categorical_threshold=None,
            ensemble_threshold_norm=None,
            ensemble_threshold_raw=None,
            ensemble_weight_categorical=None,
            ensemble_weight_numeric=None,
            degraded_view="numeric-only",
            seconds_numeric=t1 - t0,
            seconds_total=time.perf_counter() - t_start,
        )
        return part, report

    t0 = time.perf_counter()
    part_c = squeezer(
        cat, SqueezerConfig(cfg.categorical_threshold, WeightVector.unit(m_c))
    )
    t1 = time.perf_counter()
    part_n = numeric_clusterer(num, cfg.numeric)
    t2 = time.perf_counter()

    # the ensemble stage spans producing the combined dataset and clustering it
    t3 = time.perf_counter()
    ens = combine_labels(part_c, part_n, m_c, m_n)
    weights = (
        WeightVector(cfg.ensemble_weights) if cfg.ensemble_weights else ens.weights
    )
    raw = normalize_threshold(cfg.ensemble_threshold_norm, weights)
    final = squeezer(ens.dataset, SqueezerConfig(raw, weights))
    t4 = time.perf_counter()

    report = RunReport(
        n=final.n,
        m_categorical=m_c,
        m_numeric=m_n,
        k_categorical=part_c.k,
        k_numeric=part_n.k,
        k_final=final.k,
        categorical_threshold=cfg.categorical_threshold,
        ensemble_threshold_norm=cfg.ensemble_threshold_norm,
        ensemble_threshold_raw=raw,
        ensemble_weight_categorical=weights.w[0],
        ensemble_weight_numeric=weights.w[1],
        seconds_categorical=t1 - t0,
        seconds_numeric=t2 - t1,
        seconds_ensemble=t4 - t3,
        seconds_total=time.perf_counter() - t_start,
    )
    return final, report
