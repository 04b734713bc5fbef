"""Clustering accuracy, partition fingerprints, threshold search, and the
experiment harness (ensemble-threshold sweeps and per-k view comparison).

Accuracy is per-cluster majority: each cluster contributes the count of its
most frequent class; accuracy r is those counts summed over clusters divided
by n, and error e = 1 - r. No one-to-one cluster/class matching is enforced,
so k may exceed the number of classes.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .data import MissingPolicy, MixedDataset
from .kmeans import kmeans
from .pipeline import (
    NumericClusterer,
    PipelineConfig,
    combine_labels,
    prepare_views,
)
from .squeezer import (
    Partition,
    SqueezerConfig,
    WeightVector,
    normalize_threshold,
    squeezer,
)


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class ClusterAccuracy:
    index: int
    size: int
    dominant_class: str
    dominant_count: int


@dataclass(frozen=True)
class EvaluationReport:
    per_cluster: tuple[ClusterAccuracy, ...]
    n: int
    accuracy: float
    error: float

    @property
    def k(self) -> int:
        return len(self.per_cluster)

    def to_lines(self) -> list[str]:
        lines = [
            f"n={self.n}",
            f"k={self.k}",
            f"r={self.accuracy!r}",
            f"e={self.error!r}",
        ]
        for c in self.per_cluster:
            lines.append(
                f"cluster={c.index} size={c.size} "
                f"dominant={c.dominant_class} count={c.dominant_count}"
            )
        return lines


def accuracy(part: Partition, classes: Mapping[int, str]) -> EvaluationReport:
    """Per-cluster dominant-class accuracy.

    When several classes tie for a cluster's maximum, the tied count is what
    the metric uses; the reported label is the lexicographically smallest of
    the tied classes.
    """
    missing = [tid for tid in part.labels if tid not in classes]
    if missing:
        raise EvalError(f"no class label for tids {sorted(missing)[:10]}")
    rows = []
    total = 0
    for idx, tids in enumerate(part.members(), start=1):
        counts = Counter(classes[t] for t in tids)
        a_i = max(counts.values())
        label = min(c for c, cnt in counts.items() if cnt == a_i)
        rows.append(ClusterAccuracy(idx, len(tids), label, a_i))
        total += a_i
    r = total / part.n
    return EvaluationReport(tuple(rows), part.n, r, 1.0 - r)


def partition_fingerprint(part: Partition) -> str:
    """Hash of the label grouping, invariant under cluster relabeling and
    report row order (stable across processes)."""
    groups = sorted(tuple(sorted(m)) for m in part.members())
    return hashlib.sha1(repr(groups).encode("ascii")).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Threshold search (bisection for a target cluster count)
# ---------------------------------------------------------------------------


def search_threshold(
    run: Callable[[float], Partition],
    lo: float,
    hi: float,
    target_k: int,
    max_probes: int = 40,
) -> tuple[float, Partition]:
    """Bisection over a threshold whose cluster count grows with it.

    Returns the probed threshold whose k lands nearest target_k (ties to the
    smaller threshold); stops early on an exact hit.
    """
    if max_probes < 1:
        raise EvalError("max_probes must be >= 1")
    best: Optional[tuple[int, float, Partition]] = None
    for _ in range(max_probes):
        mid = (lo + hi) / 2.0
        part = run(mid)
        diff = abs(part.k - target_k)
        if best is None or diff < best[0] or (diff == best[0] and mid < best[1]):
            best = (diff, mid, part)
        if part.k == target_k:
            break
        if part.k < target_k:
            lo = mid
        else:
            hi = mid
    assert best is not None
    return best[1], best[2]


def search_categorical_threshold(
    view: MixedDataset, target_k: int, max_probes: int = 40
) -> tuple[float, Partition]:
    """Find a unit-weight raw threshold on a categorical view whose emergent
    cluster count is nearest target_k."""
    weights = WeightVector.unit(view.schema.m)
    return search_threshold(
        lambda s: squeezer(view, SqueezerConfig(s, weights)),
        0.0,
        weights.total,
        target_k,
        max_probes,
    )


# ---------------------------------------------------------------------------
# Ensemble-threshold sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    s_norm: float
    k: int
    accuracy: float
    error: float
    fingerprint: str


@dataclass(frozen=True)
class SweepReport:
    points: tuple[SweepPoint, ...]

    def widest_plateau(self) -> tuple[float, float, str]:
        """Widest contiguous run of identical fingerprints, as
        (s_norm_lo, s_norm_hi, fingerprint); first one wins ties."""
        if not self.points:
            raise EvalError("empty sweep")
        best = (self.points[0].s_norm, self.points[0].s_norm, self.points[0].fingerprint)
        start = 0
        pts = self.points
        for i in range(1, len(pts) + 1):
            if i == len(pts) or pts[i].fingerprint != pts[start].fingerprint:
                lo, hi = pts[start].s_norm, pts[i - 1].s_norm
                if hi - lo > best[1] - best[0]:
                    best = (lo, hi, pts[start].fingerprint)
                start = i
        return best

    def to_csv_rows(self) -> list[tuple[str, str, str, str, str]]:
        return [
            (repr(p.s_norm), str(p.k), repr(p.accuracy), repr(p.error), p.fingerprint)
            for p in self.points
        ]


def default_sweep_grid(step: float = 0.05) -> list[float]:
    if not 0 < step <= 1:
        raise EvalError("grid step must be in (0, 1]")
    n = round(1.0 / step)
    grid = [round(i * step, 12) for i in range(n + 1)]
    if grid[-1] < 1.0:
        grid.append(1.0)
    return grid


@dataclass(frozen=True)
class FixedViews:
    """Base-view partitions clustered once, for experiments that vary only
    the ensemble stage."""

    part_categorical: Partition
    part_numeric: Partition
    m_categorical: int
    m_numeric: int


def cluster_views(
    ds: MixedDataset,
    cfg: PipelineConfig,
    numeric_clusterer: NumericClusterer = kmeans,
) -> FixedViews:
    cat, num = prepare_views(ds, cfg.missing_policy)
    if cat.schema.m == 0 or num.schema.m == 0:
        raise EvalError("ensemble experiments need both a categorical and a numeric view")
    part_c = squeezer(
        cat, SqueezerConfig(cfg.categorical_threshold, WeightVector.unit(cat.schema.m))
    )
    part_n = numeric_clusterer(num, cfg.numeric)
    return FixedViews(part_c, part_n, cat.schema.m, num.schema.m)


def _ensemble_runner(
    views: FixedViews, cfg: PipelineConfig
) -> tuple[Callable[[float], Partition], WeightVector]:
    ens = combine_labels(
        views.part_categorical, views.part_numeric, views.m_categorical, views.m_numeric
    )
    weights = WeightVector(cfg.ensemble_weights) if cfg.ensemble_weights else ens.weights

    def run(s_norm: float) -> Partition:
        raw = normalize_threshold(s_norm, weights)
        return squeezer(ens.dataset, SqueezerConfig(raw, weights))

    return run, weights


def sweep_ensemble_threshold(
    ds: MixedDataset,
    cfg: PipelineConfig,
    grid: Sequence[float],
    classes: Mapping[int, str],
    numeric_clusterer: NumericClusterer = kmeans,
) -> SweepReport:
    """Cluster the views once, then re-run only the ensemble stage at every
    normalized threshold in the grid."""
    bad = [g for g in grid if not 0.0 <= g <= 1.0]
    if bad:
        raise EvalError(f"grid values outside [0, 1]: {bad}")
    views = cluster_views(ds, cfg, numeric_clusterer)
    run, _ = _ensemble_runner(views, cfg)
    points = []
    for s_norm in sorted(grid):
        part = run(s_norm)
        rep = accuracy(part, classes)
        points.append(
            SweepPoint(s_norm, part.k, rep.accuracy, rep.error, partition_fingerprint(part))
        )
    return SweepReport(tuple(points))


# ---------------------------------------------------------------------------
# Final-k error study and per-k view comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinalKPoint:
    target_k: int
    achieved_k: int
    s_norm: float
    error: float


def ensemble_error_by_final_k(
    views: FixedViews,
    cfg: PipelineConfig,
    targets: Iterable[int],
    classes: Mapping[int, str],
) -> list[FinalKPoint]:
    """With the base views fixed, search the ensemble threshold for each
    target final cluster count and record the clustering error there."""
    run, _ = _ensemble_runner(views, cfg)
    out = []
    for k in targets:
        s_norm, part = search_threshold(run, 0.0, 1.0, k)
        out.append(FinalKPoint(k, part.k, s_norm, accuracy(part, classes).error))
    return out


@dataclass(frozen=True)
class ViewComparison:
    k: int
    achieved_k_categorical: int
    error_categorical: float
    error_numeric: float
    error_final: float


def compare_views(
    ds: MixedDataset,
    cfg: PipelineConfig,
    k_values: Sequence[int],
    classes: Mapping[int, str],
    numeric_clusterer: NumericClusterer = kmeans,
) -> list[ViewComparison]:
    """Per-k comparison of the two view clusterings against the final output.

    For each k the categorical threshold is bisection-searched to the value
    whose cluster count lands nearest k, the numeric clusterer runs at k, and
    the ensemble stage runs at the configured normalized threshold.
    """
    cat, num = prepare_views(ds, cfg.missing_policy)
    if cat.schema.m == 0 or num.schema.m == 0:
        raise EvalError("compare_views needs both a categorical and a numeric view")
    out = []
    for k in k_values:
        _, part_c = search_categorical_threshold(cat, k)
        part_n = numeric_clusterer(num, replace(cfg.numeric, k=k))
        views = FixedViews(part_c, part_n, cat.schema.m, num.schema.m)
        run, _ = _ensemble_runner(views, cfg)
        final = run(cfg.ensemble_threshold_norm)
        out.append(
            ViewComparison(
                k=k,
                achieved_k_categorical=part_c.k,
                error_categorical=accuracy(part_c, classes).error,
                error_numeric=accuracy(part_n, classes).error,
                error_final=accuracy(final, classes).error,
            )
        )
    return out
