"""Weighted Squeezer: one-pass clustering of categorical tuples.

Each cluster is held as a cluster structure: its member tid set plus a
per-attribute summary mapping every value seen in the cluster to its support
(how many members hold it). A tuple's similarity to a cluster is the weighted
sum, over attributes, of the support mass its value owns:

    sim = sum_i  w_i * Sup(value_i) / sum_over_values_of_attr_i(Sup)

The scan visits each row exactly once, in dataset order: the first row founds
cluster 1; every later row joins its most similar cluster when that similarity
reaches the threshold, and founds a new cluster otherwise. Ties on the maximal
similarity go to the lowest (earliest-created) cluster index, and the join
comparison is a plain `>=` with no floating-point fuzz, so sweeps should avoid
placing the threshold exactly on attainable similarity values.
"""

from __future__ import annotations

from dataclasses import dataclass

from .data import AttributeKind, MixedDataset, Row


class SqueezerError(ValueError):
    pass


@dataclass(frozen=True)
class WeightVector:
    """Per-attribute non-negative weights; at least one must be positive."""

    w: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(x < 0 for x in self.w):
            raise SqueezerError("weights must be non-negative")
        if self.w and not any(x > 0 for x in self.w):
            raise SqueezerError("at least one weight must be positive")

    def __len__(self) -> int:
        return len(self.w)

    @property
    def total(self) -> float:
        return sum(self.w)

    @classmethod
    def unit(cls, m: int) -> "WeightVector":
        return cls((1.0,) * m)


@dataclass(frozen=True)
class SqueezerConfig:
    """Raw-scale similarity threshold (comparable to sum of weights) plus the
    attribute weights."""

    threshold: float
    weights: WeightVector

    def __post_init__(self) -> None:
        if self.threshold < 0:
            raise SqueezerError("threshold must be >= 0")


@dataclass(frozen=True)
class Partition:
    """tid -> 1-based dense cluster index; the universal clustering output.

    ``labels`` preserves the producing scan's row order.
    """

    labels: dict[int, int]
    k: int

    def __post_init__(self) -> None:
        if not self.labels:
            raise SqueezerError("a partition must label at least one tid")
        seen = set(self.labels.values())
        if seen != set(range(1, self.k + 1)):
            raise SqueezerError(
                f"cluster indices must be exactly 1..{self.k}, got {sorted(seen)}"
            )

    @property
    def n(self) -> int:
        return len(self.labels)

    def members(self) -> list[list[int]]:
        """Cluster index -> member tids, in label order (list position i holds
        cluster i+1)."""
        out: list[list[int]] = [[] for _ in range(self.k)]
        for tid, c in self.labels.items():
            out[c - 1].append(tid)
        return out


class ClusterStructure:
    """Member tids plus the incrementally maintained per-attribute summary.

    ``value_support[i]`` maps attribute i's values to their support;
    ``support_totals[i]`` is the sum of those supports (equals the member
    count whenever the data is complete).
    """

    __slots__ = ("members", "value_support", "support_totals")

    def __init__(self, m: int) -> None:
        self.members: set[int] = set()
        self.value_support: list[dict[str, int]] = [{} for _ in range(m)]
        self.support_totals: list[int] = [0] * m

    @property
    def size(self) -> int:
        return len(self.members)


def add_new_cluster_structure(model: list[ClusterStructure], row: Row) -> ClusterStructure:
    """Append a fresh cluster founded by ``row``; returns the new structure."""
    for cs in model:
        if row.tid in cs.members:
            raise SqueezerError(f"tid {row.tid} is already clustered")
    cs = ClusterStructure(len(row.values))
    model.append(cs)
    add_tuple_to_cluster(cs, row)
    return cs


def add_tuple_to_cluster(cs: ClusterStructure, row: Row) -> ClusterStructure:
    """Insert ``row`` into ``cs``, updating every attribute's support table."""
    if row.tid in cs.members:
        raise SqueezerError(f"tid {row.tid} is already a member of this cluster")
    if len(row.values) != len(cs.value_support):
        raise SqueezerError(
            f"row has {len(row.values)} values, cluster summary has "
            f"{len(cs.value_support)} attributes"
        )
    cs.members.add(row.tid)
    totals = cs.support_totals
    for i, v in enumerate(row.values):
        sup = cs.value_support[i]
        sup[v] = sup.get(v, 0) + 1
        totals[i] += 1
    return cs


def similarity(cs: ClusterStructure, row: Row, weights: WeightVector) -> float:
    """Weighted support-mass similarity between a cluster and a tuple.

    A value a cluster has never seen contributes 0; the result lies in
    [0, sum of weights].
    """
    w = weights.w
    if len(row.values) != len(cs.value_support) or len(w) != len(cs.value_support):
        raise SqueezerError("row, summary, and weights must have equal lengths")
    sim = 0.0
    for wi, v, sup, tot in zip(w, row.values, cs.value_support, cs.support_totals):
        cnt = sup.get(v)
        if cnt:
            sim += wi * (cnt / tot)
    return sim


def squeezer(ds: MixedDataset, cfg: SqueezerConfig) -> Partition:
    """Cluster a categorical dataset in a single sequential scan.

    ``ds`` only needs ``.schema`` and an iterable ``.rows``; each row is
    visited exactly once. Missing cells are rejected as they are encountered
    (resolve them with a MissingPolicy first).
    """
    schema = ds.schema
    if any(k != AttributeKind.CATEGORICAL for k in schema.kinds):
        raise SqueezerError("squeezer requires an all-categorical dataset")
    if len(cfg.weights) != schema.m:
        raise SqueezerError(
            f"weight vector has {len(cfg.weights)} entries, dataset has {schema.m} attributes"
        )
    weights = cfg.weights
    s = cfg.threshold

    model: list[ClusterStructure] = []
    labels: dict[int, int] = {}
    for row in ds.rows:
        if None in row.values:
            raise SqueezerError(
                f"tid {row.tid} has a missing cell; apply a MissingPolicy first"
            )
        best_sim = -1.0
        best_idx = -1
        for idx, cs in enumerate(model):
            sim = similarity(cs, row, weights)
            if sim > best_sim:
                best_sim = sim
                best_idx = idx
        if best_idx >= 0 and best_sim >= s:
            add_tuple_to_cluster(model[best_idx], row)
            labels[row.tid] = best_idx + 1
        else:
            add_new_cluster_structure(model, row)
            labels[row.tid] = len(model)
    if not model:
        raise SqueezerError("cannot cluster an empty dataset")
    return Partition(labels, len(model))


def normalize_threshold(s_norm: float, weights: WeightVector) -> float:
    """Map a normalized threshold in [0, 1] onto the raw similarity scale
    (multiply by the weight total)."""
    if not 0.0 <= s_norm <= 1.0:
        raise SqueezerError(f"normalized threshold must be in [0, 1], got {s_norm}")
    return s_norm * weights.total
