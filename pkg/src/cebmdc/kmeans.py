"""Deterministic k-means reference clusterer for the numeric view.

The pipeline treats the numeric clusterer as pluggable: anything with the
signature (dataset, NumericClustererConfig) -> Partition can be slotted in.
This reference implementation is Lloyd's algorithm with farthest-point
initialization, fully deterministic under a fixed input order:

- first center: the row with the lowest tid
- each next center: the row maximizing distance to its nearest chosen
  center, ties to the lowest tid
- assignment ties break to the lowest cluster index
- an emptied cluster is reseeded with the point farthest from its assigned
  centroid (taken from a cluster that can spare one, ties to lowest tid)

``seed`` is carried in the config for clusterers that need randomness; the
reference implementation never draws from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import AttributeKind, MixedDataset
from .squeezer import Partition


class KMeansError(ValueError):
    pass


@dataclass(frozen=True)
class NumericClustererConfig:
    k: int
    seed: int = 0
    max_iterations: int = 100
    convergence_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.k < 1:
            raise KMeansError("k must be >= 1")
        if self.seed < 0:
            raise KMeansError("seed must be >= 0")
        if self.max_iterations < 1:
            raise KMeansError("max_iterations must be >= 1")
        if self.convergence_tol < 0:
            raise KMeansError("convergence_tol must be >= 0")


@dataclass(frozen=True)
class KMeansResult:
    partition: Partition
    centroids: np.ndarray
    objective_history: tuple[float, ...]
    iterations: int


def _as_matrix(ds: MixedDataset) -> tuple[np.ndarray, list[int]]:
    if any(k != AttributeKind.NUMERIC for k in ds.schema.kinds):
        raise KMeansError("kmeans requires an all-numeric dataset")
    tids = [r.tid for r in ds.rows]
    for r in ds.rows:
        if None in r.values:
            raise KMeansError(
                f"tid {r.tid} has a missing cell; apply a MissingPolicy first"
            )
    x = np.array([r.values for r in ds.rows], dtype=np.float64)
    return x, tids


def _farthest_point_init(x: np.ndarray, tids: list[int], k: int) -> np.ndarray:
    tid_arr = np.asarray(tids)
    chosen = [int(np.argmin(tid_arr))]
    # distance of every point to its nearest already-chosen center
    d = np.linalg.norm(x - x[chosen[0]], axis=1)
    for _ in range(1, k):
        dmax = d.max()
        cand = np.flatnonzero(d == dmax)
        nxt = int(cand[np.argmin(tid_arr[cand])])
        chosen.append(nxt)
        d = np.minimum(d, np.linalg.norm(x - x[nxt], axis=1))
    return x[chosen].copy()


def _repair_empty(
    x: np.ndarray, tid_arr: np.ndarray, labels: np.ndarray, centroids: np.ndarray
) -> np.ndarray:
    """Reseed each empty cluster with the point farthest from its assigned
    centroid, never stripping a cluster down to empty."""
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        dist = np.linalg.norm(x - centroids[labels], axis=1)
        movable = counts[labels] > 1
        if not movable.any():
            raise KMeansError("cannot repair empty cluster: no donor cluster")
        dist = np.where(movable, dist, -np.inf)
        dmax = dist.max()
        cand = np.flatnonzero(dist == dmax)
        p = int(cand[np.argmin(tid_arr[cand])])
        counts[labels[p]] -= 1
        labels[p] = j
        counts[j] = 1
        centroids[j] = x[p]
    return labels


def kmeans_detailed(ds: MixedDataset, cfg: NumericClustererConfig) -> KMeansResult:
    x, tids = _as_matrix(ds)
    n = len(tids)
    if cfg.k > n:
        raise KMeansError(f"k={cfg.k} exceeds the number of rows ({n})")
    tid_arr = np.asarray(tids)
    k = cfg.k

    centroids = _farthest_point_init(x, tids, k)
    labels = np.zeros(n, dtype=np.int64)
    history: list[float] = []
    iterations = 0
    for _ in range(cfg.max_iterations):
        iterations += 1
        # assignment: nearest centroid, np.argmin breaks ties to lowest index
        d2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        new_labels = _repair_empty(x, tid_arr, new_labels, centroids)

        new_centroids = np.empty_like(centroids)
        for j in range(k):
            new_centroids[j] = x[new_labels == j].mean(axis=0)

        history.append(
            float(((x - new_centroids[new_labels]) ** 2).sum())
        )
        movement = float(np.linalg.norm(new_centroids - centroids, axis=1).max())
        unchanged = iterations > 1 and np.array_equal(new_labels, labels)
        labels = new_labels
        centroids = new_centroids
        if unchanged or movement < cfg.convergence_tol:
            break

    part = Partition({int(t): int(c) + 1 for t, c in zip(tids, labels)}, k)
    return KMeansResult(part, centroids, tuple(history), iterations)


def kmeans(ds: MixedDataset, cfg: NumericClustererConfig) -> Partition:
    """Cluster a rescaled numeric dataset into exactly k non-empty clusters."""
    return kmeans_detailed(ds, cfg).partition
