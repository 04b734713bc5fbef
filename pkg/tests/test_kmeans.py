import random

import numpy as np
import pytest

from cebmdc import NumericClustererConfig, kmeans
from cebmdc.kmeans import KMeansError, kmeans_detailed
from conftest import make_categorical, make_numeric
from oracles import naive_kmeans_best_two_split


class TestConfig:
    def test_validation(self):
        with pytest.raises(KMeansError):
            NumericClustererConfig(k=0)
        with pytest.raises(KMeansError):
            NumericClustererConfig(k=2, max_iterations=0)
        with pytest.raises(KMeansError):
            NumericClustererConfig(k=2, seed=-1)
        with pytest.raises(KMeansError):
            NumericClustererConfig(k=2, convergence_tol=-1e-3)


class TestKMeans:
    def test_two_separated_groups(self):
        pts = [(0.0, 0.0), (0.1, 0.0), (1.0, 1.0), (0.9, 1.0)]
        ds = make_numeric(pts)
        part = kmeans(ds, NumericClustererConfig(k=2))
        groups = frozenset(frozenset(t - 1 for t in m) for m in part.members())
        assert groups == naive_kmeans_best_two_split(pts)

    def test_k_one(self):
        ds = make_numeric([(0.0,), (1.0,), (2.0,)])
        part = kmeans(ds, NumericClustererConfig(k=1))
        assert part.k == 1
        assert set(part.labels.values()) == {1}

    def test_k_equals_n(self):
        ds = make_numeric([(0.0,), (0.3,), (0.7,), (1.0,)])
        part = kmeans(ds, NumericClustererConfig(k=4))
        assert part.k == 4
        assert sorted(part.labels.values()) == [1, 2, 3, 4]

    def test_k_larger_than_n_rejected(self):
        ds = make_numeric([(0.0,), (1.0,)])
        with pytest.raises(KMeansError, match="exceeds"):
            kmeans(ds, NumericClustererConfig(k=3))

    def test_missing_cell_rejected(self):
        ds = make_numeric([(0.0,), (None,)])
        with pytest.raises(KMeansError, match="MissingPolicy"):
            kmeans(ds, NumericClustererConfig(k=1))

    def test_categorical_dataset_rejected(self):
        ds = make_categorical([("a",)])
        with pytest.raises(KMeansError, match="numeric"):
            kmeans(ds, NumericClustererConfig(k=1))

    def test_assignment_tie_breaks_to_lowest_index(self):
        # centers seed at 0.0 (lowest tid) and 1.0 (farthest); 0.5 is equidistant
        ds = make_numeric([(0.0,), (1.0,), (0.5,)])
        part = kmeans(ds, NumericClustererConfig(k=2, max_iterations=1))
        assert part.labels[3] == 1

    def test_determinism(self):
        rng = random.Random(11)
        pts = [(rng.random(), rng.random()) for _ in range(40)]
        ds = make_numeric(pts)
        cfg = NumericClustererConfig(k=5)
        assert kmeans(ds, cfg).labels == kmeans(ds, cfg).labels

    def test_exactly_k_nonempty_clusters(self):
        rng = random.Random(19)
        for trial in range(20):
            n = rng.randint(3, 25)
            # duplicate-heavy data to force empty-cluster repair
            base = [(rng.random(), rng.random()) for _ in range(max(2, n // 3))]
            pts = [base[rng.randrange(len(base))] for _ in range(n)]
            k = rng.randint(1, n)
            part = kmeans(make_numeric(pts), NumericClustererConfig(k=k))
            assert part.k == k
            sizes = [len(m) for m in part.members()]
            assert all(s >= 1 for s in sizes)
            assert sum(sizes) == n

    def test_monotone_objective(self):
        rng = random.Random(31)
        for _ in range(20):
            n = rng.randint(5, 40)
            pts = [(rng.random(), rng.random(), rng.random()) for _ in range(n)]
            k = rng.randint(1, min(6, n))
            res = kmeans_detailed(make_numeric(pts), NumericClustererConfig(k=k))
            hist = res.objective_history
            assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))

    def test_centroids_shape_and_partition_cover(self):
        ds = make_numeric([(0.0, 1.0), (0.2, 0.9), (1.0, 0.0)])
        res = kmeans_detailed(ds, NumericClustererConfig(k=2))
        assert res.centroids.shape == (2, 2)
        assert set(res.partition.labels) == {1, 2, 3}

    def test_all_identical_points(self):
        ds = make_numeric([(0.5, 0.5)] * 4)
        part = kmeans(ds, NumericClustererConfig(k=2))
        assert part.k == 2
        assert sum(len(m) for m in part.members()) == 4
