import random

import pytest

from cebmdc import (
    MissingPolicy,
    Partition,
    Row,
    SqueezerConfig,
    WeightVector,
    add_new_cluster_structure,
    add_tuple_to_cluster,
    apply_missing_policy,
    normalize_threshold,
    similarity,
    split_dataset,
    squeezer,
)
from cebmdc.squeezer import ClusterStructure, SqueezerError
from conftest import make_categorical, make_numeric, random_categorical
from oracles import naive_similarity, naive_squeezer


def unit(m):
    return WeightVector.unit(m)


class TestWeightVector:
    def test_negative_rejected(self):
        with pytest.raises(SqueezerError):
            WeightVector((1.0, -0.5))

    def test_all_zero_rejected(self):
        with pytest.raises(SqueezerError):
            WeightVector((0.0, 0.0))

    def test_total(self):
        assert WeightVector((9.0, 6.0)).total == 15.0

    def test_negative_threshold_rejected(self):
        with pytest.raises(SqueezerError):
            SqueezerConfig(-0.1, unit(2))


class TestPartition:
    def test_dense_indices_enforced(self):
        with pytest.raises(SqueezerError, match="1..2"):
            Partition({1: 1, 2: 3}, 2)

    def test_empty_rejected(self):
        with pytest.raises(SqueezerError):
            Partition({}, 0)

    def test_members(self):
        p = Partition({10: 1, 11: 2, 12: 1}, 2)
        assert p.members() == [[10, 12], [11]]


class TestSimilarity:
    def test_identical_singleton_gives_weight_total(self):
        model = []
        cs = add_new_cluster_structure(model, Row(1, ("a", "x", "q")))
        sim = similarity(cs, Row(2, ("a", "x", "q")), unit(3))
        assert sim == pytest.approx(3.0, abs=1e-12)

    def test_hand_computed_example(self):
        # cluster rows {(a,x),(a,y)}, query (a,x): 2/2 + 1/2
        model = []
        cs = add_new_cluster_structure(model, Row(1, ("a", "x")))
        add_tuple_to_cluster(cs, Row(2, ("a", "y")))
        sim = similarity(cs, Row(3, ("a", "x")), unit(2))
        assert sim == pytest.approx(1.5, abs=1e-12)

    def test_disjoint_is_zero(self):
        model = []
        cs = add_new_cluster_structure(model, Row(1, ("a", "x")))
        assert similarity(cs, Row(2, ("b", "y")), unit(2)) == 0.0

    def test_length_mismatch(self):
        model = []
        cs = add_new_cluster_structure(model, Row(1, ("a", "x")))
        with pytest.raises(SqueezerError):
            similarity(cs, Row(2, ("a",)), unit(2))
        with pytest.raises(SqueezerError):
            similarity(cs, Row(2, ("a", "x")), unit(3))

    def test_matches_naive_on_random_clusters(self):
        rng = random.Random(7)
        for _ in range(50):
            m = rng.randint(1, 3)
            members = [
                tuple(f"v{rng.randint(1, 3)}" for _ in range(m))
                for _ in range(rng.randint(1, 6))
            ]
            weights = tuple(float(rng.randint(1, 4)) for _ in range(m))
            model = []
            cs = add_new_cluster_structure(model, Row(1, members[0]))
            for i, vals in enumerate(members[1:], start=2):
                add_tuple_to_cluster(cs, Row(i, vals))
            query = tuple(f"v{rng.randint(1, 4)}" for _ in range(m))
            got = similarity(cs, Row(99, query), WeightVector(weights))
            want = naive_similarity(members, query, weights)
            assert got == pytest.approx(want, abs=1e-12)
            assert 0.0 <= got <= sum(weights) + 1e-12


class TestClusterStructureOps:
    def test_bootstrap_first_tuple(self):
        model = []
        cs = add_new_cluster_structure(model, Row(1, ("a", "x")))
        assert cs.members == {1}
        assert cs.value_support == [{"a": 1}, {"x": 1}]
        assert model == [cs]

    def test_new_cluster_leaves_existing_untouched(self):
        model = []
        c1 = add_new_cluster_structure(model, Row(1, ("a",)))
        c2 = add_new_cluster_structure(model, Row(2, ("b",)))
        before = [dict(d) for d in c1.value_support]
        add_new_cluster_structure(model, Row(3, ("c",)))
        assert len(model) == 3
        assert model[0] is c1 and model[1] is c2
        assert [dict(d) for d in c1.value_support] == before

    def test_reserved_token_counts_as_value(self):
        model = []
        cs = add_new_cluster_structure(model, Row(1, ("?", "x")))
        assert cs.value_support[0] == {"?": 1}

    def test_already_clustered_tid_rejected(self):
        model = []
        add_new_cluster_structure(model, Row(1, ("a",)))
        with pytest.raises(SqueezerError):
            add_new_cluster_structure(model, Row(1, ("b",)))

    def test_add_tuple_hand_example(self):
        model = []
        cs = add_new_cluster_structure(model, Row(1, ("a", "x")))
        add_tuple_to_cluster(cs, Row(2, ("a", "y")))
        assert cs.members == {1, 2}
        assert cs.value_support == [{"a": 2}, {"x": 1, "y": 1}]

    def test_duplicate_row_increments_all_supports(self):
        model = []
        cs = add_new_cluster_structure(model, Row(1, ("a", "x")))
        add_tuple_to_cluster(cs, Row(2, ("a", "x")))
        assert cs.value_support == [{"a": 2}, {"x": 2}]

    def test_duplicate_tid_rejected(self):
        model = []
        cs = add_new_cluster_structure(model, Row(1, ("a",)))
        with pytest.raises(SqueezerError):
            add_tuple_to_cluster(cs, Row(1, ("a",)))

    def test_incremental_summary_matches_recomputation(self):
        rng = random.Random(13)
        model = []
        rows = []
        cs = None
        for tid in range(1, 30):
            vals = (f"v{rng.randint(1, 3)}", f"w{rng.randint(1, 2)}")
            rows.append(vals)
            if cs is None:
                cs = add_new_cluster_structure(model, Row(tid, vals))
            else:
                add_tuple_to_cluster(cs, Row(tid, vals))
            # recompute from scratch
            fresh = [{}, {}]
            for vv in rows:
                for i, v in enumerate(vv):
                    fresh[i][v] = fresh[i].get(v, 0) + 1
            assert cs.value_support == fresh
            assert cs.support_totals == [len(rows), len(rows)]


class TestSqueezerScan:
    def test_hand_trace(self):
        ds = make_categorical([("a", "x"), ("a", "x"), ("b", "y")])
        part = squeezer(ds, SqueezerConfig(1.0, unit(2)))
        assert part.labels == {1: 1, 2: 1, 3: 2}
        assert part.k == 2

    def test_threshold_floor_single_cluster(self):
        rng = random.Random(3)
        for _ in range(10):
            ds = random_categorical(rng)
            part = squeezer(ds, SqueezerConfig(0.0, unit(ds.schema.m)))
            assert part.k == 1

    def test_threshold_ceiling_singletons(self):
        rng = random.Random(4)
        for _ in range(10):
            ds = random_categorical(rng)
            m = ds.schema.m
            part = squeezer(ds, SqueezerConfig(m + 0.5, unit(m)))
            assert part.k == ds.n

    def test_empty_dataset_rejected(self):
        ds = make_categorical([("a",)])
        empty = type(ds)(ds.schema, ())
        with pytest.raises(SqueezerError):
            squeezer(empty, SqueezerConfig(1.0, unit(1)))

    def test_missing_cell_rejected(self):
        ds = make_categorical([("a",), (None,)])
        with pytest.raises(SqueezerError, match="MissingPolicy"):
            squeezer(ds, SqueezerConfig(0.5, unit(1)))

    def test_numeric_dataset_rejected(self):
        ds = make_numeric([(1.0,)])
        with pytest.raises(SqueezerError, match="categorical"):
            squeezer(ds, SqueezerConfig(0.5, unit(1)))

    def test_weight_length_mismatch(self):
        ds = make_categorical([("a", "b")])
        with pytest.raises(SqueezerError, match="weight"):
            squeezer(ds, SqueezerConfig(0.5, unit(3)))

    def test_determinism(self):
        rng = random.Random(5)
        ds = random_categorical(rng, max_n=10, min_n=5)
        cfg = SqueezerConfig(1.2, unit(ds.schema.m))
        assert squeezer(ds, cfg).labels == squeezer(ds, cfg).labels

    def test_tie_breaks_to_lowest_cluster_index(self):
        # two singleton clusters, then a row equally similar to both
        ds = make_categorical([("a", "x"), ("b", "y"), ("a", "y")])
        part = squeezer(ds, SqueezerConfig(1.0, unit(2)))
        # row 3 has similarity 1 to both clusters; joins cluster 1
        assert part.labels[3] == 1

    def test_credit_view_soft_cluster_count(self, credit):
        kept = apply_missing_policy(credit.dataset, credit.policy)
        cat, _ = split_dataset(kept)
        part = squeezer(cat, SqueezerConfig(4.0, unit(9)))
        assert part.k in {3, 4, 5}


class OnePassProbe:
    """Dataset stand-in whose row iterator counts how often each row is
    handed out; a second scan would double the count."""

    def __init__(self, ds):
        self._ds = ds
        self.visits = 0

    @property
    def schema(self):
        return self._ds.schema

    @property
    def rows(self):
        for row in self._ds.rows:
            self.visits += 1
            yield row


class TestOnePass:
    def test_each_row_visited_exactly_once(self):
        rng = random.Random(6)
        for _ in range(20):
            ds = random_categorical(rng, min_n=2)
            probe = OnePassProbe(ds)
            squeezer(probe, SqueezerConfig(0.7, unit(ds.schema.m)))
            assert probe.visits == ds.n


class TestAgainstNaive:
    def test_random_instances_match_oracle(self):
        rng = random.Random(42)
        for _ in range(100):
            ds = random_categorical(rng)
            m = ds.schema.m
            weights = tuple(float(rng.randint(1, 3)) for _ in range(m))
            threshold = rng.uniform(0.0, sum(weights) * 1.1)
            part = squeezer(ds, SqueezerConfig(threshold, WeightVector(weights)))
            want = naive_squeezer([r.values for r in ds.rows], weights, threshold)
            assert [part.labels[r.tid] for r in ds.rows] == want


class TestScaleCovariance:
    @pytest.mark.parametrize("c", [0.5, 3.0])
    def test_scaling_weights_and_threshold_preserves_partition(self, c):
        rng = random.Random(17)
        for _ in range(40):
            ds = random_categorical(rng, min_n=2)
            m = ds.schema.m
            weights = tuple(float(rng.randint(1, 3)) for _ in range(m))
            threshold = rng.uniform(0.05, sum(weights))
            base = squeezer(ds, SqueezerConfig(threshold, WeightVector(weights)))
            scaled = squeezer(
                ds,
                SqueezerConfig(c * threshold, WeightVector(tuple(c * w for w in weights))),
            )
            assert base.labels == scaled.labels


class TestDenominatorIdentity:
    def test_support_totals_equal_cluster_size(self):
        rng = random.Random(23)
        ds = random_categorical(rng, max_n=10, min_n=8)
        m = ds.schema.m
        cfg = SqueezerConfig(0.8, unit(m))
        # replay the scan manually so every cluster structure stays reachable
        model = []
        rows_by_cluster = {}
        for row in ds.rows:
            sims = [similarity(cs, row, cfg.weights) for cs in model]
            if sims and max(sims) >= cfg.threshold:
                idx = sims.index(max(sims))
                add_tuple_to_cluster(model[idx], row)
                rows_by_cluster[idx].append(row)
            else:
                add_new_cluster_structure(model, row)
                rows_by_cluster[len(model) - 1] = [row]
            for j, cs in enumerate(model):
                size = len(rows_by_cluster[j])
                assert cs.support_totals == [size] * m
                for sup in cs.value_support:
                    assert sum(sup.values()) == size

    def test_similarity_formulations_agree(self):
        # per-attribute summed supports vs the cluster-size denominator
        rng = random.Random(29)
        for _ in range(30):
            m = rng.randint(1, 3)
            members = [
                tuple(f"v{rng.randint(1, 3)}" for _ in range(m))
                for _ in range(rng.randint(1, 8))
            ]
            model = []
            cs = add_new_cluster_structure(model, Row(1, members[0]))
            for i, vals in enumerate(members[1:], start=2):
                add_tuple_to_cluster(cs, Row(i, vals))
            weights = WeightVector(tuple(float(rng.randint(1, 3)) for _ in range(m)))
            query = tuple(f"v{rng.randint(1, 3)}" for _ in range(m))
            via_op = similarity(cs, Row(0, query), weights)
            size = len(members)
            via_size = sum(
                w * cs.value_support[i].get(query[i], 0) / size
                for i, w in enumerate(weights.w)
            )
            assert via_op == pytest.approx(via_size, abs=1e-12)


class TestNormalizeThreshold:
    def test_arithmetic(self):
        assert normalize_threshold(0.3, WeightVector((9.0, 6.0))) == pytest.approx(4.5, abs=1e-12)

    def test_endpoints(self):
        w = WeightVector((2.0, 3.0))
        assert normalize_threshold(0.0, w) == 0.0
        assert normalize_threshold(1.0, w) == 5.0

    def test_credit_inversion(self):
        # unit weights on 9 attributes: s_norm = 4/9 recovers the raw threshold 4
        assert normalize_threshold(4 / 9, WeightVector.unit(9)) == pytest.approx(4.0, abs=1e-12)

    def test_out_of_range_rejected(self):
        with pytest.raises(SqueezerError):
            normalize_threshold(1.01, WeightVector.unit(2))
        with pytest.raises(SqueezerError):
            normalize_threshold(-0.01, WeightVector.unit(2))
