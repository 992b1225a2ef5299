from collections import Counter

import numpy as np
import pytest

from regularities.baselines import (
    BaselineError,
    BaselineKind,
    Scope,
    baseline_suite,
    mismatch_categories,
    permute_within_category,
    randomize,
    score_instance,
)
from regularities.offsets import PcsConfig


@pytest.fixture
def data(clustered_dataset):
    return clustered_dataset


class TestPermute:
    def test_multisets_preserved(self, data):
        _, rels = data
        inst = permute_within_category(rels[0], np.random.default_rng(0))
        assert inst.resolved.starts == rels[0].starts
        assert Counter(inst.resolved.ends) == Counter(rels[0].ends)
        assert inst.kind is BaselineKind.PERMUTED_WITHIN_CATEGORY

    def test_same_seed_same_pairs(self, data):
        _, rels = data
        a = permute_within_category(rels[1], np.random.default_rng(5)).pairs
        b = permute_within_category(rels[1], np.random.default_rng(5)).pairs
        assert a == b

    def test_three_pairs(self, data):
        table, rels = data
        from regularities.bats import Relation, resolve
        small = resolve(Relation("s", None, rels[0].relation.pairs[:3]), table)
        inst = permute_within_category(small, np.random.default_rng(1))
        assert sorted(inst.resolved.ends) == sorted(small.ends)


class TestMismatch:
    def test_within_type_shares_type(self, data):
        _, rels = data
        inst = mismatch_categories(rels, Scope.WITHIN_TYPE, np.random.default_rng(0), source=rels[0])
        partner = inst.source.split(" -> ")[1]
        by_name = {r.name: r for r in rels}
        assert by_name[partner].broad_type == rels[0].broad_type
        assert set(inst.resolved.starts) <= set(rels[0].starts)
        assert set(inst.resolved.ends) <= set(by_name[partner].ends)
        assert len(inst.pairs) == min(50, len(rels[0]), len(by_name[partner]))

    def test_across_type_differs(self, data):
        _, rels = data
        for seed in range(5):
            inst = mismatch_categories(rels, "across", np.random.default_rng(seed))
            src, partner = inst.source.split(" -> ")
            by_name = {r.name: r for r in rels}
            assert by_name[src].broad_type != by_name[partner].broad_type
            assert inst.broad_type == by_name[src].broad_type

    def test_no_partner(self, data):
        _, rels = data
        with pytest.raises(BaselineError):
            mismatch_categories(rels[:1], Scope.WITHIN_TYPE, np.random.default_rng(0))


class TestRandomize:
    def test_end(self, data):
        table, rels = data
        inst = randomize(rels[0], "end", table, np.random.default_rng(0))
        assert inst.resolved.starts == rels[0].starts
        own = set(rels[0].starts) | set(rels[0].ends)
        assert not own & set(inst.resolved.ends)
        assert len(set(inst.resolved.ends)) == len(rels[0])

    def test_start(self, data):
        table, rels = data
        inst = randomize(rels[0], "start", table, np.random.default_rng(0))
        assert inst.resolved.ends == rels[0].ends

    def test_both_untyped(self, data):
        table, rels = data
        inst = randomize(rels[0], "both", table, np.random.default_rng(0))
        assert inst.broad_type is None
        assert not set(inst.resolved.starts) & set(inst.resolved.ends)

    def test_insufficient_vocabulary(self, data):
        table, rels = data
        from regularities.embed_io import EmbeddingTable
        tiny = EmbeddingTable.from_rows(table.words[:70], table.matrix[:70])
        from regularities.bats import resolve
        res = resolve(rels[0].relation, tiny)
        with pytest.raises(BaselineError):
            randomize(res, "both", tiny, np.random.default_rng(0))


class TestSuite:
    def test_counts_and_determinism(self, data):
        table, rels = data
        kinds = [BaselineKind.PERMUTED_WITHIN_CATEGORY, BaselineKind.RANDOM_BOTH]
        a = baseline_suite(rels, table, n_instances=3, seed=1, kinds=kinds)
        b = baseline_suite(rels, table, n_instances=3, seed=1, kinds=kinds)
        assert len(a) == 2 * len(rels) * 3
        assert [x.pairs for x in a] == [y.pairs for y in b]
        c = baseline_suite(rels, table, n_instances=3, seed=2, kinds=kinds)
        assert [x.pairs for x in a] != [y.pairs for y in c]

    def test_all_kinds_present(self, data):
        table, rels = data
        suite = baseline_suite(rels, table, n_instances=1, seed=0)
        assert {i.kind for i in suite} == set(BaselineKind)

    def test_score_instance(self, data):
        table, rels = data
        inst = randomize(rels[2], "both", table, np.random.default_rng(3))
        sc = score_instance(inst, PcsConfig(n_shuffles=5))
        assert -1 <= sc.ocs <= 1 and 0 <= sc.pcs <= 1
