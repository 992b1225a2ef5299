import numpy as np
import pytest

from regularities.bats import (
    BroadType,
    DatasetError,
    Relation,
    enumerate_quads,
    load_dataset,
    parse_relation_file,
    resolve,
)
from regularities.embed_io import EmbeddingTable, LookupPolicy

from conftest import TYPE_DIRS, write_bats


def one_file(tmp_path, lines, btype=BroadType.INFLECTIONAL, name="I01 [noun - plural_reg].txt"):
    write_bats(tmp_path, {(btype, name): lines})
    return tmp_path / TYPE_DIRS[btype] / name


class TestParse:
    def test_simple_pair(self, tmp_path):
        rel = parse_relation_file(one_file(tmp_path, ["cat\tcats"]))
        assert rel.pairs == (("cat", "cats"),)
        assert rel.name == "I01 [noun - plural_reg]"
        assert rel.broad_type is BroadType.INFLECTIONAL

    def test_keep_first_alternative(self, tmp_path):
        rel = parse_relation_file(one_file(tmp_path, ["mouse\tmice/mouses"]))
        assert rel.pairs == (("mouse", "mice"),)

    def test_duplicate_start_keeps_first(self, tmp_path):
        rel = parse_relation_file(one_file(tmp_path, ["run\tran", "run\trunning"]))
        assert rel.pairs == (("run", "ran"),)

    def test_missing_tab(self, tmp_path):
        with pytest.raises(DatasetError, match="line 2"):
            parse_relation_file(one_file(tmp_path, ["cat\tcats", "dog dogs"]))

    def test_empty_field(self, tmp_path):
        with pytest.raises(DatasetError, match="line 1"):
            parse_relation_file(one_file(tmp_path, ["cat\t"]))


class TestLoadDataset:
    def test_full_layout(self, tmp_path):
        files = {}
        for btype in BroadType:
            for k in range(10):
                files[(btype, f"{btype.value[0]}{k:02d} [rel{k}].txt")] = [f"x{k}\ty{k}"]
        rels = load_dataset(write_bats(tmp_path, files))
        assert len(rels) == 40
        for btype in BroadType:
            assert sum(r.broad_type is btype for r in rels) == 10

    def test_single_file(self, tmp_path):
        write_bats(tmp_path, {(BroadType.ENCYCLOPEDIC, "E01 [country - capital].txt"): ["france\tparis"]})
        rels = load_dataset(tmp_path)
        assert len(rels) == 1 and rels[0].broad_type is BroadType.ENCYCLOPEDIC

    def test_empty_root(self, tmp_path):
        with pytest.raises(DatasetError):
            load_dataset(tmp_path)

    def test_unrecognized_dir_lists_found(self, tmp_path):
        (tmp_path / "misc").mkdir()
        with pytest.raises(DatasetError, match="misc"):
            load_dataset(tmp_path)

    def test_idempotent(self, tmp_path):
        write_bats(tmp_path, {(BroadType.LEXICOGRAPHIC, "L02 [x].txt"): ["a\tb", "c\td"],
                              (BroadType.LEXICOGRAPHIC, "L01 [y].txt"): ["e\tf"]})
        first, second = load_dataset(tmp_path), load_dataset(tmp_path)
        assert first == second
        assert [r.name for r in first] == ["L01 [y]", "L02 [x]"]


class TestResolve:
    @pytest.fixture
    def table(self):
        words = ["cat", "cats", "dog", "dogs", "Paris", "same1", "same2"]
        rows = [[1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 1, 1], [0, 0, 1], [2, 2, 2], [2, 2, 2]]
        return EmbeddingTable.from_rows(words, rows)

    def test_all_present(self, table):
        r = resolve(Relation("r", None, (("cat", "cats"), ("dog", "dogs"))), table)
        assert r.dropped == 0 and r.starts == ["cat", "dog"]
        np.testing.assert_array_equal(r.end_vectors[1], [0, 1, 1])

    def test_one_missing(self, table):
        r = resolve(Relation("r", None, (("cat", "cats"), ("cow", "dogs"), ("dog", "dogs"))), table)
        assert r.dropped == 1 and r.starts == ["cat", "dog"]

    def test_all_missing_is_unusable(self, table):
        r = resolve(Relation("r", None, (("x", "y"), ("z", "w"))), table)
        assert len(r) == 0 and not r.usable and r.dropped == 2

    def test_identical_vectors_dropped(self, table):
        r = resolve(Relation("r", None, (("same1", "same2"), ("cat", "cats"))), table)
        assert r.starts == ["cat"] and r.n_identical == 1 and r.dropped == 1

    def test_case_fallback(self, table):
        rel = Relation("r", None, (("paris", "cat"),))
        assert len(resolve(rel, table)) == 0
        # fallback only lowercases, so "paris" does not find "Paris"
        assert len(resolve(rel, table, LookupPolicy(case_fallback=True))) == 0
        rel2 = Relation("r", None, (("CAT", "cats"),))
        assert resolve(rel2, table, LookupPolicy(case_fallback=True)).starts == ["cat"]


class TestQuads:
    def _resolved(self, n):
        words = [f"s{i}" for i in range(n)] + [f"e{i}" for i in range(n)]
        rows = np.vstack([np.eye(n), 2 * np.eye(n)])
        t = EmbeddingTable.from_rows(words, rows)
        return resolve(Relation("r", None, tuple((f"s{i}", f"e{i}") for i in range(n))), t)

    @pytest.mark.parametrize("n, expected", [(2, 2), (50, 2450), (1, 0)])
    def test_count(self, n, expected):
        assert len(enumerate_quads(self._resolved(n))) == expected

    def test_pairs_distinct(self):
        for q in enumerate_quads(self._resolved(6)):
            assert (q.a, q.a_star) != (q.b, q.b_star)
