import struct

import numpy as np
import pytest

from regularities.embed_io import (
    EmbeddingParseError,
    EmbeddingTable,
    LookupPolicy,
    load,
    load_binary,
    load_text,
    lookup,
    save_binary,
    save_text,
)


def write_w2v(path, entries, trailing_newline=True, header=None):
    """Independent fixture writer using struct, not the package's own writer."""
    dim = len(entries[0][1])
    data = (header or f"{len(entries)} {dim}\n").encode()
    for word, values in entries:
        data += word.encode("utf-8") + b" " + struct.pack(f"<{dim}f", *values)
        if trailing_newline:
            data += b"\n"
    path.write_bytes(data)
    return path


ENTRIES = [("a", [1.5, -2.0, 0.25]), ("b", [0.0, 3.0, -1.0])]


class TestBinary:
    @pytest.mark.parametrize("trailing", [True, False])
    def test_round_trip_payload(self, tmp_path, trailing):
        p = write_w2v(tmp_path / "v.bin", ENTRIES, trailing_newline=trailing)
        t = load_binary(p, normalize=False)
        assert t.words == ["a", "b"]
        assert t.dim == 3
        np.testing.assert_array_equal(t.matrix, np.array([e[1] for e in ENTRIES], dtype=np.float32))

    def test_limit(self, tmp_path):
        t = load_binary(write_w2v(tmp_path / "v.bin", ENTRIES), limit=1, normalize=False)
        assert t.words == ["a"] and len(t) == 1

    def test_empty_file(self, tmp_path):
        (tmp_path / "e.bin").write_bytes(b"")
        with pytest.raises(EmbeddingParseError, match="empty"):
            load_binary(tmp_path / "e.bin")

    def test_truncated_reports_offset(self, tmp_path):
        p = write_w2v(tmp_path / "v.bin", ENTRIES)
        data = p.read_bytes()
        p.write_bytes(data[:-6])
        with pytest.raises(EmbeddingParseError) as err:
            load_binary(p)
        assert err.value.offset is not None and err.value.offset > 0

    def test_malformed_header(self, tmp_path):
        p = write_w2v(tmp_path / "v.bin", ENTRIES, header="two 3\n")
        with pytest.raises(EmbeddingParseError, match="header"):
            load_binary(p)

    def test_non_finite(self, tmp_path):
        p = write_w2v(tmp_path / "v.bin", [("a", [1.0, float("nan")])])
        with pytest.raises(EmbeddingParseError, match="non-finite"):
            load_binary(p)

    def test_normalize(self, tmp_path):
        t = load_binary(write_w2v(tmp_path / "v.bin", ENTRIES), normalize=True)
        assert t.normalized
        np.testing.assert_allclose(np.linalg.norm(t.matrix, axis=1), 1.0, atol=1e-5)

    def test_utf8_words(self, tmp_path):
        t = load_binary(write_w2v(tmp_path / "v.bin", [("café", [1.0, 2.0]), ("北京", [0.5, 0.5])]), normalize=False)
        assert t.words == ["café", "北京"]

    def test_duplicates_keep_first(self, tmp_path):
        p = write_w2v(tmp_path / "v.bin", [("a", [1.0, 0.0]), ("a", [0.0, 1.0]), ("b", [1.0, 1.0])])
        t = load_binary(p, normalize=False)
        assert t.words == ["a", "b"] and t.n_duplicates == 1
        np.testing.assert_array_equal(t.matrix[0], [1.0, 0.0])

    def test_random_round_trip_exact(self, tmp_path, rng):
        m = rng.standard_normal((40, 7)).astype(np.float32)
        t = EmbeddingTable.from_rows([f"w{i}" for i in range(40)], m)
        save_binary(t, tmp_path / "r.bin")
        back = load_binary(tmp_path / "r.bin", normalize=False)
        assert back.words == t.words
        np.testing.assert_array_equal(back.matrix, t.matrix)

    def test_deterministic(self, tmp_path):
        p = write_w2v(tmp_path / "v.bin", ENTRIES)
        assert load_binary(p).matrix.tobytes() == load_binary(p).matrix.tobytes()


class TestText:
    def test_two_lines(self, tmp_path):
        (tmp_path / "t.txt").write_text("a 1 0\nb 0 1\n")
        t = load_text(tmp_path / "t.txt", normalize=False)
        assert t.words == ["a", "b"]
        np.testing.assert_array_equal(t.matrix, [[1, 0], [0, 1]])

    def test_header_autodetected(self, tmp_path):
        (tmp_path / "a.txt").write_text("a 1 0\nb 0 1\n")
        (tmp_path / "b.txt").write_text("2 2\na 1 0\nb 0 1\n")
        a, b = load_text(tmp_path / "a.txt"), load_text(tmp_path / "b.txt")
        assert a.words == b.words
        np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_inconsistent_dims_names_line(self, tmp_path):
        (tmp_path / "t.txt").write_text("a 1 0\nb 0 1 2\n")
        with pytest.raises(EmbeddingParseError) as err:
            load_text(tmp_path / "t.txt")
        assert err.value.line == 2

    def test_empty(self, tmp_path):
        (tmp_path / "t.txt").write_text("")
        with pytest.raises(EmbeddingParseError):
            load_text(tmp_path / "t.txt")

    def test_limit(self, tmp_path):
        (tmp_path / "t.txt").write_text("2 2\na 1 0\nb 0 1\n")
        assert load_text(tmp_path / "t.txt", limit=1).words == ["a"]

    def test_random_round_trip(self, tmp_path, rng):
        m = rng.uniform(-1, 1, (30, 5))
        t = EmbeddingTable.from_rows([f"w{i}" for i in range(30)], m)
        save_text(t, tmp_path / "r.txt")
        back = load_text(tmp_path / "r.txt", normalize=False)
        assert back.words == t.words
        np.testing.assert_allclose(back.matrix, t.matrix, atol=1e-5)

    def test_load_dispatch(self, tmp_path):
        (tmp_path / "t.txt").write_text("a 1 0\n")
        assert load(tmp_path / "t.txt", "text").words == ["a"]
        with pytest.raises(ValueError):
            load(tmp_path / "t.txt", "hdf5")


class TestLookup:
    @pytest.fixture
    def table(self):
        return EmbeddingTable.from_rows(["Paris", "paris", "france"], [[1, 0], [0, 1], [1, 1]])

    def test_exact(self, table):
        np.testing.assert_array_equal(lookup(table, "Paris"), [1, 0])

    def test_case_fallback(self):
        t = EmbeddingTable.from_rows(["paris"], [[0, 1]])
        np.testing.assert_array_equal(lookup(t, "PARIS", LookupPolicy(case_fallback=True)), [0, 1])
        assert lookup(t, "PARIS") is None

    def test_unknown(self, table):
        assert lookup(table, "berlin", LookupPolicy(case_fallback=True)) is None


def test_table_rejects_non_finite():
    with pytest.raises(ValueError):
        EmbeddingTable(["a"], np.array([[np.inf, 0]], dtype=np.float32))
