"""Reading and writing pretrained embeddings.

Two on-disk layouts are supported:

* binary (word2vec style): an ASCII ``"<count> <dim>\\n"`` header, then for each
  entry the word bytes, one 0x20 space, and ``dim`` little-endian float32 values.
  A single 0x0A after the floats is tolerated.
* text (GloVe style): an optional ``"<count> <dim>"`` header line, then one line
  per word: the word followed by ``dim`` space-separated decimals.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

import numpy as np
from numpy.typing import NDArray

logger = logging.getLogger(__name__)

_FLOAT_LE = np.dtype("<f4")


class EmbeddingParseError(ValueError):
    """Malformed embedding file. Carries ``offset`` (bytes) or ``line`` when known."""

    def __init__(self, message: str, *, offset: int | None = None, line: int | None = None):
        where = []
        if offset is not None:
            where.append(f"byte offset {offset}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.offset = offset
        self.line = line


@dataclass(frozen=True)
class LookupPolicy:
    case_fallback: bool = False


@dataclass(eq=False)
class EmbeddingTable:
    """Vocabulary-indexed float32 matrix of word vectors.

    Attributes:
        words: Vocabulary in file order, without duplicates.
        matrix: ``(len(words), dim)`` float32 array.
        normalized: Whether rows were scaled to unit norm at load time.
        n_duplicates: Number of repeated words dropped (first occurrence kept).
        n_zero_dropped: Number of zero rows dropped during normalization.
    """

    words: list[str]
    matrix: NDArray[np.float32]
    normalized: bool = False
    n_duplicates: int = 0
    n_zero_dropped: int = 0
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.float32)
        if self.matrix.ndim != 2 or self.matrix.shape[1] < 1:
            raise ValueError(f"matrix must be 2-d with dim >= 1, got {self.matrix.shape}")
        if len(self.words) != self.matrix.shape[0]:
            raise ValueError(f"{len(self.words)} words for {self.matrix.shape[0]} rows")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("embedding matrix contains non-finite values")
        self.index = {}
        for i, w in enumerate(self.words):
            if w in self.index:
                raise ValueError(f"duplicate word {w!r} in vocabulary")
            self.index[w] = i
        self.matrix.setflags(write=False)

    @classmethod
    def from_rows(
        cls,
        words: Iterable[str],
        rows,
        normalize: bool = False,
    ) -> "EmbeddingTable":
        """Build a table, keeping the first occurrence of repeated words."""
        words = list(words)
        matrix = np.asarray(rows, dtype=np.float32)
        if matrix.ndim != 2:
            raise ValueError(f"rows must form a 2-d array, got shape {matrix.shape}")
        seen: set[str] = set()
        keep = []
        for i, w in enumerate(words):
            if w not in seen:
                seen.add(w)
                keep.append(i)
        n_dup = len(words) - len(keep)
        if n_dup:
            logger.warning("dropped %d duplicate vocabulary entries (first occurrence kept)", n_dup)
            words = [words[i] for i in keep]
            matrix = matrix[keep]
        n_zero = 0
        if normalize:
            norms = np.linalg.norm(matrix.astype(np.float64), axis=1)
            nonzero = norms > 0
            n_zero = int((~nonzero).sum())
            if n_zero:
                logger.warning("dropped %d zero-norm rows before normalization", n_zero)
                words = [w for w, ok in zip(words, nonzero) if ok]
                matrix, norms = matrix[nonzero], norms[nonzero]
            matrix = (matrix / norms[:, None]).astype(np.float32)
        return cls(words, matrix, normalized=normalize, n_duplicates=n_dup, n_zero_dropped=n_zero)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    @cached_property
    def row_norms(self) -> NDArray[np.float64]:
        return np.linalg.norm(self.matrix.astype(np.float64), axis=1)

    def vector(self, word: str) -> NDArray[np.float64]:
        return self.matrix[self.index[word]].astype(np.float64)

    def scaled(self, factor: float) -> "EmbeddingTable":
        """Copy of the table with every row multiplied by ``factor``."""
        return EmbeddingTable(list(self.words), self.matrix * np.float32(factor), normalized=False)


def resolve_word(table: EmbeddingTable, word: str, policy: LookupPolicy = LookupPolicy()) -> Optional[str]:
    """Vocabulary key that ``word`` maps to under ``policy``, or None."""
    if word in table.index:
        return word
    if policy.case_fallback:
        lower = word.lower()
        if lower in table.index:
            return lower
    return None


def lookup(table: EmbeddingTable, word: str, policy: LookupPolicy = LookupPolicy()) -> Optional[NDArray[np.float64]]:
    key = resolve_word(table, word, policy)
    return None if key is None else table.vector(key)


# -- binary -------------------------------------------------------------------


def _parse_header(line: bytes, offset: int = 0) -> tuple[int, int]:
    parts = line.split()
    try:
        count, dim = (int(p) for p in parts)
    except ValueError:
        raise EmbeddingParseError(f"malformed header {line[:40]!r}", offset=offset) from None
    if count < 0 or dim < 1:
        raise EmbeddingParseError(f"invalid header values count={count} dim={dim}", offset=offset)
    return count, dim


class _ChunkReader:
    """Forward-only view over a binary stream that tracks absolute byte offsets."""

    def __init__(self, f, chunk: int = 1 << 22):
        self.f = f
        self.chunk = chunk
        self.buf = b""
        self.pos = 0
        self.base = 0
        self.eof = False

    @property
    def offset(self) -> int:
        return self.base + self.pos

    def _fill(self) -> bool:
        if self.eof:
            return False
        more = self.f.read(self.chunk)
        if not more:
            self.eof = True
            return False
        self.base += self.pos
        self.buf = self.buf[self.pos:] + more
        self.pos = 0
        return True

    def read_until_space(self) -> bytes | None:
        while True:
            i = self.buf.find(b" ", self.pos)
            if i >= 0:
                out = self.buf[self.pos:i]
                self.pos = i + 1
                return out
            if not self._fill():
                return None

    def read(self, n: int) -> bytes:
        while len(self.buf) - self.pos < n and self._fill():
            pass
        out = self.buf[self.pos:self.pos + n]
        self.pos += len(out)
        return out


def load_binary(path: str | os.PathLike, limit: int | None = None, normalize: bool = True) -> EmbeddingTable:
    """Load a word2vec-style binary file.

    Args:
        path: File to read.
        limit: Read at most this many entries (file order).
        normalize: Scale each row to unit norm.

    Raises:
        EmbeddingParseError: empty/truncated file, bad header or non-finite values.
    """
    with open(path, "rb") as f:
        header = f.readline()
        if not header:
            raise EmbeddingParseError("empty file", offset=0)
        if not header.endswith(b"\n"):
            raise EmbeddingParseError("header is not newline-terminated", offset=0)
        count, dim = _parse_header(header)
        n = count if limit is None else min(count, max(limit, 0))
        row_bytes = dim * _FLOAT_LE.itemsize
        reader = _ChunkReader(f)
        reader.base = len(header)
        words: list[str] = []
        matrix = np.empty((n, dim), dtype=np.float32)
        for i in range(n):
            start = reader.offset
            word = reader.read_until_space()
            if word is None:
                raise EmbeddingParseError(f"truncated file: expected {count} entries, got {i}", offset=start)
            word = word.lstrip(b"\n")
            if not word:
                raise EmbeddingParseError("empty word", offset=start)
            vec_start = reader.offset
            payload = reader.read(row_bytes)
            if len(payload) != row_bytes:
                raise EmbeddingParseError(f"truncated vector for entry {i}", offset=vec_start + len(payload))
            row = np.frombuffer(payload, dtype=_FLOAT_LE)
            if not np.all(np.isfinite(row)):
                raise EmbeddingParseError(f"non-finite value in vector of {word!r}", offset=vec_start)
            matrix[i] = row
            words.append(word.decode("utf-8", errors="replace"))
    return EmbeddingTable.from_rows(words, matrix, normalize=normalize)


def save_binary(table: EmbeddingTable, path: str | os.PathLike) -> None:
    with open(path, "wb") as f:
        f.write(f"{len(table)} {table.dim}\n".encode("ascii"))
        for word, row in zip(table.words, table.matrix):
            f.write(word.encode("utf-8") + b" ")
            f.write(row.astype(_FLOAT_LE).tobytes())
            f.write(b"\n")


# -- text ---------------------------------------------------------------------


def _is_header(tokens: list[str]) -> bool:
    return len(tokens) == 2 and all(t.isdigit() for t in tokens)


def load_text(path: str | os.PathLike, limit: int | None = None, normalize: bool = True) -> EmbeddingTable:
    """Load a whitespace-separated text embedding file.

    A first line consisting of two integers is taken as a ``count dim`` header
    when the following line has ``dim + 1`` fields.

    Raises:
        EmbeddingParseError: empty file, inconsistent dimensions (names the line)
            or unparsable numbers.
    """
    words: list[str] = []
    rows: list[NDArray[np.float32]] = []
    dim: int | None = None
    with open(path, "r", encoding="utf-8", errors="replace") as f:
        lines = iter(enumerate(f, start=1))
        pending: list[tuple[int, str]] = []
        first = next(lines, None)
        if first is None:
            raise EmbeddingParseError("empty file", line=1)
        first_tokens = first[1].split()
        if _is_header(first_tokens):
            second = next(lines, None)
            if second is None or len(second[1].split()) == int(first_tokens[1]) + 1:
                dim = int(first_tokens[1])
                if dim < 1:
                    raise EmbeddingParseError("header dimension must be >= 1", line=1)
            else:
                pending.append(first)
            if second is not None:
                pending.append(second)
        else:
            pending.append(first)

        def all_lines():
            yield from pending
            yield from lines

        for lineno, line in all_lines():
            if limit is not None and len(words) >= limit:
                break
            tokens = line.split()
            if not tokens:
                continue
            if dim is None:
                dim = len(tokens) - 1
                if dim < 1:
                    raise EmbeddingParseError("line has no vector values", line=lineno)
            if len(tokens) != dim + 1:
                raise EmbeddingParseError(
                    f"expected {dim} values, found {len(tokens) - 1}", line=lineno
                )
            try:
                row = np.array(tokens[1:], dtype=np.float64)
            except ValueError:
                raise EmbeddingParseError("unparsable number", line=lineno) from None
            if not np.all(np.isfinite(row)):
                raise EmbeddingParseError("non-finite value", line=lineno)
            words.append(tokens[0])
            rows.append(row.astype(np.float32))
    if not rows:
        raise EmbeddingParseError("no embedding rows found")
    return EmbeddingTable.from_rows(words, np.vstack(rows), normalize=normalize)


def save_text(table: EmbeddingTable, path: str | os.PathLike, header: bool = True, decimals: int = 6) -> None:
    fmt = f"%.{decimals}f"
    with open(path, "w", encoding="utf-8") as f:
        if header:
            f.write(f"{len(table)} {table.dim}\n")
        for word, row in zip(table.words, table.matrix):
            f.write(word + " " + " ".join(fmt % v for v in row) + "\n")


def load(path: str | os.PathLike, format: str = "binary", limit: int | None = None, normalize: bool = True) -> EmbeddingTable:
    if format == "binary":
        return load_binary(path, limit=limit, normalize=normalize)
    if format == "text":
        return load_text(path, limit=limit, normalize=normalize)
    raise ValueError(f"unknown embedding format {format!r} (expected 'binary' or 'text')")
