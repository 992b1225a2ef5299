"""BATS-layout analogy datasets: parsing, vocabulary resolution, quadruples.

Expected layout::

    <root>/1_Inflectional_morphology/I01 [noun - plural_reg].txt
    <root>/2_Derivational_morphology/D01 [noun+less_reg].txt
    ...

Each file holds one ``start<TAB>end`` pair per line, where ``end`` may list
slash-separated alternatives (only the first is kept).
"""

from __future__ import annotations

import enum
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .embed_io import EmbeddingTable, LookupPolicy, resolve_word

logger = logging.getLogger(__name__)

MIN_METRIC_PAIRS = 3


class BroadType(str, enum.Enum):
    INFLECTIONAL = "Inflectional"
    DERIVATIONAL = "Derivational"
    ENCYCLOPEDIC = "Encyclopedic"
    LEXICOGRAPHIC = "Lexicographic"

    @classmethod
    def from_dirname(cls, name: str) -> "BroadType":
        """Map a BATS type directory (``1_...`` .. ``4_...``) to its broad type."""
        mapping = {"1": cls.INFLECTIONAL, "2": cls.DERIVATIONAL, "3": cls.ENCYCLOPEDIC, "4": cls.LEXICOGRAPHIC}
        if not name or name[0] not in mapping:
            raise ValueError(f"unrecognized BATS type directory {name!r}")
        return mapping[name[0]]


class DatasetError(ValueError):
    """Malformed relation file or dataset tree."""


class UnusableRelationError(ValueError):
    """A relation has too few resolved pairs for the requested metric."""


@dataclass(frozen=True)
class Relation:
    name: str
    broad_type: Optional[BroadType]
    pairs: tuple[tuple[str, str], ...]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(eq=False)
class ResolvedRelation:
    """A relation bound to a vocabulary.

    ``starts``/``ends`` are vocabulary keys (after case fallback), ``*_idx``
    their row indices and ``*_vectors`` float64 copies of those rows.
    """

    relation: Relation
    starts: list[str]
    ends: list[str]
    start_idx: NDArray[np.int64]
    end_idx: NDArray[np.int64]
    start_vectors: NDArray[np.float64]
    end_vectors: NDArray[np.float64]
    dropped: int = 0
    n_oov: int = 0
    n_identical: int = 0

    @property
    def name(self) -> str:
        return self.relation.name

    @property
    def broad_type(self) -> Optional[BroadType]:
        return self.relation.broad_type

    def __len__(self) -> int:
        return len(self.starts)

    @property
    def usable(self) -> bool:
        return len(self) >= MIN_METRIC_PAIRS

    @property
    def resolved_pairs(self) -> list[tuple[str, str, NDArray[np.float64], NDArray[np.float64]]]:
        return list(zip(self.starts, self.ends, self.start_vectors, self.end_vectors))

    def require_usable(self, minimum: int = MIN_METRIC_PAIRS) -> None:
        if len(self) < minimum:
            raise UnusableRelationError(
                f"relation {self.name!r} has {len(self)} resolved pairs, need at least {minimum}"
            )


@dataclass(frozen=True, eq=False)
class AnalogyQuad:
    """a : a_star :: b : b_star, with vectors and (optional) table row indices."""

    a: str
    a_star: str
    b: str
    b_star: str
    va: NDArray[np.float64]
    va_star: NDArray[np.float64]
    vb: NDArray[np.float64]
    vb_star: NDArray[np.float64]
    rows: Optional[tuple[int, int, int, int]] = field(default=None)

    @property
    def words(self) -> tuple[str, str, str, str]:
        return self.a, self.a_star, self.b, self.b_star


def parse_relation_file(path: str | os.PathLike, broad_type: Optional[BroadType] = None) -> Relation:
    """Parse one relation file.

    The relation name is the file stem; the broad type comes from the parent
    directory unless given explicitly.
    """
    path = Path(path)
    if broad_type is None:
        try:
            broad_type = BroadType.from_dirname(path.parent.name)
        except ValueError:
            broad_type = None
    pairs: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if "\t" not in line:
                raise DatasetError(f"{path.name}: line {lineno} has no tab separator")
            start, end = (p.strip() for p in line.split("\t", 1))
            end = end.split("/")[0].strip()
            if not start or not end:
                raise DatasetError(f"{path.name}: line {lineno} has an empty field")
            if start in seen:
                continue
            seen.add(start)
            pairs.append((start, end))
    return Relation(name=path.stem, broad_type=broad_type, pairs=tuple(pairs))


def load_dataset(root: str | os.PathLike) -> list[Relation]:
    """Load every relation under a BATS root, sorted by path."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"{root} is not a directory")
    subdirs = sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith("."))
    found = [p.name for p in subdirs]
    typed = []
    for d in subdirs:
        try:
            typed.append((d, BroadType.from_dirname(d.name)))
        except ValueError:
            raise DatasetError(f"unrecognized type directory {d.name!r} in {root}; found {found}") from None
    if not typed:
        raise DatasetError(f"no BATS type directories in {root}; found {found}")
    relations = []
    for d, btype in typed:
        for f in sorted(d.glob("*.txt")):
            relations.append(parse_relation_file(f, broad_type=btype))
    if not relations:
        raise DatasetError(f"no relation files under {root}; found directories {found}")
    return relations


def resolve(relation: Relation, table: EmbeddingTable, policy: LookupPolicy = LookupPolicy()) -> ResolvedRelation:
    """Keep pairs whose two words are in the vocabulary and have distinct vectors."""
    starts, ends, si, ei = [], [], [], []
    n_oov = n_identical = 0
    for start, end in relation.pairs:
        ks, ke = resolve_word(table, start, policy), resolve_word(table, end, policy)
        if ks is None or ke is None:
            n_oov += 1
            continue
        i, j = table.index[ks], table.index[ke]
        if i == j or np.array_equal(table.matrix[i], table.matrix[j]):
            n_identical += 1
            continue
        starts.append(ks)
        ends.append(ke)
        si.append(i)
        ei.append(j)
    dropped = n_oov + n_identical
    if dropped:
        logger.debug("%s: dropped %d pairs (%d OOV, %d identical)", relation.name, dropped, n_oov, n_identical)
    si_arr = np.asarray(si, dtype=np.int64)
    ei_arr = np.asarray(ei, dtype=np.int64)
    return ResolvedRelation(
        relation=relation,
        starts=starts,
        ends=ends,
        start_idx=si_arr,
        end_idx=ei_arr,
        start_vectors=table.matrix[si_arr].astype(np.float64).reshape(len(si), table.dim),
        end_vectors=table.matrix[ei_arr].astype(np.float64).reshape(len(ei), table.dim),
        dropped=dropped,
        n_oov=n_oov,
        n_identical=n_identical,
    )


def enumerate_quads(resolved: ResolvedRelation) -> list[AnalogyQuad]:
    """All N(N-1) ordered combinations of two distinct resolved pairs."""
    n = len(resolved)
    quads = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            quads.append(
                AnalogyQuad(
                    a=resolved.starts[i],
                    a_star=resolved.ends[i],
                    b=resolved.starts[j],
                    b_star=resolved.ends[j],
                    va=resolved.start_vectors[i],
                    va_star=resolved.end_vectors[i],
                    vb=resolved.start_vectors[j],
                    vb_star=resolved.end_vectors[j],
                    rows=(
                        int(resolved.start_idx[i]),
                        int(resolved.end_idx[i]),
                        int(resolved.start_idx[j]),
                        int(resolved.end_idx[j]),
                    ),
                )
            )
    return quads
