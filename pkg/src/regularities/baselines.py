"""Randomized analogy sets that carry no pairing consistency by construction.

Six constructions, each applied per source relation:

* ``permuted``: end words re-assigned to start words within the relation.
* ``mismatched_within`` / ``mismatched_across``: starts from one relation,
  ends from another relation of the same / a different broad type.
* ``random_start`` / ``random_end`` / ``random_both``: one or both sides
  replaced by random vocabulary words.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .bats import BroadType, Relation, ResolvedRelation
from .embed_io import EmbeddingTable
from .offsets import PcsConfig, build_offsets, ocs, pcs_detail, relation_key, substream

MAX_PAIRS = 50


class BaselineKind(str, enum.Enum):
    PERMUTED_WITHIN_CATEGORY = "permuted"
    MISMATCHED_WITHIN_TYPE = "mismatched_within"
    MISMATCHED_ACROSS_TYPE = "mismatched_across"
    RANDOM_START = "random_start"
    RANDOM_END = "random_end"
    RANDOM_BOTH = "random_both"


class Scope(str, enum.Enum):
    WITHIN_TYPE = "within"
    ACROSS_TYPE = "across"


class BaselineError(ValueError):
    pass


@dataclass(eq=False)
class BaselineInstance:
    kind: BaselineKind
    source: str
    broad_type: Optional[BroadType]
    instance_index: int
    resolved: ResolvedRelation

    @property
    def pairs(self) -> list[tuple[str, str]]:
        return list(zip(self.resolved.starts, self.resolved.ends))


def _assemble(
    name: str,
    broad_type: Optional[BroadType],
    starts: Sequence[str],
    ends: Sequence[str],
    start_idx,
    end_idx,
    start_vectors: np.ndarray,
    end_vectors: np.ndarray,
) -> ResolvedRelation:
    # drop pairs whose two sides share a vector; the offset would be undefined
    keep = ~np.all(start_vectors == end_vectors, axis=1)
    ki = np.flatnonzero(keep)
    starts = [starts[i] for i in ki]
    ends = [ends[i] for i in ki]
    return ResolvedRelation(
        relation=Relation(name, broad_type, tuple(zip(starts, ends))),
        starts=starts,
        ends=ends,
        start_idx=np.asarray(start_idx, dtype=np.int64)[ki],
        end_idx=np.asarray(end_idx, dtype=np.int64)[ki],
        start_vectors=start_vectors[ki],
        end_vectors=end_vectors[ki],
        dropped=int((~keep).sum()),
        n_identical=int((~keep).sum()),
    )


def permute_within_category(resolved: ResolvedRelation, rng: np.random.Generator, instance_index: int = 0) -> BaselineInstance:
    """Uniformly re-assign the relation's end words to its start words."""
    resolved.require_usable()
    perm = rng.permutation(len(resolved))
    rel = _assemble(
        f"{resolved.name} [permuted #{instance_index}]",
        resolved.broad_type,
        resolved.starts,
        [resolved.ends[p] for p in perm],
        resolved.start_idx,
        resolved.end_idx[perm],
        resolved.start_vectors,
        resolved.end_vectors[perm],
    )
    return BaselineInstance(BaselineKind.PERMUTED_WITHIN_CATEGORY, resolved.name, resolved.broad_type, instance_index, rel)


def _mismatch_candidates(relations: Sequence[ResolvedRelation], source: ResolvedRelation, scope: Scope) -> list[ResolvedRelation]:
    same = scope is Scope.WITHIN_TYPE
    return [
        r for r in relations
        if r.name != source.name and r.usable and ((r.broad_type == source.broad_type) == same)
    ]


def mismatch_categories(
    relations: Sequence[ResolvedRelation],
    scope: Scope | str,
    rng: np.random.Generator,
    source: Optional[ResolvedRelation] = None,
    instance_index: int = 0,
    n_pairs: int = MAX_PAIRS,
) -> BaselineInstance:
    """Pair start words of one relation with end words of another.

    Both sides are sampled without replacement, ``min(n_pairs, sizes)`` pairs.
    The end relation has the same broad type as the source for the within-type
    scope and a different one for the across-type scope. The instance is
    attributed to the source (start) relation's type.

    Raises:
        BaselineError: no eligible pair of relations in the scope.
    """
    scope = Scope(scope)
    if source is None:
        eligible = [r for r in relations if r.usable and _mismatch_candidates(relations, r, scope)]
        if not eligible:
            raise BaselineError(f"fewer than 2 eligible categories for {scope.value}-type mismatch")
        source = eligible[int(rng.integers(len(eligible)))]
    targets = _mismatch_candidates(relations, source, scope)
    if not targets:
        raise BaselineError(f"no {scope.value}-type partner category for {source.name!r}")
    target = targets[int(rng.integers(len(targets)))]
    k = min(n_pairs, len(source), len(target))
    si = rng.choice(len(source), size=k, replace=False)
    ei = rng.choice(len(target), size=k, replace=False)
    kind = BaselineKind.MISMATCHED_WITHIN_TYPE if scope is Scope.WITHIN_TYPE else BaselineKind.MISMATCHED_ACROSS_TYPE
    rel = _assemble(
        f"{source.name} -> {target.name} [{kind.value} #{instance_index}]",
        source.broad_type,
        [source.starts[i] for i in si],
        [target.ends[i] for i in ei],
        source.start_idx[si],
        target.end_idx[ei],
        source.start_vectors[si],
        target.end_vectors[ei],
    )
    return BaselineInstance(kind, f"{source.name} -> {target.name}", source.broad_type, instance_index, rel)


def _sample_words(table: EmbeddingTable, count: int, exclude: set[int], rng: np.random.Generator) -> np.ndarray:
    available = len(table) - len(exclude)
    if count > available:
        raise BaselineError(f"vocabulary has {available} eligible words, need {count}")
    draw = rng.choice(len(table), size=min(len(table), count + len(exclude)), replace=False)
    picked = np.asarray([i for i in draw if int(i) not in exclude][:count], dtype=np.int64)
    return picked


def randomize(
    resolved: ResolvedRelation,
    which: str,
    table: EmbeddingTable,
    rng: np.random.Generator,
    instance_index: int = 0,
) -> BaselineInstance:
    """Replace the start words, the end words, or both with random vocabulary words.

    Replacement words are distinct and never one of the relation's own words.
    """
    if which not in ("start", "end", "both"):
        raise ValueError(f"which must be 'start', 'end' or 'both', got {which!r}")
    resolved.require_usable()
    n = len(resolved)
    own = set(int(i) for i in resolved.start_idx) | set(int(i) for i in resolved.end_idx)
    fresh = _sample_words(table, 2 * n if which == "both" else n, own, rng)
    si, ei = resolved.start_idx, resolved.end_idx
    if which == "start":
        si = fresh
    elif which == "end":
        ei = fresh
    else:
        si, ei = fresh[:n], fresh[n:]
    kind = {"start": BaselineKind.RANDOM_START, "end": BaselineKind.RANDOM_END, "both": BaselineKind.RANDOM_BOTH}[which]
    btype = None if which == "both" else resolved.broad_type
    rel = _assemble(
        f"{resolved.name} [{kind.value} #{instance_index}]",
        btype,
        [table.words[i] for i in si],
        [table.words[i] for i in ei],
        si,
        ei,
        table.matrix[si].astype(np.float64),
        table.matrix[ei].astype(np.float64),
    )
    return BaselineInstance(kind, resolved.name, btype, instance_index, rel)


def baseline_suite(
    relations: Sequence[ResolvedRelation],
    table: EmbeddingTable,
    n_instances: int = 10,
    seed: int = 0,
    kinds: Optional[Iterable[BaselineKind]] = None,
) -> list[BaselineInstance]:
    """``n_instances`` of every baseline kind for every usable source relation.

    Instance ``k`` of kind ``K`` for relation ``R`` draws from its own substream
    of ``seed``, so the suite is reproducible and order-independent. Mismatched
    kinds skip relations with no partner category in scope.
    """
    kinds = list(BaselineKind) if kinds is None else [BaselineKind(k) for k in kinds]
    usable = [r for r in relations if r.usable]
    out = []
    for kind in kinds:
        kind_key = list(BaselineKind).index(kind)
        for rel in usable:
            if kind is BaselineKind.MISMATCHED_WITHIN_TYPE and not _mismatch_candidates(usable, rel, Scope.WITHIN_TYPE):
                continue
            if kind is BaselineKind.MISMATCHED_ACROSS_TYPE and not _mismatch_candidates(usable, rel, Scope.ACROSS_TYPE):
                continue
            for k in range(n_instances):
                rng = substream(seed, kind_key, relation_key(rel.name), k)
                if kind is BaselineKind.PERMUTED_WITHIN_CATEGORY:
                    inst = permute_within_category(rel, rng, k)
                elif kind is BaselineKind.MISMATCHED_WITHIN_TYPE:
                    inst = mismatch_categories(usable, Scope.WITHIN_TYPE, rng, source=rel, instance_index=k)
                elif kind is BaselineKind.MISMATCHED_ACROSS_TYPE:
                    inst = mismatch_categories(usable, Scope.ACROSS_TYPE, rng, source=rel, instance_index=k)
                else:
                    which = {BaselineKind.RANDOM_START: "start", BaselineKind.RANDOM_END: "end", BaselineKind.RANDOM_BOTH: "both"}[kind]
                    inst = randomize(rel, which, table, rng, k)
                out.append(inst)
    return out


@dataclass(frozen=True)
class InstanceScore:
    ocs: Optional[float]
    pcs: Optional[float]
    n_pairs: int


def score_instance(instance: BaselineInstance, cfg: PcsConfig = PcsConfig()) -> InstanceScore:
    """OCS and PCS of a baseline instance (None when too few pairs survive)."""
    rel = instance.resolved
    if not rel.usable:
        return InstanceScore(None, None, len(rel))
    return InstanceScore(ocs(build_offsets(rel)), pcs_detail(rel, cfg).pcs, len(rel))
