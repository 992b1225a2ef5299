"""Offset concentration (OCS), pairing consistency (PCS) and the mean offset direction.

OCS is the mean cosine between the unit offsets of a relation's word pairs.
PCS is the mean ROC AUC separating the true pairwise offset similarities from
those of offset sets where end words have been re-assigned to other starts.
"""

from __future__ import annotations

import enum
import logging
import zlib
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .bats import MIN_METRIC_PAIRS, ResolvedRelation, UnusableRelationError
from .linalg import DegenerateVectorError

logger = logging.getLogger(__name__)


class OffsetKind(str, enum.Enum):
    TRUE = "true"
    SHUFFLED = "shuffled"
    BASELINE = "baseline"


@dataclass(eq=False)
class OffsetSet:
    offsets: NDArray[np.float64]
    sources: list[tuple[str, str]]
    kind: OffsetKind = OffsetKind.TRUE

    def __len__(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class PcsConfig:
    n_shuffles: int = 50
    seed: int = 0
    max_rejection_tries: int = 1000

    def __post_init__(self):
        if self.n_shuffles < 1:
            raise ValueError("n_shuffles must be >= 1")
        if self.max_rejection_tries < 1:
            raise ValueError("max_rejection_tries must be >= 1")


@dataclass(frozen=True)
class PcsResult:
    pcs: float
    aucs: tuple[float, ...] = field(repr=False)
    n_downgraded: int = 0

    @property
    def auc_std(self) -> float:
        return float(np.std(self.aucs))


def _unit_rows(diff: NDArray[np.float64]) -> NDArray[np.float64]:
    norms = np.linalg.norm(diff, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise DegenerateVectorError("pair with identical start and end vectors")
    return diff / norms


def build_offsets(resolved: ResolvedRelation, kind: OffsetKind = OffsetKind.TRUE) -> OffsetSet:
    """Unit offsets ``(end - start) / |end - start|``, one per resolved pair."""
    resolved.require_usable()
    return OffsetSet(
        offsets=_unit_rows(resolved.end_vectors - resolved.start_vectors),
        sources=list(zip(resolved.starts, resolved.ends)),
        kind=kind,
    )


def pairwise_sims(o: OffsetSet | NDArray[np.float64]) -> NDArray[np.float64]:
    """The N(N-1)/2 dot products o_i . o_j for i < j, row-major order."""
    offs = o.offsets if isinstance(o, OffsetSet) else np.asarray(o, dtype=np.float64)
    n = len(offs)
    if n < 2:
        raise ValueError(f"need at least 2 offsets, got {n}")
    gram = offs @ offs.T
    return gram[np.triu_indices(n, k=1)]


def ocs(o: OffsetSet) -> float:
    """Offset concentration: mean similarity between distinct unit offsets."""
    if len(o) < MIN_METRIC_PAIRS:
        raise UnusableRelationError(f"OCS needs at least {MIN_METRIC_PAIRS} offsets, got {len(o)}")
    return float(pairwise_sims(o).mean())


def mean_direction(o: OffsetSet) -> NDArray[np.float64]:
    total = o.offsets.sum(axis=0)
    n = np.linalg.norm(total)
    if not n > 1e-12 * len(o):
        raise DegenerateVectorError("offsets cancel out; mean direction is undefined")
    return total / n


def msm(o: OffsetSet) -> float:
    """Mean similarity of the offsets to their mean direction, i.e. |mean(o_i)|."""
    if len(o) < 1:
        raise ValueError("MSM needs at least one offset")
    return float(np.linalg.norm(o.offsets.mean(axis=0)))


def similarities_to_mean_direction(o: OffsetSet) -> NDArray[np.float64]:
    return o.offsets @ mean_direction(o)


def auc(true_sims, shuffled_sims) -> float:
    """Probability that a true similarity beats a shuffled one (ties count 1/2).

    Equal to the area under the empirical ROC curve and to the Mann-Whitney U
    statistic divided by ``len(true) * len(shuffled)``.
    """
    t = np.asarray(true_sims, dtype=np.float64).ravel()
    s = np.sort(np.asarray(shuffled_sims, dtype=np.float64).ravel())
    if t.size == 0 or s.size == 0:
        raise ValueError("AUC needs two non-empty samples")
    below = np.searchsorted(s, t, side="left")
    upto = np.searchsorted(s, t, side="right")
    # integer counts keep the result exact
    wins2 = 2 * int(below.sum()) + int((upto - below).sum())
    return wins2 / (2 * t.size * s.size)


def relation_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent PCG64 stream for ``(seed, *key)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _sample_permutation(resolved: ResolvedRelation, rng: np.random.Generator, cfg: PcsConfig) -> tuple[NDArray[np.int64], bool]:
    n = len(resolved)
    ends = np.asarray(resolved.ends, dtype=object)
    idx = np.arange(n)

    def zero_offsets(perm):
        # a re-assigned end word may share the start word's vector
        return np.any(np.all(resolved.end_vectors[perm] == resolved.start_vectors, axis=1))

    for _ in range(cfg.max_rejection_tries):
        perm = rng.permutation(n)
        if np.all(ends[perm] != ends) and not zero_offsets(perm):
            return perm, False
    logger.warning(
        "%s: no shuffle avoiding every true end word in %d tries; falling back to derangements",
        resolved.name, cfg.max_rejection_tries,
    )
    for _ in range(cfg.max_rejection_tries):
        perm = rng.permutation(n)
        if np.all(perm != idx) and not zero_offsets(perm):
            return perm, True
    raise RuntimeError(f"{resolved.name}: could not sample a valid shuffle of {n} pairs")


def shuffle(resolved: ResolvedRelation, rng: np.random.Generator, cfg: PcsConfig = PcsConfig()) -> OffsetSet:
    """Offsets from each start word to a re-assigned end word, avoiding true pairs.

    The permutation is rejection-sampled so that no start keeps an end word
    equal (as a string) to its true one. If that fails ``max_rejection_tries``
    times, the constraint is relaxed to "no fixed point".
    """
    resolved.require_usable()
    perm, _ = _sample_permutation(resolved, rng, cfg)
    return _shuffled_set(resolved, perm)


def _shuffled_set(resolved: ResolvedRelation, perm: NDArray[np.int64]) -> OffsetSet:
    return OffsetSet(
        offsets=_unit_rows(resolved.end_vectors[perm] - resolved.start_vectors),
        sources=[(resolved.starts[i], resolved.ends[p]) for i, p in enumerate(perm)],
        kind=OffsetKind.SHUFFLED,
    )


def pcs_detail(
    resolved: ResolvedRelation,
    cfg: PcsConfig = PcsConfig(),
    rng: np.random.Generator | None = None,
) -> PcsResult:
    """PCS plus the per-shuffle AUCs.

    Without an explicit ``rng``, shuffle ``k`` draws from the substream
    ``(cfg.seed, crc32(relation name), k)`` so results do not depend on
    evaluation order.
    """
    resolved.require_usable()
    true_sims = pairwise_sims(build_offsets(resolved))
    key = relation_key(resolved.name)
    aucs = []
    downgraded = 0
    for k in range(cfg.n_shuffles):
        gen = rng if rng is not None else substream(cfg.seed, key, k)
        perm, relaxed = _sample_permutation(resolved, gen, cfg)
        downgraded += relaxed
        aucs.append(auc(true_sims, pairwise_sims(_shuffled_set(resolved, perm))))
    return PcsResult(pcs=float(np.mean(aucs)), aucs=tuple(aucs), n_downgraded=downgraded)


def pcs(resolved: ResolvedRelation, cfg: PcsConfig = PcsConfig(), rng: np.random.Generator | None = None) -> float:
    """Pairing consistency: mean AUC of true vs. shuffled offset similarities."""
    return pcs_detail(resolved, cfg, rng).pcs
