"""The arithmetic (3CosAdd) analogy test and algebraic breakdowns of its score.

For a quadruple a : a* :: b : b*, with offsets ``o_a = a* - a`` and
``o_b = b* - b``, the score ``cos(b + o_a, b*)`` splits into

    within_pair  = b . b*     / Z
    offset_offset = o_a . o_b / Z
    offset_start = o_a . b    / Z           Z = |b + o_a| |b*|

and the gap ``delta_sim = cos(b + o_a, b*) - cos(b + o_a, b)`` splits into

    norm_term    = (|b| - |b*|) / |b| * (b + o_a) . b / Z
    offset_offset = o_a . o_b / Z
    start_offset = b . o_b / Z
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .bats import AnalogyQuad, ResolvedRelation, UnusableRelationError, enumerate_quads
from .embed_io import EmbeddingTable
from .linalg import DegenerateVectorError, as_vector, batch_cosine_many

# Width of the window (in cosine units) of float32 scan scores that get
# re-scored in float64 before the argmax. float32 rounding on dim <= 1000 stays
# far below this.
REFINE_WINDOW = 1e-4
_BLOCK_ELEMENTS = 1 << 25


class TestMode(str, enum.Enum):
    NORMAL = "normal"
    HONEST = "honest"

    __test__ = False  # not a pytest class


@dataclass(frozen=True)
class ScoreDecomposition:
    within_pair: float
    offset_offset: float
    offset_start: float
    norm: float
    total: float

    @property
    def term_sum(self) -> float:
        return self.within_pair + self.offset_offset + self.offset_start


@dataclass(frozen=True)
class DeltaDecomposition:
    norm_term: float
    offset_offset: float
    start_offset: float
    norm: float
    delta_sim: float

    @property
    def term_sum(self) -> float:
        return self.norm_term + self.offset_offset + self.start_offset


def _excluded_rows(table: EmbeddingTable, quad: AnalogyQuad, mode: TestMode) -> list[int]:
    if mode is TestMode.HONEST:
        return []
    # b* is never excluded, even when it coincides with an input word.
    words = {quad.a, quad.a_star, quad.b} - {quad.b_star}
    return [table.index[w] for w in words if w in table.index]


def predict_many(
    table: EmbeddingTable,
    quads: Sequence[AnalogyQuad],
    mode: TestMode = TestMode.NORMAL,
) -> list[str]:
    """Predicted b* for each quad: argmax of cos(b + a* - a, x) over the vocabulary.

    Ties break toward the lowest vocabulary index.
    """
    mode = TestMode(mode)
    if not quads:
        return []
    matrix, norms = table.matrix, table.row_norms
    block = max(1, _BLOCK_ELEMENTS // max(len(table), 1))
    out: list[str] = []
    for lo in range(0, len(quads), block):
        chunk = quads[lo:lo + block]
        queries = np.stack([q.vb + q.va_star - q.va for q in chunk])
        qnorms = np.linalg.norm(queries, axis=1)
        if np.any(qnorms == 0.0):
            bad = chunk[int(np.flatnonzero(qnorms == 0.0)[0])]
            raise DegenerateVectorError(f"analogy query {bad.words} has zero norm")
        sims = batch_cosine_many(queries, table)
        np.nan_to_num(sims, copy=False, nan=-np.inf)
        for k, quad in enumerate(chunk):
            row = sims[k]
            excl = _excluded_rows(table, quad, mode)
            if excl:
                row[excl] = -np.inf
            top = row.max()
            if top == -np.inf:
                raise ValueError("no admissible candidates left in the vocabulary")
            cands = np.flatnonzero(row >= top - REFINE_WINDOW)
            exact = (matrix[cands].astype(np.float64) @ queries[k]) / (norms[cands] * qnorms[k])
            out.append(table.words[int(cands[int(np.argmax(exact))])])
    return out


def predict(table: EmbeddingTable, quad: AnalogyQuad, mode: TestMode = TestMode.NORMAL) -> str:
    return predict_many(table, [quad], mode)[0]


def accuracy(table: EmbeddingTable, resolved: ResolvedRelation, mode: TestMode = TestMode.NORMAL) -> float:
    """Fraction of the relation's N(N-1) quads whose prediction is b*.

    Raises:
        UnusableRelationError: fewer than two resolved pairs.
    """
    resolved.require_usable(2)
    quads = enumerate_quads(resolved)
    preds = predict_many(table, quads, mode)
    hits = sum(p == q.b_star for p, q in zip(preds, quads))
    return hits / len(quads)


def _maybe_unit(v: NDArray[np.float64], normalized: bool) -> NDArray[np.float64]:
    if not normalized:
        return v
    n = np.linalg.norm(v)
    if n == 0.0:
        raise DegenerateVectorError("cannot normalize a zero-norm word vector")
    return v / n


def _score_terms(a, a_star, b, b_star) -> ScoreDecomposition:
    o_a = a_star - a
    o_b = b_star - b
    query = b + o_a
    z = np.linalg.norm(query) * np.linalg.norm(b_star)
    if not z > 0.0:
        raise DegenerateVectorError("|b + o_a| |b*| is zero")
    return ScoreDecomposition(
        within_pair=float(b @ b_star / z),
        offset_offset=float(o_a @ o_b / z),
        offset_start=float(o_a @ b / z),
        norm=float(z),
        total=float(query @ b_star / z),
    )


def decompose_score(quad: AnalogyQuad, normalized: bool = False) -> ScoreDecomposition:
    """Split cos(b + o_a, b*) into within-pair, offset-offset and offset-start terms.

    Args:
        quad: The analogy quadruple.
        normalized: Unit-normalize the four word vectors first.
    """
    a, a_star, b, b_star = (_maybe_unit(v, normalized) for v in (quad.va, quad.va_star, quad.vb, quad.vb_star))
    return _score_terms(a, a_star, b, b_star)


def decompose_delta(quad: AnalogyQuad, normalized: bool = False) -> DeltaDecomposition:
    """Split cos(b + o_a, b*) - cos(b + o_a, b) into norm, offset and start terms."""
    a, a_star, b, b_star = (_maybe_unit(v, normalized) for v in (quad.va, quad.va_star, quad.vb, quad.vb_star))
    o_a = a_star - a
    o_b = b_star - b
    query = b + o_a
    nq, nb, nbs = np.linalg.norm(query), np.linalg.norm(b), np.linalg.norm(b_star)
    if not (nq > 0.0 and nb > 0.0 and nbs > 0.0):
        raise DegenerateVectorError("degenerate norm in delta decomposition")
    z = nq * nbs
    delta = float(query / nq @ (b_star / nbs - b / nb))
    return DeltaDecomposition(
        norm_term=float((nb - nbs) / nb * (query @ b) / z),
        offset_offset=float(o_a @ o_b / z),
        start_offset=float(b @ o_b / z),
        norm=float(z),
        delta_sim=delta,
    )


def decompose_self(a: ArrayLike, a_star: ArrayLike, b: ArrayLike) -> ScoreDecomposition:
    """Score decomposition with b* := b + o_a, i.e. a perfect analogy (total 1)."""
    a, a_star, b = as_vector(a), as_vector(a_star), as_vector(b)
    return _score_terms(a, a_star, b, b + (a_star - a))


def relation_decomposition(resolved: ResolvedRelation, normalized: bool = False) -> dict[str, float]:
    """Mean of every decomposition term over all N(N-1) quads of a relation.

    Keys are prefixed ``score_``, ``delta_`` and ``self_`` for the three
    breakdowns. Vectorized; agrees with looping the scalar functions.
    """
    resolved.require_usable(2)
    S, E = resolved.start_vectors, resolved.end_vectors
    if normalized:
        S = S / np.linalg.norm(S, axis=1, keepdims=True)
        E = E / np.linalg.norm(E, axis=1, keepdims=True)
    O = E - S
    n = len(S)
    # axis 0 indexes the (a, a*) pair i, axis 1 the (b, b*) pair j
    OO = O @ O.T
    OS = O @ S.T
    ss = np.einsum("ij,ij->i", S, S)
    se = np.einsum("ij,ij->i", S, E)
    oo = np.diag(OO)
    ns, ne = np.sqrt(ss), np.linalg.norm(E, axis=1)
    nq = np.sqrt(np.maximum(ss[None, :] + 2 * OS + oo[:, None], 0.0))
    if np.any(nq[~np.eye(n, dtype=bool)] == 0.0) or np.any(ne == 0.0) or np.any(ns == 0.0):
        raise DegenerateVectorError("degenerate norm in relation decomposition")
    z = nq * ne[None, :]
    q_dot_bstar = se[None, :] + O @ E.T  # (b + o_a) . b*
    q_dot_b = ss[None, :] + OS  # (b + o_a) . b
    z_self = nq ** 2
    terms = {
        "score_within_pair": np.broadcast_to(se[None, :], (n, n)) / z,
        "score_offset_offset": OO / z,
        "score_offset_start": OS / z,
        "score_total": q_dot_bstar / z,
        "delta_norm_term": ((ns - ne) / ns)[None, :] * q_dot_b / z,
        "delta_offset_offset": OO / z,
        "delta_start_offset": np.broadcast_to((se - ss)[None, :], (n, n)) / z,
        "delta_sim": (q_dot_bstar / ne[None, :] - q_dot_b / ns[None, :]) / nq,
        "self_within_pair": q_dot_b / z_self,
        "self_offset_offset": np.broadcast_to(oo[:, None], (n, n)) / z_self,
        "self_offset_start": OS / z_self,
    }
    mask = ~np.eye(n, dtype=bool)
    return {k: float(v[mask].mean()) for k, v in terms.items()}
