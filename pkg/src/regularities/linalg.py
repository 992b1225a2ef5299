"""Dense vector kernels: dot products, norms, cosines and exact similarity scans.

Scalar routines always accumulate in float64. The batched scan multiplies the
float32 storage matrix with BLAS and divides by float64 row norms; callers that
need an exact argmax re-score the near-maximal rows with :func:`cosine`.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray


class DimensionMismatchError(ValueError):
    """Two operands disagree on dimensionality."""


class DegenerateVectorError(ValueError):
    """A zero-norm vector was passed where a direction is required."""


def as_vector(x: ArrayLike) -> NDArray[np.float64]:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a non-empty 1-d vector, got shape {v.shape}")
    return v


def _check_dims(x: NDArray, y: NDArray) -> None:
    if x.shape[-1] != y.shape[-1]:
        raise DimensionMismatchError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")


def dot(x: ArrayLike, y: ArrayLike) -> float:
    """Inner product of two vectors, accumulated in float64."""
    x, y = as_vector(x), as_vector(y)
    _check_dims(x, y)
    return float(np.dot(x, y))


def norm(x: ArrayLike) -> float:
    return float(np.linalg.norm(as_vector(x)))


def unit(x: ArrayLike) -> NDArray[np.float64]:
    """Return ``x / ||x||``.

    Raises:
        DegenerateVectorError: if ``x`` has zero norm.
    """
    v = as_vector(x)
    n = np.linalg.norm(v)
    if not n > 0.0:
        raise DegenerateVectorError("cannot normalize a zero-norm vector")
    return v / n


def cosine(x: ArrayLike, y: ArrayLike) -> float:
    """Cosine of the angle between ``x`` and ``y``, clamped to [-1, 1]."""
    x, y = as_vector(x), as_vector(y)
    _check_dims(x, y)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if not (nx > 0.0 and ny > 0.0):
        raise DegenerateVectorError("cosine is undefined for a zero-norm vector")
    c = float(np.dot(x, y) / (nx * ny))
    return min(1.0, max(-1.0, c))


def _matrix_and_norms(table) -> tuple[NDArray, NDArray[np.float64]]:
    # Accept an EmbeddingTable (cached norms) or a bare 2-d array.
    if hasattr(table, "matrix"):
        return table.matrix, table.row_norms
    m = np.asarray(table)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    return m, np.linalg.norm(m.astype(np.float64, copy=False), axis=1)


def batch_cosine(query: ArrayLike, table) -> NDArray[np.float64]:
    """Cosine of ``query`` against every row of ``table``, in row order.

    Args:
        query: Vector of the table's dimension.
        table: An ``EmbeddingTable`` or a 2-d array of row vectors.

    Returns:
        float64 array with one cosine per row. Rows with zero norm get NaN.
    """
    q = as_vector(query)
    matrix, row_norms = _matrix_and_norms(table)
    _check_dims(q, matrix)
    qn = np.linalg.norm(q)
    if not qn > 0.0:
        raise DegenerateVectorError("query vector has zero norm")
    dots = matrix @ q.astype(matrix.dtype, copy=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = dots.astype(np.float64) / (row_norms * qn)
    sims[row_norms == 0.0] = np.nan
    np.clip(sims, -1.0, 1.0, out=sims)
    return sims


def batch_cosine_many(queries: ArrayLike, table) -> NDArray[np.float64]:
    """Cosines for a block of queries: result[k, i] = cosine(queries[k], row i).

    Unclamped, so that callers doing an argmax never see artificial ties at 1.
    """
    q = np.asarray(queries, dtype=np.float64)
    matrix, row_norms = _matrix_and_norms(table)
    _check_dims(q, matrix)
    qn = np.linalg.norm(q, axis=1)
    if np.any(qn == 0.0):
        raise DegenerateVectorError("query vector has zero norm")
    dots = q.astype(matrix.dtype, copy=False) @ matrix.T
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = dots / row_norms[np.newaxis, :].astype(dots.dtype)
    sims /= qn[:, np.newaxis].astype(dots.dtype)
    sims[:, row_norms == 0.0] = np.nan
    return sims
