"""Synthetic embedding tables with known offset structure.

Three geometries:

``parallel``
    end_i = start_i + scale * v + noise: one shared direction, true pairing matters.
``clustered``
    starts scattered around one centre, ends around another, pairing arbitrary:
    offsets are concentrated but carry no pairing information.
``random``
    every word uniform on the unit sphere.
"""

from __future__ import annotations

import enum
import json
import logging
import os
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import numpy as np

from .bats import BroadType, Relation
from .embed_io import EmbeddingTable

logger = logging.getLogger(__name__)

_MAX_RESAMPLE = 100


class SynthModel(str, enum.Enum):
    PARALLEL_OFFSET = "parallel"
    CLUSTERED = "clustered"
    RANDOM = "random"


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic relation.

    ``spread`` is the expected norm of a word's deviation from its cluster
    centre; centres lie at distance ``separation`` from the origin.
    ``noise`` is the per-component standard deviation added to end words.
    """

    model: SynthModel = SynthModel.PARALLEL_OFFSET
    n_pairs: int = 50
    dim: int = 50
    scale: float = 1.0
    noise: float = 0.0
    spread: float = 1.0
    separation: float = 4.0
    n_distractors: Optional[int] = None
    seed: int = 0
    name: str = "synthetic"
    broad_type: BroadType = BroadType.INFLECTIONAL

    def __post_init__(self):
        object.__setattr__(self, "model", SynthModel(self.model))
        object.__setattr__(self, "broad_type", BroadType(self.broad_type))
        if self.n_pairs < 3:
            raise ValueError("n_pairs must be >= 3")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.noise < 0 or self.spread < 0:
            raise ValueError("noise and spread must be non-negative")

    @property
    def distractors(self) -> int:
        return 10 * self.n_pairs if self.n_distractors is None else self.n_distractors

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = self.model.value
        d["broad_type"] = self.broad_type.value
        return d


def _sphere(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    x = rng.standard_normal((n, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _draw_pairs(spec: SynthSpec, rng: np.random.Generator, n: int, state: dict) -> tuple[np.ndarray, np.ndarray]:
    d = spec.dim
    if spec.model is SynthModel.PARALLEL_OFFSET:
        starts = _sphere(rng, n, d)
        ends = starts + spec.scale * state["direction"] + spec.noise * rng.standard_normal((n, d))
    elif spec.model is SynthModel.CLUSTERED:
        jitter = spec.spread / np.sqrt(d)
        starts = state["c_start"] + jitter * rng.standard_normal((n, d))
        ends = state["c_end"] + jitter * rng.standard_normal((n, d)) + spec.noise * rng.standard_normal((n, d))
    else:
        starts = _sphere(rng, n, d)
        ends = _sphere(rng, n, d)
    return starts, ends


def _relation_vectors(spec: SynthSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, int]:
    state = {}
    if spec.model is SynthModel.PARALLEL_OFFSET:
        state["direction"] = _sphere(rng, 1, spec.dim)[0]
    elif spec.model is SynthModel.CLUSTERED:
        state["c_start"] = spec.separation * _sphere(rng, 1, spec.dim)[0]
        state["c_end"] = spec.separation * _sphere(rng, 1, spec.dim)[0]
    starts, ends = _draw_pairs(spec, rng, spec.n_pairs, state)
    resampled = 0
    for _ in range(_MAX_RESAMPLE):
        bad = np.flatnonzero(np.all(starts.astype(np.float32) == ends.astype(np.float32), axis=1))
        if bad.size == 0:
            break
        resampled += bad.size
        starts[bad], ends[bad] = _draw_pairs(spec, rng, bad.size, state)
    else:
        raise ValueError(f"{spec.name}: pairs keep collapsing to identical vectors")
    if resampled:
        logger.info("%s: resampled %d collapsed pairs", spec.name, resampled)
    return starts, ends, resampled


def _word_names(spec: SynthSpec) -> tuple[list[str], list[str], list[str]]:
    p = spec.name.replace(" ", "_")
    return (
        [f"{p}/s{i}" for i in range(spec.n_pairs)],
        [f"{p}/e{i}" for i in range(spec.n_pairs)],
        [f"{p}/x{i}" for i in range(spec.distractors)],
    )


def generate(spec: SynthSpec) -> tuple[EmbeddingTable, Relation]:
    """Table with the relation's 2 * n_pairs words plus random distractors."""
    table, relations = generate_dataset([spec])
    return table, relations[0]


def generate_dataset(specs: Iterable[SynthSpec]) -> tuple[EmbeddingTable, list[Relation]]:
    """One shared table holding every spec's words (names prefixed by relation)."""
    specs = list(specs)
    if not specs:
        raise ValueError("no synthetic specs given")
    dims = {s.dim for s in specs}
    if len(dims) != 1:
        raise ValueError(f"all specs must share one dimension, got {sorted(dims)}")
    words: list[str] = []
    rows: list[np.ndarray] = []
    relations = []
    for spec in specs:
        rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
        starts, ends, _ = _relation_vectors(spec, rng)
        distract = _sphere(rng, spec.distractors, spec.dim)
        s_names, e_names, x_names = _word_names(spec)
        words += s_names + e_names + x_names
        rows += [starts, ends, distract]
        relations.append(Relation(spec.name, spec.broad_type, tuple(zip(s_names, e_names))))
    table = EmbeddingTable.from_rows(words, np.vstack(rows), normalize=False)
    return table, relations


def load_specs(path: str | os.PathLike) -> list[SynthSpec]:
    """Read specs from JSON: a list of objects, or ``{"relations": [...]}``."""
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if isinstance(data, dict):
        data = data.get("relations", [data])
    return [SynthSpec(**entry) for entry in data]
