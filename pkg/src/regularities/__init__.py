"""Measure whether word embeddings encode relations as consistent vector offsets."""

__version__ = "0.1.0"

from .analogy import (
    DeltaDecomposition,
    ScoreDecomposition,
    TestMode,
    accuracy,
    decompose_delta,
    decompose_score,
    decompose_self,
    predict,
    relation_decomposition,
)
from .baselines import BaselineInstance, BaselineKind, baseline_suite, score_instance
from .bats import AnalogyQuad, BroadType, Relation, ResolvedRelation, enumerate_quads, load_dataset, resolve
from .embed_io import EmbeddingTable, LookupPolicy, load, load_binary, load_text, lookup
from .linalg import batch_cosine, cosine, dot, unit
from .offsets import OffsetSet, PcsConfig, auc, build_offsets, mean_direction, msm, ocs, pairwise_sims, pcs
from .report import EmbeddingSpec, MetricsReport, RunConfig, emit, run
from .synth import SynthModel, SynthSpec, generate, generate_dataset

__all__ = [
    "AnalogyQuad", "BaselineInstance", "BaselineKind", "BroadType", "DeltaDecomposition",
    "EmbeddingSpec", "EmbeddingTable", "MetricsReport", "RunConfig", "LookupPolicy", "OffsetSet", "PcsConfig", "Relation", "ResolvedRelation",
    "ScoreDecomposition", "SynthModel", "SynthSpec", "TestMode", "accuracy", "auc",
    "baseline_suite", "batch_cosine", "build_offsets", "cosine", "decompose_delta",
    "decompose_score", "decompose_self", "dot", "emit", "enumerate_quads", "generate", "generate_dataset", "load",
    "load_binary", "load_dataset", "load_text", "lookup", "mean_direction", "msm", "ocs",
    "pairwise_sims", "pcs", "predict", "relation_decomposition", "resolve", "run", "score_instance", "unit",
]
