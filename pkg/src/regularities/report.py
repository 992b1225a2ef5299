"""Full evaluations over embeddings and datasets, and their serialization.

A run evaluates every relation of a dataset (BATS tree or synthetic specs)
against one or more embedding tables and aggregates the per-relation metrics
by broad type. JSON output is canonical: the same config and seed give
byte-identical documents once the ``timing`` block is left out.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .analogy import TestMode, accuracy, relation_decomposition
from .baselines import BaselineKind, baseline_suite, score_instance
from .bats import BroadType, Relation, ResolvedRelation, load_dataset, resolve
from .embed_io import EmbeddingTable, LookupPolicy, load
from .offsets import PcsConfig, build_offsets, msm, ocs, pairwise_sims, pcs_detail, similarities_to_mean_direction
from .synth import SynthSpec, generate_dataset

logger = logging.getLogger(__name__)

METRICS = (
    "accuracy-normal",
    "accuracy-honest",
    "ocs",
    "pcs",
    "msm",
    "decompositions",
    "baselines",
    "histograms",
)
HIST_BIN_WIDTH = 0.02
HIST_EDGES = np.round(np.arange(-1.0, 1.0 + HIST_BIN_WIDTH / 2, HIST_BIN_WIDTH), 10)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingSpec:
    path: str
    format: str = "binary"
    normalize: bool = True
    limit: Optional[int] = None


@dataclass
class RunConfig:
    embeddings: list[EmbeddingSpec] = field(default_factory=list)
    bats: Optional[str] = None
    synth: list[SynthSpec] = field(default_factory=list)
    metrics: tuple[str, ...] = ("ocs", "pcs", "msm")
    shuffles: int = 50
    baseline_instances: int = 10
    case_fallback: bool = False
    seed: int = 0
    decomposition_normalized: bool = False

    def validate(self) -> None:
        if not self.metrics:
            raise ConfigError("select at least one metric")
        unknown = sorted(set(self.metrics) - set(METRICS))
        if unknown:
            raise ConfigError(f"unknown metrics {unknown}; choose from {list(METRICS)}")
        if not self.synth and not (self.embeddings and self.bats):
            raise ConfigError("need --embedding and --bats, or --synth")
        if self.synth and (self.embeddings or self.bats):
            raise ConfigError("--synth cannot be combined with --embedding/--bats")
        for e in self.embeddings:
            if e.format not in ("binary", "text"):
                raise ConfigError(f"unknown embedding format {e.format!r}")
        if self.shuffles < 1 or self.baseline_instances < 1:
            raise ConfigError("--shuffles and --baseline-instances must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    @property
    def pcs_config(self) -> PcsConfig:
        return PcsConfig(n_shuffles=self.shuffles, seed=self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["metrics"] = list(self.metrics)
        d["synth"] = [s.to_dict() for s in self.synth]
        return d


@dataclass
class MetricsReport:
    metadata: dict
    sections: list[dict]
    errors: list[dict] = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self, include_timing: bool = True) -> dict:
        d = {"metadata": self.metadata, "sections": self.sections, "errors": self.errors}
        if include_timing:
            d["timing"] = self.timing
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(d["metadata"], d["sections"], d.get("errors", []), d.get("timing", {}))


def _mean(values: Iterable[float]) -> Optional[float]:
    vals = list(values)
    return math.fsum(vals) / len(vals) if vals else None


def _type_name(bt: Optional[BroadType]) -> Optional[str]:
    return None if bt is None else BroadType(bt).value


def relation_metrics(
    table: EmbeddingTable,
    resolved: ResolvedRelation,
    metrics: Sequence[str],
    cfg: PcsConfig,
    decomposition_normalized: bool = False,
) -> dict[str, float]:
    out: dict[str, float] = {}
    offs = build_offsets(resolved)
    if "ocs" in metrics:
        out["ocs"] = ocs(offs)
    if "msm" in metrics:
        out["msm"] = msm(offs)
    if "pcs" in metrics:
        res = pcs_detail(resolved, cfg)
        out["pcs"] = res.pcs
        out["pcs_auc_std"] = res.auc_std
        out["pcs_auc_min"] = min(res.aucs)
        out["pcs_auc_max"] = max(res.aucs)
        out["pcs_downgraded_shuffles"] = res.n_downgraded
    if "accuracy-normal" in metrics:
        out["accuracy_normal"] = accuracy(table, resolved, TestMode.NORMAL)
    if "accuracy-honest" in metrics:
        out["accuracy_honest"] = accuracy(table, resolved, TestMode.HONEST)
    if "decompositions" in metrics:
        out.update({f"decomp_{k}": v for k, v in relation_decomposition(resolved, decomposition_normalized).items()})
    return out


def decomposition_table(
    table: EmbeddingTable,
    relations: Sequence[Relation | ResolvedRelation],
    normalized: bool = False,
    policy: LookupPolicy = LookupPolicy(),
) -> dict[str, dict]:
    """Mean score / delta / self decomposition terms per relation.

    Relations with fewer than three resolved pairs map to ``{"excluded": reason}``.
    """
    out = {}
    for rel in relations:
        res = rel if isinstance(rel, ResolvedRelation) else resolve(rel, table, policy)
        if not res.usable:
            out[res.name] = {"excluded": f"{len(res)} resolved pairs (need 3)"}
            continue
        out[res.name] = relation_decomposition(res, normalized)
    return out


def _histograms(resolved: Sequence[ResolvedRelation]) -> dict[str, dict[str, list[int]]]:
    by_type: dict[str, dict[str, list[np.ndarray]]] = {}
    for res in resolved:
        key = _type_name(res.broad_type) or "untyped"
        offs = build_offsets(res)
        slot = by_type.setdefault(key, {"offset_similarity": [], "similarity_to_mean_direction": []})
        slot["offset_similarity"].append(pairwise_sims(offs))
        slot["similarity_to_mean_direction"].append(similarities_to_mean_direction(offs))
    return {
        t: {k: np.histogram(np.concatenate(v), bins=HIST_EDGES)[0].tolist() for k, v in slot.items()}
        for t, slot in sorted(by_type.items())
    }


def _baseline_block(resolved: Sequence[ResolvedRelation], table: EmbeddingTable, config: RunConfig) -> dict:
    instances = baseline_suite(resolved, table, config.baseline_instances, seed=config.seed)
    per_source: dict[tuple[str, str], dict] = {}
    for inst in instances:
        sc = score_instance(inst, config.pcs_config)
        row = per_source.setdefault(
            (inst.kind.value, inst.source),
            {"kind": inst.kind.value, "source": inst.source, "broad_type": _type_name(inst.broad_type),
             "ocs": [], "pcs": [], "ineligible_instances": 0},
        )
        if sc.ocs is None:
            row["ineligible_instances"] += 1
        else:
            row["ocs"].append(sc.ocs)
            row["pcs"].append(sc.pcs)
    sources = []
    for row in per_source.values():
        ocs_vals, pcs_vals = row.pop("ocs"), row.pop("pcs")
        row.update(
            n_instances=len(ocs_vals),
            ocs_mean=_mean(ocs_vals), ocs_min=min(ocs_vals, default=None), ocs_max=max(ocs_vals, default=None),
            pcs_mean=_mean(pcs_vals), pcs_min=min(pcs_vals, default=None), pcs_max=max(pcs_vals, default=None),
        )
        sources.append(row)
    groups: dict[tuple[str, Optional[str]], list[dict]] = {}
    for row in sources:
        if row["n_instances"]:
            groups.setdefault((row["kind"], row["broad_type"]), []).append(row)
    summary = []
    for kind in BaselineKind:
        for bt in [b.value for b in BroadType] + [None]:
            rows = groups.get((kind.value, bt))
            if not rows:
                continue
            summary.append({
                "kind": kind.value,
                "broad_type": bt,
                "n_sources": len(rows),
                "ocs_mean": _mean(r["ocs_mean"] for r in rows),
                "ocs_min": min(r["ocs_min"] for r in rows),
                "ocs_max": max(r["ocs_max"] for r in rows),
                "pcs_mean": _mean(r["pcs_mean"] for r in rows),
                "pcs_min": min(r["pcs_min"] for r in rows),
                "pcs_max": max(r["pcs_max"] for r in rows),
            })
    return {"by_source": sources, "summary": summary}


def evaluate(
    name: str,
    table: EmbeddingTable,
    relations: Sequence[Relation],
    config: RunConfig,
    source: Optional[dict] = None,
) -> dict:
    """Evaluate one embedding table on every relation; returns a report section."""
    policy = LookupPolicy(case_fallback=config.case_fallback)
    cfg = config.pcs_config
    rows = []
    resolved_ok = []
    for rel in relations:
        res = resolve(rel, table, policy)
        row = {
            "relation": rel.name,
            "broad_type": _type_name(rel.broad_type),
            "n_pairs_input": len(rel),
            "n_pairs": len(res),
            "dropped": res.dropped,
            "dropped_oov": res.n_oov,
            "dropped_identical": res.n_identical,
            "eligible": res.usable,
            "reason": None if res.usable else f"{len(res)} resolved pairs (need 3)",
            "metrics": {},
        }
        if res.usable:
            row["metrics"] = relation_metrics(table, res, config.metrics, cfg, config.decomposition_normalized)
            resolved_ok.append(res)
        rows.append(row)
    if not resolved_ok:
        raise ValueError(f"{name}: no usable relations (every relation has fewer than 3 resolved pairs)")

    type_means = {}
    for bt in [b.value for b in BroadType] + [None]:
        members = [r for r in rows if r["broad_type"] == bt]
        if not members:
            continue
        eligible = [r for r in members if r["eligible"]]
        keys = list(eligible[0]["metrics"]) if eligible else []
        type_means[bt or "untyped"] = {
            "n_relations": len(members),
            "n_eligible": len(eligible),
            "ineligible": [r["relation"] for r in members if not r["eligible"]],
            "metrics": {k: _mean(r["metrics"][k] for r in eligible) for k in keys},
        }
    section = {
        "embedding": name,
        "source": source or {},
        "vocab_size": len(table),
        "dim": table.dim,
        "normalized": table.normalized,
        "duplicates_dropped": table.n_duplicates,
        "zero_rows_dropped": table.n_zero_dropped,
        "relations": rows,
        "type_means": type_means,
    }
    if "baselines" in config.metrics:
        section["baselines"] = _baseline_block(resolved_ok, table, config)
    if "histograms" in config.metrics:
        section["histograms"] = {"bin_width": HIST_BIN_WIDTH, "by_type": _histograms(resolved_ok)}
    return section


def run(config: RunConfig) -> MetricsReport:
    """Evaluate every configured embedding; failures are isolated per embedding.

    Raises:
        ConfigError: invalid configuration.
        ValueError: the dataset yields no usable relation.
    """
    config.validate()
    t0 = time.perf_counter()
    metadata = {"tool": "regularities", "version": __version__, "seed": config.seed, "config": config.to_dict()}
    sections, errors, timing = [], [], {}
    if config.synth:
        t = time.perf_counter()
        table, relations = generate_dataset(config.synth)
        sections.append(evaluate("synthetic", table, relations, config, {"synthetic": True}))
        timing["synthetic"] = time.perf_counter() - t
    else:
        relations = load_dataset(config.bats)
        for spec in config.embeddings:
            t = time.perf_counter()
            try:
                table = load(spec.path, spec.format, limit=spec.limit, normalize=spec.normalize)
                sections.append(evaluate(spec.path, table, relations, config, asdict(spec)))
            except Exception as exc:  # one bad file must not sink the others
                logger.error("%s: %s", spec.path, exc)
                errors.append({"embedding": spec.path, "error": type(exc).__name__, "message": str(exc)})
            timing[spec.path] = time.perf_counter() - t
    if not any(r["eligible"] for s in sections for r in s["relations"]) and not errors:
        raise ValueError("no usable relations")
    timing["total"] = time.perf_counter() - t0
    return MetricsReport(metadata, sections, errors, timing)


CSV_FIELDS = ("embedding", "scope", "relation", "broad_type", "n_pairs", "dropped", "metric", "value")


def _csv_rows(report: MetricsReport):
    for sec in report.sections:
        emb = sec["embedding"]
        for r in sec["relations"]:
            base = {"embedding": emb, "scope": "relation", "relation": r["relation"], "broad_type": r["broad_type"],
                    "n_pairs": r["n_pairs"], "dropped": r["dropped"]}
            if not r["eligible"]:
                yield {**base, "metric": "ineligible", "value": r["reason"]}
            for k, v in r["metrics"].items():
                yield {**base, "metric": k, "value": v}
        for bt, tm in sec["type_means"].items():
            base = {"embedding": emb, "scope": "type_mean", "relation": "", "broad_type": bt,
                    "n_pairs": tm["n_eligible"], "dropped": len(tm["ineligible"])}
            for k, v in tm["metrics"].items():
                yield {**base, "metric": k, "value": v}
        for b in sec.get("baselines", {}).get("summary", []):
            base = {"embedding": emb, "scope": "baseline", "relation": b["kind"], "broad_type": b["broad_type"],
                    "n_pairs": b["n_sources"], "dropped": ""}
            for k in ("ocs_mean", "ocs_min", "ocs_max", "pcs_mean", "pcs_min", "pcs_max"):
                yield {**base, "metric": k, "value": b[k]}
    for e in report.errors:
        yield {"embedding": e["embedding"], "scope": "error", "relation": "", "broad_type": "", "n_pairs": "",
               "dropped": "", "metric": e["error"], "value": e["message"]}


def emit(report: MetricsReport, format: str = "json", include_timing: bool = True) -> bytes:
    """Serialize a report. JSON keys are sorted so equal reports give equal bytes."""
    if format == "json":
        text = json.dumps(report.to_dict(include_timing), indent=2, sort_keys=True, allow_nan=False)
        return (text + "\n").encode("utf-8")
    if format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in _csv_rows(report):
            w.writerow({k: ("" if v is None else (repr(v) if isinstance(v, float) else v)) for k, v in row.items()})
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown output format {format!r}")


def histogram_csv(report: MetricsReport) -> bytes:
    """Binned similarity distributions (bin width 0.02 over [-1, 1]) as CSV."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["embedding", "broad_type", "quantity", "bin_lo", "bin_hi", "count"])
    for sec in report.sections:
        for bt, hists in sec.get("histograms", {}).get("by_type", {}).items():
            for quantity, counts in hists.items():
                for lo, hi, c in zip(HIST_EDGES[:-1], HIST_EDGES[1:], counts):
                    w.writerow([sec["embedding"], bt, quantity, f"{lo:.2f}", f"{hi:.2f}", c])
    return buf.getvalue().encode("utf-8")


def write_report(report: MetricsReport, path: str | os.PathLike, format: str = "json") -> None:
    data = emit(report, format)
    with open(path, "wb") as f:
        f.write(data)


def parse_report(data: bytes | str) -> MetricsReport:
    return MetricsReport.from_dict(json.loads(data))


def strip_timing(report: MetricsReport) -> dict[str, Any]:
    return report.to_dict(include_timing=False)
