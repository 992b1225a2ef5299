"""Command-line entry point: ``regularities --embedding vecs.bin --bats BATS_3.0 ...``"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .embed_io import EmbeddingParseError
from .bats import DatasetError
from .report import METRICS, ConfigError, EmbeddingSpec, RunConfig, emit, histogram_csv, run
from .synth import load_specs


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="regularities",
        description="Offset concentration, pairing consistency and analogy accuracy for word embeddings.",
    )
    p.add_argument("--embedding", action="append", default=[], metavar="PATH",
                   help="embedding file (repeatable)")
    p.add_argument("--format", choices=("binary", "text"), default="binary")
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=True,
                   help="unit-normalize rows at load (default on)")
    p.add_argument("--limit", type=int, default=None, help="read only the first N vocabulary entries")
    p.add_argument("--bats", metavar="DIR", help="BATS dataset root")
    p.add_argument("--synth", metavar="SPEC_FILE", help="JSON file of synthetic relation specs")
    p.add_argument("--metrics", default="ocs,pcs,msm",
                   help=f"comma-separated subset of {','.join(METRICS)}")
    p.add_argument("--shuffles", type=int, default=50, help="shuffled offset sets per PCS (default 50)")
    p.add_argument("--baseline-instances", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--case-fallback", action="store_true", help="retry out-of-vocabulary words lowercased")
    p.add_argument("--decomposition-normalized", action="store_true",
                   help="unit-normalize word vectors before decomposing analogy scores")
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    p.add_argument("--out-format", choices=("csv", "json"), default="json")
    p.add_argument("--histograms", metavar="PATH", help="also write binned similarity histograms as CSV")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        embeddings=[EmbeddingSpec(path, args.format, args.normalize, args.limit) for path in args.embedding],
        bats=args.bats,
        synth=load_specs(args.synth) if args.synth else [],
        metrics=tuple(m.strip() for m in args.metrics.split(",") if m.strip()),
        shuffles=args.shuffles,
        baseline_instances=args.baseline_instances,
        case_fallback=args.case_fallback,
        seed=args.seed,
        decomposition_normalized=args.decomposition_normalized,
    )


def _fail(kind: str, message: str, code: int) -> int:
    json.dump({"errors": [{"error": kind, "message": message}]}, sys.stderr)
    sys.stderr.write("\n")
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.histograms and "histograms" not in args.metrics.split(","):
        args.metrics += ",histograms"
    try:
        config = config_from_args(args)
        report = run(config)
    except (ConfigError, DatasetError, EmbeddingParseError, ValueError, OSError) as exc:
        return _fail(type(exc).__name__, str(exc), 2)

    data = emit(report, args.out_format)
    try:
        if args.out:
            with open(args.out, "wb") as f:
                f.write(data)
        else:
            sys.stdout.buffer.write(data)
        if args.histograms:
            with open(args.histograms, "wb") as f:
                f.write(histogram_csv(report))
    except OSError as exc:
        return _fail("OSError", str(exc), 2)
    if not report.ok:
        json.dump({"errors": report.errors}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
