"""Command-line entry point.

Subcommands: prepare (normalize or re-shape a stream file), synth
(generate a drift stream from a JSON script), run (batch experiment
with ground-truth labels), serve (interactive experiment behind the
label service), report (post-process finished runs). Paths are
relative to the working directory; set OPINIONSTREAM_LOG to change log
verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .corpus import (
    CorpusFormatError,
    SeedError,
    TokenizerConfig,
    filter_fixed_vocabulary,
    load_corpus,
    manifest_path,
    reorder_for_vocab_novelty,
    write_manifest,
    write_stream,
    MANIFEST_VERSION,
)
from .harness import run_experiment, RunStatus
from .oracle import InteractiveOracle
from .reports import ReportError, RunSet, stream_diagnostics, write_report
from .service import LabelService
from .synth import InvalidScriptError, script_from_dict, synthesize_drift_stream

logger = logging.getLogger(__name__)

_USER_ERRORS = (
    ConfigError,
    CorpusFormatError,
    SeedError,
    ReportError,
    InvalidScriptError,
    OSError,
    ValueError,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opinionstream",
        description="Active polarity learning over opinionated document streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="normalize a stream or build a variant")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument(
        "--variant",
        default="original",
        choices=["original", "reordered", "fixed-vocab"],
    )
    p.add_argument("--seed-size", type=int, help="required for non-original variants")
    p.add_argument("--output", required=True, type=Path)
    p.add_argument(
        "--retokenize",
        action="store_true",
        help="re-run the tokenizer over the text instead of trusting input tokens",
    )
    p.add_argument("--min-token-len", type=int, default=2)

    p = sub.add_parser("synth", help="generate a synthetic drift stream")
    p.add_argument("--script", required=True, type=Path, help="JSON drift script")
    p.add_argument("--output", required=True, type=Path)

    p = sub.add_parser("run", help="run a batch experiment with ground-truth labels")
    p.add_argument("--config", required=True, type=Path)

    p = sub.add_parser("serve", help="run interactively behind the label service")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--assets", type=Path, help="directory of console static files")

    p = sub.add_parser("report", help="post-process finished runs")
    p.add_argument(
        "--runs",
        required=True,
        nargs="+",
        metavar="NAME=DIR",
        help="named run directories containing records.csv and summary.json",
    )
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--stream", type=Path, help="stream file for diagnostics")
    p.add_argument("--seed-size", type=int, help="seed size used by the runs")
    p.add_argument("--batch", type=int, default=100, help="diagnostics batch size")
    return parser


def _cmd_prepare(args) -> int:
    tokenizer = (
        TokenizerConfig(min_token_len=args.min_token_len) if args.retokenize else None
    )
    corpus = load_corpus(args.input, tokenizer=tokenizer)
    if args.variant == "original":
        documents = corpus.documents
        manifest = {
            "v": MANIFEST_VERSION,
            "variant": "original",
            "length": len(documents),
            "source": str(args.input),
            "dropped_empty": corpus.dropped_empty,
        }
    else:
        if args.seed_size is None:
            print("prepare: --seed-size is required for this variant", file=sys.stderr)
            return 2
        if args.variant == "reordered":
            result = reorder_for_vocab_novelty(corpus.documents, args.seed_size)
        else:
            result = filter_fixed_vocabulary(corpus.documents, args.seed_size)
        documents = result.documents
        manifest = {**result.metadata, "source": str(args.input)}
    count = write_stream(documents, args.output)
    write_manifest(args.output, manifest)
    print(f"wrote {count} documents to {args.output}")
    print(f"wrote manifest to {manifest_path(args.output)}")
    return 0


def _cmd_synth(args) -> int:
    script = script_from_dict(json.loads(args.script.read_text()))
    documents, manifest = synthesize_drift_stream(script)
    count = write_stream(documents, args.output)
    write_manifest(args.output, manifest)
    print(f"wrote {count} synthetic documents to {args.output}")
    return 0


def _cmd_run(args) -> int:
    config = load_config(args.config)
    result = run_experiment(config)
    print(f"records: {result.records_path}")
    print(f"summary: {result.summary_path}")
    print(
        "spend {spend_percent}% | mean kappa {mean}".format(
            spend_percent=result.summary["spend_percent"],
            mean=(
                f"{result.summary['mean_kappa']:.4f}"
                if result.summary["mean_kappa"] is not None
                else "n/a"
            ),
        )
    )
    return 0


def _cmd_serve(args) -> int:
    config = load_config(args.config)
    oracle = InteractiveOracle(timeout=config.query_timeout)
    status = RunStatus()
    service = LabelService(oracle, status, port=args.port, assets_dir=args.assets)
    service.start()
    # Flushed eagerly: wrapper scripts wait on this line to learn the port.
    print(
        f"label service on http://127.0.0.1:{service.port}/ (Ctrl-C to stop)",
        flush=True,
    )
    try:
        result = run_experiment(config, oracle=oracle, status=status)
    finally:
        oracle.close()
        service.stop()
    if result.summary.get("interrupted"):
        print(f"interrupted; partial records at {result.records_path}")
    else:
        print(f"records: {result.records_path}")
    return 0


def _parse_run_args(pairs: list[str]) -> list[tuple[str, Path]]:
    named = []
    for pair in pairs:
        name, eq, directory = pair.partition("=")
        if not eq or not name or not directory:
            raise ReportError(f"--runs expects NAME=DIR, got {pair!r}")
        named.append((name, Path(directory)))
    if len({n for n, _ in named}) != len(named):
        raise ReportError("--runs names must be unique")
    return named


def _cmd_report(args) -> int:
    runset = RunSet.load(_parse_run_args(args.runs))
    diagnostics = None
    if args.stream is not None:
        if args.seed_size is None:
            print("report: --stream requires --seed-size", file=sys.stderr)
            return 2
        corpus = load_corpus(args.stream)
        diagnostics = stream_diagnostics(corpus.documents, args.seed_size, args.batch)
    written = write_report(runset, args.output, diagnostics=diagnostics)
    for path in written:
        print(f"wrote {path}")
    return 0


_COMMANDS = {
    "prepare": _cmd_prepare,
    "synth": _cmd_synth,
    "run": _cmd_run,
    "serve": _cmd_serve,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("OPINIONSTREAM_LOG", "WARNING").upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
