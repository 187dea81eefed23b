"""Post-processing of run artifacts into comparison tables and series.

Everything here is a pure function of files a run left behind
(records.csv, summary.json) plus, for stream diagnostics, the stream
itself. Reports never touch model state, so batch and interactive runs
are reportable the same way. Kappa is re-derived from the recorded
(predicted, truth) pairs with its own windowing code as a cross-check
on the harness.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .corpus import Document, PolarityLabel, seed_vocabulary
from .harness import RECORD_FIELDS

logger = logging.getLogger(__name__)


class ReportError(ValueError):
    """Record files are missing, malformed, or inconsistent."""


@dataclass(frozen=True)
class RecordRow:
    """One parsed line of records.csv."""

    doc_id: int
    predicted: PolarityLabel
    truth: PolarityLabel
    sampled: bool
    kappa: float
    vocab_size: int


@dataclass(frozen=True)
class Run:
    """One run's artifacts, parsed."""

    name: str
    directory: Path
    records: list[RecordRow]
    summary: dict


def read_records(path: str | Path) -> list[RecordRow]:
    path = Path(path)
    if not path.exists():
        raise ReportError(f"missing record file: {path}")
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(RECORD_FIELDS):
            raise ReportError(f"{path}: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append(
                    RecordRow(
                        doc_id=int(row[0]),
                        predicted=PolarityLabel(row[1]),
                        truth=PolarityLabel(row[2]),
                        sampled={"true": True, "false": False}[row[3]],
                        kappa=float(row[4]),
                        vocab_size=int(row[5]),
                    )
                )
            except (IndexError, KeyError, ValueError) as exc:
                raise ReportError(f"{path}: line {lineno}: {exc}") from exc
    return rows


def read_summary(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ReportError(f"missing summary file: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ReportError(f"{path}: {exc}") from exc


@dataclass
class RunSet:
    """Named runs over the same stream, ready for comparison."""

    runs: list[Run]

    @classmethod
    def load(cls, named_dirs: list[tuple[str, Path]]) -> "RunSet":
        runs = []
        missing = [
            str(d / name)
            for _, d in named_dirs
            for name in ("records.csv", "summary.json")
            if not (d / name).exists()
        ]
        if missing:
            raise ReportError("missing files: " + ", ".join(missing))
        for name, directory in named_dirs:
            runs.append(
                Run(
                    name=name,
                    directory=directory,
                    records=read_records(directory / "records.csv"),
                    summary=read_summary(directory / "summary.json"),
                )
            )
        lengths = {run.name: len(run.records) for run in runs}
        if len(set(lengths.values())) > 1:
            raise ReportError(f"runs cover different stream lengths: {lengths}")
        return cls(runs)


def spend_table(runset: RunSet) -> list[dict]:
    """One row per run: labels bought, per the ledger formula.

    Queries are recounted from the records rather than trusted from the
    summary; seed size has to come from the summary since records only
    cover the post-seed stream.
    """
    table = []
    for run in sorted(runset.runs, key=lambda r: r.name):
        seed = run.summary["seed_size"]
        queries = sum(r.sampled for r in run.records)
        n = len(run.records)
        fraction = (queries + seed) / (n + seed) if n + seed else 0.0
        table.append(
            {
                "name": run.name,
                "strategy": run.summary.get("strategy", {}).get("kind", "?"),
                "documents": n,
                "seed_size": seed,
                "queries": queries,
                "spend_percent": round(fraction * 100),
            }
        )
    return table


def _pair_kappa(pairs: list[tuple[PolarityLabel, PolarityLabel]]) -> float:
    """Kappa of a pair list, written out from the definition."""
    total = len(pairs)
    agree = 0
    pred_pos = 0
    true_pos = 0
    for predicted, truth in pairs:
        agree += predicted is truth
        pred_pos += predicted is PolarityLabel.POSITIVE
        true_pos += truth is PolarityLabel.POSITIVE
    p0 = agree / total
    pc = (pred_pos / total) * (true_pos / total) + (
        1 - pred_pos / total
    ) * (1 - true_pos / total)
    if pc == 1.0:
        return 0.0
    return (p0 - pc) / (1 - pc)


def kappa_series(
    records: list[RecordRow], window: int, mode: str = "sliding"
) -> list[tuple[int, float]]:
    """Re-derive the windowed kappa at every record from scratch.

    Returns (doc_id, kappa) pairs. This recomputes each window from
    the raw pairs, deliberately not sharing the harness's incremental
    bookkeeping, so comparing the two catches recording bugs.
    """
    if window < 1:
        raise ReportError("window must be at least 1")
    if mode not in ("sliding", "tumbling"):
        raise ReportError(f"unknown window mode {mode!r}")
    pairs = [(r.predicted, r.truth) for r in records]
    series = []
    for i, record in enumerate(records):
        if mode == "sliding":
            start = max(0, i + 1 - window)
        else:
            start = (i // window) * window
        series.append((record.doc_id, _pair_kappa(pairs[start : i + 1])))
    return series


@dataclass(frozen=True)
class BatchDiagnostics:
    """Word-novelty and class mix of one stream batch."""

    index: int
    start: int
    length: int
    known_ratio: float
    novel_ratio: float
    first_seen_ratio: float
    positive_share: float


def stream_diagnostics(
    documents: list[Document], seed_size: int, batch: int
) -> list[BatchDiagnostics]:
    """Per-batch word-source ratios and class shares, after the seed.

    known = occurrence of a word in the seed vocabulary; novel = the
    complement; first_seen = occurrences that are a word's first
    appearance anywhere so far (seed included), a subset of novel.
    """
    stream = documents[seed_size:]
    if batch < 1:
        raise ReportError("batch must be at least 1")
    if batch > len(stream):
        raise ReportError(
            f"batch of {batch} exceeds post-seed stream length {len(stream)}"
        )
    seed_vocab = seed_vocabulary(documents, seed_size)
    seen = set(seed_vocab)
    out = []
    for start in range(0, len(stream), batch):
        chunk = stream[start : start + batch]
        occurrences = known = first = positives = 0
        for doc in chunk:
            if doc.true_label is PolarityLabel.POSITIVE:
                positives += 1
            for word in doc.words:
                occurrences += 1
                if word in seed_vocab:
                    known += 1
                elif word not in seen:
                    first += 1
                seen.add(word)
        out.append(
            BatchDiagnostics(
                index=len(out),
                start=start,
                length=len(chunk),
                known_ratio=known / occurrences if occurrences else 0.0,
                novel_ratio=1 - known / occurrences if occurrences else 0.0,
                first_seen_ratio=first / occurrences if occurrences else 0.0,
                positive_share=positives / len(chunk),
            )
        )
    return out


def alpha_sweep(runset: RunSet) -> list[dict] | None:
    """Spend/kappa per alpha, when at least two runs form a sweep.

    A sweep is a set of uncertainty runs identical in everything but
    alpha. Returns rows sorted by alpha, or None when no sweep exists.
    """
    groups: dict[tuple, list[Run]] = {}
    for run in runset.runs:
        strategy = run.summary.get("strategy", {})
        if strategy.get("kind") != "uncertainty":
            continue
        key = (
            run.summary.get("stream"),
            run.summary.get("variant"),
            run.summary.get("seed_size"),
            json.dumps(run.summary.get("window"), sort_keys=True),
        )
        groups.setdefault(key, []).append(run)
    sweeps = [runs for runs in groups.values() if len(runs) >= 2]
    if not sweeps:
        return None
    runs = max(sweeps, key=len)
    rows = []
    for run in sorted(runs, key=lambda r: r.summary["strategy"]["alpha"]):
        queries = sum(r.sampled for r in run.records)
        seed = run.summary["seed_size"]
        n = len(run.records)
        rows.append(
            {
                "name": run.name,
                "alpha": run.summary["strategy"]["alpha"],
                "queries": queries,
                "spend_percent": round((queries + seed) / (n + seed) * 100),
                "mean_kappa": run.summary.get("mean_kappa"),
            }
        )
    return rows


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_report(
    runset: RunSet,
    output_dir: str | Path,
    diagnostics: list[BatchDiagnostics] | None = None,
) -> list[Path]:
    """Write the comparison artifacts; returns the paths written.

    Emits spend_table.csv, one kappa series CSV per run, an alpha
    sweep CSV when the runs contain one, an optional diagnostics CSV,
    and summary.md tying the numbers together.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []

    table = spend_table(runset)
    path = output_dir / "spend_table.csv"
    _write_csv(
        path,
        ["name", "strategy", "documents", "seed_size", "queries", "spend_percent"],
        [tuple(row.values()) for row in table],
    )
    written.append(path)

    for run in runset.runs:
        window = run.summary.get("window", {})
        series = kappa_series(
            run.records,
            window.get("length", 100),
            window.get("mode", "sliding"),
        )
        path = output_dir / f"kappa_{run.name}.csv"
        _write_csv(path, ["doc_id", "kappa"], [(d, repr(k)) for d, k in series])
        written.append(path)

    sweep = alpha_sweep(runset)
    if sweep is not None:
        path = output_dir / "alpha_sweep.csv"
        _write_csv(
            path,
            ["name", "alpha", "queries", "spend_percent", "mean_kappa"],
            [tuple(row.values()) for row in sweep],
        )
        written.append(path)

    if diagnostics is not None:
        path = output_dir / "diagnostics.csv"
        _write_csv(
            path,
            [
                "batch",
                "start",
                "length",
                "known_ratio",
                "novel_ratio",
                "first_seen_ratio",
                "positive_share",
            ],
            [
                (
                    b.index,
                    b.start,
                    b.length,
                    repr(b.known_ratio),
                    repr(b.novel_ratio),
                    repr(b.first_seen_ratio),
                    repr(b.positive_share),
                )
                for b in diagnostics
            ],
        )
        written.append(path)

    lines = ["# Run comparison", "", "## Label spend", ""]
    lines.append("| run | strategy | documents | seed | queries | spend % |")
    lines.append("| --- | --- | ---: | ---: | ---: | ---: |")
    for row in table:
        lines.append(
            "| {name} | {strategy} | {documents} | {seed_size} |"
            " {queries} | {spend_percent} |".format(**row)
        )
    lines += ["", "## Kappa", ""]
    lines.append("| run | mean kappa | final kappa |")
    lines.append("| --- | ---: | ---: |")
    for run in sorted(runset.runs, key=lambda r: r.name):
        mean = run.summary.get("mean_kappa")
        final = run.summary.get("final_kappa")
        mean_text = f"{mean:.4f}" if mean is not None else "n/a"
        final_text = f"{final:.4f}" if final is not None else "n/a"
        lines.append(f"| {run.name} | {mean_text} | {final_text} |")
    if sweep is not None:
        lines += ["", "## Alpha sweep", ""]
        lines.append("| run | alpha | spend % | mean kappa |")
        lines.append("| --- | ---: | ---: | ---: |")
        for row in sweep:
            mean = row["mean_kappa"]
            mean_text = f"{mean:.4f}" if mean is not None else "n/a"
            lines.append(
                f"| {row['name']} | {row['alpha']:g} |"
                f" {row['spend_percent']} | {mean_text} |"
            )
    if diagnostics is not None:
        lines += [
            "",
            "## Stream diagnostics",
            "",
            f"{len(diagnostics)} batches; see diagnostics.csv.",
        ]
    path = output_dir / "summary.md"
    path.write_text("\n".join(lines) + "\n")
    written.append(path)
    return written
