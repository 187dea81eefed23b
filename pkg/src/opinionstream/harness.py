"""Prequential experiment loop.

For every stream document: predict, score the prediction against the
stream's ground truth (evaluation only), let the strategy decide
whether to buy the label, and train on the oracle's answer if one
arrives. Records stream to disk as they are produced, so arbitrarily
long runs hold only the model and one window in memory.
"""

from __future__ import annotations

import csv
import json
import logging
import threading
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .config import ExperimentConfig
from .corpus import (
    Document,
    PolarityLabel,
    check_seed,
    filter_fixed_vocabulary,
    load_corpus,
    reorder_for_vocab_novelty,
)
from .mnb import VocabularyStats
from .oracle import BudgetLedger, GroundTruthOracle, Oracle, PendingQuery
from .sampling import Strategy

logger = logging.getLogger(__name__)

RECORD_FIELDS = ("doc_id", "predicted", "truth", "sampled", "kappa", "vocab_size")
SUMMARY_VERSION = 1


@dataclass(frozen=True)
class PrequentialRecord:
    """One evaluated stream step."""

    doc_id: int
    predicted: PolarityLabel
    truth: PolarityLabel
    sampled: bool
    windowed_kappa: float
    vocab_size_after: int


def kappa_from_counts(pos_pos: int, pos_neg: int, neg_pos: int, neg_neg: int) -> float:
    """Kappa over a (predicted, truth) confusion table.

    Chance agreement is what a classifier with the same prediction
    shares would score against the same truth shares. The degenerate
    case (both marginals concentrated on one identical class) scores 0:
    such a window cannot beat chance.
    """
    total = pos_pos + pos_neg + neg_pos + neg_neg
    if total == 0:
        raise ValueError("kappa over an empty window")
    p0 = (pos_pos + neg_neg) / total
    pred_pos = (pos_pos + pos_neg) / total
    true_pos = (pos_pos + neg_pos) / total
    pc = pred_pos * true_pos + (1 - pred_pos) * (1 - true_pos)
    if pc == 1.0:
        return 0.0
    return (p0 - pc) / (1 - pc)


class ConfusionWindow:
    """Confusion counts over the most recent evaluation pairs.

    Sliding mode keeps the last W pairs; tumbling mode empties itself
    every W pairs so each window is disjoint.
    """

    def __init__(self, length: int, mode: str = "sliding"):
        if length < 1:
            raise ValueError("window length must be at least 1")
        if mode not in ("sliding", "tumbling"):
            raise ValueError(f"unknown window mode {mode!r}")
        self.length = length
        self.mode = mode
        self._pairs: deque[tuple[PolarityLabel, PolarityLabel]] = deque()
        # counts[predicted][truth], index 0 = positive.
        self._counts = [[0, 0], [0, 0]]

    def __len__(self) -> int:
        return len(self._pairs)

    def add(self, predicted: PolarityLabel, truth: PolarityLabel) -> None:
        if self.mode == "tumbling" and len(self._pairs) == self.length:
            self._pairs.clear()
            self._counts = [[0, 0], [0, 0]]
        elif self.mode == "sliding" and len(self._pairs) == self.length:
            old_p, old_t = self._pairs.popleft()
            self._counts[old_p is not PolarityLabel.POSITIVE][
                old_t is not PolarityLabel.POSITIVE
            ] -= 1
        self._pairs.append((predicted, truth))
        self._counts[predicted is not PolarityLabel.POSITIVE][
            truth is not PolarityLabel.POSITIVE
        ] += 1

    def kappa(self) -> float:
        (pp, pn), (np_, nn) = self._counts
        return kappa_from_counts(pp, pn, np_, nn)


class RunStatus:
    """Thread-safe progress snapshot shared with the label service."""

    def __init__(self, stream_length: int = 0, seed_size: int = 0):
        self._lock = threading.Lock()
        self._data = {
            "position": 0,
            "stream_length": stream_length,
            "seed_size": seed_size,
            # Before the stream starts, every paid label is a seed label.
            "spend_percent": 100 if seed_size else 0,
            "kappa": None,
            "vocab_size": 0,
            "done": False,
        }

    def update(self, **fields) -> None:
        with self._lock:
            self._data.update(fields)

    def snapshot(self) -> dict:
        with self._lock:
            return dict(self._data)


class PrequentialLoop:
    """Drives one experiment over an in-memory document sequence.

    The loop itself is strictly sequential; concurrency only enters
    through the oracle, which may park a query for another thread.
    """

    def __init__(
        self,
        documents: list[Document],
        seed_size: int,
        strategy: Strategy,
        window_length: int = 100,
        window_mode: str = "sliding",
        oracle: Oracle | None = None,
        status: RunStatus | None = None,
    ):
        check_seed(documents, seed_size)
        self.seed = documents[:seed_size]
        self.stream = documents[seed_size:]
        self.strategy = strategy
        self.oracle = oracle or GroundTruthOracle()
        self.model = VocabularyStats.from_seed(self.seed)
        self.ledger = BudgetLedger(seed_size=seed_size)
        self.window = ConfusionWindow(window_length, window_mode)
        self.status = status or RunStatus()
        self._rng = strategy.make_rng()
        self.status.update(
            stream_length=len(self.stream),
            seed_size=seed_size,
            vocab_size=self.model.vocab_size,
            spend_percent=self.ledger.spend_percent(),
        )

    def records(self) -> Iterator[PrequentialRecord]:
        """Process the stream, yielding one record per document."""
        for doc in self.stream:
            if doc.true_label is None:
                raise ValueError(
                    f"document {doc.id}: stream carries no ground truth for evaluation"
                )
            prediction = self.model.predict(doc)
            self.window.add(prediction.label, doc.true_label)
            windowed = self.window.kappa()

            decision = self.strategy.decide(doc, self.model, prediction, self._rng)
            sampled = False
            if decision.query:
                query = PendingQuery(
                    doc_id=doc.id,
                    words=doc.words,
                    predicted=prediction.label,
                    score=decision.score,
                    priors=(
                        self.model.class_prior(PolarityLabel.POSITIVE),
                        self.model.class_prior(PolarityLabel.NEGATIVE),
                    ),
                    vocab_size=self.model.vocab_size,
                    kappa=windowed,
                )
                answer = self.oracle.ask(doc, query)
                if answer is None:
                    self.ledger.record_abandoned()
                    logger.info("document %d: query abandoned", doc.id)
                else:
                    self.model.update(doc, answer)
                    self.ledger.record_answer()
                    sampled = True
            self.ledger.advance()

            self.status.update(
                position=self.ledger.stream_position,
                spend_percent=self.ledger.spend_percent(),
                kappa=windowed,
                vocab_size=self.model.vocab_size,
            )
            yield PrequentialRecord(
                doc_id=doc.id,
                predicted=prediction.label,
                truth=doc.true_label,
                sampled=sampled,
                windowed_kappa=windowed,
                vocab_size_after=self.model.vocab_size,
            )
        self.status.update(done=True)


@dataclass(frozen=True)
class RunResult:
    """Artifacts of a finished (or interrupted) run."""

    records_path: Path
    summary_path: Path
    model_path: Path
    summary: dict


def _apply_variant(documents: list[Document], variant: str, seed_size: int):
    if variant == "original":
        return documents
    if variant == "reordered":
        return reorder_for_vocab_novelty(documents, seed_size).documents
    if variant == "fixed-vocab":
        return filter_fixed_vocabulary(documents, seed_size).documents
    raise ValueError(f"unknown variant {variant!r}")


def run_experiment(
    config: ExperimentConfig,
    oracle: Oracle | None = None,
    status: RunStatus | None = None,
    documents: list[Document] | None = None,
) -> RunResult:
    """Run one experiment and write records.csv, summary.json, model.json.

    Records are flushed row by row, so an interrupt still leaves a
    parseable prefix; the summary then covers the processed prefix.
    """
    if documents is None:
        documents = load_corpus(config.stream_path).documents
    documents = _apply_variant(documents, config.variant, config.seed_size)

    loop = PrequentialLoop(
        documents,
        config.seed_size,
        config.strategy,
        window_length=config.window_length,
        window_mode=config.window_mode,
        oracle=oracle,
        status=status,
    )

    config.output_dir.mkdir(parents=True, exist_ok=True)
    records_path = config.output_dir / "records.csv"
    summary_path = config.output_dir / "summary.json"
    model_path = config.output_dir / "model.json"

    kappa_sum = 0.0
    kappa_count = 0
    last_kappa = None
    interrupted = False
    with open(records_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
        try:
            for record in loop.records():
                writer.writerow(
                    (
                        record.doc_id,
                        record.predicted.value,
                        record.truth.value,
                        "true" if record.sampled else "false",
                        repr(record.windowed_kappa),
                        record.vocab_size_after,
                    )
                )
                fh.flush()
                kappa_sum += record.windowed_kappa
                kappa_count += 1
                last_kappa = record.windowed_kappa
        except KeyboardInterrupt:
            interrupted = True
            logger.warning("interrupted; partial records kept at %s", records_path)

    ledger = loop.ledger
    summary = {
        "v": SUMMARY_VERSION,
        "stream": str(config.stream_path),
        "variant": config.variant,
        "seed_size": ledger.seed_size,
        "documents_processed": ledger.stream_position,
        "strategy": {
            "kind": config.strategy.kind.value,
            "alpha": config.strategy.alpha,
            "budget": config.strategy.budget,
            "rng_seed": config.strategy.rng_seed,
        },
        "window": {"length": config.window_length, "mode": config.window_mode},
        "queries_made": ledger.queries_made,
        "abandoned": ledger.abandoned,
        "spend_fraction": ledger.spend_fraction(),
        "spend_percent": ledger.spend_percent(),
        "mean_kappa": kappa_sum / kappa_count if kappa_count else None,
        "final_kappa": last_kappa,
        "final_vocab_size": loop.model.vocab_size,
        "interrupted": interrupted,
    }
    summary_path.write_text(json.dumps(summary, indent=2) + "\n")
    loop.model.save(model_path)
    return RunResult(records_path, summary_path, model_path, summary)
