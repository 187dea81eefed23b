"""Incremental multinomial naive Bayes for two-class polarity.

The model keeps integer count tables only: per-word per-class
occurrence counts, per-class document counts, and derived per-class
word totals. Training on a document is a pure increment, so a model
built by N single-document updates is identical to one built from the
same N documents in any grouping. Likelihoods use add-one smoothing
over the current vocabulary, and scoring happens in natural-log space.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import Document, PolarityLabel, LABELS, SeedError

SNAPSHOT_VERSION = 1

# Index of each class in the count rows. Fixed so snapshots and audits
# agree across processes.
_POS = 0
_NEG = 1
_INDEX = {PolarityLabel.POSITIVE: _POS, PolarityLabel.NEGATIVE: _NEG}


@dataclass(frozen=True)
class Prediction:
    """Outcome of scoring one document."""

    label: PolarityLabel
    log_joint: dict[PolarityLabel, float]
    in_vocab_word_count: int


@dataclass
class VocabularyStats:
    """Count tables of an incrementally trained polarity model."""

    word_class_counts: dict[str, list[int]] = field(default_factory=dict)
    class_doc_counts: list[int] = field(default_factory=lambda: [0, 0])
    class_word_totals: list[int] = field(default_factory=lambda: [0, 0])

    @property
    def vocab_size(self) -> int:
        return len(self.word_class_counts)

    @property
    def labeled_doc_count(self) -> int:
        return self.class_doc_counts[_POS] + self.class_doc_counts[_NEG]

    @classmethod
    def from_seed(cls, documents: Iterable[Document]) -> "VocabularyStats":
        """Train a fresh model on labeled seed documents.

        Requires at least one document of each class; a single-class
        seed would pin one prior to zero forever.
        """
        model = cls()
        for doc in documents:
            if doc.true_label is None:
                raise SeedError(f"seed document {doc.id} has no label")
            model.update(doc, doc.true_label)
        if 0 in model.class_doc_counts:
            raise SeedError("seed must contain both a positive and a negative document")
        return model

    def update(self, document: Document, label: PolarityLabel) -> None:
        """Fold one labeled document into the counts.

        Every word occurrence counts; repeated words increment their
        cell once per occurrence. New words join the vocabulary with a
        zero row first, so both classes smooth over the same support.
        """
        ci = _INDEX[label]
        counts = self.word_class_counts
        for word in document.words:
            row = counts.get(word)
            if row is None:
                row = [0, 0]
                counts[word] = row
            row[ci] += 1
        self.class_word_totals[ci] += len(document.words)
        self.class_doc_counts[ci] += 1

    def class_prior(self, label: PolarityLabel) -> float:
        total = self.labeled_doc_count
        if total == 0:
            raise ValueError("model has no labeled documents")
        return self.class_doc_counts[_INDEX[label]] / total

    def word_likelihood(self, word: str, label: PolarityLabel) -> float:
        """Smoothed P(word | class) over the current vocabulary."""
        ci = _INDEX[label]
        row = self.word_class_counts.get(word)
        count = row[ci] if row is not None else 0
        return (count + 1) / (self.class_word_totals[ci] + self.vocab_size)

    def word_counts(self, word: str) -> tuple[int, int]:
        """(positive, negative) occurrence counts for a word, (0, 0) if unseen."""
        row = self.word_class_counts.get(word)
        return (row[_POS], row[_NEG]) if row is not None else (0, 0)

    def predict(self, document: Document) -> Prediction:
        """Score a document and pick the higher-scoring class.

        Words outside the vocabulary are skipped; they carry no count
        evidence either way. Exact ties go to POSITIVE.
        """
        log_joint = {}
        in_vocab = [w for w in document.words if w in self.word_class_counts]
        for label in LABELS:
            ci = _INDEX[label]
            denom = self.class_word_totals[ci] + self.vocab_size
            score = math.log(self.class_prior(label))
            for word in in_vocab:
                score += math.log(
                    (self.word_class_counts[word][ci] + 1) / denom
                )
            log_joint[label] = score
        winner = (
            PolarityLabel.POSITIVE
            if log_joint[PolarityLabel.POSITIVE] >= log_joint[PolarityLabel.NEGATIVE]
            else PolarityLabel.NEGATIVE
        )
        return Prediction(winner, log_joint, len(in_vocab))

    def audit(self) -> list[str]:
        """Internal consistency check; returns human-readable violations."""
        problems = []
        totals = [0, 0]
        for word, row in self.word_class_counts.items():
            if len(row) != 2 or any(c < 0 for c in row):
                problems.append(f"word {word!r} has malformed counts {row}")
                continue
            if row == [0, 0]:
                problems.append(f"word {word!r} has an all-zero row")
            totals[_POS] += row[_POS]
            totals[_NEG] += row[_NEG]
        if totals != self.class_word_totals:
            problems.append(
                f"word totals {self.class_word_totals} disagree with"
                f" table sums {totals}"
            )
        if any(c < 0 for c in self.class_doc_counts):
            problems.append(f"negative document counts {self.class_doc_counts}")
        return problems

    # ------------------------------------------------------------------
    # Snapshots
    # ------------------------------------------------------------------

    def snapshot(self) -> dict:
        """JSON-safe snapshot with a canonical (sorted) vocabulary order."""
        return {
            "v": SNAPSHOT_VERSION,
            "class_doc_counts": list(self.class_doc_counts),
            "class_word_totals": list(self.class_word_totals),
            "word_class_counts": {
                w: list(self.word_class_counts[w])
                for w in sorted(self.word_class_counts)
            },
        }

    def snapshot_bytes(self) -> bytes:
        """Canonical serialized snapshot; equal models give equal bytes."""
        return json.dumps(self.snapshot(), sort_keys=True, separators=(",", ":")).encode()

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.snapshot(), indent=2) + "\n")

    @classmethod
    def from_snapshot(cls, data: dict) -> "VocabularyStats":
        if data.get("v") != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported model snapshot version {data.get('v')!r}")
        model = cls(
            word_class_counts={
                w: [int(row[0]), int(row[1])]
                for w, row in data["word_class_counts"].items()
            },
            class_doc_counts=[int(c) for c in data["class_doc_counts"]],
            class_word_totals=[int(c) for c in data["class_word_totals"]],
        )
        problems = model.audit()
        if problems:
            raise ValueError("corrupt model snapshot: " + "; ".join(problems))
        return model

    @classmethod
    def load(cls, path: str | Path) -> "VocabularyStats":
        return cls.from_snapshot(json.loads(Path(path).read_text()))
