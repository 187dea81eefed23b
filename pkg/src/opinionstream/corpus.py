"""Corpus loading, tokenization, and stream variant construction.

A stream is a UTF-8 text file with one document per line:

    <label>\t<space-separated tokens>

where label is "pos" or "neg". Document ids are positional (0..n-1 in
file order after dropping empty documents). Streams written by this
module get a JSON manifest sidecar at ``<stream>.manifest.json``.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

MANIFEST_VERSION = 1


class PolarityLabel(enum.Enum):
    """The two polarity classes. Enum values are the wire tokens."""

    POSITIVE = "pos"
    NEGATIVE = "neg"

    def __str__(self) -> str:
        return self.value


LABELS = (PolarityLabel.POSITIVE, PolarityLabel.NEGATIVE)


@dataclass(frozen=True)
class Document:
    """One stream element: an ordinal id, a bag of words, an optional label.

    Words keep their original order and duplicates; counting happens
    per occurrence downstream.
    """

    id: int
    words: tuple[str, ...]
    true_label: PolarityLabel | None = None


@dataclass(frozen=True)
class TokenizerConfig:
    casefold: bool = True
    min_token_len: int = 2


DEFAULT_TOKENIZER = TokenizerConfig()

_WORD_RE = re.compile(r"[A-Za-z]+")


def tokenize(text: str, cfg: TokenizerConfig | None = None) -> list[str]:
    """Split raw text into alphabetic tokens.

    Tokens are maximal letter runs (anything else is a boundary), so
    "5G" yields "g" after casefolding. Tokens shorter than
    ``cfg.min_token_len`` are dropped; order and duplicates survive.
    """
    cfg = cfg or DEFAULT_TOKENIZER
    tokens = _WORD_RE.findall(text)
    if cfg.casefold:
        tokens = [t.lower() for t in tokens]
    return [t for t in tokens if len(t) >= cfg.min_token_len]


class CorpusFormatError(ValueError):
    """A stream file violates the line format; message names the line."""


class SeedError(ValueError):
    """A seed split does not satisfy the seed invariants."""


_LABEL_BY_TOKEN = {label.value: label for label in LABELS}


@dataclass
class Corpus:
    """Result of loading a stream file."""

    documents: list[Document]
    dropped_empty: int = 0
    source: str | None = None

    def __len__(self) -> int:
        return len(self.documents)


def load_corpus(path: str | Path, tokenizer: TokenizerConfig | None = None) -> Corpus:
    """Read a stream file into Documents with dense ids.

    When ``tokenizer`` is given the text part of each line is run
    through :func:`tokenize` instead of being split on whitespace.
    Documents left empty after tokenization are dropped and counted.

    Raises CorpusFormatError on a malformed line (naming its 1-based
    line number) or when fewer than 2 documents remain.
    """
    path = Path(path)
    documents: list[Document] = []
    dropped = 0
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            label_token, sep, text = line.partition("\t")
            if not sep:
                raise CorpusFormatError(
                    f"{path}: line {lineno}: expected '<label>\\t<tokens>'"
                )
            label = _LABEL_BY_TOKEN.get(label_token)
            if label is None:
                raise CorpusFormatError(
                    f"{path}: line {lineno}: unknown label {label_token!r} "
                    f"(expected one of {sorted(_LABEL_BY_TOKEN)})"
                )
            words = tokenize(text, tokenizer) if tokenizer else text.split()
            if not words:
                dropped += 1
                continue
            documents.append(Document(len(documents), tuple(words), label))
    if len(documents) < 2:
        raise CorpusFormatError(f"{path}: fewer than 2 documents")
    return Corpus(documents, dropped_empty=dropped, source=str(path))


def write_stream(documents: Iterable[Document], path: str | Path) -> int:
    """Write documents in the stream line format. Returns the count."""
    path = Path(path)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        for doc in documents:
            if doc.true_label is None:
                raise ValueError(f"document {doc.id} has no label to write")
            fh.write(f"{doc.true_label.value}\t{' '.join(doc.words)}\n")
            count += 1
    return count


def manifest_path(stream_path: str | Path) -> Path:
    return Path(f"{stream_path}.manifest.json")


def write_manifest(stream_path: str | Path, manifest: dict) -> Path:
    out = manifest_path(stream_path)
    out.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    return out


def check_seed(documents: Sequence[Document], seed_size: int) -> None:
    """Validate a training seed split: size bounds and both classes present."""
    if not 2 <= seed_size < len(documents):
        raise SeedError(
            f"seed_size must be in [2, {len(documents) - 1}], got {seed_size}"
        )
    seen = {d.true_label for d in documents[:seed_size]}
    missing = [label.value for label in LABELS if label not in seen]
    if missing:
        raise SeedError(f"seed lacks documents of class(es): {', '.join(missing)}")


def seed_vocabulary(documents: Sequence[Document], seed_size: int) -> set[str]:
    """Distinct words of the first seed_size documents."""
    vocab: set[str] = set()
    for doc in documents[:seed_size]:
        vocab.update(doc.words)
    return vocab


def _check_split_size(documents: Sequence[Document], seed_size: int) -> None:
    # Variant construction only needs a structurally valid split; class
    # coverage is enforced where the seed actually trains a model.
    if not 1 <= seed_size < len(documents):
        raise SeedError(
            f"seed_size must be in [1, {len(documents) - 1}], got {seed_size}"
        )


@dataclass
class VariantResult:
    """A constructed stream variant plus its manifest metadata."""

    documents: list[Document]
    metadata: dict = field(default_factory=dict)


def _renumber(documents: Iterable[Document]) -> list[Document]:
    return [
        Document(i, doc.words, doc.true_label) for i, doc in enumerate(documents)
    ]


def reorder_for_vocab_novelty(
    documents: Sequence[Document], seed_size: int
) -> VariantResult:
    """Permute a stream so the share of seed-vocabulary words decays.

    The seed vocabulary V is taken from the first ``seed_size``
    documents in the original order. All documents are then sorted by
    descending fraction of in-V word occurrences (i.e. most novel
    last), ties broken by original id. The first ``seed_size`` output
    positions therefore hold fully-V-covered documents whenever enough
    exist; otherwise the most-covered ones are used and the fallback is
    flagged in the metadata.
    """
    _check_split_size(documents, seed_size)
    vocab = seed_vocabulary(documents, seed_size)

    def covered_fraction(doc: Document) -> float:
        return sum(1 for w in doc.words if w in vocab) / len(doc.words)

    fractions = {doc.id: covered_fraction(doc) for doc in documents}
    ordered = sorted(documents, key=lambda d: (-fractions[d.id], d.id))
    fallback = any(fractions[d.id] < 1.0 for d in ordered[:seed_size])
    result = _renumber(ordered)
    metadata = {
        "v": MANIFEST_VERSION,
        "variant": "reordered",
        "length": len(result),
        "seed_size": seed_size,
        "seed_vocab_size": len(vocab),
        "seed_coverage_fallback": fallback,
        "source_ids": [d.id for d in ordered],
        "known_word_fractions": [fractions[d.id] for d in ordered],
    }
    return VariantResult(result, metadata)


def filter_fixed_vocabulary(
    documents: Sequence[Document], seed_size: int
) -> VariantResult:
    """Shorten a stream to documents covered by the seed vocabulary.

    Keeps the original order: the seed block, then every later document
    whose words all belong to the seed vocabulary.
    """
    _check_split_size(documents, seed_size)
    vocab = seed_vocabulary(documents, seed_size)
    kept = list(documents[:seed_size])
    kept.extend(
        doc
        for doc in documents[seed_size:]
        if all(w in vocab for w in doc.words)
    )
    result = _renumber(kept)
    metadata = {
        "v": MANIFEST_VERSION,
        "variant": "fixed-vocab",
        "length": len(result),
        "dropped": len(documents) - len(result),
        "seed_size": seed_size,
        "seed_vocab_size": len(vocab),
        "source_ids": [d.id for d in kept],
    }
    return VariantResult(result, metadata)
