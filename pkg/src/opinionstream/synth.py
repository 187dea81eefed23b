"""Synthetic drift streams for desk-scale experiments.

A DriftScript describes a stream as a sequence of segments. Each
segment has its own class prior, a novel-word injection rate, and a
word-polarity assignment derived from the previous segment by flipping
a fraction of the base vocabulary (plus explicit per-word overrides).
Documents are drawn word by word from class-conditioned distributions,
so the same script and seed always produce byte-identical streams.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate

from .corpus import Document, PolarityLabel, MANIFEST_VERSION

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def word_name(index: int) -> str:
    """Alphabetic name for a word index: xa, xb, ..., xz, xaa, ..."""
    index += 1
    suffix = ""
    while index:
        index, r = divmod(index - 1, 26)
        suffix = _ALPHABET[r] + suffix
    return "x" + suffix


class InvalidScriptError(ValueError):
    """A DriftScript violates its invariants."""


@dataclass(frozen=True)
class SegmentSpec:
    """One stretch of the stream with a fixed generating distribution.

    class_priors is the (positive, negative) document probability pair
    and must sum to 1. flip_fraction flips the polarity lean of that
    share of the base vocabulary relative to the previous segment.
    affinity_overrides pins P(word leans positive) for named words.
    """

    length: int
    class_priors: tuple[float, float]
    novel_rate: float = 0.0
    flip_fraction: float = 0.0
    affinity_overrides: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class DriftScript:
    """Full recipe for a synthetic stream.

    positive_share of the base vocabulary leans positive; leaning words
    carry affinity affinity_strength (their opposite 1 - strength). A
    noisy_fraction of words gets the weaker noisy_strength instead,
    which keeps their class counts impure. Novel words are injected per
    word slot with the segment's novel_rate; each injection either
    mints a fresh word (probability novel_mint_prob) or reuses one
    already minted for the document's class.
    """

    vocab_size: int
    segments: tuple[SegmentSpec, ...]
    seed: int
    doc_length: tuple[int, int] = (3, 8)
    positive_share: float = 0.5
    affinity_strength: float = 1.0
    noisy_fraction: float = 0.0
    noisy_strength: float = 0.75
    novel_mint_prob: float = 0.3

    def validate(self) -> None:
        if self.vocab_size < 2:
            raise InvalidScriptError("vocab_size must be at least 2")
        if not self.segments:
            raise InvalidScriptError("at least one segment is required")
        lo, hi = self.doc_length
        if not 1 <= lo <= hi:
            raise InvalidScriptError(f"bad doc_length range {self.doc_length}")
        if not 0.0 < self.positive_share < 1.0:
            raise InvalidScriptError("positive_share must be strictly inside (0,1)")
        for bound in (self.affinity_strength, self.noisy_strength):
            if not 0.5 <= bound <= 1.0:
                raise InvalidScriptError("affinity strengths must lie in [0.5, 1]")
        if not 0.0 <= self.noisy_fraction <= 1.0:
            raise InvalidScriptError("noisy_fraction must lie in [0, 1]")
        if not 0.0 <= self.novel_mint_prob <= 1.0:
            raise InvalidScriptError("novel_mint_prob must lie in [0, 1]")
        for i, seg in enumerate(self.segments):
            if seg.length <= 0:
                raise InvalidScriptError(f"segment {i}: length must be positive")
            p, n = seg.class_priors
            if abs(p + n - 1.0) > 1e-9 or p < 0 or n < 0:
                raise InvalidScriptError(
                    f"segment {i}: class priors must be non-negative and sum to 1"
                )
            if not 0.0 <= seg.novel_rate < 1.0:
                raise InvalidScriptError(f"segment {i}: novel_rate must be in [0, 1)")
            if not 0.0 <= seg.flip_fraction <= 1.0:
                raise InvalidScriptError(
                    f"segment {i}: flip_fraction must be in [0, 1]"
                )
            for word, aff in seg.affinity_overrides.items():
                if not 0.0 <= aff <= 1.0:
                    raise InvalidScriptError(
                        f"segment {i}: affinity for {word!r} must be in [0, 1]"
                    )


class _ClassSampler:
    """Weighted word draw for one class, via precomputed cumulative weights."""

    def __init__(self, words: list[str], weights: list[float]):
        self.words = words
        self.cum = list(accumulate(weights))
        self.total = self.cum[-1] if self.cum else 0.0

    def draw(self, rng: random.Random) -> str:
        r = rng.random() * self.total
        return self.words[bisect_right(self.cum, r)]


def synthesize_drift_stream(script: DriftScript) -> tuple[list[Document], dict]:
    """Generate the stream described by ``script``.

    Returns the documents (ids 0..n-1, all labeled) and a manifest
    recording segment boundaries, scheduled priors, flips, and
    empirical per-segment label counts.
    """
    script.validate()
    rng = random.Random(script.seed)

    base_words = [word_name(i) for i in range(script.vocab_size)]
    n_positive = round(script.vocab_size * script.positive_share)
    affinities: dict[str, float] = {}
    for i, word in enumerate(base_words):
        strength = (
            script.noisy_strength
            if rng.random() < script.noisy_fraction
            else script.affinity_strength
        )
        affinities[word] = strength if i < n_positive else 1.0 - strength

    novel_pools: dict[PolarityLabel, list[str]] = {
        PolarityLabel.POSITIVE: [],
        PolarityLabel.NEGATIVE: [],
    }
    next_novel = script.vocab_size

    documents: list[Document] = []
    segment_meta: list[dict] = []
    lo, hi = script.doc_length

    for seg_index, segment in enumerate(script.segments):
        flipped: list[str] = []
        if seg_index > 0 and segment.flip_fraction > 0.0:
            n_flip = round(script.vocab_size * segment.flip_fraction)
            flipped = sorted(rng.sample(base_words, n_flip))
            for word in flipped:
                affinities[word] = 1.0 - affinities[word]
        affinities.update(segment.affinity_overrides)

        samplers = {}
        for label in (PolarityLabel.POSITIVE, PolarityLabel.NEGATIVE):
            weights = [
                affinities[w] if label is PolarityLabel.POSITIVE else 1.0 - affinities[w]
                for w in base_words
            ]
            sampler = _ClassSampler(base_words, weights)
            if sampler.total <= 0.0:
                raise InvalidScriptError(
                    f"segment {seg_index}: no word mass for class {label.value}"
                )
            samplers[label] = sampler

        p_positive = segment.class_priors[0]
        positives = 0
        for _ in range(segment.length):
            label = (
                PolarityLabel.POSITIVE
                if rng.random() < p_positive
                else PolarityLabel.NEGATIVE
            )
            positives += label is PolarityLabel.POSITIVE
            length = rng.randint(lo, hi)
            words = []
            pool = novel_pools[label]
            for _ in range(length):
                if segment.novel_rate > 0.0 and rng.random() < segment.novel_rate:
                    if not pool or rng.random() < script.novel_mint_prob:
                        word = word_name(next_novel)
                        next_novel += 1
                        pool.append(word)
                    else:
                        word = pool[rng.randrange(len(pool))]
                else:
                    word = samplers[label].draw(rng)
                words.append(word)
            documents.append(Document(len(documents), tuple(words), label))

        segment_meta.append(
            {
                "start": len(documents) - segment.length,
                "length": segment.length,
                "class_priors": list(segment.class_priors),
                "novel_rate": segment.novel_rate,
                "flip_fraction": segment.flip_fraction,
                "flipped_words": flipped,
                "empirical_positive_share": positives / segment.length,
            }
        )

    manifest = {
        "v": MANIFEST_VERSION,
        "variant": "synthetic",
        "length": len(documents),
        "seed": script.seed,
        "vocab_size": script.vocab_size,
        "novel_words_minted": next_novel - script.vocab_size,
        "doc_length": list(script.doc_length),
        "segments": segment_meta,
    }
    return documents, manifest


def script_from_dict(data: dict) -> DriftScript:
    """Build a DriftScript from parsed JSON (the `synth --script` format)."""
    try:
        segments = tuple(
            SegmentSpec(
                length=int(seg["length"]),
                class_priors=(
                    float(seg["class_priors"][0]),
                    float(seg["class_priors"][1]),
                ),
                novel_rate=float(seg.get("novel_rate", 0.0)),
                flip_fraction=float(seg.get("flip_fraction", 0.0)),
                affinity_overrides={
                    str(k): float(v)
                    for k, v in seg.get("affinity_overrides", {}).items()
                },
            )
            for seg in data["segments"]
        )
        script = DriftScript(
            vocab_size=int(data["vocab_size"]),
            segments=segments,
            seed=int(data["seed"]),
            doc_length=tuple(data.get("doc_length", (3, 8))),  # type: ignore[arg-type]
            positive_share=float(data.get("positive_share", 0.5)),
            affinity_strength=float(data.get("affinity_strength", 1.0)),
            noisy_fraction=float(data.get("noisy_fraction", 0.0)),
            noisy_strength=float(data.get("noisy_strength", 0.75)),
            novel_mint_prob=float(data.get("novel_mint_prob", 0.3)),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InvalidScriptError(f"bad drift script: {exc}") from exc
    script.validate()
    return script
