"""Label-request strategies for the prequential loop.

Each strategy looks at an unlabeled document (and the current model)
and decides whether the true label is worth asking for. The
information-gain strategy measures how much the class entropy of the
document's known words would drop if the document were absorbed under
its predicted label; uncertainty thresholds the winning log-joint
score; the rest are baselines.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass

from .corpus import Document, PolarityLabel
from .mnb import Prediction, VocabularyStats


def entropy(a: float, b: float) -> float:
    """Binary entropy of the split (a, b), in bits. entropy(0, 0) is 0."""
    total = a + b
    if total == 0:
        return 0.0
    h = 0.0
    for part in (a, b):
        if part:
            p = part / total
            h -= p * math.log2(p)
    return h


def information_gain(
    document: Document, model: VocabularyStats, predicted: PolarityLabel
) -> float:
    """Expected entropy drop from absorbing the document as ``predicted``.

    Sums, over the document's distinct in-vocabulary words, the change
    in count entropy if that word's occurrences were added to the
    predicted class. Out-of-vocabulary words contribute nothing: with
    no counts on either side there is no split to sharpen.
    """
    delta_pos = predicted is PolarityLabel.POSITIVE
    occurrences: dict[str, int] = {}
    for word in document.words:
        occurrences[word] = occurrences.get(word, 0) + 1

    gain = 0.0
    # Plain dict iteration keeps word order deterministic across runs;
    # a set here would let hash randomization perturb the float sum.
    for word, n in occurrences.items():
        pos, neg = model.word_counts(word)
        if pos == 0 and neg == 0:
            continue
        if delta_pos:
            after = entropy(pos + n, neg)
        else:
            after = entropy(pos, neg + n)
        gain += entropy(pos, neg) - after
    return gain


class StrategyKind(enum.Enum):
    """How label requests are chosen."""

    INFO_GAIN = "ig"
    UNCERTAINTY = "uncertainty"
    RANDOM = "random"
    ALWAYS = "always"
    NEVER = "never"


# Which optional parameters each kind accepts.
_PARAMS = {
    StrategyKind.INFO_GAIN: set(),
    StrategyKind.UNCERTAINTY: {"alpha"},
    StrategyKind.RANDOM: {"budget", "rng_seed"},
    StrategyKind.ALWAYS: set(),
    StrategyKind.NEVER: set(),
}


class StrategyError(ValueError):
    """A strategy was configured with missing or extraneous parameters."""


@dataclass(frozen=True)
class SamplingDecision:
    """Whether to request the label, plus the score that drove the call."""

    query: bool
    score: float


@dataclass(frozen=True)
class Strategy:
    """A validated sampling strategy configuration."""

    kind: StrategyKind
    alpha: float | None = None
    budget: float | None = None
    rng_seed: int | None = None

    def __post_init__(self) -> None:
        allowed = _PARAMS[self.kind]
        given = {
            name
            for name in ("alpha", "budget", "rng_seed")
            if getattr(self, name) is not None
        }
        extra = given - allowed
        if extra:
            raise StrategyError(
                f"{self.kind.value} does not take {sorted(extra)}"
            )
        missing = allowed - given
        if missing:
            raise StrategyError(
                f"{self.kind.value} requires {sorted(missing)}"
            )
        if self.alpha is not None and not 0.0 < self.alpha <= 1.0:
            raise StrategyError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.budget is not None and not 0.0 <= self.budget <= 1.0:
            raise StrategyError(f"budget must be in [0, 1], got {self.budget}")

    def make_rng(self) -> random.Random | None:
        """Fresh seeded generator for RANDOM; None for the other kinds."""
        if self.kind is StrategyKind.RANDOM:
            return random.Random(self.rng_seed)
        return None

    def decide(
        self,
        document: Document,
        model: VocabularyStats,
        prediction: Prediction,
        rng: random.Random | None = None,
    ) -> SamplingDecision:
        """Decide whether to request the true label for ``document``.

        The score is the quantity the decision thresholds: the gain for
        INFO_GAIN, the winning log-joint for UNCERTAINTY, the uniform
        draw for RANDOM, and 0 for the constant baselines.
        """
        if self.kind is StrategyKind.INFO_GAIN:
            gain = information_gain(document, model, prediction.label)
            return SamplingDecision(gain > 0.0, gain)
        if self.kind is StrategyKind.UNCERTAINTY:
            # The joint is unnormalized, so useful alphas sit far below
            # the 0.5 floor a two-class posterior would impose.
            top = prediction.log_joint[prediction.label]
            return SamplingDecision(top <= math.log(self.alpha), top)
        if self.kind is StrategyKind.RANDOM:
            if rng is None:
                raise ValueError("RANDOM strategy needs the rng from make_rng()")
            draw = rng.random()
            return SamplingDecision(draw < self.budget, draw)
        if self.kind is StrategyKind.ALWAYS:
            return SamplingDecision(True, 0.0)
        return SamplingDecision(False, 0.0)
