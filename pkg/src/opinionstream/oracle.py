"""Label oracles and budget accounting.

The prequential loop asks an oracle for true labels. GroundTruthOracle
answers from labels already carried on the stream (batch experiments);
InteractiveOracle parks the question for a human on another thread and
waits, giving up after a timeout so an unattended run keeps moving.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field

from .corpus import Document, PolarityLabel


@dataclass
class BudgetLedger:
    """Running account of label spending.

    The seed labels were paid for too, so both numerator and
    denominator include seed_size: spend = (queries + seed) over
    (stream position + seed). Abandoned queries cost nothing and are
    tracked separately.
    """

    seed_size: int
    queries_made: int = 0
    stream_position: int = 0
    abandoned: int = 0

    def record_answer(self) -> None:
        self.queries_made += 1

    def record_abandoned(self) -> None:
        self.abandoned += 1

    def advance(self) -> None:
        self.stream_position += 1

    def spend_fraction(self) -> float:
        denom = self.stream_position + self.seed_size
        if denom == 0:
            return 0.0
        return (self.queries_made + self.seed_size) / denom

    def spend_percent(self) -> int:
        """Whole-percent spend, the way result tables quote it."""
        return round(self.spend_fraction() * 100)


class QueryState(enum.Enum):
    PENDING = "pending"
    ANSWERED = "answered"
    ABANDONED = "abandoned"


@dataclass
class PendingQuery:
    """A label request parked for an interactive answer.

    Carries enough context to render a useful prompt: the document
    itself, what the model thinks, and where the run stands.
    """

    doc_id: int
    words: tuple[str, ...]
    predicted: PolarityLabel
    score: float
    priors: tuple[float, float]
    vocab_size: int
    kappa: float | None
    state: QueryState = QueryState.PENDING
    answer: PolarityLabel | None = None


class StaleQueryError(Exception):
    """An answer arrived for a query that is not the open one."""


class Oracle:
    """Interface the loop talks to: ask, get a label or None."""

    def ask(self, document: Document, query: PendingQuery) -> PolarityLabel | None:
        raise NotImplementedError


class GroundTruthOracle(Oracle):
    """Answers instantly from labels already on the documents."""

    def ask(self, document: Document, query: PendingQuery) -> PolarityLabel | None:
        if document.true_label is None:
            raise ValueError(f"document {document.id} carries no true label")
        query.state = QueryState.ANSWERED
        query.answer = document.true_label
        return document.true_label

    def close(self) -> None:
        pass


class InteractiveOracle(Oracle):
    """Hands queries to another thread and blocks for the answer.

    At most one query is open at a time. ``ask`` publishes it and
    waits on a condition; a UI thread polls ``current`` and calls
    ``submit`` exactly once. If nobody answers within the timeout the
    query is abandoned and the loop moves on without training.
    """

    DEFAULT_TIMEOUT = 120.0

    def __init__(self, timeout: float = DEFAULT_TIMEOUT):
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        self.timeout = timeout
        self._cond = threading.Condition()
        self._pending: PendingQuery | None = None
        self._closed = False

    def ask(self, document: Document, query: PendingQuery) -> PolarityLabel | None:
        with self._cond:
            if self._pending is not None and self._pending.state is QueryState.PENDING:
                raise RuntimeError("a query is already open")
            self._pending = query
            self._cond.notify_all()
            answered = self._cond.wait_for(
                lambda: query.state is QueryState.ANSWERED or self._closed,
                timeout=self.timeout,
            )
            if not answered or query.state is not QueryState.ANSWERED:
                query.state = QueryState.ABANDONED
                return None
            return query.answer

    def current(self) -> PendingQuery | None:
        """The open query, or None when nothing is waiting."""
        with self._cond:
            if self._pending is not None and self._pending.state is QueryState.PENDING:
                return self._pending
            return None

    def submit(self, doc_id: int, label: PolarityLabel) -> None:
        """Answer the open query. Raises StaleQueryError otherwise.

        Answers referencing an old document, a duplicate answer, or an
        answer after abandonment all conflict rather than silently
        winning.
        """
        with self._cond:
            pending = self._pending
            if (
                pending is None
                or pending.doc_id != doc_id
                or pending.state is not QueryState.PENDING
            ):
                raise StaleQueryError(f"document {doc_id} has no open query")
            pending.answer = label
            pending.state = QueryState.ANSWERED
            self._cond.notify_all()

    def close(self) -> None:
        """Release a blocked ask (used on shutdown); it reports abandoned."""
        with self._cond:
            self._closed = True
            self._cond.notify_all()
