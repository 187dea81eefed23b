"""Prequential loop semantics and run artifacts."""

import csv
import json
import random

import pytest

from opinionstream.config import ExperimentConfig
from opinionstream.corpus import Document, PolarityLabel, write_stream
from opinionstream.harness import (
    PrequentialLoop,
    RunStatus,
    run_experiment,
)
from opinionstream.mnb import VocabularyStats
from opinionstream.oracle import Oracle, QueryState
from opinionstream.sampling import Strategy, StrategyKind
from opinionstream.synth import DriftScript, SegmentSpec, synthesize_drift_stream

from reference import recount_kappa

POS = PolarityLabel.POSITIVE
NEG = PolarityLabel.NEGATIVE


def small_stream(n=120, seed=5, vocab_size=30):
    script = DriftScript(
        vocab_size=vocab_size,
        segments=(SegmentSpec(n, (0.6, 0.4)),),
        seed=seed,
        affinity_strength=0.85,
    )
    docs, _ = synthesize_drift_stream(script)
    return docs


def config_for(tmp_path, stream_path, kind=StrategyKind.NEVER, **kw):
    strategy_params = {
        k: kw.pop(k) for k in ("alpha", "budget", "rng_seed") if k in kw
    }
    return ExperimentConfig(
        stream_path=stream_path,
        seed_size=kw.pop("seed_size", 10),
        strategy=Strategy(kind, **strategy_params),
        output_dir=tmp_path / kw.pop("output", "run"),
        **kw,
    )


class TestLoop:
    def test_never_leaves_model_at_seed_state(self):
        docs = small_stream()
        loop = PrequentialLoop(docs, 10, Strategy(StrategyKind.NEVER))
        seed_snapshot = VocabularyStats.from_seed(docs[:10]).snapshot_bytes()
        records = list(loop.records())
        assert len(records) == 110
        assert loop.model.snapshot_bytes() == seed_snapshot
        assert loop.ledger.queries_made == 0

    def test_always_equals_batch_training(self):
        docs = small_stream()
        loop = PrequentialLoop(docs, 10, Strategy(StrategyKind.ALWAYS))
        list(loop.records())
        batch = VocabularyStats.from_seed(docs)
        assert loop.model.snapshot_bytes() == batch.snapshot_bytes()
        assert loop.ledger.queries_made == 110

    def test_sampled_flag_matches_ledger(self):
        docs = small_stream(seed=9)
        loop = PrequentialLoop(
            docs, 10, Strategy(StrategyKind.RANDOM, budget=0.4, rng_seed=3)
        )
        records = list(loop.records())
        assert sum(r.sampled for r in records) == loop.ledger.queries_made
        assert 0 < loop.ledger.queries_made < len(records)

    def test_kappa_column_matches_recount(self):
        docs = small_stream(seed=10)
        loop = PrequentialLoop(
            docs, 10, Strategy(StrategyKind.ALWAYS), window_length=25
        )
        pairs = []
        for record in loop.records():
            pairs.append((record.predicted, record.truth))
            assert record.windowed_kappa == pytest.approx(
                recount_kappa(pairs[-25:]), abs=1e-12
            )

    def test_prequential_ordering_replay(self):
        # The prediction logged for document i must be reproducible by
        # a shadow model trained only on seed + answers for j < i.
        docs = small_stream(seed=11)
        loop = PrequentialLoop(
            docs, 10, Strategy(StrategyKind.RANDOM, budget=0.5, rng_seed=8)
        )
        shadow = VocabularyStats.from_seed(docs[:10])
        by_id = {d.id: d for d in docs}
        for record in loop.records():
            assert shadow.predict(by_id[record.doc_id]).label is record.predicted
            if record.sampled:
                shadow.update(by_id[record.doc_id], record.truth)

    def test_truth_never_trains_unsampled(self):
        docs = small_stream(seed=12)
        loop = PrequentialLoop(docs, 10, Strategy(StrategyKind.NEVER))
        list(loop.records())
        assert loop.model.labeled_doc_count == 10

    def test_unlabeled_stream_document_rejected(self):
        docs = small_stream()
        docs[50] = Document(50, docs[50].words, None)
        loop = PrequentialLoop(docs, 10, Strategy(StrategyKind.NEVER))
        with pytest.raises(ValueError, match="ground truth"):
            list(loop.records())

    def test_status_progresses(self):
        docs = small_stream()
        status = RunStatus()
        loop = PrequentialLoop(
            docs, 10, Strategy(StrategyKind.NEVER), status=status
        )
        before = status.snapshot()
        assert before["position"] == 0
        assert before["stream_length"] == 110
        assert before["spend_percent"] == 100
        list(loop.records())
        after = status.snapshot()
        assert after["position"] == 110
        assert after["done"] is True
        assert after["spend_percent"] == round(100 * 10 / 120)


class AbandonEverything(Oracle):
    def ask(self, document, query):
        query.state = QueryState.ABANDONED
        return None


def test_abandoned_queries_do_not_train_or_spend():
    docs = small_stream(seed=13)
    loop = PrequentialLoop(
        docs, 10, Strategy(StrategyKind.ALWAYS), oracle=AbandonEverything()
    )
    records = list(loop.records())
    assert not any(r.sampled for r in records)
    assert loop.ledger.queries_made == 0
    assert loop.ledger.abandoned == 110
    assert loop.model.labeled_doc_count == 10


class TestRunExperiment:
    def test_artifacts_written(self, tmp_path):
        stream = tmp_path / "stream.tsv"
        write_stream(small_stream(), stream)
        config = config_for(tmp_path, stream, StrategyKind.ALWAYS)
        result = run_experiment(config)
        assert result.records_path.exists()
        assert result.summary_path.exists()
        assert result.model_path.exists()

        with open(result.records_path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == list(
            ("doc_id", "predicted", "truth", "sampled", "kappa", "vocab_size")
        )
        assert len(rows) == 111
        assert rows[1][0] == "10"
        assert rows[1][3] == "true"

        summary = json.loads(result.summary_path.read_text())
        assert summary["spend_percent"] == 100
        assert summary["final_vocab_size"] == result.summary["final_vocab_size"]
        assert summary["documents_processed"] == 110
        assert summary["queries_made"] == 110
        assert 0 <= summary["mean_kappa"] <= 1

        model = VocabularyStats.load(result.model_path)
        assert model.audit() == []

    def test_never_run_records_full_stream(self, tmp_path):
        stream = tmp_path / "stream.tsv"
        write_stream(small_stream(), stream)
        result = run_experiment(config_for(tmp_path, stream))
        summary = json.loads(result.summary_path.read_text())
        assert summary["queries_made"] == 0
        assert summary["documents_processed"] == 110
        assert summary["spend_percent"] == round(100 * 10 / 120)

    def test_deterministic_across_runs(self, tmp_path):
        stream = tmp_path / "stream.tsv"
        write_stream(small_stream(seed=21), stream)
        a = run_experiment(
            config_for(
                tmp_path,
                stream,
                StrategyKind.RANDOM,
                budget=0.3,
                rng_seed=5,
                output="a",
            )
        )
        b = run_experiment(
            config_for(
                tmp_path,
                stream,
                StrategyKind.RANDOM,
                budget=0.3,
                rng_seed=5,
                output="b",
            )
        )
        assert a.records_path.read_bytes() == b.records_path.read_bytes()

    def test_variant_applied(self, tmp_path):
        docs = small_stream(seed=22)
        stream = tmp_path / "stream.tsv"
        write_stream(docs, stream)
        config = config_for(tmp_path, stream, variant="fixed-vocab", seed_size=15)
        result = run_experiment(config)
        summary = json.loads(result.summary_path.read_text())
        assert summary["variant"] == "fixed-vocab"
        assert summary["documents_processed"] <= 105

    def test_window_mode_recorded(self, tmp_path):
        stream = tmp_path / "stream.tsv"
        write_stream(small_stream(), stream)
        config = config_for(
            tmp_path, stream, window_length=25, window_mode="tumbling"
        )
        result = run_experiment(config)
        assert result.summary["window"] == {"length": 25, "mode": "tumbling"}
