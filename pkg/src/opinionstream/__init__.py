"""Active polarity learning over streams of opinionated documents.

An incrementally trained multinomial naive Bayes classifier reads an
unbounded labeled-for-evaluation stream, asks an oracle for true
labels only when a sampling strategy says the answer is worth its
cost, and reports prequential kappa plus label spend.
"""

from .config import ConfigError, ExperimentConfig, load_config
from .corpus import (
    Corpus,
    CorpusFormatError,
    Document,
    PolarityLabel,
    SeedError,
    TokenizerConfig,
    filter_fixed_vocabulary,
    load_corpus,
    reorder_for_vocab_novelty,
    tokenize,
    write_stream,
)
from .harness import (
    ConfusionWindow,
    PrequentialLoop,
    PrequentialRecord,
    RunResult,
    RunStatus,
    kappa_from_counts,
    run_experiment,
)
from .mnb import Prediction, VocabularyStats
from .oracle import (
    BudgetLedger,
    GroundTruthOracle,
    InteractiveOracle,
    PendingQuery,
    StaleQueryError,
)
from .sampling import (
    SamplingDecision,
    Strategy,
    StrategyError,
    StrategyKind,
    entropy,
    information_gain,
)
from .synth import DriftScript, SegmentSpec, synthesize_drift_stream

__version__ = "0.1.0"

__all__ = [
    "BudgetLedger",
    "ConfigError",
    "ConfusionWindow",
    "Corpus",
    "CorpusFormatError",
    "Document",
    "DriftScript",
    "ExperimentConfig",
    "GroundTruthOracle",
    "InteractiveOracle",
    "PendingQuery",
    "PolarityLabel",
    "Prediction",
    "PrequentialLoop",
    "PrequentialRecord",
    "RunResult",
    "RunStatus",
    "SamplingDecision",
    "SeedError",
    "SegmentSpec",
    "StaleQueryError",
    "Strategy",
    "StrategyError",
    "StrategyKind",
    "TokenizerConfig",
    "VocabularyStats",
    "entropy",
    "filter_fixed_vocabulary",
    "information_gain",
    "kappa_from_counts",
    "load_config",
    "load_corpus",
    "reorder_for_vocab_novelty",
    "run_experiment",
    "synthesize_drift_stream",
    "tokenize",
    "write_stream",
]
