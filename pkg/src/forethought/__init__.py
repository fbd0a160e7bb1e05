"""Streaming listen-think-speak orchestration and benchmarking.

Replays timestamped transcript traces through pluggable response-trigger
strategies and a dual-role (Thinker/Speaker) generation state machine on a
deterministic simulated clock, then reports accuracy, latency, TTFS, NFE,
NIT, and interruption rate per strategy and corpus.

    from forethought import (
        SpeechRateModel, synthesize_trace, SerialStrategy,
        ScriptedBackend, ScriptedProfile, run_utterance,
    )

    trace = synthesize_trace(
        "I have 3 apples and I buy 2 more.",
        SpeechRateModel(words_per_minute=200),
        reference_answer="5",
    )
    log = run_utterance(trace, SerialStrategy(), ScriptedBackend(ScriptedProfile()))
"""

from __future__ import annotations

from .backend import (
    GenerationRecord,
    GenerationRequest,
    HttpChatBackend,
    LiveEndpoint,
    Role,
    ScriptedBackend,
    ScriptedProfile,
)
from .benchmark import (
    BenchmarkConfig,
    BenchmarkReport,
    BenchmarkRow,
    load_audits,
    load_config,
    parse_config,
    parse_results_csv,
    report_from_audits,
    rows_to_csv,
    rows_to_table,
    run_benchmark,
    write_outputs,
)
from .disfluency import (
    CorrectionPattern,
    CorrectionSpan,
    DensityPolicy,
    PerturbationResult,
    inject_fillers,
    inject_self_correction,
    perturb,
    recover_source,
    resolve_correction,
    strip_fillers,
)
from .errors import (
    BackendError,
    CannotBalanceError,
    ConfigError,
    ForethoughtError,
    InvalidInputError,
    PatternInapplicableError,
    ScorerUnavailableError,
    TraceSchemaError,
)
from .metrics import (
    Matcher,
    RunMetrics,
    UtteranceMetrics,
    aggregate,
    interruption_rate,
    score_accuracy,
    utterance_metrics,
)
from .orchestrator import (
    LtsStrategy,
    PredGenStrategy,
    SerialStrategy,
    Strategy,
    TriggerDecision,
    UtteranceLog,
    VadStrategy,
    run_utterance,
)
from .snapshots import (
    StateSnapshot,
    build_speaker_prompt,
    build_thinker_prompt,
    parse_snapshot,
)
from .traces import (
    JitterModel,
    SpeechRateModel,
    TranscriptEvent,
    UtteranceTrace,
    load_traces,
    save_traces,
    synthesize_trace,
)
from .trigger import (
    GateDecision,
    HttpScorer,
    SemanticTrigger,
    TriggerConfig,
    TriggerState,
    gate,
    score_prefix,
)
from .trigger_data import (
    TriggerSample,
    annotate_boundaries,
    balance_dataset,
    expand_prefixes,
    load_dataset,
    save_dataset,
    synthesize_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "BenchmarkConfig",
    "BenchmarkReport",
    "BenchmarkRow",
    "CannotBalanceError",
    "ConfigError",
    "CorrectionPattern",
    "CorrectionSpan",
    "DensityPolicy",
    "ForethoughtError",
    "GateDecision",
    "GenerationRecord",
    "GenerationRequest",
    "HttpChatBackend",
    "HttpScorer",
    "InvalidInputError",
    "JitterModel",
    "LiveEndpoint",
    "LtsStrategy",
    "Matcher",
    "PatternInapplicableError",
    "PerturbationResult",
    "PredGenStrategy",
    "Role",
    "RunMetrics",
    "ScorerUnavailableError",
    "ScriptedBackend",
    "ScriptedProfile",
    "SemanticTrigger",
    "SerialStrategy",
    "SpeechRateModel",
    "StateSnapshot",
    "Strategy",
    "TraceSchemaError",
    "TranscriptEvent",
    "TriggerConfig",
    "TriggerDecision",
    "TriggerSample",
    "TriggerState",
    "UtteranceLog",
    "UtteranceMetrics",
    "UtteranceTrace",
    "VadStrategy",
    "aggregate",
    "annotate_boundaries",
    "balance_dataset",
    "build_speaker_prompt",
    "build_thinker_prompt",
    "expand_prefixes",
    "gate",
    "inject_fillers",
    "inject_self_correction",
    "interruption_rate",
    "load_audits",
    "load_config",
    "load_dataset",
    "load_traces",
    "parse_config",
    "parse_results_csv",
    "parse_snapshot",
    "perturb",
    "recover_source",
    "report_from_audits",
    "resolve_correction",
    "rows_to_csv",
    "rows_to_table",
    "run_benchmark",
    "run_utterance",
    "save_dataset",
    "save_traces",
    "score_accuracy",
    "score_prefix",
    "strip_fillers",
    "synthesize_dataset",
    "synthesize_trace",
    "utterance_metrics",
    "write_outputs",
]
