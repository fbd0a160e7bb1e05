"""Strategy-by-corpus benchmark runner driven by a single JSON config.

Replays every trace file through every configured strategy on the simulated
clock, scores accuracy against each trace's reference answer, and aggregates
one RunMetrics row per (strategy, corpus) cell.  Emits three artifacts: a
lossless comma-separated table, an aligned human-readable table, and one
line-delimited JSON audit record per utterance from which the tables can be
rebuilt.

Live wall-clock runs are rejected here: the replay engine owns time, so a
network backend cannot participate.  HttpChatBackend remains available for
one-shot live generation outside the runner.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterable

from .backend import LiveEndpoint, ScriptedBackend, ScriptedProfile
from .errors import ConfigError, ScorerUnavailableError, TraceSchemaError
from .metrics import (
    Matcher,
    RunMetrics,
    UtteranceMetrics,
    aggregate,
    score_accuracy,
    utterance_metrics,
)
from .orchestrator import (
    LtsStrategy,
    PredGenStrategy,
    SerialStrategy,
    Strategy,
    UtteranceLog,
    VadStrategy,
    run_utterance,
)
from .traces import UtteranceTrace, load_traces
from .trigger import HttpScorer, TriggerConfig

try:  # optional transport seam for tests; httpx always present in practice
    import httpx
except ImportError:  # pragma: no cover
    httpx = None  # type: ignore[assignment]


@dataclass(frozen=True)
class TriggerSpec:
    kind: str = "heuristic"
    url: str = ""


@dataclass(frozen=True)
class BackendSpec:
    kind: str = "scripted"
    profile: ScriptedProfile | None = None
    endpoint: LiveEndpoint | None = None


@dataclass(frozen=True)
class BenchmarkConfig:
    trace_paths: tuple[str, ...]
    strategies: tuple[tuple[str, Strategy], ...]
    backend: BackendSpec = BackendSpec()
    trigger: TriggerSpec = TriggerSpec()
    clock: str = "simulated"
    seed: int = 0
    matcher: Matcher = Matcher.NUMERIC
    workers: int = 1


@dataclass(frozen=True)
class BenchmarkRow:
    strategy: str
    corpus: str
    metrics: RunMetrics


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple[BenchmarkRow, ...]
    audits: tuple[dict, ...]


def _require_keys(record: dict, allowed: set[str], where: str) -> None:
    unknown = set(record) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def build_strategy(spec: dict) -> tuple[str, Strategy]:
    """One strategy spec dict to a (row name, strategy) pair."""
    if not isinstance(spec, dict):
        raise ConfigError(f"strategy spec must be an object, got {type(spec).__name__}")
    variant = spec.get("variant")
    strategy: Strategy
    if variant == "serial":
        _require_keys(spec, {"variant", "think", "name"}, "serial strategy")
        strategy = SerialStrategy(think=bool(spec.get("think", False)))
    elif variant == "predgen":
        _require_keys(spec, {"variant", "chunk_chars", "name"}, "predgen strategy")
        chunk = int(spec.get("chunk_chars", 1))
        if chunk < 1:
            raise ConfigError(f"chunk_chars must be positive, got {chunk}")
        strategy = PredGenStrategy(chunk_chars=chunk)
    elif variant == "vad":
        _require_keys(spec, {"variant", "silence_ms", "name"}, "vad strategy")
        silence = int(spec.get("silence_ms", 400))
        if silence < 1:
            raise ConfigError(f"silence_ms must be positive, got {silence}")
        strategy = VadStrategy(silence_ms=silence)
    elif variant == "lts_semantic":
        _require_keys(
            spec, {"variant", "tau", "max_input_len", "name"}, "lts strategy"
        )
        strategy = LtsStrategy(
            trigger_config=TriggerConfig(
                tau=float(spec.get("tau", 0.65)),
                max_input_len=int(spec.get("max_input_len", 512)),
            )
        )
    else:
        raise ConfigError(
            f"unknown strategy variant {variant!r}; "
            "expected one of serial, predgen, vad, lts_semantic"
        )
    return str(spec.get("name", strategy.label)), strategy


def _parse_backend(record: dict, base_dir: Path | None) -> BackendSpec:
    kind = record.get("kind", "scripted")
    if kind == "scripted":
        _require_keys(record, {"kind", "profile", "profile_path"}, "backend")
        if "profile" in record and "profile_path" in record:
            raise ConfigError("backend: give profile or profile_path, not both")
        if "profile_path" in record:
            path = _resolve(record["profile_path"], base_dir)
            try:
                raw = json.loads(path.read_text())
            except OSError as exc:
                raise ConfigError(f"backend profile unreadable: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"backend profile invalid JSON: {exc}") from exc
            return BackendSpec(kind="scripted", profile=ScriptedProfile.from_record(raw))
        profile_record = record.get("profile", {})
        if not isinstance(profile_record, dict):
            raise ConfigError("backend profile must be an object")
        return BackendSpec(
            kind="scripted", profile=ScriptedProfile.from_record(profile_record)
        )
    if kind == "live":
        _require_keys(
            record, {"kind", "url", "model", "auth_env_var", "timeout_s"}, "backend"
        )
        if "url" not in record or "model" not in record:
            raise ConfigError("live backend requires url and model")
        return BackendSpec(
            kind="live",
            endpoint=LiveEndpoint(
                url=str(record["url"]),
                model=str(record["model"]),
                auth_env_var=str(record.get("auth_env_var", "")),
                timeout_s=float(record.get("timeout_s", 60.0)),
            ),
        )
    raise ConfigError(f"unknown backend kind {kind!r}; expected scripted or live")


def _parse_trigger(record: dict) -> TriggerSpec:
    kind = record.get("kind", "heuristic")
    if kind == "heuristic":
        _require_keys(record, {"kind"}, "trigger")
        return TriggerSpec(kind="heuristic")
    if kind == "remote":
        _require_keys(record, {"kind", "url"}, "trigger")
        if not record.get("url"):
            raise ConfigError("remote trigger requires url")
        return TriggerSpec(kind="remote", url=str(record["url"]))
    raise ConfigError(f"unknown trigger kind {kind!r}; expected heuristic or remote")


def _resolve(path: str, base_dir: Path | None) -> Path:
    p = Path(path)
    if base_dir is not None and not p.is_absolute():
        return base_dir / p
    return p


def parse_config(record: dict, base_dir: Path | None = None) -> BenchmarkConfig:
    """Validate one JSON config document; relative paths resolve to base_dir."""
    if not isinstance(record, dict):
        raise ConfigError(f"config must be an object, got {type(record).__name__}")
    _require_keys(
        record,
        {
            "trace_paths",
            "strategies",
            "backend",
            "trigger",
            "clock",
            "seed",
            "matcher",
            "workers",
        },
        "config",
    )
    trace_paths = record.get("trace_paths")
    if not isinstance(trace_paths, list) or not trace_paths:
        raise ConfigError("trace_paths must be a non-empty list")
    strategy_specs = record.get("strategies")
    if not isinstance(strategy_specs, list) or not strategy_specs:
        raise ConfigError("strategies must be a non-empty list")
    strategies = tuple(build_strategy(spec) for spec in strategy_specs)
    names = [name for name, _ in strategies]
    if len(set(names)) != len(names):
        raise ConfigError(f"strategy names must be unique, got {names}")
    clock = record.get("clock", "simulated")
    if clock not in ("simulated", "wall"):
        raise ConfigError(f"clock must be simulated or wall, got {clock!r}")
    try:
        matcher = Matcher(record.get("matcher", "numeric"))
    except ValueError as exc:
        raise ConfigError(f"unknown matcher: {exc}") from exc
    workers = int(record.get("workers", 1))
    if workers < 1:
        raise ConfigError(f"workers must be positive, got {workers}")
    backend_record = record.get("backend", {"kind": "scripted"})
    trigger_record = record.get("trigger", {"kind": "heuristic"})
    if not isinstance(backend_record, dict) or not isinstance(trigger_record, dict):
        raise ConfigError("backend and trigger must be objects")
    return BenchmarkConfig(
        trace_paths=tuple(
            str(_resolve(str(p), base_dir)) for p in trace_paths
        ),
        strategies=strategies,
        backend=_parse_backend(backend_record, base_dir),
        trigger=_parse_trigger(trigger_record),
        clock=clock,
        seed=int(record.get("seed", 0)),
        matcher=matcher,
        workers=workers,
    )


def load_config(path: Path) -> BenchmarkConfig:
    try:
        record = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"config unreadable: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(record, base_dir=path.parent)


def _trace_matcher(trace: UtteranceTrace, default: Matcher) -> Matcher:
    override = trace.metadata.get("matcher", "")
    if not override:
        return default
    try:
        return Matcher(override)
    except ValueError as exc:
        raise ConfigError(
            f"trace {trace.id!r} has unknown matcher {override!r}"
        ) from exc


def _audit_record(
    strategy_name: str,
    corpus: str,
    trace: UtteranceTrace,
    log: UtteranceLog,
    metrics: UtteranceMetrics,
    correct: bool,
    matcher: Matcher,
) -> dict:
    return {
        "strategy": strategy_name,
        "corpus": corpus,
        "trace_id": trace.id,
        "reference_answer": trace.reference_answer,
        "matcher": matcher.value,
        "correct": correct,
        "failed": log.failed,
        "failure": log.failure,
        "end_of_speech_ms": log.end_of_speech_ms,
        "accepted_response": log.accepted_response,
        "accepted_first_token_ms": log.accepted_first_token_ms,
        "accepted_first_sentence_ms": log.accepted_first_sentence_ms,
        "latency_ms": metrics.latency_ms,
        "ttfs_ms": metrics.ttfs_ms,
        "nfe": metrics.nfe,
        "nit": metrics.nit,
        "nfe_thinker": metrics.nfe_thinker,
        "nfe_speaker": metrics.nfe_speaker,
        "nit_thinker": metrics.nit_thinker,
        "nit_speaker": metrics.nit_speaker,
        "generations": [asdict(g) for g in log.generations],
        "trigger_decisions": [asdict(d) for d in log.trigger_decisions],
        "snapshots": [s.to_json() for s in log.snapshots],
    }


def _run_one(
    trace: UtteranceTrace,
    strategy: Strategy,
    backend: ScriptedBackend,
    scorer: Callable[[str], float] | None,
) -> UtteranceLog:
    try:
        return run_utterance(trace, strategy, backend, scorer=scorer)
    except ScorerUnavailableError as exc:
        return UtteranceLog(
            trace_id=trace.id,
            generations=[],
            trigger_decisions=[],
            snapshots=[],
            end_of_speech_ms=trace.end_of_speech_ms,
            failed=True,
            failure=f"trigger scorer failed mid-run: {exc}",
        )


def _run_cell(
    strategy_name: str,
    strategy: Strategy,
    corpus: str,
    traces: list[UtteranceTrace],
    backend: ScriptedBackend,
    scorer: Callable[[str], float] | None,
    default_matcher: Matcher,
    workers: int,
) -> tuple[BenchmarkRow, list[dict]]:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            logs = list(
                pool.map(lambda t: _run_one(t, strategy, backend, scorer), traces)
            )
    else:
        logs = [_run_one(t, strategy, backend, scorer) for t in traces]
    results: list[tuple[UtteranceMetrics, bool]] = []
    audits: list[dict] = []
    for trace, log in zip(traces, logs):
        metrics = utterance_metrics(log)
        matcher = _trace_matcher(trace, default_matcher)
        correct = (
            not log.failed
            and bool(trace.reference_answer)
            and score_accuracy(log.accepted_response, trace.reference_answer, matcher)
        )
        results.append((metrics, correct))
        audits.append(
            _audit_record(strategy_name, corpus, trace, log, metrics, correct, matcher)
        )
    row = BenchmarkRow(
        strategy=strategy_name, corpus=corpus, metrics=aggregate(results)
    )
    return row, audits


def run_benchmark(
    config: BenchmarkConfig,
    out_dir: Path | None = None,
    scorer_transport: "httpx.BaseTransport | None" = None,
) -> BenchmarkReport:
    """Run every (strategy, corpus) cell; optionally write the artifacts."""
    if config.clock == "wall" or config.backend.kind == "live":
        raise ConfigError(
            "component backend: live wall-clock runs are not supported by the "
            "replay runner; use the scripted backend with the simulated clock "
            "(HttpChatBackend covers one-shot live generation)"
        )
    if config.backend.profile is None:
        raise ConfigError("scripted backend requires a profile")
    backend = ScriptedBackend(config.backend.profile)
    scorer: HttpScorer | None = None
    if config.trigger.kind == "remote":
        scorer = HttpScorer(config.trigger.url, transport=scorer_transport)
        try:
            scorer(" ")
        except ScorerUnavailableError as exc:
            scorer.close()
            raise ConfigError(
                f"component trigger: scorer at {config.trigger.url} is "
                f"unreachable: {exc}"
            ) from exc
    try:
        corpora: list[tuple[str, list[UtteranceTrace]]] = []
        for path_text in config.trace_paths:
            path = Path(path_text)
            try:
                traces = load_traces(path)
            except OSError as exc:
                raise ConfigError(f"trace file unreadable: {exc}") from exc
            if not traces:
                raise ConfigError(f"trace file {path} holds no traces")
            corpora.append((path.stem, traces))
        rows: list[BenchmarkRow] = []
        audits: list[dict] = []
        for strategy_name, strategy in config.strategies:
            for corpus, traces in corpora:
                row, cell_audits = _run_cell(
                    strategy_name,
                    strategy,
                    corpus,
                    traces,
                    backend,
                    scorer,
                    config.matcher,
                    config.workers,
                )
                rows.append(row)
                audits.extend(cell_audits)
    finally:
        if scorer is not None:
            scorer.close()
    report = BenchmarkReport(rows=tuple(rows), audits=tuple(audits))
    if out_dir is not None:
        write_outputs(report, out_dir)
    return report


CSV_COLUMNS = (
    "strategy",
    "corpus",
    "accuracy_pct",
    "latency_ms",
    "ttfs_ms",
    "nfe",
    "nit",
    "interruption_rate_pct",
    "mean_rate_pct",
    "n_utterances",
    "n_failed",
    "nfe_thinker",
    "nfe_speaker",
    "nit_thinker",
    "nit_speaker",
)


def rows_to_csv(rows: Iterable[BenchmarkRow]) -> str:
    """Machine-readable table; float repr keeps every field bit-exact."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        m = row.metrics
        writer.writerow(
            [row.strategy, row.corpus]
            + [repr(getattr(m, column)) for column in CSV_COLUMNS[2:]]
        )
    return buffer.getvalue()


def parse_results_csv(text: str) -> list[BenchmarkRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != list(CSV_COLUMNS):
        raise ConfigError(f"unexpected results header: {header}")
    rows = []
    for record in reader:
        if len(record) != len(CSV_COLUMNS):
            raise ConfigError(f"short results row: {record}")
        values = dict(zip(CSV_COLUMNS, record))
        rows.append(
            BenchmarkRow(
                strategy=values["strategy"],
                corpus=values["corpus"],
                metrics=RunMetrics(
                    accuracy_pct=float(values["accuracy_pct"]),
                    latency_ms=float(values["latency_ms"]),
                    ttfs_ms=float(values["ttfs_ms"]),
                    nfe=float(values["nfe"]),
                    nit=float(values["nit"]),
                    interruption_rate_pct=float(values["interruption_rate_pct"]),
                    n_utterances=int(values["n_utterances"]),
                    n_failed=int(values["n_failed"]),
                    mean_rate_pct=float(values["mean_rate_pct"]),
                    nfe_thinker=float(values["nfe_thinker"]),
                    nfe_speaker=float(values["nfe_speaker"]),
                    nit_thinker=float(values["nit_thinker"]),
                    nit_speaker=float(values["nit_speaker"]),
                ),
            )
        )
    return rows


_TABLE_COLUMNS = (
    ("strategy", "{}"),
    ("corpus", "{}"),
    ("accuracy_pct", "{:.2f}"),
    ("latency_ms", "{:.1f}"),
    ("ttfs_ms", "{:.1f}"),
    ("nfe", "{:.2f}"),
    ("nit", "{:.2f}"),
    ("interruption_rate_pct", "{:.2f}"),
    ("n_utterances", "{}"),
    ("n_failed", "{}"),
)


def rows_to_table(rows: Iterable[BenchmarkRow]) -> str:
    """Aligned text table for humans; CSV stays the lossless source."""
    headers = [name for name, _ in _TABLE_COLUMNS]
    body = []
    for row in rows:
        rendered = []
        for name, fmt in _TABLE_COLUMNS:
            value = getattr(row, name) if name in ("strategy", "corpus") else getattr(
                row.metrics, name
            )
            rendered.append(fmt.format(value))
        body.append(rendered)
    widths = [
        max(len(headers[i]), *(len(line[i]) for line in body)) if body else len(headers[i])
        for i in range(len(headers))
    ]
    def render(line: list[str]) -> str:
        cells = []
        for i, cell in enumerate(line):
            cells.append(cell.ljust(widths[i]) if i < 2 else cell.rjust(widths[i]))
        return "  ".join(cells).rstrip()
    ruler = "  ".join("-" * w for w in widths)
    return "\n".join([render(headers), ruler] + [render(line) for line in body]) + "\n"


def write_outputs(report: BenchmarkReport, out_dir: Path) -> dict[str, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": out_dir / "results.csv",
        "table": out_dir / "results.txt",
        "logs": out_dir / "logs.jsonl",
    }
    paths["csv"].write_text(rows_to_csv(report.rows))
    paths["table"].write_text(rows_to_table(report.rows))
    with paths["logs"].open("w") as handle:
        for audit in report.audits:
            handle.write(json.dumps(audit) + "\n")
    return paths


def load_audits(path: Path) -> list[dict]:
    records = []
    with path.open() as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TraceSchemaError(f"invalid JSON: {exc}", line_no) from exc
            if not isinstance(record, dict):
                raise TraceSchemaError("audit record must be an object", line_no)
            records.append(record)
    return records


def report_from_audits(records: Iterable[dict]) -> BenchmarkReport:
    """Rebuild the result table from per-utterance audit records."""
    groups: dict[tuple[str, str], list[tuple[UtteranceMetrics, bool]]] = {}
    audits = []
    for record in records:
        try:
            key = (str(record["strategy"]), str(record["corpus"]))
            metrics = UtteranceMetrics(
                trace_id=str(record["trace_id"]),
                failed=bool(record["failed"]),
                latency_ms=record["latency_ms"],
                ttfs_ms=record["ttfs_ms"],
                nfe=int(record["nfe"]),
                nit=int(record["nit"]),
                nfe_thinker=int(record["nfe_thinker"]),
                nfe_speaker=int(record["nfe_speaker"]),
                nit_thinker=int(record["nit_thinker"]),
                nit_speaker=int(record["nit_speaker"]),
            )
            correct = bool(record["correct"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"audit record missing or malformed field: {exc}") from exc
        groups.setdefault(key, []).append((metrics, correct))
        audits.append(record)
    rows = tuple(
        BenchmarkRow(strategy=strategy, corpus=corpus, metrics=aggregate(cell))
        for (strategy, corpus), cell in groups.items()
    )
    return BenchmarkReport(rows=rows, audits=tuple(audits))
