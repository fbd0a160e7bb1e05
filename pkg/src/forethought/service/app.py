"""HTTP facade over trace synthesis, trigger scoring, and benchmarking.

Serve with:

    uvicorn forethought.service.app:app

POST /score makes this service usable as a remote trigger scorer: it speaks
the same {"text"} -> {"score"} contract the benchmark runner's remote
trigger mode expects.  Benchmark runs read trace files and write artifacts
on the host running the service; relative paths resolve against its working
directory.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..benchmark import (
    BenchmarkRow,
    parse_config,
    report_from_audits,
    rows_to_csv,
    rows_to_table,
    run_benchmark,
)
from ..disfluency import perturb
from ..errors import BackendError, ForethoughtError, ScorerUnavailableError
from ..traces import JitterModel, SpeechRateModel, synthesize_trace, trace_to_record
from ..trigger import score_prefix
from ..trigger_data import synthesize_dataset
from .schemas import (
    BenchmarkRowModel,
    BenchmarkRunRequest,
    BenchmarkRunResponse,
    HealthResponse,
    ReportRequest,
    ReportResponse,
    RunMetricsModel,
    ScoreRequest,
    ScoreResponse,
    SynthTracesRequest,
    SynthTracesResponse,
    SynthTriggerDataRequest,
    SynthTriggerDataResponse,
    TriggerSampleModel,
)

def _row_models(rows: tuple[BenchmarkRow, ...] | list[BenchmarkRow]) -> list[BenchmarkRowModel]:
    return [
        BenchmarkRowModel(
            strategy=row.strategy,
            corpus=row.corpus,
            metrics=RunMetricsModel(**asdict(row.metrics)),
        )
        for row in rows
    ]


def create_app() -> FastAPI:
    app = FastAPI(title="forethought", version=__version__)

    @app.exception_handler(ForethoughtError)
    def domain_error(request: Request, exc: ForethoughtError) -> JSONResponse:
        # Upstream dependencies failing is a gateway problem, not bad input.
        status = 502 if isinstance(exc, (BackendError, ScorerUnavailableError)) else 400
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(version=__version__)

    @app.post("/score", response_model=ScoreResponse)
    def score(request: ScoreRequest) -> ScoreResponse:
        return ScoreResponse(
            score=score_prefix(request.text, max_input_len=request.max_input_len)
        )

    @app.post("/traces/synthesize", response_model=SynthTracesResponse)
    def synthesize_traces(request: SynthTracesRequest) -> SynthTracesResponse:
        rate = SpeechRateModel(
            words_per_minute=request.wpm,
            chunk_ms=request.chunk_ms,
            jitter=JitterModel(revise_probability=request.jitter, seed=request.seed),
            sentence_pause_ms=request.sentence_pause_ms,
            filler_pause_ms=request.filler_pause_ms,
            eos_silence_ms=request.eos_silence_ms,
        )
        records = []
        for index, source in enumerate(request.texts):
            # Per-source seed keeps one bad text from shifting its neighbors.
            result = perturb(source.text, request.perturb, seed=request.seed + index)
            trace = synthesize_trace(
                result.text,
                rate,
                trace_id=source.id or f"u{index:04d}",
                reference_answer=source.answer,
                metadata={**result.metadata, **source.metadata},
            )
            records.append(trace_to_record(trace))
        return SynthTracesResponse(traces=records)

    @app.post("/trigger-data/synthesize", response_model=SynthTriggerDataResponse)
    def synthesize_trigger_data(
        request: SynthTriggerDataRequest,
    ) -> SynthTriggerDataResponse:
        sources = [
            (source.id or f"s{index:04d}", source.text)
            for index, source in enumerate(request.texts)
        ]
        samples = synthesize_dataset(sources, seed=request.seed)
        return SynthTriggerDataResponse(
            samples=[
                TriggerSampleModel(
                    text=s.text, label=s.label, source_id=s.source_id
                )
                for s in samples
            ],
            positives=sum(1 for s in samples if s.label == 1),
            negatives=sum(1 for s in samples if s.label == 0),
        )

    @app.post("/benchmark/run", response_model=BenchmarkRunResponse)
    def benchmark_run(request: BenchmarkRunRequest) -> BenchmarkRunResponse:
        config = parse_config(request.config)
        out_dir = Path(request.out_dir) if request.out_dir else None
        report = run_benchmark(config, out_dir=out_dir)
        out_paths = None
        if out_dir is not None:
            out_paths = {
                "csv": str(out_dir / "results.csv"),
                "table": str(out_dir / "results.txt"),
                "logs": str(out_dir / "logs.jsonl"),
            }
        return BenchmarkRunResponse(
            rows=_row_models(report.rows),
            csv=rows_to_csv(report.rows),
            table=rows_to_table(report.rows),
            audits=list(report.audits) if request.include_audits else None,
            out_paths=out_paths,
        )

    @app.post("/report", response_model=ReportResponse)
    def report(request: ReportRequest) -> ReportResponse:
        rebuilt = report_from_audits(request.audits)
        return ReportResponse(
            rows=_row_models(rebuilt.rows),
            csv=rows_to_csv(rebuilt.rows),
            table=rows_to_table(rebuilt.rows),
        )

    return app


app = create_app()
