"""Request and response bodies for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: Literal["ok"] = "ok"
    version: str


class ScoreRequest(BaseModel):
    text: str
    max_input_len: int = Field(default=512, ge=1)


class ScoreResponse(BaseModel):
    score: float


class TraceSource(BaseModel):
    id: str = ""
    text: str = Field(min_length=1)
    answer: str = ""
    metadata: dict[str, str] = Field(default_factory=dict)


class SynthTracesRequest(BaseModel):
    texts: list[TraceSource] = Field(min_length=1)
    wpm: float = Field(default=150.0, gt=0)
    chunk_ms: int = Field(default=200, ge=1)
    jitter: float = Field(default=0.0, ge=0.0, le=1.0)
    perturb: Literal["none", "fillers", "corrections", "hybrid"] = "none"
    seed: int = 0
    sentence_pause_ms: int = Field(default=0, ge=0)
    filler_pause_ms: int = Field(default=0, ge=0)
    eos_silence_ms: int = Field(default=0, ge=0)


class SynthTracesResponse(BaseModel):
    traces: list[dict]


class TriggerDataSource(BaseModel):
    id: str = ""
    text: str = Field(min_length=1)


class SynthTriggerDataRequest(BaseModel):
    texts: list[TriggerDataSource] = Field(min_length=1)
    seed: int = 0


class TriggerSampleModel(BaseModel):
    text: str
    label: int = Field(ge=0, le=1)
    source_id: str


class SynthTriggerDataResponse(BaseModel):
    samples: list[TriggerSampleModel]
    positives: int
    negatives: int


class RunMetricsModel(BaseModel):
    accuracy_pct: float
    latency_ms: float
    ttfs_ms: float
    nfe: float
    nit: float
    interruption_rate_pct: float
    n_utterances: int
    n_failed: int
    mean_rate_pct: float
    nfe_thinker: float
    nfe_speaker: float
    nit_thinker: float
    nit_speaker: float


class BenchmarkRowModel(BaseModel):
    strategy: str
    corpus: str
    metrics: RunMetricsModel


class BenchmarkRunRequest(BaseModel):
    config: dict
    out_dir: str | None = None
    include_audits: bool = False


class BenchmarkRunResponse(BaseModel):
    rows: list[BenchmarkRowModel]
    csv: str
    table: str
    audits: list[dict] | None = None
    out_paths: dict[str, str] | None = None


class ReportRequest(BaseModel):
    audits: list[dict] = Field(min_length=1)


class ReportResponse(BaseModel):
    rows: list[BenchmarkRowModel]
    csv: str
    table: str
