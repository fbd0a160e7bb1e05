"""Per-utterance and aggregate response metrics.

Latency is first accepted token relative to end of speech; TTFS is the
first accepted token that completes a sentence.  Both are clamped at zero:
answer-first strategies can legitimately start before the user stops
speaking, and negative readings are meaningless to users.  NFE counts every
generation invocation regardless of role; NIT counts the cancelled ones.

Aggregate interruption rate is the ratio of means (100·ΣNIT/ΣNFE); a
mean-of-per-utterance-ratios column is also reported since the two differ.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .backend import Role
from .errors import InvalidInputError
from .orchestrator import UtteranceLog


class Matcher(str, Enum):
    NUMERIC = "numeric"
    NORMALIZED_STRING = "normalized-string"


_NUMBER = re.compile(r"-?\d[\d,]*(?:\.\d+)?")
_FOLD = re.compile(r"[^a-z0-9]+")


def last_number(text: str) -> str | None:
    matches = _NUMBER.findall(text)
    return matches[-1] if matches else None


def _to_fraction(token: str) -> Fraction:
    # Tokens come from _NUMBER, so after comma removal this is a plain
    # integer or decimal literal, both exact under Fraction.
    return Fraction(token.replace(",", ""))


def _fold(text: str) -> str:
    return " ".join(_FOLD.sub(" ", text.lower()).split())


def score_accuracy(response: str, reference_answer: str, matcher: Matcher) -> bool:
    """Deterministic accuracy check of a response against the reference."""
    if matcher is Matcher.NUMERIC:
        expected_token = last_number(reference_answer)
        if expected_token is None:
            raise InvalidInputError(
                f"numeric matcher needs a numeric reference, got {reference_answer!r}"
            )
        got_token = last_number(response)
        if got_token is None:
            return False
        return _to_fraction(got_token) == _to_fraction(expected_token)
    folded_reference = _fold(reference_answer)
    if not folded_reference:
        raise InvalidInputError("reference answer is empty after folding")
    return folded_reference in _fold(response)


def interruption_rate(nfe: float, nit: float) -> float:
    """NIT over NFE as a percentage; 0 for an empty run."""
    if nit < 0 or nfe < 0:
        raise InvalidInputError("counts must be non-negative")
    if nit > nfe:
        raise InvalidInputError(f"nit {nit} exceeds nfe {nfe}")
    if nfe == 0:
        return 0.0
    return 100.0 * nit / nfe


@dataclass(frozen=True)
class UtteranceMetrics:
    trace_id: str
    failed: bool
    latency_ms: float | None
    ttfs_ms: float | None
    nfe: int
    nit: int
    nfe_thinker: int
    nfe_speaker: int
    nit_thinker: int
    nit_speaker: int


def utterance_metrics(log: UtteranceLog) -> UtteranceMetrics:
    """Reduce one utterance log to its metric record.

    Failed utterances keep their generation counts but carry no timings.
    """
    nfe = len(log.generations)
    nit = sum(1 for g in log.generations if g.interrupted)
    by_role = {
        role: [g for g in log.generations if g.role is role] for role in Role
    }
    latency = None
    ttfs = None
    if not log.failed:
        if log.accepted_first_token_ms is not None:
            latency = max(0.0, log.accepted_first_token_ms - log.end_of_speech_ms)
        if log.accepted_first_sentence_ms is not None:
            ttfs = max(0.0, log.accepted_first_sentence_ms - log.end_of_speech_ms)
    return UtteranceMetrics(
        trace_id=log.trace_id,
        failed=log.failed,
        latency_ms=latency,
        ttfs_ms=ttfs,
        nfe=nfe,
        nit=nit,
        nfe_thinker=len(by_role[Role.THINKER]),
        nfe_speaker=len(by_role[Role.SPEAKER]),
        nit_thinker=sum(1 for g in by_role[Role.THINKER] if g.interrupted),
        nit_speaker=sum(1 for g in by_role[Role.SPEAKER] if g.interrupted),
    )


@dataclass(frozen=True)
class RunMetrics:
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


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def aggregate(results: list[tuple[UtteranceMetrics, bool]]) -> RunMetrics:
    """Arithmetic means over utterances; failures never reach timing means."""
    if not results:
        raise InvalidInputError("cannot aggregate zero utterances")
    metrics = [m for m, _ in results]
    mean_nfe = _mean([float(m.nfe) for m in metrics])
    mean_nit = _mean([float(m.nit) for m in metrics])
    return RunMetrics(
        accuracy_pct=100.0 * sum(1 for _, correct in results if correct)
        / len(results),
        latency_ms=_mean(
            [m.latency_ms for m in metrics if not m.failed and m.latency_ms is not None]
        ),
        ttfs_ms=_mean(
            [m.ttfs_ms for m in metrics if not m.failed and m.ttfs_ms is not None]
        ),
        nfe=mean_nfe,
        nit=mean_nit,
        interruption_rate_pct=interruption_rate(mean_nfe, mean_nit),
        n_utterances=len(results),
        n_failed=sum(1 for m in metrics if m.failed),
        mean_rate_pct=_mean(
            [interruption_rate(float(m.nfe), float(m.nit)) for m in metrics]
        ),
        nfe_thinker=_mean([float(m.nfe_thinker) for m in metrics]),
        nfe_speaker=_mean([float(m.nfe_speaker) for m in metrics]),
        nit_thinker=_mean([float(m.nit_thinker) for m in metrics]),
        nit_speaker=_mean([float(m.nit_speaker) for m in metrics]),
    )
