"""Semantic trigger: prefix completeness scoring and fire gating.

The trigger watches a growing transcript prefix and decides when enough
content has arrived to start responding.  A scorer maps the prefix to a
completeness score in [0, 1]; the gate compares it to a threshold and
suppresses duplicate fires on text that has not changed since the last one.

The built-in scorer is a rule-based stand-in with the same interface as a
trained classifier: callers can swap in any ``(text) -> float``, including
:class:`HttpScorer`, which talks to a scoring service over
``POST /score {"text": ...} -> {"score": ...}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Protocol

import httpx

from .errors import InvalidInputError, ScorerUnavailableError
from .vocab import CLAUSE_PUNCT, ends_with_ellipsis, ends_with_filler


@dataclass(frozen=True)
class TriggerConfig:
    tau: float = 0.65
    max_input_len: int = 512

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise InvalidInputError("tau must be in [0, 1]")
        if self.max_input_len <= 0:
            raise InvalidInputError("max_input_len must be > 0")


def score_prefix(text: str, max_input_len: int = 512) -> float:
    """Rule-based completeness score for a transcript prefix.

    0.0 for empty input, a trailing filler, or speech trailing off in an
    ellipsis; 1.0 when the prefix ends at clause punctuation; 0.5 for any
    other mid-clause cut.  Only the trailing ``max_input_len`` words are
    considered, mirroring the input-length cap of a trained scorer.
    """
    tokens = text.split()[-max_input_len:]
    if not tokens:
        return 0.0
    if ends_with_ellipsis(tokens[-1]):
        return 0.0
    if ends_with_filler(tokens):
        return 0.0
    if tokens[-1][-1] in CLAUSE_PUNCT:
        return 1.0
    return 0.5


class GateDecision(str, Enum):
    FIRED = "fired"
    BELOW_THRESHOLD = "below_threshold"
    DEDUP_SUPPRESSED = "dedup_suppressed"


@dataclass(frozen=True)
class GateEvent:
    prefix: str
    score: float
    decision: GateDecision


@dataclass
class TriggerState:
    """Mutable per-utterance gate state plus an audit log."""

    last_fired_text: str | None = None
    log: list[GateEvent] = field(default_factory=list)


def gate(
    state: TriggerState,
    prefix: str,
    score: float,
    config: TriggerConfig = TriggerConfig(),
) -> GateDecision:
    """Decide whether a scored prefix fires the trigger.

    Scores meeting the threshold fire unless the prefix is, up to trailing
    whitespace, the same text that fired last time.  Every call is appended
    to the state log.
    """
    if score < config.tau:
        decision = GateDecision.BELOW_THRESHOLD
    elif (
        state.last_fired_text is not None
        and prefix.rstrip() == state.last_fired_text.rstrip()
    ):
        decision = GateDecision.DEDUP_SUPPRESSED
    else:
        decision = GateDecision.FIRED
        state.last_fired_text = prefix
    state.log.append(GateEvent(prefix=prefix, score=score, decision=decision))
    return decision


class Scorer(Protocol):
    def __call__(self, text: str) -> float: ...


class HttpScorer:
    """Client for a remote prefix-scoring service."""

    def __init__(
        self,
        url: str,
        timeout_s: float = 5.0,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        self._url = url.rstrip("/") + "/score"
        self._client = httpx.Client(timeout=timeout_s, transport=transport)

    def __call__(self, text: str) -> float:
        try:
            response = self._client.post(self._url, json={"text": text})
        except httpx.HTTPError as exc:
            raise ScorerUnavailableError(f"scorer unreachable: {exc}") from exc
        if response.status_code != 200:
            raise ScorerUnavailableError(
                f"scorer returned HTTP {response.status_code}"
            )
        try:
            return float(response.json()["score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScorerUnavailableError(f"malformed scorer reply: {exc}") from exc

    def close(self) -> None:
        self._client.close()


@dataclass
class SemanticTrigger:
    """Scorer and gate bound together for one utterance."""

    config: TriggerConfig = field(default_factory=TriggerConfig)
    scorer: Callable[[str], float] | None = None
    state: TriggerState = field(default_factory=TriggerState)

    def evaluate(self, prefix: str) -> tuple[float, GateDecision]:
        scorer = self.scorer or (
            lambda text: score_prefix(text, self.config.max_input_len)
        )
        score = scorer(prefix)
        return score, gate(self.state, prefix, score, self.config)
