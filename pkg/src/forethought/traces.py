"""Transcript traces and streaming-delivery simulation.

An :class:`UtteranceTrace` is a timestamped sequence of cumulative partial
transcripts standing in for the output of a streaming speech recognizer.
:func:`synthesize_trace` turns a reference transcript into such a trace by
stepping a chunked stream clock at a given speaking rate, optionally adding
hypothesis jitter, pauses at sentence boundaries and fillers, and a trailing
end-of-speech silence.

Trace files are line-delimited JSON, one utterance per line::

    {"id": "...", "events": [{"t_ms": 200, "text": "...", "final": false},
     ...], "answer": "...", "meta": {...}}
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidInputError, TraceSchemaError
from .vocab import SENTENCE_PUNCT, ends_with_ellipsis, ends_with_filler


@dataclass(frozen=True)
class TranscriptEvent:
    """One partial-hypothesis update on the stream clock."""

    t_ms: int
    cumulative_text: str
    is_final: bool = False


@dataclass
class UtteranceTrace:
    """A full streaming transcript plus the reference answer."""

    id: str
    events: list[TranscriptEvent]
    end_of_speech_ms: int
    reference_answer: str = ""
    metadata: dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        if not self.events:
            raise TraceSchemaError(f"trace {self.id!r} has no events")
        last_t = -1
        for ev in self.events:
            if ev.t_ms <= last_t:
                raise TraceSchemaError(
                    f"trace {self.id!r}: non-monotone timestamp {ev.t_ms}"
                )
            last_t = ev.t_ms
        finals = [ev for ev in self.events if ev.is_final]
        if len(finals) != 1 or not self.events[-1].is_final:
            raise TraceSchemaError(
                f"trace {self.id!r}: expected exactly one final event, last"
            )
        if self.end_of_speech_ms != self.events[-1].t_ms:
            raise TraceSchemaError(
                f"trace {self.id!r}: end_of_speech_ms {self.end_of_speech_ms} "
                f"!= last event t_ms {self.events[-1].t_ms}"
            )

    @property
    def final_text(self) -> str:
        return self.events[-1].cumulative_text


@dataclass(frozen=True)
class JitterModel:
    """Partial-hypothesis revision model; deterministic per seed."""

    revise_probability: float = 0.0
    revision_window_words: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.revise_probability <= 1.0:
            raise InvalidInputError("revise_probability must be in [0, 1]")
        if self.revision_window_words < 0:
            raise InvalidInputError("revision_window_words must be >= 0")


@dataclass(frozen=True)
class SpeechRateModel:
    """Delivery cadence of the simulated recognizer.

    Words arrive at a constant ``words_per_minute`` pace and hypotheses are
    published on ``chunk_ms`` tick boundaries.  ``sentence_pause_ms`` and
    ``filler_pause_ms`` add silent gaps after sentence-final punctuation and
    after disfluent tokens; ``eos_silence_ms`` delays the final (end of
    speech) event past the last word, which is how real endpointers behave.
    """

    words_per_minute: float
    chunk_ms: int = 200
    jitter: JitterModel = field(default_factory=JitterModel)
    sentence_pause_ms: int = 0
    filler_pause_ms: int = 0
    eos_silence_ms: int = 0

    def __post_init__(self) -> None:
        if self.words_per_minute <= 0:
            raise InvalidInputError("words_per_minute must be > 0")
        if self.chunk_ms <= 0:
            raise InvalidInputError("chunk_ms must be > 0")


def _pause_after(words: list[str], i: int, rate: SpeechRateModel) -> int:
    """Silent gap following word ``i`` (0-based)."""
    word = words[i]
    if ends_with_ellipsis(word):
        return rate.filler_pause_ms
    if ends_with_filler(words[: i + 1]):
        return rate.filler_pause_ms
    if word[-1] in SENTENCE_PUNCT:
        return rate.sentence_pause_ms
    return 0


def _arrival_times_ms(words: list[str], rate: SpeechRateModel) -> list[float]:
    """Completion time of each word on the stream clock."""
    per_word = 60000.0 / rate.words_per_minute
    times: list[float] = []
    offset = 0.0
    for i in range(len(words)):
        times.append((i + 1) * per_word + offset)
        offset += _pause_after(words, i, rate)
    return times


def _ceil_to_chunk(t: float, chunk_ms: int) -> int:
    return int(math.ceil(t / chunk_ms)) * chunk_ms


def _garble(word: str, rng: random.Random) -> str:
    """Deterministic distortion of one word, always different from it."""
    core = word.rstrip(".,!?;:")
    if len(core) >= 3:
        i = rng.randrange(len(core) - 1)
        swapped = core[:i] + core[i + 1] + core[i] + core[i + 2 :]
        if swapped != core:
            return swapped + word[len(core):]
    return core + core[-1:] + word[len(core):] if core else word + "~"


def synthesize_trace(
    text: str,
    rate: SpeechRateModel,
    trace_id: str = "",
    reference_answer: str = "",
    metadata: dict[str, str] | None = None,
) -> UtteranceTrace:
    """Simulate chunked streaming delivery of ``text``.

    One event is published per chunk tick on which the hypothesis changes
    (new words arrived, or a jitter revision occurred).  Without jitter every
    event's text extends the previous one and the final event's text equals
    ``text`` exactly.
    """
    words = text.split()
    if not words:
        raise InvalidInputError("cannot synthesize a trace from empty text")

    arrivals = _arrival_times_ms(words, rate)
    chunk = rate.chunk_ms
    last_word_tick = _ceil_to_chunk(arrivals[-1], chunk)
    end_ms = last_word_tick
    if rate.eos_silence_ms > 0:
        end_ms = _ceil_to_chunk(arrivals[-1] + rate.eos_silence_ms, chunk)

    rng = random.Random(rate.jitter.seed)
    jitter_p = rate.jitter.revise_probability
    window = rate.jitter.revision_window_words

    events: list[TranscriptEvent] = []
    prev_count = 0
    prev_garbled = False
    for tick in range(chunk, last_word_tick + 1, chunk):
        count = 0
        for t in arrivals:
            if t <= tick:
                count += 1
            else:
                break
        if count == prev_count and not prev_garbled:
            continue
        hypothesis = words[:count]
        garbled = False
        if (
            jitter_p > 0
            and window > 0
            and tick != last_word_tick
            and rng.random() < jitter_p
        ):
            n = min(window, len(hypothesis))
            hypothesis = hypothesis[:-n] + [
                _garble(w, rng) for w in hypothesis[len(hypothesis) - n :]
            ]
            garbled = True
        events.append(TranscriptEvent(tick, " ".join(hypothesis), is_final=False))
        prev_count = count
        prev_garbled = garbled

    final = TranscriptEvent(end_ms, text, is_final=True)
    if events and events[-1].t_ms == end_ms:
        events[-1] = final
    else:
        events.append(final)

    trace = UtteranceTrace(
        id=trace_id or f"trace-{abs(hash(text)) % 10**8}",
        events=events,
        end_of_speech_ms=end_ms,
        reference_answer=reference_answer,
        metadata=dict(metadata or {}),
    )
    trace.validate()
    return trace


# ---------------------------------------------------------------------------
# Trace file I/O
# ---------------------------------------------------------------------------


def trace_to_record(trace: UtteranceTrace) -> dict:
    return {
        "id": trace.id,
        "events": [
            {"t_ms": ev.t_ms, "text": ev.cumulative_text, "final": ev.is_final}
            for ev in trace.events
        ],
        "answer": trace.reference_answer,
        "meta": dict(trace.metadata),
    }


def trace_from_record(record: dict, line_no: int | None = None) -> UtteranceTrace:
    try:
        events = [
            TranscriptEvent(int(e["t_ms"]), str(e["text"]), bool(e["final"]))
            for e in record["events"]
        ]
        trace = UtteranceTrace(
            id=str(record["id"]),
            events=events,
            end_of_speech_ms=events[-1].t_ms if events else 0,
            reference_answer=str(record.get("answer", "")),
            metadata={str(k): str(v) for k, v in record.get("meta", {}).items()},
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise TraceSchemaError(f"malformed trace record: {exc}", line_no) from exc
    try:
        trace.validate()
    except TraceSchemaError as exc:
        raise TraceSchemaError(str(exc), line_no) from exc
    return trace


def save_traces(traces: list[UtteranceTrace], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for trace in traces:
            fh.write(json.dumps(trace_to_record(trace), ensure_ascii=False))
            fh.write("\n")


def load_traces(path: str | Path) -> list[UtteranceTrace]:
    traces: list[UtteranceTrace] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TraceSchemaError(f"invalid JSON: {exc}", line_no) from exc
            traces.append(trace_from_record(record, line_no))
    return traces
