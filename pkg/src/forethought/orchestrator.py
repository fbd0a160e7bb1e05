"""Listen-Think-Speak orchestration replayed over a simulated clock.

:func:`run_utterance` feeds one utterance trace through a response strategy
and a generation backend inside a discrete-event loop.  All mutable state
(trigger state, snapshots, generation records) is owned by one session per
utterance; generations interact with the loop only through scheduled token
and completion events, so runs are bit-reproducible.

Strategies:

* ``serial`` waits for end of speech, then makes one Speaker call (the
  ``think`` variant prepends a reasoning directive to the prompt).
* ``predgen`` restarts a speculative Speaker whenever the transcript has
  grown by at least ``chunk_chars`` since the last start, cancelling any
  in-flight Speaker.
* ``vad`` restarts on inter-event silences of at least ``silence_ms``.
* ``lts_semantic`` scores each partial transcript with the trigger; the
  first fire launches a background Thinker, later fires launch Speakers
  with the latest snapshot injected, and an in-flight Speaker is cancelled
  only when the newly fired text strictly extends its prompt transcript.

Whatever the strategy, the accepted response always comes from a Speaker
whose prompt transcript equals the final transcript.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Union

from .backend import (
    GenerationRecord,
    GenerationRequest,
    Role,
    ScriptedBackend,
)
from .errors import BackendError
from .snapshots import (
    EMPTY_SNAPSHOT,
    StateSnapshot,
    build_speaker_prompt,
    build_thinker_prompt,
    parse_snapshot,
)
from .traces import UtteranceTrace
from .trigger import GateDecision, SemanticTrigger, TriggerConfig
from .vocab import SENTENCE_PUNCT

# Event queue ordering at equal timestamps: transcript updates first, then
# silence checks, then generation tokens, then completions.
_PRIO_TRANSCRIPT = 0
_PRIO_SILENCE = 1
_PRIO_TOKEN = 2
_PRIO_COMPLETE = 3

THINK_DIRECTIVE = "Reason carefully step by step before giving the answer."


@dataclass(frozen=True)
class TriggerDecision:
    t_ms: float
    prefix: str
    score: float
    decision: GateDecision


@dataclass
class UtteranceLog:
    trace_id: str
    generations: list[GenerationRecord] = field(default_factory=list)
    trigger_decisions: list[TriggerDecision] = field(default_factory=list)
    snapshots: list[StateSnapshot] = field(default_factory=list)
    accepted_response: str = ""
    accepted_index: int | None = None
    accepted_first_token_ms: float | None = None
    accepted_first_sentence_ms: float | None = None
    end_of_speech_ms: int = 0
    failed: bool = False
    failure: str = ""


@dataclass(frozen=True)
class SerialStrategy:
    think: bool = False

    @property
    def label(self) -> str:
        return "serial_think" if self.think else "serial"

    def on_event(self, session: "_Session", text: str) -> None:
        pass

    def final_prompt(self, session: "_Session", final_text: str) -> str:
        prompt = build_speaker_prompt(final_text)
        if self.think:
            prompt = THINK_DIRECTIVE + "\n" + prompt
        return prompt


@dataclass(frozen=True)
class PredGenStrategy:
    chunk_chars: int = 1

    label = "predgen"

    def on_event(self, session: "_Session", text: str) -> None:
        if len(text) - len(session.last_start_text) < self.chunk_chars:
            return
        if session.in_flight[Role.SPEAKER] is not None:
            session.cancel_speaker()
        session.last_start_text = text
        session.launch(Role.SPEAKER, text, build_speaker_prompt(text))

    def final_prompt(self, session: "_Session", final_text: str) -> str:
        return build_speaker_prompt(final_text)


@dataclass(frozen=True)
class VadStrategy:
    silence_ms: int = 400

    label = "vad"

    def on_event(self, session: "_Session", text: str) -> None:
        pass

    def on_silence(self, session: "_Session", text: str) -> None:
        if text == session.last_start_text:
            return
        if session.in_flight[Role.SPEAKER] is not None:
            session.cancel_speaker()
        session.last_start_text = text
        session.launch(Role.SPEAKER, text, build_speaker_prompt(text))

    def final_prompt(self, session: "_Session", final_text: str) -> str:
        return build_speaker_prompt(final_text)


@dataclass(frozen=True)
class LtsStrategy:
    trigger_config: TriggerConfig = field(default_factory=TriggerConfig)

    label = "lts_semantic"

    def on_event(self, session: "_Session", text: str) -> None:
        score, decision = session.trigger.evaluate(text)
        session.trigger_decisions.append(
            TriggerDecision(session.now, text, score, decision)
        )
        if decision is not GateDecision.FIRED:
            return
        if not session.thinker_launched:
            session.thinker_launched = True
            session.launch(
                Role.THINKER,
                text,
                build_thinker_prompt(text, session.latest_snapshot),
            )
            return
        in_flight = session.in_flight[Role.SPEAKER]
        if in_flight is not None:
            prior = session.records[in_flight].transcript
            extends = len(text) > len(prior) and text.startswith(prior)
            if not extends:
                return
            session.cancel_speaker()
        session.launch(
            Role.SPEAKER,
            text,
            build_speaker_prompt(text, session.latest_snapshot),
            injected=session.latest_snapshot,
        )

    def final_prompt(self, session: "_Session", final_text: str) -> str:
        return build_speaker_prompt(final_text, session.latest_snapshot)


Strategy = Union[SerialStrategy, PredGenStrategy, VadStrategy, LtsStrategy]


class _Session:
    """One utterance's event loop; owns every piece of mutable state."""

    def __init__(
        self,
        trace: UtteranceTrace,
        strategy: Strategy,
        backend: ScriptedBackend,
        scorer: Callable[[str], float] | None,
    ) -> None:
        self.trace = trace
        self.strategy = strategy
        self.backend = backend
        self.now: float = 0.0
        self.records: list[GenerationRecord] = []
        self.tokens: dict[int, list[str]] = {}
        self.in_flight: dict[Role, int | None] = {
            Role.THINKER: None,
            Role.SPEAKER: None,
        }
        self.latest_snapshot = EMPTY_SNAPSHOT
        self.snapshots: list[StateSnapshot] = []
        self.trigger_decisions: list[TriggerDecision] = []
        self.last_start_text = ""
        self.thinker_launched = False
        self.latest_event_ms = float("-inf")
        self.closed = False
        self.accepted_index: int | None = None
        self._heap: list[tuple[float, int, int, tuple]] = []
        self._seq = 0
        self._cancelled: set[int] = set()
        if isinstance(strategy, LtsStrategy):
            self.trigger = SemanticTrigger(
                config=strategy.trigger_config, scorer=scorer
            )

    # -- scheduling --------------------------------------------------------

    def _push(self, t_ms: float, priority: int, payload: tuple) -> None:
        heapq.heappush(self._heap, (t_ms, priority, self._seq, payload))
        self._seq += 1

    def launch(
        self,
        role: Role,
        transcript: str,
        prompt: str,
        injected: StateSnapshot | None = None,
    ) -> int:
        if self.in_flight[role] is not None:
            raise RuntimeError(f"a {role.value} generation is already in flight")
        request = GenerationRequest(role=role, prompt=prompt, transcript=transcript)
        timeline = self.backend.plan(request, self.now)
        gen_id = len(self.records)
        self.records.append(
            GenerationRecord(
                role=role,
                start_ms=self.now,
                prompt=prompt,
                transcript=transcript,
                injected_snapshot_json=(
                    injected.to_json() if injected is not None else None
                ),
            )
        )
        self.tokens[gen_id] = []
        for token in timeline.tokens:
            self._push(token.t_ms, _PRIO_TOKEN, ("token", gen_id, token.text))
        self._push(timeline.completion_ms, _PRIO_COMPLETE, ("complete", gen_id))
        self.in_flight[role] = gen_id
        return gen_id

    def cancel_speaker(self) -> None:
        gen_id = self.in_flight[Role.SPEAKER]
        if gen_id is None:
            return
        record = self.records[gen_id]
        record.interrupted = True
        record.end_ms = self.now
        record.output_text = " ".join(self.tokens[gen_id])
        self._cancelled.add(gen_id)
        self.in_flight[Role.SPEAKER] = None

    # -- event handlers ----------------------------------------------------

    def run(self) -> None:
        for event in self.trace.events:
            self._push(event.t_ms, _PRIO_TRANSCRIPT, ("transcript", event))
        while self._heap:
            t_ms, _priority, _seq, payload = heapq.heappop(self._heap)
            self.now = t_ms
            kind = payload[0]
            if kind == "transcript":
                self._on_transcript(payload[1])
            elif kind == "silence":
                self._on_silence(payload[1], payload[2])
            elif kind == "token":
                self._on_token(payload[1], payload[2])
            else:
                self._on_complete(payload[1])

    def _on_transcript(self, event) -> None:
        self.latest_event_ms = event.t_ms
        self.strategy.on_event(self, event.cumulative_text)
        if event.is_final:
            self._accept_at_end_of_speech(event.cumulative_text)
            self.closed = True
        elif isinstance(self.strategy, VadStrategy):
            self._push(
                event.t_ms + self.strategy.silence_ms,
                _PRIO_SILENCE,
                ("silence", event.t_ms, event.cumulative_text),
            )

    def _on_silence(self, origin_ms: float, text: str) -> None:
        if self.closed or self.latest_event_ms > origin_ms:
            return
        self.strategy.on_silence(self, text)

    def _on_token(self, gen_id: int, token: str) -> None:
        if gen_id in self._cancelled:
            return
        record = self.records[gen_id]
        if record.first_token_ms is None:
            record.first_token_ms = self.now
        self.tokens[gen_id].append(token)
        if record.first_sentence_ms is None and any(
            ch in token for ch in SENTENCE_PUNCT
        ):
            record.first_sentence_ms = self.now

    def _on_complete(self, gen_id: int) -> None:
        if gen_id in self._cancelled:
            return
        record = self.records[gen_id]
        record.end_ms = self.now
        record.output_text = " ".join(self.tokens[gen_id])
        self.in_flight[record.role] = None
        if record.role is Role.THINKER:
            snapshot, ok = parse_snapshot(record.output_text)
            record.flagged = not ok
            snapshot = StateSnapshot(
                corrected_text=snapshot.corrected_text,
                key_variables=snapshot.key_variables,
                plan=snapshot.plan,
                turn_index=len(self.snapshots),
            )
            self.snapshots.append(snapshot)
            self.latest_snapshot = snapshot

    def _accept_at_end_of_speech(self, final_text: str) -> None:
        for gen_id in range(len(self.records) - 1, -1, -1):
            record = self.records[gen_id]
            if (
                record.role is Role.SPEAKER
                and not record.interrupted
                and record.transcript == final_text
            ):
                self.accepted_index = gen_id
                return
        if self.in_flight[Role.SPEAKER] is not None:
            self.cancel_speaker()
        injected = None
        if isinstance(self.strategy, LtsStrategy):
            injected = self.latest_snapshot
        self.accepted_index = self.launch(
            Role.SPEAKER,
            final_text,
            self.strategy.final_prompt(self, final_text),
            injected=injected,
        )


def run_utterance(
    trace: UtteranceTrace,
    strategy: Strategy,
    backend: ScriptedBackend,
    scorer: Callable[[str], float] | None = None,
) -> UtteranceLog:
    """Replay one trace through a strategy and return the full audit log."""
    trace.validate()
    session = _Session(trace, strategy, backend, scorer)
    log = UtteranceLog(
        trace_id=trace.id, end_of_speech_ms=trace.end_of_speech_ms
    )
    try:
        session.run()
    except BackendError as exc:
        log.generations = session.records
        log.trigger_decisions = session.trigger_decisions
        log.snapshots = session.snapshots
        log.failed = True
        log.failure = str(exc)
        return log
    accepted = session.records[session.accepted_index]
    log.generations = session.records
    log.trigger_decisions = session.trigger_decisions
    log.snapshots = session.snapshots
    log.accepted_index = session.accepted_index
    log.accepted_response = accepted.output_text
    log.accepted_first_token_ms = accepted.first_token_ms
    log.accepted_first_sentence_ms = accepted.first_sentence_ms
    return log
