"""State snapshots and the prompts that produce and consume them.

The background Thinker role emits a compact JSON object holding a sanitized
transcript, extracted key variables and a solution plan.  The foreground
Speaker role receives that snapshot injected into its prompt as prior
knowledge.  Snapshot parsing tolerates prose around the JSON and falls back
to an empty snapshot rather than failing the utterance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class StateSnapshot:
    corrected_text: str = ""
    key_variables: tuple[tuple[str, str], ...] = ()
    plan: tuple[str, ...] = ()
    turn_index: int = 0

    @property
    def is_empty(self) -> bool:
        return not (self.corrected_text or self.key_variables or self.plan)

    def to_json(self) -> str:
        return json.dumps(
            {
                "corrected_text": self.corrected_text,
                "key_variables": dict(self.key_variables),
                "plan": list(self.plan),
                "turn_index": self.turn_index,
            },
            ensure_ascii=False,
        )


EMPTY_SNAPSHOT = StateSnapshot()


def _balanced_end(text: str, start: int) -> int | None:
    """End of the brace-balanced region opening at ``start``, string-aware."""
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return i + 1
    return None


def _first_json_object(text: str) -> dict | None:
    """First ``{...}`` region that parses to a dict.

    Tries every opening brace left to right, including braces inside a
    region that failed to parse; quotes in surrounding prose cannot throw
    the scan off because string tracking starts at each candidate brace.
    """
    search_from = 0
    while True:
        start = text.find("{", search_from)
        if start == -1:
            return None
        end = _balanced_end(text, start)
        if end is not None:
            try:
                loaded = json.loads(text[start:end])
            except json.JSONDecodeError:
                loaded = None
            if isinstance(loaded, dict):
                return loaded
        search_from = start + 1


def parse_snapshot(output_text: str) -> tuple[StateSnapshot, bool]:
    """Extract a snapshot from Thinker output.

    Returns ``(snapshot, ok)``; on any parse failure the snapshot is empty
    and ``ok`` is False so the caller can flag the record.
    """
    data = _first_json_object(output_text)
    if data is None:
        return EMPTY_SNAPSHOT, False
    try:
        variables = data.get("key_variables", {})
        if not isinstance(variables, dict):
            raise TypeError("key_variables must be an object")
        plan = data.get("plan", [])
        if not isinstance(plan, list):
            raise TypeError("plan must be a list")
        snapshot = StateSnapshot(
            corrected_text=str(data.get("corrected_text", "")),
            key_variables=tuple(
                (str(k), str(v)) for k, v in variables.items()
            ),
            plan=tuple(str(step) for step in plan),
            turn_index=int(data.get("turn_index", 0)),
        )
    except (TypeError, ValueError):
        return EMPTY_SNAPSHOT, False
    return snapshot, True


THINKER_DIRECTIVE = (
    "Correct likely phonetic transcription errors, extract the key "
    "variables, and draft a short solution plan. Reply with a single JSON "
    'object with exactly these fields: "corrected_text", "key_variables", '
    '"plan".'
)

SPEAKER_DIRECTIVE = (
    "Restate the problem in your own words, follow the plan above when it "
    "is clear, and state the answer first, before any explanation."
)


def build_thinker_prompt(prefix: str, prior: StateSnapshot = EMPTY_SNAPSHOT) -> str:
    """Prompt for the background analysis pass over a partial transcript."""
    parts = [
        "You are the silent analyst behind a live voice assistant. The user "
        "is still speaking and the transcript below may contain speech "
        "recognition errors.",
        "Transcript so far:",
        prefix,
    ]
    if not prior.is_empty:
        parts.append("Your previous snapshot:")
        parts.append(prior.to_json())
    parts.append(THINKER_DIRECTIVE)
    return "\n".join(parts)


def render_plan(snapshot: StateSnapshot) -> str:
    return "\n".join(
        f"{i}. {step}" for i, step in enumerate(snapshot.plan, start=1)
    )


def render_variables(snapshot: StateSnapshot) -> str:
    return "\n".join(f"{name} = {value}" for name, value in snapshot.key_variables)


def build_speaker_prompt(transcript: str, injected: StateSnapshot = EMPTY_SNAPSHOT) -> str:
    """Prompt for the user-facing answer, with prior state injected.

    Contains, in order: the transcript, the injected plan, the injected key
    variables (each section omitted when empty), and the speaking
    directives.
    """
    parts = [
        "You are answering a spoken question. Transcript:",
        transcript,
    ]
    if injected.plan:
        parts.append("Plan from your prior analysis:")
        parts.append(render_plan(injected))
    if injected.key_variables:
        parts.append("Known variables:")
        parts.append(render_variables(injected))
    parts.append(SPEAKER_DIRECTIVE)
    return "\n".join(parts)
