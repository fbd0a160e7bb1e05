"""Generation backends: a deterministic scripted simulator and an HTTP client.

The scripted backend turns a request into a token timeline (a token here is
a whitespace-delimited word of the scripted reply): the first token lands
``ttft_ms`` after the start and each later token follows at the configured
token rate.  The replay engine merges these timelines into its event queue,
so simulated runs are fully deterministic.

The HTTP backend speaks the chat-completions streaming convention
(``messages`` array in, server-sent ``delta`` chunks out) and stamps each
received chunk with the wall clock.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator

import httpx

from .errors import BackendError, InvalidInputError


class Role(str, Enum):
    THINKER = "thinker"
    SPEAKER = "speaker"


@dataclass(frozen=True)
class GenerationRequest:
    role: Role
    prompt: str
    # The transcript the prompt was built from; the scripted responder keys
    # replies on it so one profile serves every strategy's prompt wording.
    transcript: str = ""
    max_new_tokens: int = 4096
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if self.max_new_tokens <= 0:
            raise InvalidInputError("max_new_tokens must be > 0")


@dataclass
class GenerationRecord:
    """Ledger entry for one generate call, interrupted or not."""

    role: Role
    start_ms: float
    prompt: str
    transcript: str
    first_token_ms: float | None = None
    end_ms: float | None = None
    interrupted: bool = False
    output_text: str = ""
    injected_snapshot_json: str | None = None
    first_sentence_ms: float | None = None
    flagged: bool = False

    @property
    def prompt_len_chars(self) -> int:
        return len(self.prompt)


@dataclass(frozen=True)
class ScheduledToken:
    t_ms: float
    text: str


@dataclass(frozen=True)
class TokenTimeline:
    tokens: tuple[ScheduledToken, ...]
    completion_ms: float


_NUMBER = re.compile(r"-?\d[\d,]*(?:\.\d+)?")


def default_thinker_reply(transcript: str) -> str:
    """Deterministic snapshot derived from the transcript itself."""
    variables = {
        f"n{i}": match.group(0)
        for i, match in enumerate(_NUMBER.finditer(transcript), start=1)
    }
    return json.dumps(
        {
            "corrected_text": transcript,
            "key_variables": variables,
            "plan": [
                "restate the request",
                "combine the noted values",
                "state the result",
            ],
        },
        ensure_ascii=False,
    )


@dataclass(frozen=True)
class ScriptedProfile:
    """Deterministic responder: identical requests, identical timelines."""

    ttft_ms: int = 150
    tokens_per_second: float = 50.0
    responses: dict[tuple[str, str], str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.ttft_ms < 0:
            raise InvalidInputError("ttft_ms must be >= 0")
        if self.tokens_per_second <= 0:
            raise InvalidInputError("tokens_per_second must be > 0")

    def reply_for(self, role: Role, prompt_key: str) -> str:
        explicit = self.responses.get((role.value, prompt_key))
        if explicit is not None:
            return explicit
        if role is Role.THINKER:
            return default_thinker_reply(prompt_key)
        return prompt_key

    def to_record(self) -> dict:
        return {
            "ttft_ms": self.ttft_ms,
            "tokens_per_second": self.tokens_per_second,
            "responses": [
                {"role": role, "key": key, "reply": reply}
                for (role, key), reply in self.responses.items()
            ],
        }

    @classmethod
    def from_record(cls, record: dict) -> "ScriptedProfile":
        try:
            return cls(
                ttft_ms=int(record.get("ttft_ms", 150)),
                tokens_per_second=float(record.get("tokens_per_second", 50.0)),
                responses={
                    (str(e["role"]), str(e["key"])): str(e["reply"])
                    for e in record.get("responses", [])
                },
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed scripted profile: {exc}") from exc


class ScriptedBackend:
    """Plans token timelines on the simulated clock; cannot fail."""

    def __init__(self, profile: ScriptedProfile) -> None:
        self.profile = profile

    def plan(self, request: GenerationRequest, start_ms: float) -> TokenTimeline:
        reply = self.profile.reply_for(request.role, request.transcript)
        words = reply.split()[: request.max_new_tokens]
        gap_ms = 1000.0 / self.profile.tokens_per_second
        first = start_ms + self.profile.ttft_ms
        tokens = tuple(
            ScheduledToken(t_ms=first + i * gap_ms, text=word)
            for i, word in enumerate(words)
        )
        completion = tokens[-1].t_ms if tokens else first
        return TokenTimeline(tokens=tokens, completion_ms=completion)


@dataclass(frozen=True)
class LiveEndpoint:
    url: str
    model: str
    auth_env_var: str = ""
    timeout_s: float = 60.0


class HttpChatBackend:
    """Streaming chat-completions client on the wall clock."""

    def __init__(
        self,
        endpoint: LiveEndpoint,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        self.endpoint = endpoint
        headers = {}
        token = os.environ.get(endpoint.auth_env_var, "") if endpoint.auth_env_var else ""
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(
            timeout=endpoint.timeout_s, headers=headers, transport=transport
        )

    def generate(
        self,
        request: GenerationRequest,
        cancelled: Callable[[], bool] = lambda: False,
        clock_ms: Callable[[], float] = lambda: time.monotonic() * 1000.0,
    ) -> Iterator[tuple[str, float]]:
        """Yield (token chunk, wall ms); stops early when cancelled."""
        payload = {
            "model": self.endpoint.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "max_tokens": request.max_new_tokens,
            "temperature": request.temperature,
            "stream": True,
        }
        url = self.endpoint.url.rstrip("/") + "/chat/completions"
        try:
            with self._client.stream("POST", url, json=payload) as response:
                if response.status_code != 200:
                    raise BackendError(
                        f"backend returned HTTP {response.status_code}",
                        status=response.status_code,
                    )
                for line in response.iter_lines():
                    if cancelled():
                        return
                    if not line.startswith("data:"):
                        continue
                    data = line[len("data:") :].strip()
                    if data == "[DONE]":
                        return
                    try:
                        chunk = json.loads(data)
                        delta = chunk["choices"][0]["delta"]
                    except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
                        raise BackendError(f"malformed stream chunk: {exc}") from exc
                    content = delta.get("content")
                    if content:
                        yield content, clock_ms()
        except httpx.HTTPError as exc:
            raise BackendError(f"backend transport failure: {exc}") from exc

    def close(self) -> None:
        self._client.close()
