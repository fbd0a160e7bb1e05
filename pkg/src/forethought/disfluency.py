"""Reversible disfluency augmentation for clean transcripts.

Two augmentations are provided, both reversible by construction:

* :func:`inject_fillers` inserts canonical comma-terminated filler phrases at
  clause boundaries; :func:`strip_fillers` removes them.  Every insertion is
  self-checked (strip of the candidate must recover the input), so the
  round trip is guaranteed for filler-clean input.
* :func:`inject_self_correction` inserts a wrong segment, a trailing-off
  ellipsis and a repair marker ahead of the segment it corrects, recording
  exact character offsets in a :class:`CorrectionSpan` so
  :func:`resolve_correction` can cut the insertion back out.

For hybrid augmentation the correction is applied first and fillers second;
recovery runs in reverse order (strip fillers, then resolve the span), which
keeps the span offsets valid.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidInputError, PatternInapplicableError
from .vocab import (
    CLAUSE_PUNCT,
    FILLER_PHRASES,
    SENTENCE_PUNCT,
    ends_with_ellipsis,
    normalize_token,
)


class CorrectionPattern(str, Enum):
    ENTITY_SWAP = "entity_swap"
    MISREADING = "misreading"
    LOGIC_CHECK = "logic_check"
    DISTRACTION = "distraction"


# Repair marker spoken after the wrong segment trails off, per pattern.
CORRECTION_MARKER = {
    CorrectionPattern.ENTITY_SWAP: "wait, no,",
    CorrectionPattern.MISREADING: "I mean,",
    CorrectionPattern.LOGIC_CHECK: "actually, scrap that,",
    CorrectionPattern.DISTRACTION: "anyway,",
}

# Canonical injectable filler surfaces.  Repair markers are excluded: they
# only ever appear through inject_self_correction, after an ellipsis, which
# is exactly the position strip_fillers refuses to touch.
INJECTION_FILLERS: tuple[tuple[str, ...], ...] = (
    ("umm,",),
    ("ah,",),
    ("let", "me", "see,"),
    ("basically,",),
    ("uh,",),
    ("hmm,",),
    ("so,",),
    ("anyway,",),
    ("well,",),
    ("like,",),
    ("you", "know,"),
    ("actually,",),
)

# Off-topic asides for the distraction pattern; none contain filler vocabulary
# in a strippable position.
ASIDE_BANK = (
    "hold on, someone is calling me",
    "one second, my screen just froze",
    "give me a moment here",
    "sorry, I dropped my pen",
)


@dataclass(frozen=True)
class DensityPolicy:
    """How many fillers to insert for a text of a given length."""

    fillers_per_25_words: float = 1.0
    max_insertions: int = 5

    def insertion_count(self, word_count: int) -> int:
        if self.fillers_per_25_words <= 0:
            return 0
        raw = word_count * self.fillers_per_25_words / 25.0
        return max(1, min(self.max_insertions, round(raw)))


@dataclass(frozen=True)
class FillerAugmentation:
    text: str
    inserted: tuple[str, ...]


@dataclass(frozen=True)
class CorrectionSpan:
    """Character extent of one inserted correction.

    Offsets index the text the correction was injected into; cutting
    ``text[start:end]`` restores that text exactly.
    """

    start: int
    end: int
    wrong_text: str
    marker: str
    correct_text: str
    pattern: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "start": self.start,
                "end": self.end,
                "wrong_text": self.wrong_text,
                "marker": self.marker,
                "correct_text": self.correct_text,
                "pattern": self.pattern,
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, payload: str) -> "CorrectionSpan":
        data = json.loads(payload)
        return cls(
            start=int(data["start"]),
            end=int(data["end"]),
            wrong_text=str(data["wrong_text"]),
            marker=str(data["marker"]),
            correct_text=str(data["correct_text"]),
            pattern=str(data["pattern"]),
        )


@dataclass(frozen=True)
class CorrectedText:
    text: str
    span: CorrectionSpan


def _clause_boundary(token: str) -> bool:
    return token[-1] in CLAUSE_PUNCT and not ends_with_ellipsis(token)


def strip_fillers(text: str) -> str:
    """Remove canonical fillers that follow a clause boundary.

    A filler is removable when its normalized words form a known filler
    phrase, its last token carries a trailing comma, and the surviving token
    before it ends with clause punctuation other than an ellipsis.  Text
    after an ellipsis is left alone, which protects repair markers.
    """
    tokens = text.split()
    out: list[str] = []
    i = 0
    while i < len(tokens):
        matched = 0
        if out and _clause_boundary(out[-1]):
            for phrase in FILLER_PHRASES:
                n = len(phrase)
                if i + n > len(tokens):
                    continue
                window = tokens[i : i + n]
                if window[-1].endswith(",") and (
                    tuple(normalize_token(w) for w in window) == phrase
                ):
                    matched = n
                    break
        if matched:
            i += matched
        else:
            out.append(tokens[i])
            i += 1
    return " ".join(out)


def inject_fillers(
    text: str,
    policy: DensityPolicy = DensityPolicy(),
    seed: int = 0,
) -> FillerAugmentation:
    """Insert fillers at clause boundaries; strip-verified per insertion."""
    tokens = text.split()
    if not tokens:
        raise InvalidInputError("cannot augment empty text")
    text = " ".join(tokens)
    eligible = [
        i for i in range(len(tokens) - 1) if _clause_boundary(tokens[i])
    ]
    rng = random.Random(seed)
    want = min(policy.insertion_count(len(tokens)), len(eligible))
    if want <= 0 or not eligible:
        return FillerAugmentation(text=" ".join(tokens), inserted=())

    chosen = sorted(rng.sample(eligible, want))
    current = list(tokens)
    inserted: list[str] = []
    shift = 0
    for point in chosen:
        surface = rng.choice(INJECTION_FILLERS)
        at = point + shift + 1
        candidate = current[:at] + list(surface) + current[at:]
        # An insertion that strip_fillers cannot undo is dropped.
        if strip_fillers(" ".join(candidate)) != text:
            continue
        current = candidate
        shift += len(surface)
        inserted.append(" ".join(surface))
    return FillerAugmentation(text=" ".join(current), inserted=tuple(inserted))


# ---------------------------------------------------------------------------
# Self-corrections
# ---------------------------------------------------------------------------


def _token_char_offsets(text: str) -> list[int]:
    offsets: list[int] = []
    pos = 0
    for token in text.split():
        pos = text.index(token, pos)
        offsets.append(pos)
        pos += len(token)
    return offsets


def _core(token: str) -> str:
    return token.rstrip(CLAUSE_PUNCT + "'\")]")


def _bump_digits(core: str, rng: random.Random) -> str:
    digit_positions = [i for i, ch in enumerate(core) if ch.isdigit()]
    i = rng.choice(digit_positions)
    # (d + 1 + k) mod 10 with k in [0, 8) can never give back d.
    bumped = str((int(core[i]) + 1 + rng.randrange(8)) % 10)
    return core[:i] + bumped + core[i + 1 :]


def _transpose(core: str, rng: random.Random) -> str:
    candidates = [
        i for i in range(len(core) - 1) if core[i] != core[i + 1]
    ]
    i = rng.choice(candidates)
    return core[:i] + core[i + 1] + core[i] + core[i + 2 :]


def _clause_starts(tokens: list[str]) -> list[int]:
    starts = [0]
    starts.extend(
        i + 1
        for i in range(len(tokens) - 1)
        if _clause_boundary(tokens[i])
    )
    return starts


def inject_self_correction(
    text: str,
    pattern: CorrectionPattern,
    seed: int = 0,
) -> CorrectedText:
    """Insert one spoken self-correction of the given pattern.

    The perturbed text is ``text[:i] + wrong + "... " + marker + " " +
    text[i:]`` for a token-start offset ``i``, so cutting the recorded span
    restores the input byte for byte.
    """
    tokens = text.split()
    if not tokens:
        raise InvalidInputError("cannot augment empty text")
    text = " ".join(tokens)
    rng = random.Random(seed)
    offsets = _token_char_offsets(text)
    marker = CORRECTION_MARKER[pattern]

    if pattern is CorrectionPattern.ENTITY_SWAP:
        sites = [i for i, t in enumerate(tokens) if any(c.isdigit() for c in _core(t))]
        if not sites:
            raise PatternInapplicableError(pattern.value, "no numeric token to swap")
        site = rng.choice(sites)
        correct = _core(tokens[site])
        wrong = _bump_digits(correct, rng)
    elif pattern is CorrectionPattern.MISREADING:
        sites = [
            i
            for i, t in enumerate(tokens)
            if len(_core(t)) >= 4
            and _core(t).isalpha()
            and any(a != b for a, b in zip(_core(t), _core(t)[1:]))
        ]
        if not sites:
            raise PatternInapplicableError(
                pattern.value, "no word long enough to misread"
            )
        site = rng.choice(sites)
        correct = _core(tokens[site])
        wrong = _transpose(correct, rng)
    elif pattern is CorrectionPattern.LOGIC_CHECK:
        sites = [c for c in _clause_starts(tokens) if c + 3 <= len(tokens)]
        if not sites:
            raise PatternInapplicableError(pattern.value, "no clause to restate")
        site = rng.choice(sites)
        correct = " ".join(tokens[site : site + 2])
        wrong = f"{_core(tokens[site])} {_core(tokens[site + 1])} not"
    else:
        sites = [c for c in _clause_starts(tokens) if c > 0]
        if not sites:
            raise PatternInapplicableError(
                pattern.value, "no clause boundary for an aside"
            )
        site = rng.choice(sites)
        correct = tokens[site]
        wrong = rng.choice(ASIDE_BANK)

    at = offsets[site]
    inserted = f"{wrong}... {marker} "
    perturbed = text[:at] + inserted + text[at:]
    span = CorrectionSpan(
        start=at,
        end=at + len(inserted),
        wrong_text=wrong,
        marker=marker,
        correct_text=correct,
        pattern=pattern.value,
    )
    return CorrectedText(text=perturbed, span=span)


def resolve_correction(text: str, span: CorrectionSpan) -> str:
    """Cut the inserted correction back out of ``text``."""
    expected = f"{span.wrong_text}... {span.marker} "
    if text[span.start : span.end] != expected:
        raise InvalidInputError("span does not match text; offsets are stale")
    return text[: span.start] + text[span.end :]


# ---------------------------------------------------------------------------
# Pipeline entry point
# ---------------------------------------------------------------------------

PERTURBATION_MODES = ("none", "fillers", "corrections", "hybrid")


@dataclass(frozen=True)
class PerturbationResult:
    text: str
    metadata: dict[str, str]


def _pick_applicable_correction(
    text: str, rng: random.Random
) -> CorrectedText:
    patterns = list(CorrectionPattern)
    rng.shuffle(patterns)
    for pattern in patterns:
        try:
            return inject_self_correction(text, pattern, seed=rng.randrange(2**31))
        except PatternInapplicableError:
            continue
    raise PatternInapplicableError("any", "no correction pattern applies")


def perturb(
    text: str,
    mode: str,
    seed: int = 0,
    policy: DensityPolicy = DensityPolicy(),
) -> PerturbationResult:
    """Apply one perturbation mode and record how to reverse it.

    Hybrid order is correction first, fillers second.  The result is
    self-verified: recovering the source from the perturbed text must
    succeed, otherwise the input was not filler-clean and an error is
    raised.
    """
    if mode not in PERTURBATION_MODES:
        raise InvalidInputError(f"unknown perturbation mode {mode!r}")
    source = " ".join(text.split())
    metadata: dict[str, str] = {"perturbation": mode, "source_text": source}
    if mode == "none":
        return PerturbationResult(text=source, metadata=metadata)

    rng = random.Random(seed)
    current = source
    if mode in ("corrections", "hybrid"):
        corrected = _pick_applicable_correction(current, rng)
        current = corrected.text
        metadata["correction_span"] = corrected.span.to_json()
        metadata["correction_pattern"] = corrected.span.pattern
    if mode in ("fillers", "hybrid"):
        augmented = inject_fillers(current, policy, seed=rng.randrange(2**31))
        metadata["fillers_inserted"] = json.dumps(list(augmented.inserted))
        current = augmented.text

    if recover_source(current, metadata) != source:
        raise InvalidInputError(
            "perturbation is not reversible for this text; "
            "input must be free of canonical fillers"
        )
    return PerturbationResult(text=current, metadata=metadata)


def recover_source(text: str, metadata: dict[str, str]) -> str:
    """Reverse :func:`perturb` using its recorded metadata."""
    mode = metadata.get("perturbation", "none")
    current = text
    if mode in ("fillers", "hybrid"):
        current = strip_fillers(current)
    if mode in ("corrections", "hybrid"):
        span = CorrectionSpan.from_json(metadata["correction_span"])
        current = resolve_correction(current, span)
    return current
