"""Shared lexicons for spoken-language disfluency handling.

The injection vocabulary is the fixed set of fillers the perturbation
pipeline is allowed to insert.  The suppression lexicon is a superset:
streaming components must also treat common surface variants ("um", "er",
"oh") as disfluent even though the injector never emits them.
"""

from __future__ import annotations

FILLER_VOCABULARY: dict[str, tuple[str, ...]] = {
    "hesitation": ("umm", "ah", "let me see", "basically"),
    "correction": ("wait, no", "actually, scrap that", "I mean"),
    "delaying": ("uh", "hmm", "so", "anyway"),
    "transition": ("well", "like", "you know", "actually", "basically"),
}

# Markers used to signal a self-correction ("wrong ... marker correct").
CORRECTION_MARKERS: tuple[str, ...] = FILLER_VOCABULARY["correction"]

# Single-token variants treated as disfluent by streaming consumers in
# addition to the injection vocabulary above.
EXTRA_DISFLUENT_TOKENS: frozenset[str] = frozenset(
    {"um", "uh", "er", "erm", "hm", "mmm", "uhm", "oh", "wait"}
)

CLAUSE_PUNCT = ",;:.!?"
SENTENCE_PUNCT = ".!?"
COORDINATING_CONJUNCTIONS: frozenset[str] = frozenset(
    {"and", "but", "or", "nor", "yet"}
)


def normalize_token(token: str) -> str:
    """Lowercase a token and strip surrounding punctuation."""
    return token.strip(CLAUSE_PUNCT + "'\"()[]").lower()


def _phrase_words(phrase: str) -> tuple[str, ...]:
    return tuple(normalize_token(w) for w in phrase.split())


#: Every injectable filler as a normalized word tuple, longest first so that
#: greedy tail matching prefers "actually, scrap that" over "actually".
FILLER_PHRASES: tuple[tuple[str, ...], ...] = tuple(
    sorted(
        {_phrase_words(p) for group in FILLER_VOCABULARY.values() for p in group},
        key=len,
        reverse=True,
    )
)

MAX_PHRASE_WORDS = max(len(p) for p in FILLER_PHRASES)

SINGLE_WORD_FILLERS: frozenset[str] = frozenset(
    {p[0] for p in FILLER_PHRASES if len(p) == 1} | EXTRA_DISFLUENT_TOKENS
)


def trailing_filler_length(tokens: list[str] | tuple[str, ...]) -> int:
    """Number of trailing tokens forming a filler phrase, 0 if none.

    Matches the longest suffix of ``tokens`` whose normalized words equal an
    entry of the suppression lexicon (injection vocabulary plus single-token
    variants).
    """
    if not tokens:
        return 0
    for phrase in FILLER_PHRASES:
        k = len(phrase)
        if k < 2 or k > len(tokens):
            continue
        tail = tuple(normalize_token(t) for t in tokens[-k:])
        if tail == phrase:
            return k
    if normalize_token(tokens[-1]) in SINGLE_WORD_FILLERS:
        return 1
    return 0


def ends_with_filler(tokens: list[str] | tuple[str, ...]) -> bool:
    return trailing_filler_length(tokens) > 0


def ends_with_ellipsis(token: str) -> bool:
    """Trailing-off marker: the speaker has not finished the thought."""
    return token.endswith("...")
