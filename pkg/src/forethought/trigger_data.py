"""Training-data synthesis for a prefix completeness classifier.

Each source text is annotated with boundary markers (positions where a
listener could reasonably start responding), expanded into one sample per
word prefix labeled by whether it ends on a marker, and the pooled samples
are downsampled to an exact 1:1 label balance.

Dataset files are line-delimited JSON:
``{"text": ..., "label": 0 or 1, "source_id": ...}``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import CannotBalanceError, TraceSchemaError
from .vocab import (
    CLAUSE_PUNCT,
    COORDINATING_CONJUNCTIONS,
    ends_with_ellipsis,
    ends_with_filler,
    normalize_token,
)


@dataclass(frozen=True)
class TriggerSample:
    text: str
    label: int
    source_id: str


def annotate_boundaries(text: str) -> list[int]:
    """Token positions after which a response could start.

    A position ``i`` is a boundary when token ``i`` ends with clause
    punctuation or the next token is a coordinating conjunction.  Positions
    where the prefix tail is a filler or trails off in an ellipsis are
    skipped: pausing there does not mean the thought is complete.
    """
    tokens = text.split()
    markers: list[int] = []
    for i, token in enumerate(tokens):
        boundary = token[-1] in CLAUSE_PUNCT if token else False
        if not boundary and i + 1 < len(tokens):
            boundary = normalize_token(tokens[i + 1]) in COORDINATING_CONJUNCTIONS
        if not boundary:
            continue
        if ends_with_ellipsis(token):
            continue
        if ends_with_filler(tokens[: i + 1]):
            continue
        markers.append(i)
    return markers


def expand_prefixes(text: str, source_id: str = "") -> list[TriggerSample]:
    """One sample per word prefix, positive iff it ends on a boundary."""
    tokens = text.split()
    markers = set(annotate_boundaries(text))
    return [
        TriggerSample(
            text=" ".join(tokens[:k]),
            label=1 if (k - 1) in markers else 0,
            source_id=source_id,
        )
        for k in range(1, len(tokens) + 1)
    ]


def balance_dataset(
    samples: list[TriggerSample], seed: int = 0
) -> list[TriggerSample]:
    """Exact 1:1 downsampling: keep all positives, sample equal negatives."""
    positives = [s for s in samples if s.label == 1]
    negatives = [s for s in samples if s.label == 0]
    if not positives or len(negatives) < len(positives):
        raise CannotBalanceError(len(positives), len(negatives))
    rng = random.Random(seed)
    kept = rng.sample(negatives, len(positives))
    balanced = positives + kept
    rng.shuffle(balanced)
    return balanced


def synthesize_dataset(
    texts: list[tuple[str, str]], seed: int = 0
) -> list[TriggerSample]:
    """Annotate, expand and balance a corpus of (source_id, text) pairs."""
    pooled: list[TriggerSample] = []
    for source_id, text in texts:
        pooled.extend(expand_prefixes(text, source_id))
    return balance_dataset(pooled, seed=seed)


def save_dataset(samples: list[TriggerSample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(
                json.dumps(
                    {
                        "text": sample.text,
                        "label": sample.label,
                        "source_id": sample.source_id,
                    },
                    ensure_ascii=False,
                )
            )
            fh.write("\n")


def load_dataset(path: str | Path) -> list[TriggerSample]:
    samples: list[TriggerSample] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                label = int(record["label"])
                if label not in (0, 1):
                    raise ValueError(f"label must be 0 or 1, got {label}")
                samples.append(
                    TriggerSample(
                        text=str(record["text"]),
                        label=label,
                        source_id=str(record.get("source_id", "")),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise TraceSchemaError(
                    f"malformed dataset record: {exc}", line_no
                ) from exc
    return samples
