"""Release gate: one check per guaranteed behavior, one verdict line each.

Run ``pytest tests/test_acceptance.py -v`` for a pass/fail line per
criterion; with ``-s`` each check also prints an ``[ACCEPTANCE]`` verdict.
Everything here runs offline against the heuristic trigger scorer and the
scripted backend; no service process and no network are involved.

Criteria:

1. Interruption-rate arithmetic reproduces the reference NFE/NIT pairs
   to within 0.01 percentage points.
2. Strategy signatures on the committed fixture corpus fall in their
   bands with the expected ordering, in under ten seconds.
3. Timing is deterministic: exact serial latency, clamped answer-first
   latency, bit-identical benchmark reruns.
4. Trigger gate laws (threshold, dedup, filler suppression) hold on over
   one thousand randomized cases against an in-test reference gate.
5. Dataset synthesis marks exactly the boundary prefixes, balances 1:1,
   leaks no markup, and agrees with an independently written annotator
   on every sample.
6. Under a fire-on-every-event schedule each interrupted generation's
   replacement prompt carries the preserved snapshot verbatim and the
   interruption counts match an independent schedule oracle exactly.
7. Hybrid disfluency perturbation is reversible on 500 samples.
"""

from __future__ import annotations

import functools
import json
import random
import time
from pathlib import Path

from forethought import (
    GateDecision,
    LtsStrategy,
    Role,
    ScriptedBackend,
    ScriptedProfile,
    SerialStrategy,
    SpeechRateModel,
    StateSnapshot,
    TriggerConfig,
    TriggerState,
    gate,
    interruption_rate,
    load_config,
    perturb,
    recover_source,
    run_benchmark,
    run_utterance,
    score_prefix,
    synthesize_dataset,
    synthesize_trace,
    utterance_metrics,
)
from forethought.snapshots import EMPTY_SNAPSHOT, render_plan, render_variables

FIXTURES = Path(__file__).parent / "fixtures"


def _criterion(number: int, label: str):
    """Print one ``[ACCEPTANCE]`` verdict line per criterion."""

    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[ACCEPTANCE] criterion {number} ({label}): FAIL")
                raise
            print(f"[ACCEPTANCE] criterion {number} ({label}): PASS")

        return wrapper

    return decorate


# --- criterion 1: interruption-rate arithmetic ---------------------------


@_criterion(1, "interruption-rate arithmetic")
def test_criterion_1_interruption_rate_arithmetic():
    assert abs(interruption_rate(1.96, 0.16) - 8.16) <= 0.01
    assert abs(interruption_rate(2.05, 0.20) - 9.76) <= 0.01


# --- criterion 2: strategy signatures on the fixture corpus --------------


@_criterion(2, "fixture-corpus strategy signatures")
def test_criterion_2_strategy_signatures():
    config = load_config(FIXTURES / "bench.json")
    started = time.perf_counter()
    report = run_benchmark(config)
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0

    rows = {row.strategy: row.metrics for row in report.rows}
    serial = rows["serial"]
    predgen = rows["predgen"]
    vad = rows["vad"]
    lts = rows["lts_semantic"]

    assert serial.nfe == 1.00
    assert serial.nit == 0.0
    assert serial.interruption_rate_pct == 0.0

    assert predgen.interruption_rate_pct > 90.0

    assert 1.5 <= lts.nfe <= 3.0
    assert lts.interruption_rate_pct < 15.0

    # Ordering: per-event speculation interrupts far more than silence
    # gating, which interrupts more than semantic gating.
    assert predgen.interruption_rate_pct > 2.0 * vad.interruption_rate_pct
    assert vad.interruption_rate_pct > lts.interruption_rate_pct


# --- criterion 3: latency determinism -------------------------------------


def _flat_rate(words_per_minute: float, eos_silence_ms: int = 0) -> SpeechRateModel:
    return SpeechRateModel(
        words_per_minute=words_per_minute,
        chunk_ms=200,
        sentence_pause_ms=0,
        filler_pause_ms=0,
        eos_silence_ms=eos_silence_ms,
    )


@_criterion(3, "latency determinism")
def test_criterion_3_latency_determinism():
    # Serial: on a trace ending at exactly 5000 ms, a 150 ms first-token
    # profile yields a latency of exactly 150 ms.
    words = ["count"] * 24 + ["again"]
    text = " ".join(words)
    trace = synthesize_trace(text, _flat_rate(300.0), trace_id="exact")
    assert trace.end_of_speech_ms == 5000
    profile = ScriptedProfile(
        ttft_ms=150,
        tokens_per_second=50.0,
        responses={("speaker", text): "The answer is 36."},
    )
    log = run_utterance(trace, SerialStrategy(), ScriptedBackend(profile))
    assert utterance_metrics(log).latency_ms == 150.0

    # Answer-first: a Speaker that starts before end of speech and is
    # accepted yields a clamped latency of exactly 0.
    question = "I have 3 apples, and I buy 2 more."
    trace = synthesize_trace(
        question, _flat_rate(300.0, eos_silence_ms=600), trace_id="early"
    )
    profile = ScriptedProfile(
        ttft_ms=150,
        tokens_per_second=50.0,
        responses={("speaker", question): "The answer is 5."},
    )
    log = run_utterance(trace, LtsStrategy(), ScriptedBackend(profile))
    assert log.accepted_first_token_ms is not None
    assert log.accepted_first_token_ms < log.end_of_speech_ms
    assert utterance_metrics(log).latency_ms == 0.0

    # Reruns of the full fixture benchmark are bit-identical.
    config = load_config(FIXTURES / "bench.json")
    reports = [run_benchmark(config) for _ in range(3)]
    dumps = [json.dumps(r.audits, sort_keys=True) for r in reports]
    assert reports[0].rows == reports[1].rows == reports[2].rows
    assert dumps[0] == dumps[1] == dumps[2]


# --- criterion 4: trigger gate laws ---------------------------------------


class _ReferenceGate:
    """Independent spelling of the gate contract used as the law oracle."""

    def __init__(self, tau: float) -> None:
        self.tau = tau
        self.last_fired: str | None = None

    def step(self, prefix: str, score: float) -> str:
        if score < self.tau:
            return "below_threshold"
        if self.last_fired is not None and prefix.rstrip() == self.last_fired.rstrip():
            return "dedup_suppressed"
        self.last_fired = prefix
        return "fired"


_CLEAN_WORDS = (
    "take",
    "five",
    "boxes",
    "add",
    "three",
    "more",
    "count",
    "the",
    "total",
    "now",
    "please",
    "carefully",
)
_FILLER_SURFACES = (
    "um",
    "uh,",
    "hmm",
    "you know",
    "well,",
    "wait, no",
    "let me see",
    "actually,",
)
_TAUS = (0.2, 0.5, 0.65, 0.8, 1.0)


@_criterion(4, "trigger gate laws")
def test_criterion_4_trigger_gate_laws():
    rng = random.Random(20260814)
    cases = 0
    monotonic_pool: list[tuple[str, float]] = []

    for _ in range(320):
        tau = rng.choice(_TAUS)
        config = TriggerConfig(tau=tau)
        state = TriggerState()
        reference = _ReferenceGate(tau)
        text = rng.choice(_CLEAN_WORDS)
        expected_score = 0.5

        for _ in range(rng.randrange(3, 9)):
            shape = rng.choice(("boundary", "mid", "filler", "ellipsis", "repeat"))
            if shape == "boundary":
                text = f"{text} {rng.choice(_CLEAN_WORDS)}{rng.choice(',.!?;:')}"
                expected_score = 1.0
            elif shape == "mid":
                text = f"{text} {rng.choice(_CLEAN_WORDS)}"
                expected_score = 0.5
            elif shape == "filler":
                text = f"{text} {rng.choice(_FILLER_SURFACES)}"
                expected_score = 0.0
            elif shape == "ellipsis":
                text = f"{text} {rng.choice(_CLEAN_WORDS)}..."
                expected_score = 0.0
            else:
                text = text + "  " if rng.random() < 0.5 else text

            score = score_prefix(text)
            assert score == expected_score
            decision = gate(state, text, score, config)
            assert decision.value == reference.step(text, score)
            cases += 1

            # Threshold law, both directions.
            if decision is GateDecision.FIRED:
                assert score >= tau
            if score < tau:
                assert decision is GateDecision.BELOW_THRESHOLD
            # Filler suppression: disfluent tails never fire.
            if shape in ("filler", "ellipsis"):
                assert score == 0.0
                assert decision is not GateDecision.FIRED
            # Dedup: an identical resubmission never fires twice.
            if decision is GateDecision.FIRED:
                repeat = gate(state, text, score, config)
                assert repeat is GateDecision.DEDUP_SUPPRESSED
                assert reference.step(text, score) == "dedup_suppressed"
                cases += 1

            monotonic_pool.append((text, score))

        # No two consecutive fires on identical text anywhere in the log.
        fired = [e.prefix for e in state.log if e.decision is GateDecision.FIRED]
        for earlier, later in zip(fired, fired[1:]):
            assert earlier.rstrip() != later.rstrip()

    # Threshold monotonicity: a prefix that fires at one threshold fires
    # at every lower threshold on a fresh gate.
    for text, score in rng.sample(monotonic_pool, 250):
        fired_at = [
            gate(TriggerState(), text, score, TriggerConfig(tau=tau))
            is GateDecision.FIRED
            for tau in _TAUS
        ]
        for lower, higher in zip(fired_at, fired_at[1:]):
            assert lower or not higher
        cases += len(_TAUS)

    assert cases >= 1000


# --- criterion 5: trigger dataset synthesis -------------------------------


_ORACLE_PUNCT = set(",;:.!?")
_ORACLE_CONJUNCTIONS = {"and", "but", "or", "nor", "yet"}
_ORACLE_FILLER_PHRASES = (
    ("actually", "scrap", "that"),
    ("let", "me", "see"),
    ("wait", "no"),
    ("you", "know"),
    ("i", "mean"),
)
_ORACLE_FILLER_WORDS = {
    "umm",
    "ah",
    "basically",
    "uh",
    "hmm",
    "so",
    "anyway",
    "well",
    "like",
    "actually",
    "um",
    "er",
    "erm",
    "hm",
    "mmm",
    "uhm",
    "oh",
    "wait",
}


def _oracle_norm(token: str) -> str:
    return token.strip(",;:.!?'\"()[]").lower()


def _oracle_filler_tail(tokens: list[str]) -> bool:
    norm = [_oracle_norm(t) for t in tokens]
    for phrase in _ORACLE_FILLER_PHRASES:
        if len(norm) >= len(phrase) and tuple(norm[-len(phrase) :]) == phrase:
            return True
    return bool(norm) and norm[-1] in _ORACLE_FILLER_WORDS


def _oracle_markers(text: str) -> set[int]:
    """Independent annotator: boundary prefixes a listener could answer at."""
    tokens = text.split()
    markers: set[int] = set()
    for i, token in enumerate(tokens):
        boundary = bool(token) and token[-1] in _ORACLE_PUNCT
        if not boundary and i + 1 < len(tokens):
            boundary = _oracle_norm(tokens[i + 1]) in _ORACLE_CONJUNCTIONS
        if not boundary or token.endswith("..."):
            continue
        if _oracle_filler_tail(tokens[: i + 1]):
            continue
        markers.add(i)
    return markers


_SUBJECTS = ("they", "we", "the clerks", "the movers", "both teams")
_VERBS = ("pack", "carry", "count", "stack", "ship", "label")
_NOUNS = ("boxes", "bags", "crates", "books", "jars", "coins")
_PADS = ("before lunch", "after the break", "during the first shift")


def _clause(rng: random.Random) -> str:
    return (
        f"{rng.choice(_SUBJECTS)} {rng.choice(_VERBS)} "
        f"{rng.randint(2, 19)} {rng.choice(_NOUNS)}"
    )


def _marked_text(rng: random.Random) -> str:
    """Source text mixing clause boundaries, conjunctions and disfluencies."""
    first, second = _clause(rng), _clause(rng)
    pattern = rng.randrange(6)
    if pattern == 0:
        return f"{first}, and {second}."
    if pattern == 1:
        return f"{first} and {second}."
    if pattern == 2:
        return f"{first}, but {second} {rng.choice(_PADS)}."
    if pattern == 3:
        return f"{first}, um, and {second}."
    if pattern == 4:
        return f"{first}... then {second}."
    return f"{first}, you know, but {second}."


@_criterion(5, "trigger dataset synthesis")
def test_criterion_5_dataset_synthesis():
    rng = random.Random(5150)
    sources = [(f"s{i:03d}", _marked_text(rng)) for i in range(100)]
    by_id = dict(sources)

    samples = synthesize_dataset(sources, seed=42)
    positives = [s for s in samples if s.label == 1]
    negatives = [s for s in samples if s.label == 0]

    # Every marker becomes one positive; balance is exactly 1:1.
    expected_markers = sum(len(_oracle_markers(text)) for _, text in sources)
    assert expected_markers > 0
    assert len(positives) == expected_markers
    assert len(negatives) == len(positives)

    # No annotation markup leaks into sample text.
    assert all("[T]" not in s.text for s in samples)

    # Every label agrees with the independently written annotator.
    for sample in samples:
        markers = _oracle_markers(by_id[sample.source_id])
        position = len(sample.text.split()) - 1
        assert sample.label == (1 if position in markers else 0)
        assert by_id[sample.source_id].startswith(sample.text)


# --- criterion 6: interruption semantics under adversarial firing ---------


_THINKER_REPLY = json.dumps(
    {
        "corrected_text": "please keep talking about the numbers",
        "key_variables": {"topic": "numbers", "count": "16"},
        "plan": ["track the request", "answer when speech ends"],
    }
)


def _schedule_oracle(
    trace, profile: ScriptedProfile
) -> tuple[int, int, list[float]]:
    """Replay the fire-on-every-event schedule from the profile arithmetic.

    Returns (nfe, nit, speaker launch times).  Echo replies are assumed:
    one token per transcript word.  A speaker is interrupted when the next
    fire lands at or before its completion time.
    """
    fires: list[tuple[float, str]] = []
    last = None
    for event in trace.events:
        if last is not None and event.cumulative_text.rstrip() == last.rstrip():
            continue
        fires.append((float(event.t_ms), event.cumulative_text))
        last = event.cumulative_text
    token_gap = 1000.0 / profile.tokens_per_second
    speakers = fires[1:]
    nit = 0
    for i, (t_fire, text) in enumerate(speakers[:-1]):
        completion = t_fire + profile.ttft_ms + (len(text.split()) - 1) * token_gap
        t_next, text_next = speakers[i + 1]
        extends = text_next.startswith(text) and len(text_next) > len(text)
        if extends and t_next <= completion:
            nit += 1
    return len(fires), nit, [t for t, _ in speakers]


@_criterion(6, "interruption semantics")
def test_criterion_6_interruption_semantics():
    text = (
        "please keep talking about the numbers while we listen "
        "to every word arriving right here today"
    )
    trace = synthesize_trace(text, _flat_rate(300.0), trace_id="adversarial")
    profile = ScriptedProfile(
        ttft_ms=1000,
        tokens_per_second=50.0,
        responses={("thinker", "please"): _THINKER_REPLY},
    )
    log = run_utterance(
        trace,
        LtsStrategy(),
        ScriptedBackend(profile),
        scorer=lambda _: 1.0,
    )
    metrics = utterance_metrics(log)

    # Counts match the independent schedule oracle exactly.
    oracle_nfe, oracle_nit, launch_times = _schedule_oracle(trace, profile)
    assert metrics.nfe == oracle_nfe
    assert metrics.nit == oracle_nit
    assert metrics.nfe_thinker == 1
    assert metrics.nit_thinker == 0
    assert metrics.nit_speaker == oracle_nit
    assert oracle_nit > 0

    speakers = [r for r in log.generations if r.role is Role.SPEAKER]
    assert [r.start_ms for r in speakers] == launch_times

    # The Thinker is never cancelled and its snapshot survives every
    # interruption.
    (thinker,) = [r for r in log.generations if r.role is Role.THINKER]
    assert not thinker.interrupted
    parsed = json.loads(_THINKER_REPLY)
    expected = StateSnapshot(
        corrected_text=parsed["corrected_text"],
        key_variables=tuple(parsed["key_variables"].items()),
        plan=tuple(parsed["plan"]),
        turn_index=0,
    )
    assert thinker.end_ms is not None

    carried = 0
    for i, record in enumerate(speakers[:-1]):
        assert record.interrupted
        replacement = speakers[i + 1]
        snapshot = expected if thinker.end_ms <= replacement.start_ms else EMPTY_SNAPSHOT
        assert replacement.injected_snapshot_json == snapshot.to_json()
        if not snapshot.is_empty:
            carried += 1
            assert render_plan(snapshot) in replacement.prompt
            assert render_variables(snapshot) in replacement.prompt
            assert "1. track the request" in replacement.prompt
            assert "topic = numbers" in replacement.prompt
    assert carried > 0
    assert not speakers[-1].interrupted
    assert log.accepted_response == " ".join(text.split())


# --- criterion 7: perturbation reversibility ------------------------------


def _clean_source(rng: random.Random) -> str:
    first, second = _clause(rng), _clause(rng)
    pattern = rng.randrange(3)
    if pattern == 0:
        return f"{first}, and {second}."
    if pattern == 1:
        return f"{first} and {second}."
    return f"{first}, but {second} {rng.choice(_PADS)}."


@_criterion(7, "perturbation reversibility")
def test_criterion_7_perturbation_reversibility():
    rng = random.Random(7)
    failures = 0
    saw_filler = saw_correction = False
    for seed in range(500):
        source = _clean_source(rng)
        result = perturb(source, "hybrid", seed=seed)
        assert result.text != source
        if json.loads(result.metadata["fillers_inserted"]):
            saw_filler = True
        if result.metadata.get("correction_span"):
            saw_correction = True
        if recover_source(result.text, result.metadata) != source:
            failures += 1
    assert failures == 0
    assert saw_filler and saw_correction
