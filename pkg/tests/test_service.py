"""HTTP service endpoints and client-service contract checks."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

import forethought
from forethought.backend import ScriptedProfile
from forethought.benchmark import parse_config, parse_results_csv, run_benchmark
from forethought.disfluency import recover_source
from forethought.service import create_app
from forethought.traces import SpeechRateModel, save_traces, synthesize_trace, trace_from_record
from forethought.trigger import HttpScorer, score_prefix


@pytest.fixture()
def client() -> TestClient:
    return TestClient(create_app())


def corpus_config(tmp_path, strategies=None) -> dict:
    texts = [
        ("I have two apples and I buy three more.", "5"),
        ("Add four and four for me.", "8"),
        ("Nine minus two leaves how many.", "7"),
    ]
    rate = SpeechRateModel(words_per_minute=300)
    traces = [
        synthesize_trace(text, rate, trace_id=f"u{i}", reference_answer=answer)
        for i, (text, answer) in enumerate(texts)
    ]
    path = tmp_path / "corpus.jsonl"
    save_traces(traces, path)
    profile = ScriptedProfile(
        responses={("speaker", t): f"The answer is {a}." for t, a in texts}
    )
    return {
        "trace_paths": [str(path)],
        "strategies": strategies or [{"variant": "serial"}, {"variant": "lts_semantic"}],
        "backend": {"kind": "scripted", "profile": profile.to_record()},
        "trigger": {"kind": "heuristic"},
        "seed": 3,
    }


class TestHealthAndScore:
    def test_health_reports_version(self, client):
        body = client.get("/health").json()
        assert body == {"status": "ok", "version": forethought.__version__}

    def test_score_pinned_values(self, client):
        cases = {
            "so, um...": 0.0,
            "I have 3 apples and 2 pears.": 1.0,
            "I have 3 apples and": 0.5,
        }
        for text, expected in cases.items():
            response = client.post("/score", json={"text": text})
            assert response.status_code == 200
            assert response.json() == {"score": expected}

    def test_score_agrees_with_library_scorer(self, client):
        prefixes = ["", "well,", "take five,", "take five", "done now.", "um, so"]
        for prefix in prefixes:
            got = client.post("/score", json={"text": prefix}).json()["score"]
            assert got == score_prefix(prefix)

    def test_score_honors_input_cap(self, client):
        text = "w " * 600 + "end."
        got = client.post(
            "/score", json={"text": text, "max_input_len": 32}
        ).json()["score"]
        assert got == score_prefix(text, max_input_len=32)

    def test_missing_field_is_422(self, client):
        assert client.post("/score", json={"nope": 1}).status_code == 422


class TestSynthesizeTraces:
    def test_records_round_trip_and_validate(self, client):
        body = {
            "texts": [
                {"text": "I have two apples and I buy three more.", "answer": "5"},
                {"id": "named", "text": "Add four and four for me.", "answer": "8"},
            ],
            "wpm": 300,
        }
        response = client.post("/traces/synthesize", json=body)
        assert response.status_code == 200
        records = response.json()["traces"]
        assert [r["id"] for r in records] == ["u0000", "named"]
        for record in records:
            trace = trace_from_record(record)
            trace.validate()
        assert records[0]["answer"] == "5"

    def test_perturbed_traces_carry_reversible_metadata(self, client):
        source = "I have two apples, and I buy three more."
        body = {"texts": [{"text": source}], "perturb": "fillers", "seed": 5}
        record = client.post("/traces/synthesize", json=body).json()["traces"][0]
        trace = trace_from_record(record)
        assert trace.metadata["perturbation"] == "fillers"
        assert recover_source(trace.final_text, trace.metadata) == source

    def test_empty_texts_rejected(self, client):
        assert client.post("/traces/synthesize", json={"texts": []}).status_code == 422

    def test_unknown_perturb_mode_rejected(self, client):
        body = {"texts": [{"text": "hi there."}], "perturb": "chaos"}
        assert client.post("/traces/synthesize", json=body).status_code == 422


class TestSynthesizeTriggerData:
    def test_balanced_dataset_with_source_ids(self, client):
        body = {
            "texts": [
                {"text": "I have three apples, and I buy two more."},
                {"id": "s-named", "text": "Take ten away, then add six back."},
            ],
            "seed": 9,
        }
        response = client.post("/trigger-data/synthesize", json=body)
        assert response.status_code == 200
        payload = response.json()
        assert payload["positives"] == payload["negatives"] > 0
        assert {s["source_id"] for s in payload["samples"]} <= {"s0000", "s-named"}

    def test_unbalanceable_input_is_400_with_counts(self, client):
        body = {"texts": [{"text": "word word word"}]}
        response = client.post("/trigger-data/synthesize", json=body)
        assert response.status_code == 400
        assert "positive" in response.json()["detail"]


class TestBenchmarkEndpoints:
    def test_run_returns_rows_csv_table(self, client, tmp_path):
        config = corpus_config(tmp_path)
        response = client.post("/benchmark/run", json={"config": config})
        assert response.status_code == 200
        payload = response.json()
        assert [row["strategy"] for row in payload["rows"]] == [
            "serial",
            "lts_semantic",
        ]
        assert payload["rows"][0]["metrics"]["nfe"] == 1.0
        parsed = parse_results_csv(payload["csv"])
        assert [r.strategy for r in parsed] == ["serial", "lts_semantic"]
        assert payload["table"].startswith("strategy")
        assert payload["audits"] is None

    def test_run_matches_direct_library_call(self, client, tmp_path):
        config = corpus_config(tmp_path)
        via_http = client.post("/benchmark/run", json={"config": config}).json()
        direct = run_benchmark(parse_config(config))
        assert via_http["csv"] == forethought.rows_to_csv(direct.rows)

    def test_run_writes_artifacts_when_asked(self, client, tmp_path):
        config = corpus_config(tmp_path)
        out_dir = tmp_path / "out"
        payload = client.post(
            "/benchmark/run",
            json={"config": config, "out_dir": str(out_dir), "include_audits": True},
        ).json()
        assert (out_dir / "results.csv").read_text() == payload["csv"]
        assert (out_dir / "logs.jsonl").exists()
        assert len(payload["audits"]) == 6
        assert set(payload["out_paths"]) == {"csv", "table", "logs"}

    def test_invalid_config_is_400_with_detail(self, client, tmp_path):
        config = corpus_config(tmp_path)
        config["strategies"] = [{"variant": "psychic"}]
        response = client.post("/benchmark/run", json={"config": config})
        assert response.status_code == 400
        assert "psychic" in response.json()["detail"]

    def test_report_rebuilds_tables_from_audits(self, client, tmp_path):
        config = corpus_config(tmp_path)
        run_payload = client.post(
            "/benchmark/run", json={"config": config, "include_audits": True}
        ).json()
        report_payload = client.post(
            "/report", json={"audits": run_payload["audits"]}
        ).json()
        assert report_payload["csv"] == run_payload["csv"]
        assert report_payload["table"] == run_payload["table"]

    def test_report_rejects_malformed_audits(self, client):
        response = client.post("/report", json={"audits": [{"strategy": "x"}]})
        assert response.status_code == 400


class TestLiveContract:
    def test_http_scorer_speaks_the_service_protocol(self, live_server):
        scorer = HttpScorer(live_server)
        try:
            for prefix in ["so, um...", "I have 3 apples.", "half of"]:
                assert scorer(prefix) == score_prefix(prefix)
        finally:
            scorer.close()

    def test_benchmark_remote_trigger_matches_heuristic(self, live_server, tmp_path):
        config = corpus_config(tmp_path, [{"variant": "lts_semantic"}])
        heuristic = run_benchmark(parse_config(config))
        config["trigger"] = {"kind": "remote", "url": live_server}
        remote = run_benchmark(parse_config(config))
        assert remote.rows == heuristic.rows
        assert json.dumps(remote.audits) == json.dumps(heuristic.audits)
