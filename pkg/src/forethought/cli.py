"""Command-line client for benchmark runs, synthesis, and reporting.

Every subcommand speaks the HTTP service protocol.  Without --server an
in-process instance of the service handles the calls, so no daemon is
needed; with --server they go to a remote instance (which then reads trace
files and writes artifacts on its own host).

    forethought run --config bench.json --out results/
    forethought synth-traces utterances.txt --out traces.jsonl --perturb hybrid
    forethought synth-trigger-data utterances.txt --out dataset.jsonl
    forethought report --logs results/logs.jsonl
    forethought serve --port 8000
"""

from __future__ import annotations

import json
from pathlib import Path

import click
import httpx

from .benchmark import parse_config
from .errors import ForethoughtError
from .service import create_app

PERTURB_MODES = ("none", "fillers", "corrections", "hybrid")


def _client(server: str) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
    # The test client is the stock synchronous bridge onto an in-process
    # ASGI app; server exceptions surface as HTTP errors, as remotely.
    from fastapi.testclient import TestClient

    return TestClient(create_app(), raise_server_exceptions=False)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    try:
        response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        raise click.ClickException(f"cannot reach service: {exc}") from exc
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        if not isinstance(detail, str):
            detail = json.dumps(detail)
        raise click.ClickException(f"{path} failed ({response.status_code}): {detail}")
    return response.json()


def _read_sources(path: Path) -> list[dict]:
    """One utterance per line: plain text, or JSON {"id","text","answer","meta"}."""
    sources: list[dict] = []
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("{"):
            try:
                record = json.loads(line)
                text = str(record["text"])
            except (json.JSONDecodeError, KeyError) as exc:
                raise click.ClickException(
                    f"{path}, line {line_no}: expected JSON with a text field ({exc})"
                ) from exc
            sources.append(
                {
                    "id": str(record.get("id", "")),
                    "text": text,
                    "answer": str(record.get("answer", "")),
                    "metadata": {
                        str(k): str(v) for k, v in (record.get("meta") or {}).items()
                    },
                }
            )
        else:
            sources.append({"id": "", "text": line, "answer": "", "metadata": {}})
    if not sources:
        raise click.ClickException(f"{path} holds no utterances")
    return sources


def _resolve_config_paths(raw: dict, base_dir: Path) -> dict:
    """Make config paths absolute so any server resolves the same files."""
    resolved = dict(raw)
    trace_paths = raw.get("trace_paths")
    if isinstance(trace_paths, list):
        resolved["trace_paths"] = [
            str(p) if Path(str(p)).is_absolute() else str(base_dir / str(p))
            for p in trace_paths
        ]
    backend = raw.get("backend")
    if isinstance(backend, dict) and "profile_path" in backend:
        profile_path = str(backend["profile_path"])
        if not Path(profile_path).is_absolute():
            backend = {**backend, "profile_path": str(base_dir / profile_path)}
        resolved["backend"] = backend
    return resolved


@click.group()
@click.option(
    "--server",
    default="",
    metavar="URL",
    help="Service base URL; default runs the service in-process.",
)
@click.version_option(package_name="forethought")
@click.pass_context
def main(ctx: click.Context, server: str) -> None:
    """Streaming listen-think-speak benchmarking tools."""
    ctx.obj = server


@main.command()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="JSON benchmark config.",
)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory for results.csv, results.txt, logs.jsonl.",
)
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.pass_obj
def run(server: str, config_path: Path, out_dir: Path | None, seed: int | None) -> None:
    """Run the strategy-by-corpus benchmark matrix."""
    try:
        raw = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{config_path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise click.ClickException(f"{config_path} must hold a JSON object")
    raw = _resolve_config_paths(raw, config_path.parent.resolve())
    if seed is not None:
        raw["seed"] = seed
    try:
        parse_config(raw)
    except ForethoughtError as exc:
        raise click.ClickException(str(exc)) from exc
    payload: dict = {"config": raw}
    if out_dir is not None:
        payload["out_dir"] = str(out_dir)
    body = _post(_client(server), "/benchmark/run", payload)
    click.echo(body["table"], nl=False)
    if out_dir is not None:
        click.echo(f"wrote results.csv, results.txt, logs.jsonl to {out_dir}")


@main.command("synth-traces")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Trace file to write (line-delimited JSON).",
)
@click.option("--wpm", type=float, default=150.0, show_default=True)
@click.option("--chunk-ms", type=int, default=200, show_default=True)
@click.option("--jitter", type=float, default=0.0, show_default=True)
@click.option(
    "--perturb",
    type=click.Choice(PERTURB_MODES),
    default="none",
    show_default=True,
    help="Disfluency augmentation applied before synthesis.",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sentence-pause-ms", type=int, default=0, show_default=True)
@click.option("--filler-pause-ms", type=int, default=0, show_default=True)
@click.option("--eos-silence-ms", type=int, default=0, show_default=True)
@click.pass_obj
def synth_traces(
    server: str,
    input_path: Path,
    out_path: Path,
    wpm: float,
    chunk_ms: int,
    jitter: float,
    perturb: str,
    seed: int,
    sentence_pause_ms: int,
    filler_pause_ms: int,
    eos_silence_ms: int,
) -> None:
    """Turn a text corpus into a timestamped streaming trace file.

    INPUT_PATH holds one utterance per line, either plain text or JSON
    records {"id", "text", "answer", "meta"}.
    """
    body = _post(
        _client(server),
        "/traces/synthesize",
        {
            "texts": _read_sources(input_path),
            "wpm": wpm,
            "chunk_ms": chunk_ms,
            "jitter": jitter,
            "perturb": perturb,
            "seed": seed,
            "sentence_pause_ms": sentence_pause_ms,
            "filler_pause_ms": filler_pause_ms,
            "eos_silence_ms": eos_silence_ms,
        },
    )
    with out_path.open("w", encoding="utf-8") as handle:
        for record in body["traces"]:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    click.echo(f"wrote {len(body['traces'])} traces to {out_path}")


@main.command("synth-trigger-data")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Dataset file to write (line-delimited JSON).",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
def synth_trigger_data(server: str, input_path: Path, out_path: Path, seed: int) -> None:
    """Build a balanced prefix-labeled trigger dataset from a text corpus."""
    sources = [
        {"id": s["id"], "text": s["text"]} for s in _read_sources(input_path)
    ]
    body = _post(
        _client(server),
        "/trigger-data/synthesize",
        {"texts": sources, "seed": seed},
    )
    with out_path.open("w", encoding="utf-8") as handle:
        for sample in body["samples"]:
            handle.write(json.dumps(sample, ensure_ascii=False) + "\n")
    click.echo(
        f"wrote {body['positives']} positive and {body['negatives']} negative "
        f"samples to {out_path}"
    )


@main.command()
@click.option(
    "--logs",
    "logs_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Utterance audit log (logs.jsonl) from a benchmark run.",
)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory for rebuilt results.csv and results.txt.",
)
@click.pass_obj
def report(server: str, logs_path: Path, out_dir: Path | None) -> None:
    """Rebuild result tables from a benchmark audit log."""
    audits = []
    for line_no, line in enumerate(
        logs_path.read_text(encoding="utf-8").splitlines(), 1
    ):
        line = line.strip()
        if not line:
            continue
        try:
            audits.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise click.ClickException(
                f"{logs_path}, line {line_no}: invalid JSON ({exc})"
            ) from exc
    if not audits:
        raise click.ClickException(f"{logs_path} holds no audit records")
    body = _post(_client(server), "/report", {"audits": audits})
    click.echo(body["table"], nl=False)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "results.csv").write_text(body["csv"], encoding="utf-8")
        (out_dir / "results.txt").write_text(body["table"], encoding="utf-8")
        click.echo(f"wrote results.csv, results.txt to {out_dir}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("forethought.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
