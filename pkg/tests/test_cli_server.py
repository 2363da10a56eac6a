"""CLI in thin-client mode against a live service process."""

import json
import socket
import subprocess
import sys
import time

import httpx
import pytest

from pipeline_fixture import write_fixture
from test_cli import run_cli


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture(scope="module")
def live_server():
    port = _free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "epipulse.service", "--port", str(port)],
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
        text=True,
    )
    url = f"http://127.0.0.1:{port}"
    try:
        deadline = time.time() + 30
        while time.time() < deadline:
            try:
                if httpx.get(url + "/health", timeout=1).status_code == 200:
                    break
            except httpx.HTTPError:
                pass
            time.sleep(0.2)
        else:
            proc.terminate()
            raise RuntimeError("service did not come up")
        yield url
    finally:
        proc.terminate()
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            proc.kill()


@pytest.fixture(scope="module")
def server_artifacts(live_server, tmp_path_factory):
    work = tmp_path_factory.mktemp("server-run")
    raw = work / "raw.jsonl"
    write_fixture(raw)
    clean = work / "clean.jsonl"
    retained = work / "retained.jsonl"
    preds = work / "preds.jsonl"
    for step in (
        ["--server", live_server, "preprocess", "--in", str(raw), "--out", str(clean)],
        ["--server", live_server, "filter", "--in", str(clean), "--out", str(retained)],
        ["--server", live_server, "detect", "--in", str(retained), "--out", str(preds)],
    ):
        proc = run_cli(step)
        assert proc.returncode == 0, (step, proc.stderr)
    return {"work": work, "raw": raw, "clean": clean, "retained": retained, "preds": preds}


def test_server_run_matches_local_run(server_artifacts, tmp_path):
    local_clean = tmp_path / "clean.jsonl"
    local_retained = tmp_path / "retained.jsonl"
    local_preds = tmp_path / "preds.jsonl"
    for step in (
        ["preprocess", "--in", str(server_artifacts["raw"]), "--out", str(local_clean)],
        ["filter", "--in", str(local_clean), "--out", str(local_retained)],
        ["detect", "--in", str(local_retained), "--out", str(local_preds)],
    ):
        proc = run_cli(step)
        assert proc.returncode == 0, (step, proc.stderr)
    assert local_clean.read_bytes() == server_artifacts["clean"].read_bytes()
    assert local_retained.read_bytes() == server_artifacts["retained"].read_bytes()
    assert local_preds.read_bytes() == server_artifacts["preds"].read_bytes()


def test_score_via_server(server_artifacts, tmp_path, live_server):
    gold = tmp_path / "gold.jsonl"
    lines = []
    for line in server_artifacts["preds"].read_text().splitlines():
        rec = json.loads(line)
        lines.append(json.dumps({"id": rec["id"], "mentions": rec["mentions"]}))
    gold.write_text("\n".join(lines) + "\n")
    proc = run_cli(
        ["--server", live_server, "score", "--gold", str(gold), "--pred", str(server_artifacts["preds"])]
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["tri_c"]["f1"] == 1.0


def test_external_detector_against_service(server_artifacts, tmp_path, live_server):
    out = tmp_path / "ext.jsonl"
    proc = run_cli(
        [
            "detect",
            "--in", str(server_artifacts["retained"]),
            "--out", str(out),
            "--detector", "external",
            "--endpoint", live_server,
            "--name", "remote-keyword",
        ]
    )
    assert proc.returncode == 0, proc.stderr
    ext = [json.loads(line) for line in out.read_text().splitlines()]
    assert ext and all(r["detector"] == "remote-keyword" for r in ext)
    local = [json.loads(line) for line in server_artifacts["preds"].read_text().splitlines()]
    assert [(r["id"], r["mentions"]) for r in ext] == [(r["id"], r["mentions"]) for r in local]


def test_server_rejects_ontology_flag(live_server, tmp_path):
    bogus = tmp_path / "o.json"
    bogus.write_text("{}")
    proc = run_cli(
        ["--server", live_server, "detect", "--in", "-", "--out", "-", "--ontology", str(bogus)]
    )
    assert proc.returncode == 1
    assert "cannot be combined with --server" in proc.stderr


def test_unreachable_server_exits_2(tmp_path):
    raw = tmp_path / "raw.jsonl"
    raw.write_text('{"id":"a","created_at":"2022-05-11T00:00:00Z","text":"x"}\n')
    proc = run_cli(
        ["--server", "http://127.0.0.1:1", "preprocess", "--in", str(raw), "--out", "-"]
    )
    assert proc.returncode == 2
