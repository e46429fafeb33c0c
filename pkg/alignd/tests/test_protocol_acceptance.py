"""Protocol conformance against a live server, driven by the scoring
toolkit's CLI over the wire: stub-mode reports must be byte-identical to
the lexical-scorer run, and bad requests must be rejected per contract."""

import socket
import subprocess
import sys
import threading
import time

import pytest
import requests
import uvicorn

from alignd.app import ServerConfig, create_app


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="module")
def live_server():
    port = _free_port()
    config = ServerConfig(port=port, mode="stub", max_batch=64)
    server = uvicorn.Server(uvicorn.Config(
        create_app(config), host="127.0.0.1", port=port, log_level="warning"
    ))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def _disp(*argv):
    result = subprocess.run(
        [sys.executable, "-m", "dispersion.cli", *argv],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    return result


def test_health_over_the_wire(live_server):
    body = requests.get(f"{live_server}/v1/health", timeout=5).json()
    assert body == {"status": "ok", "model_id": "stub-lexical"}


def test_stub_parity_reports_byte_identical(tmp_path, live_server):
    syn = tmp_path / "syn"
    _disp("synth", "--design", "geometric", "--p", "0.4", "--topics", "12",
          "--n", "5", "--m", "7", "--seed", "21", "--out-dir", str(syn))
    dataset = syn / "dataset.jsonl"

    aln_lex = tmp_path / "aln_lexical.jsonl"
    _disp("align", str(dataset), "--out", str(aln_lex), "--scorer", "lexical")
    aln_remote = tmp_path / "aln_remote.jsonl"
    _disp("align", str(dataset), "--out", str(aln_remote), "--scorer", "remote",
          "--endpoint", live_server, "--batch-size", "64")
    assert aln_remote.read_bytes() == aln_lex.read_bytes()

    rep_lex = tmp_path / "rep_lexical"
    rep_remote = tmp_path / "rep_remote"
    _disp("score", str(dataset), str(aln_lex), "--out-dir", str(rep_lex))
    _disp("score", str(dataset), str(aln_remote), "--out-dir", str(rep_remote))
    for name in ("report.json", "per_topic.csv", "curve.csv"):
        assert (rep_remote / name).read_bytes() == (rep_lex / name).read_bytes()
    print("\nACCEPTANCE stub-parity: PASS")


def test_remote_endpoint_env_var_fallback(tmp_path, live_server, monkeypatch):
    syn = tmp_path / "syn"
    _disp("synth", "--design", "single_doc", "--n", "2", "--m", "2",
          "--out-dir", str(syn))
    out = tmp_path / "aln.jsonl"
    result = subprocess.run(
        [sys.executable, "-m", "dispersion.cli", "align",
         str(syn / "dataset.jsonl"), "--out", str(out), "--scorer", "remote"],
        capture_output=True, text=True,
        env={"PATH": "/usr/bin:/bin", "DISP_ENDPOINT": live_server},
    )
    assert result.returncode == 0, result.stderr
    assert out.exists()


def test_malformed_request_rejected_over_the_wire(live_server):
    response = requests.post(
        f"{live_server}/v1/align", data="{broken json",
        headers={"content-type": "application/json"}, timeout=5,
    )
    assert response.status_code == 400
    response = requests.post(
        f"{live_server}/v1/align", json={"pairs": [{"summary_prop": "x"}]},
        timeout=5,
    )
    assert response.status_code == 400


def test_oversized_request_rejected_over_the_wire(live_server):
    pairs = [{"summary_prop": "a", "doc_prop": "b"}] * 65
    response = requests.post(
        f"{live_server}/v1/align", json={"pairs": pairs}, timeout=5
    )
    assert response.status_code == 413
    print("\nACCEPTANCE protocol-conformance: PASS")
