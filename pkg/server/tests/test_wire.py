from __future__ import annotations

import socket
import subprocess
import sys
import time

import pytest
import requests
from fastapi.testclient import TestClient

from conftest import CANDIDATES, score_body
from smellserver import ServerConfig, create_app


def test_health_reports_capabilities(client):
    response = client.get("/health")
    assert response.status_code == 200
    payload = response.json()
    assert payload["mask_token"] == "[MASK]"
    assert payload["multiword_mode"] in ("single_token", "subword_mean")
    assert payload["model"]


def test_health_before_model_load_is_503(config):
    client = TestClient(create_app(config, preload=False))
    assert client.get("/health").status_code == 503
    assert client.post("/score", json=score_body("x [MASK] y")).status_code == 503


def test_score_returns_normalized_distribution(client):
    response = client.post("/score", json=score_body("The method has [MASK] code smell. void f(){}"))
    assert response.status_code == 200
    payload = response.json()
    assert len(payload["probs"]) == len(CANDIDATES)
    assert abs(sum(payload["probs"]) - 1.0) < 1e-6
    assert all(p >= 0 for p in payload["probs"])
    assert payload["truncated"] is False


def test_score_deterministic_for_identical_requests(client):
    body = score_body("The method has [MASK] code smell. int g(int a){return a;}")
    first = client.post("/score", json=body).json()
    second = client.post("/score", json=body).json()
    assert first == second


def test_score_rejects_missing_or_duplicated_mask(client):
    assert client.post("/score", json=score_body("no marker at all")).status_code == 400
    assert client.post("/score", json=score_body("[MASK] and [MASK]")).status_code == 400


def test_score_rejects_empty_candidates(client):
    assert client.post("/score", json=score_body("x [MASK] y", candidates=[])).status_code == 400


def test_overlength_prompt_truncates_tail_and_keeps_mask(client):
    code = " ".join(f"stmt{i};" for i in range(2000))
    body = score_body(f"The method has [MASK] code smell. {code}", max_seq_length=64)
    response = client.post("/score", json=body)
    assert response.status_code == 200
    payload = response.json()
    assert payload["truncated"] is True
    assert abs(sum(payload["probs"]) - 1.0) < 1e-6


def test_untruncatable_prompt_is_422(client):
    # head truncation keeps the tail; a mask at the start cannot survive
    code = " ".join(f"stmt{i};" for i in range(2000))
    body = score_body(f"[MASK] {code}", max_seq_length=64, truncate_method="head")
    assert client.post("/score", json=body).status_code == 422


def test_single_token_mode_supported(client):
    body = score_body(
        "The method has [MASK] code smell. void f(){}", multiword_mode="single_token"
    )
    response = client.post("/score", json=body)
    assert response.status_code == 200
    assert abs(sum(response.json()["probs"]) - 1.0) < 1e-6


def test_score_batch_preserves_order_and_length(client):
    items = [
        score_body(f"The method has [MASK] code smell. int f{k}(){{return {k};}}")
        for k in range(5)
    ]
    response = client.post("/score_batch", json={"items": items})
    assert response.status_code == 200
    results = response.json()
    assert isinstance(results, list) and len(results) == 5
    for k, result in enumerate(results):
        single = client.post("/score", json=items[k]).json()
        assert result == single


def test_score_batch_bad_item_fails_with_400(client):
    items = [score_body("x [MASK] y"), score_body("no mask")]
    assert client.post("/score_batch", json={"items": items}).status_code == 400


# -- stub-free integration against a real server process ---------------------


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="module")
def live_server(tmp_path_factory):
    port = _free_port()
    checkpoints = tmp_path_factory.mktemp("ckpt")
    process = subprocess.Popen(
        [
            sys.executable, "-m", "smellserver",
            "--port", str(port), "--seed", "7",
            "--checkpoint-dir", str(checkpoints),
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    base = f"http://127.0.0.1:{port}"
    try:
        deadline = time.monotonic() + 60
        while True:
            try:
                if requests.get(base + "/health", timeout=2).status_code == 200:
                    break
            except requests.RequestException:
                pass
            if time.monotonic() > deadline:
                raise RuntimeError("server did not come up in 60s")
            time.sleep(0.3)
        yield base
    finally:
        process.terminate()
        process.wait(timeout=10)


def test_acceptance_wire_contract_against_running_server(live_server):
    started = time.monotonic()
    health = requests.get(live_server + "/health", timeout=10).json()
    assert health["mask_token"] == "[MASK]"

    body = score_body("The method has [MASK] code smell. int h(int x){return x;}")
    first = requests.post(live_server + "/score", json=body, timeout=30).json()
    assert abs(sum(first["probs"]) - 1.0) < 1e-6

    second = requests.post(live_server + "/score", json=body, timeout=30).json()
    assert first == second

    code = " ".join(f"call{i}();" for i in range(3000))
    long_body = score_body(f"The method has [MASK] code smell. {code}", max_seq_length=128)
    long_result = requests.post(live_server + "/score", json=long_body, timeout=60).json()
    assert long_result["truncated"] is True
    assert abs(sum(long_result["probs"]) - 1.0) < 1e-6

    elapsed = time.monotonic() - started
    print(f"ACCEPTANCE PASS: wire contract against running server ({elapsed:.2f}s)")
    assert elapsed < 120
