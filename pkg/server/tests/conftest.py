from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from smellserver import ServerConfig, create_app

TEMPLATE = "The method has [MASK] code smell. [CODE]"
VERBALIZER = {
    "0": ["no"],
    "1": ["long parameter list"],
    "2": ["long method"],
    "3": ["long method and long parameter list"],
}
CANDIDATES = [
    "no",
    "long parameter list",
    "long method",
    "long method and long parameter list",
]


def fixture_samples(n: int) -> list[dict]:
    samples = []
    for k in range(n):
        label = k % 4
        code = f"int probe{k}(int a) {{ return a * {k + 1}; }}"
        samples.append({"id": f"fix/{k}", "code": code, "label": label})
    return samples


@pytest.fixture()
def config(tmp_path) -> ServerConfig:
    return ServerConfig(checkpoint_dir=str(tmp_path / "checkpoints"), seed=7)


@pytest.fixture()
def client(config) -> TestClient:
    return TestClient(create_app(config))


def score_body(text: str, candidates=None, **extra) -> dict:
    body = {"text": text, "candidates": CANDIDATES if candidates is None else candidates}
    body.update(extra)
    return body
