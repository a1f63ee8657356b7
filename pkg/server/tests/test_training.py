from __future__ import annotations

import time

from conftest import CANDIDATES, TEMPLATE, VERBALIZER, fixture_samples, score_body


def _train_body(n_samples: int, **overrides) -> dict:
    return {
        "samples": fixture_samples(n_samples),
        "template": TEMPLATE,
        "verbalizer": VERBALIZER,
        "overrides": overrides,
    }


def test_acceptance_training_smoke(client):
    started = time.monotonic()
    response = client.post("/train", json=_train_body(64, epochs=1))
    assert response.status_code == 200
    payload = response.json()
    checkpoint_id = payload["checkpoint_id"]
    assert checkpoint_id
    assert payload["final_loss"] <= payload["initial_loss"]

    scored = client.post(
        "/score",
        json=score_body(
            "The method has [MASK] code smell. int probe1(int a) { return a; }",
            checkpoint_id=checkpoint_id,
        ),
    )
    assert scored.status_code == 200
    assert abs(sum(scored.json()["probs"]) - 1.0) < 1e-6
    elapsed = time.monotonic() - started
    print(f"ACCEPTANCE PASS: training smoke, loss {payload['initial_loss']:.4f} -> "
          f"{payload['final_loss']:.4f} ({elapsed:.2f}s)")
    assert elapsed < 600


def test_training_improves_gold_word_probability(client):
    # five epochs at the default rate must pull probability mass onto the
    # gold answer for a training sample
    response = client.post("/train", json=_train_body(32, epochs=5))
    assert response.status_code == 200
    payload = response.json()
    assert payload["final_loss"] < payload["initial_loss"]
    checkpoint_id = payload["checkpoint_id"]
    sample = fixture_samples(32)[2]  # label 2 -> "long method"
    body = score_body(
        f"The method has [MASK] code smell. {sample['code']}", checkpoint_id=checkpoint_id
    )
    trained = client.post("/score", json=body).json()["probs"]
    untrained = client.post("/score", json={k: v for k, v in body.items() if k != "checkpoint_id"}).json()["probs"]
    gold_index = CANDIDATES.index("long method")
    assert trained[gold_index] > untrained[gold_index]


def test_train_empty_dataset_is_400(client):
    assert client.post("/train", json=_train_body(0)).status_code == 400


def test_train_schema_errors_are_400(client):
    body = _train_body(8)
    body["template"] = "no slots at all"
    assert client.post("/train", json=body).status_code == 400
    body = _train_body(8)
    body["verbalizer"] = {"0": ["no"]}
    assert client.post("/train", json=body).status_code == 400
    body = _train_body(8)
    body["samples"][0]["label"] = 9
    assert client.post("/train", json=body).status_code == 400
    body = _train_body(8)
    body["overrides"] = {"mystery_knob": 1}
    assert client.post("/train", json=body).status_code == 400


def test_train_conflict_is_409(client):
    holder = client.app.state.holder
    assert holder.train_lock.acquire(blocking=False)
    try:
        response = client.post("/train", json=_train_body(8, epochs=1))
        assert response.status_code == 409
    finally:
        holder.train_lock.release()


def test_train_from_dataset_path(client, tmp_path):
    import json

    path = tmp_path / "train.jsonl"
    with open(path, "w") as fh:
        for sample in fixture_samples(12):
            fh.write(json.dumps(sample) + "\n")
    body = {
        "dataset_path": str(path),
        "template": TEMPLATE,
        "verbalizer": VERBALIZER,
        "overrides": {"epochs": 1},
    }
    response = client.post("/train", json=body)
    assert response.status_code == 200
    assert response.json()["checkpoint_id"]


def test_checkpoint_reload_from_disk(client, config):
    response = client.post("/train", json=_train_body(16, epochs=1))
    checkpoint_id = response.json()["checkpoint_id"]
    # drop the in-memory cache to force the disk path
    client.app.state.holder.checkpoints.clear()
    scored = client.post(
        "/score",
        json=score_body("The method has [MASK] code smell. void z(){}",
                        checkpoint_id=checkpoint_id),
    )
    assert scored.status_code == 200


def test_unknown_checkpoint_is_400(client):
    scored = client.post(
        "/score",
        json=score_body("x [MASK] y", checkpoint_id="doesnotexist"),
    )
    assert scored.status_code == 400


def test_single_token_training_mode(client):
    response = client.post(
        "/train", json=_train_body(16, epochs=1, multiword_mode="single_token")
    )
    assert response.status_code == 200
    assert response.json()["final_loss"] <= response.json()["initial_loss"]
