import pytest
from fastapi.testclient import TestClient

from bytelm import create_app

from conftest import TINY


@pytest.fixture(scope="module")
def client(tiny_checkpoint):
    with TestClient(create_app(tiny_checkpoint)) as test_client:
        yield test_client


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "model": "bytelm-32d2l"}


def test_generate_returns_requested_count(client):
    resp = client.post("/generate", json={
        "prompt": "def f():", "n": 3, "temperature": 0.8,
        "max_new_tokens": 4})
    assert resp.status_code == 200
    completions = resp.json()["completions"]
    assert len(completions) == 3
    assert all(isinstance(c["text"], str) for c in completions)


def test_greedy_completions_identical(client):
    resp = client.post("/generate", json={
        "prompt": "x = ", "n": 2, "temperature": 0.0, "max_new_tokens": 6})
    texts = [c["text"] for c in resp.json()["completions"]]
    assert texts[0] == texts[1]


def test_seeded_request_reproducible(client):
    payload = {"prompt": "y = ", "n": 3, "temperature": 0.8, "top_p": 0.9,
               "max_new_tokens": 6, "seed": 42}
    first = [c["text"] for c in client.post("/generate", json=payload)
             .json()["completions"]]
    second = [c["text"] for c in client.post("/generate", json=payload)
              .json()["completions"]]
    assert first == second


def test_oversized_prompt_is_context_overflow(client):
    resp = client.post("/generate", json={
        "prompt": "a" * TINY.context, "n": 1})
    assert resp.status_code == 400
    body = resp.json()
    assert body["error"]["code"] == "context_overflow"
    assert "context" in body["error"]["message"]


def test_invalid_n_rejected(client):
    resp = client.post("/generate", json={"prompt": "q", "n": 0})
    assert resp.status_code == 422


def test_stop_sequences_truncate(client):
    resp = client.post("/generate", json={
        "prompt": "m = ", "n": 4, "temperature": 1.0, "max_new_tokens": 24,
        "stop_sequences": ["e"], "seed": 5})
    for completion in resp.json()["completions"]:
        assert "e" not in completion["text"]
