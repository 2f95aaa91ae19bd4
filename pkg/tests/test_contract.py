"""Service-side half of the UI contract tests.

The frontend validates the shared fixtures with its client schema; this module
replays the same payloads against the live service app, so the two schemas can
never drift apart silently.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from qflake.service import TriageService, create_app
from qflake.simsearch.embedding import MockEmbeddingProvider
from qflake.simsearch.expansion import initial_state, save_state

CONTRACT_FILE = Path(__file__).resolve().parents[1] / "frontend" / "contract" / "label-examples.json"

EXAMPLES = json.loads(CONTRACT_FILE.read_text(encoding="utf-8"))["examples"]


@pytest.fixture()
def client(tmp_path) -> TestClient:
    provider = MockEmbeddingProvider(dim=16)
    case_ids = [ex["payload"]["case_id"] for ex in EXAMPLES if ex["payload"]["case_id"]]
    corpus = ["seed-case"] + sorted(set(case_ids))
    embeddings = {cid: provider.embed(cid) for cid in corpus}
    state_path = tmp_path / "state.json"
    save_state(
        initial_state(corpus, ["seed-case"], embeddings, k=len(corpus)), state_path
    )
    return TestClient(create_app(TriageService(state_path, embeddings)))


@pytest.mark.parametrize("example", EXAMPLES, ids=lambda ex: ex["name"])
def test_shared_fixture_statuses_match_schema_validity(client, example):
    response = client.post("/labels", json=example["payload"])
    if example["valid"]:
        assert response.status_code == 200, response.text
    else:
        assert response.status_code in (400, 422), response.text


def test_valid_examples_conflict_on_double_submission(client):
    valid = [ex for ex in EXAMPLES if ex["valid"]]
    for example in valid:
        assert client.post("/labels", json=example["payload"]).status_code == 200
        assert client.post("/labels", json=example["payload"]).status_code == 409


def test_built_ui_is_served_when_present(tmp_path):
    dist = Path(__file__).resolve().parents[1] / "frontend" / "dist"
    if not (dist / "index.html").exists():
        pytest.skip("frontend not built")
    provider = MockEmbeddingProvider(dim=8)
    embeddings = {"seed": provider.embed("seed"), "doc": provider.embed("doc")}
    state_path = tmp_path / "state.json"
    save_state(initial_state(["seed", "doc"], ["seed"], embeddings, k=5), state_path)
    app = create_app(TriageService(state_path, embeddings), ui_dir=dist)
    client = TestClient(app)
    page = client.get("/")
    assert page.status_code == 200
    assert "qflake triage" in page.text
    assert client.get("/state").status_code == 200
