"""HTTP API behavior, session lifecycle, and response-shape stability.

Golden shape files pin the response schemas; regenerate deliberately with
ACE_UPDATE_GOLDENS=1 after an intentional schema change.
"""

import json
import os
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from conftest import install_quiz_rules, install_tutor_rules, write_corpus, write_engine_config

from ace.config import load_config
from ace.engine import Engine
from ace.service.app import create_app

GOLDEN_DIR = Path(__file__).parent / "golden"

IO_CASES = [{"stdin": "3\n", "expected_stdout": "9\n"}, {"stdin": "5\n", "expected_stdout": "25\n"}]


def response_shape(value):
    """Recursive key/type skeleton of a JSON value."""
    if isinstance(value, dict):
        return {k: response_shape(value[k]) for k in sorted(value)}
    if isinstance(value, list):
        return [response_shape(value[0])] if value else []
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, (int, float)):
        return "number"
    return "string"


def assert_golden_shape(name: str, payload: dict):
    shape = response_shape(payload)
    path = GOLDEN_DIR / f"{name}.json"
    if os.environ.get("ACE_UPDATE_GOLDENS") == "1":
        GOLDEN_DIR.mkdir(exist_ok=True)
        path.write_text(json.dumps(shape, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    assert path.exists(), f"golden shape missing: {path} (set ACE_UPDATE_GOLDENS=1 to create)"
    assert shape == json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture()
def client(tmp_path):
    manifest = write_corpus(tmp_path)
    config = load_config(write_engine_config(tmp_path, session_ttl=60.0))
    engine = Engine(config)
    install_quiz_rules(engine.mock_backend)
    install_tutor_rules(engine.mock_backend)
    engine.mock_backend.add_rule("user: quiz me", "Quiz Generator")
    engine.ingest(manifest)
    with TestClient(create_app(engine)) as test_client:
        test_client.engine = engine
        yield test_client


def test_health_reports_index_sizes(client):
    data = client.get("/v1/health").json()
    assert data["status"] == "ok"
    assert data["indices"]["hybrid"] >= 1
    assert data["indices"]["quiz"] >= 1
    assert_golden_shape("health", data)


def test_route_endpoint(client):
    response = client.post("/v1/route", json={"query": "quiz me on loops"})
    assert response.status_code == 200
    data = response.json()
    assert data["label"] == "QuizGenerator"
    assert data["parse_path"] == "exact"
    assert_golden_shape("route", data)


def test_ask_endpoint_returns_citations(client):
    response = client.post("/v1/qa/ask", json={"query": "closure enclosing scope"})
    assert response.status_code == 200
    data = response.json()
    assert data["answer_text"]
    assert len(data["context_chunks"]) <= 5
    for chunk in data["context_chunks"]:
        assert {"chunk_id", "score", "text"} <= set(chunk)
    assert_golden_shape("ask", data)


def test_quiz_flow_and_golden_shapes(client):
    start = client.post("/v1/quiz/start", json={"topic": "python functions"}).json()
    assert start["current_bloom"] == "Apply"
    assert start["pending_item"] is not None
    assert "correct_label" not in start["pending_item"]
    assert_golden_shape("quiz_state", start)

    wrong = next(l for l in "ACD")
    answer = client.post(
        "/v1/quiz/answer", json={"session_id": start["session_id"], "label": wrong}
    ).json()
    assert answer["correct"] in (True, False)
    assert answer["feedback"]["correct_label"]
    assert_golden_shape("quiz_answer", answer)

    state = client.get("/v1/quiz/state", params={"session_id": start["session_id"]}).json()
    assert len(state["history"]) == 1


def test_quiz_answer_label_e_is_400(client):
    start = client.post("/v1/quiz/start", json={"topic": "python functions"}).json()
    response = client.post(
        "/v1/quiz/answer", json={"session_id": start["session_id"], "label": "E"}
    )
    assert response.status_code == 400
    body = response.json()
    assert body["error"] == "InputError"
    assert "detail" in body


def test_unknown_session_is_410(client):
    response = client.get("/v1/quiz/state", params={"session_id": "nope"})
    assert response.status_code == 410


def test_tutor_flow_and_golden_shapes(client):
    start = client.post(
        "/v1/tutor/start",
        json={
            "problem": "Read an integer and print its square",
            "problem_id": "square",
            "difficulty": "easy",
            "io_cases": IO_CASES,
        },
    ).json()
    assert len(start["plan"]) == 3
    assert start["steps"][0]["attempts_remaining"] == 5
    assert_golden_shape("tutor_state", start)
    sid = start["session_id"]

    bad = client.post(
        "/v1/tutor/submit",
        json={"session_id": sid, "step_index": 0, "snippet": "n = int(input("},
    ).json()
    assert bad["outcome"] == "retry"
    assert bad["attempts_remaining"] == 4
    assert bad["gate_error"]
    assert_golden_shape("tutor_submit", bad)

    for index, snippet in enumerate(["n = int(input())", "sq = n * n", "print(sq)"]):
        ok = client.post(
            "/v1/tutor/submit",
            json={"session_id": sid, "step_index": index, "snippet": snippet},
        ).json()
        assert ok["outcome"] == "passed"

    state = client.get("/v1/tutor/state", params={"session_id": sid}).json()
    assert state["cumulative_code"] == "n = int(input())\nsq = n * n\nprint(sq)"

    final = client.post("/v1/tutor/finalize", json={"session_id": sid}).json()
    assert final["completed"] is True
    assert final["attempts_used"] == 1
    assert_golden_shape("tutor_finalize", final)


def test_tutor_submit_out_of_order_is_409(client):
    start = client.post(
        "/v1/tutor/start",
        json={"problem": "Read an integer and print its square", "io_cases": IO_CASES},
    ).json()
    response = client.post(
        "/v1/tutor/submit",
        json={"session_id": start["session_id"], "step_index": 2, "snippet": "x"},
    )
    assert response.status_code == 409


def test_session_expiry_flushes_transcript(tmp_path):
    manifest = write_corpus(tmp_path)
    config = load_config(write_engine_config(tmp_path, session_ttl=0.05))
    engine = Engine(config)
    install_quiz_rules(engine.mock_backend)
    engine.ingest(manifest)
    with TestClient(create_app(engine)) as client:
        start = client.post("/v1/quiz/start", json={"topic": "python functions"}).json()
        sid = start["session_id"]
        time.sleep(0.1)
        assert client.get("/v1/quiz/state", params={"session_id": sid}).status_code == 410
        transcript = Path(config.transcripts_dir) / "quiz" / f"{sid}.json"
        assert transcript.exists()
        payload = json.loads(transcript.read_text())
        assert payload["topic"] == "python functions"


def test_no_credentials_in_responses(client):
    for path in ("/v1/health",):
        body = client.get(path).text
        assert "api_key" not in body
        assert "Authorization" not in body
