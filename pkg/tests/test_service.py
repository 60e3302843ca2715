"""HTTP service: session lifecycle, status codes, event-log semantics."""

import json

import pytest
from fastapi.testclient import TestClient

from rubric_bn import (
    AchievedLevel,
    EvidenceSet,
    LevelCoord,
    PupilRecord,
    encode,
    fixture_path,
    infer,
)
from rubric_bn.service import create_app
from rubric_bn.service.sessions import evidence_from_events

L = LevelCoord


@pytest.fixture()
def service(tmp_path):
    app = create_app(session_dir=tmp_path / "sessions")
    client = TestClient(app)
    rubric = json.loads(fixture_path("cat_rubric").read_text())
    params = json.loads(fixture_path("model1").read_text())
    model_id = client.post("/models", json={"rubric": rubric, "params": params}).json()[
        "model_id"
    ]
    return app, client, model_id


def new_session(client, model_id):
    return client.post("/sessions", json={"model_id": model_id}).json()["session_id"]


class TestModels:
    def test_registration_is_idempotent(self, service):
        app, client, model_id = service
        rubric = json.loads(fixture_path("cat_rubric").read_text())
        params = json.loads(fixture_path("model1").read_text())
        again = client.post("/models", json={"rubric": rubric, "params": params})
        assert again.json()["model_id"] == model_id
        assert client.get("/models").json()["models"] == [model_id]

    def test_model_info_carries_grid_and_tasks(self, service):
        _, client, model_id = service
        info = client.get(f"/models/{model_id}").json()
        assert len(info["skills"]) == 9
        assert len(info["tasks"]) == 12
        assert info["rubric"]["rows_ordered"] is True

    def test_invalid_documents_are_422(self, service):
        _, client, _ = service
        rubric = json.loads(fixture_path("cat_rubric").read_text())
        rubric["cells"] = rubric["cells"][:1]
        params = json.loads(fixture_path("model1").read_text())
        response = client.post("/models", json={"rubric": rubric, "params": params})
        assert response.status_code == 422

    def test_unknown_model_is_404(self, service):
        _, client, _ = service
        assert client.post("/sessions", json={"model_id": "zz"}).status_code == 404
        assert client.get("/models/zz").status_code == 404


class TestSessionBasics:
    def test_fresh_session_reports_priors(self, service):
        _, client, model_id = service
        sid = new_session(client, model_id)
        body = client.get(f"/sessions/{sid}/posteriors").json()
        assert all(p == pytest.approx(0.5, abs=1e-12) for p in body["posteriors"].values())
        assert body["probabilistic_score"] == pytest.approx(4.5, abs=1e-12)

    def test_observation_matches_batch_inference(self, service, cat_doc, cat_network):
        """Posting an achieved level must reproduce the library's report for
        the equivalent one-task record."""
        _, client, model_id = service
        sid = new_session(client, model_id)
        response = client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s01", "kind": "achieved", "r": 3, "c": 3},
        )
        assert response.status_code == 200
        record = PupilRecord("p", {"s01": AchievedLevel(L(3, 3))})
        expected = infer(cat_network, encode(cat_doc.rubric, cat_network, record))
        for skill, value in response.json()["posteriors"].items():
            assert value == pytest.approx(expected.posteriors[skill], abs=1e-12)

    def test_unknown_session_is_404(self, service):
        _, client, _ = service
        assert client.get("/sessions/zz/posteriors").status_code == 404

    def test_malformed_body_is_400(self, service):
        _, client, model_id = service
        sid = new_session(client, model_id)
        response = client.post(f"/sessions/{sid}/observations", json={"task": "s01"})
        assert response.status_code == 400

    def test_conflicting_observation_is_409_with_cells(self, service):
        _, client, model_id = service
        sid = new_session(client, model_id)
        client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s01", "kind": "achieved", "r": 3, "c": 3},
        )
        response = client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s01", "kind": "obs", "r": 1, "c": 1, "value": 0},
        )
        assert response.status_code == 409
        assert {"task": "s01", "r": 1, "c": 1} in response.json()["conflicts"]
        # the rejected observation left no trace
        log = client.get(f"/sessions/{sid}/log").json()
        assert len(log["events"]) == 1

    def test_explicit_failure_observation(self, service):
        _, client, model_id = service
        sid = new_session(client, model_id)
        response = client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s03", "kind": "obs", "r": 2, "c": 3, "value": 0},
        )
        assert response.status_code == 200
        assert response.json()["posteriors"]["X_23"] < 0.5


class TestWhatIf:
    def test_preview_equals_what_posting_would_return(self, service):
        _, client, model_id = service
        sid = new_session(client, model_id)
        client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s01", "kind": "achieved", "r": 2, "c": 2},
        )
        preview = client.get(
            f"/sessions/{sid}/whatif",
            params={"task": "s02", "r": 2, "c": 3, "kind": "achieved"},
        )
        posted = client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s02", "kind": "achieved", "r": 2, "c": 3},
        )
        assert preview.json() == posted.json()

    def test_preview_never_mutates_the_session(self, service):
        _, client, model_id = service
        sid = new_session(client, model_id)
        before = client.get(f"/sessions/{sid}/posteriors").json()
        client.get(
            f"/sessions/{sid}/whatif",
            params={"task": "s05", "r": 1, "c": 2, "value": 0},
        )
        after = client.get(f"/sessions/{sid}/posteriors").json()
        assert before == after
        assert client.get(f"/sessions/{sid}/log").json()["events"] == []

    def test_value_defaults_to_explicit_observation_kind(self, service):
        _, client, model_id = service
        sid = new_session(client, model_id)
        preview = client.get(
            f"/sessions/{sid}/whatif", params={"task": "s01", "r": 1, "c": 1, "value": 1}
        )
        assert preview.status_code == 200


class TestUndo:
    def test_undo_then_reapply_is_identity(self, service):
        _, client, model_id = service
        sid = new_session(client, model_id)
        obs = {"task": "s01", "kind": "achieved", "r": 2, "c": 2}
        first = client.post(f"/sessions/{sid}/observations", json=obs).json()
        undone = client.delete(f"/sessions/{sid}/observations/latest").json()
        assert all(
            p == pytest.approx(0.5, abs=1e-12) for p in undone["posteriors"].values()
        )
        again = client.post(f"/sessions/{sid}/observations", json=obs).json()
        assert again["posteriors"] == first["posteriors"]

    def test_undo_with_nothing_to_undo_is_409(self, service):
        _, client, model_id = service
        sid = new_session(client, model_id)
        assert client.delete(f"/sessions/{sid}/observations/latest").status_code == 409


class TestNextTask:
    def test_ranking_excludes_observed_tasks(self, service):
        _, client, model_id = service
        sid = new_session(client, model_id)
        ranked = client.get(f"/sessions/{sid}/next-task").json()
        assert ranked[0]["task"] == "s01"
        assert len(ranked) == 12
        client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s01", "kind": "achieved", "r": 2, "c": 2},
        )
        ranked = client.get(f"/sessions/{sid}/next-task").json()
        assert len(ranked) == 11
        assert all(entry["task"] != "s01" for entry in ranked)


class TestEventLogReplay:
    def test_replaying_the_log_reproduces_the_report(self, service, cat_network):
        """Posteriors are a pure function of the persisted event log."""
        app, client, model_id = service
        sid = new_session(client, model_id)
        client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s01", "kind": "achieved", "r": 2, "c": 2},
        )
        client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s02", "kind": "obs", "r": 3, "c": 3, "value": 0},
        )
        client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s03", "kind": "achieved", "r": 1, "c": 2},
        )
        client.delete(f"/sessions/{sid}/observations/latest")
        live = client.get(f"/sessions/{sid}/posteriors").json()

        store = app.state.sessions
        session = store.get(sid)
        replayed = store.replay(session.path, model_id)
        fresh = client.get(f"/sessions/{replayed.id}/posteriors").json()
        for skill, value in live["posteriors"].items():
            assert fresh["posteriors"][skill] == pytest.approx(value, abs=1e-12)
        assert fresh["evidence_digest"] == live["evidence_digest"]

    def test_log_file_is_json_lines(self, service):
        app, client, model_id = service
        sid = new_session(client, model_id)
        client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s01", "kind": "achieved", "r": 1, "c": 1},
        )
        client.delete(f"/sessions/{sid}/observations/latest")
        lines = app.state.sessions.get(sid).path.read_text().strip().splitlines()
        assert len(lines) == 2
        first, second = (json.loads(line) for line in lines)
        assert first["type"] == "observation"
        assert first["observation"]["task"] == "s01"
        assert second["type"] == "undo"

    def test_evidence_rebuilt_from_events_matches_session_state(self, service, cat_doc):
        app, client, model_id = service
        sid = new_session(client, model_id)
        client.post(
            f"/sessions/{sid}/observations",
            json={"task": "s04", "kind": "achieved", "r": 2, "c": 3},
        )
        session = app.state.sessions.get(sid)
        model = app.state.registry.get(model_id)
        evidence = evidence_from_events(model, session.events)
        report = infer(model.network, evidence)
        live = client.get(f"/sessions/{sid}/posteriors").json()
        assert live["evidence_digest"] == report.evidence_digest
