import pytest
from fastapi.testclient import TestClient

from summex.api import DatasetEntry, create_app


@pytest.fixture(scope="module")
def client(synth, synth_scales):
    _, data, catalog, _ = synth
    entry = DatasetEntry(id="synth", data=data, catalog=catalog, scales=synth_scales)
    app = create_app([entry])
    return TestClient(app)


def make_session(client, **overrides):
    body = {"dataset": "synth", "mode": "manual", "strategy": "top1sum", "k": 5, "t": 10}
    body.update(overrides)
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 200, resp.text
    return resp.json()


class TestDatasets:
    def test_list(self, client):
        got = client.get("/datasets").json()
        assert got["datasets"][0]["id"] == "synth"
        assert got["datasets"][0]["itemsets"] > 0

    def test_itemset_card(self, client):
        card = client.get("/datasets/synth/itemsets/1").json()
        assert card["id"] == 1
        assert "description" in card and "valid_operators" in card

    def test_unknown_dataset_404(self, client):
        resp = client.get("/datasets/nope/itemsets/0")
        assert resp.status_code == 404
        assert resp.json()["error"] == "unknown_dataset"


class TestCreateSession:
    def test_bootstrap_cards(self, client):
        view = make_session(client)
        assert len(view["current"]) <= 5
        assert view["step_index"] == 0
        assert view["bootstrap"]["result"] == [c["id"] for c in view["current"]]
        for card in view["current"]:
            assert set(card["valid_operators"]) == {
                "by-facet", "by-superset", "by-distrib", "by-neighbors"
            }

    def test_unknown_dataset(self, client):
        resp = client.post("/sessions", json={"dataset": "zzz"})
        assert resp.status_code == 404
        body = resp.json()
        assert body["error"] == "unknown_dataset" and body["field"] == "dataset"

    def test_invalid_config_names_field(self, client):
        resp = client.post("/sessions", json={"dataset": "synth", "mode": "bogus"})
        assert resp.status_code == 400
        body = resp.json()
        assert body["error"] == "invalid_config"
        assert body["field"] == "mode"

    def test_full_mode_includes_pipeline(self, client):
        view = make_session(client, mode="full", t=6)
        assert "pipeline" in view
        assert view["pipeline"]["steps"][0]["step"] == 0
        assert len(view["pipeline"]["steps"]) == view["step_index"] + 1


class TestSteps:
    def test_valid_step_increments_history(self, client):
        view = make_session(client)
        sid = view["id"]
        target = view["current"][0]["id"]
        resp = client.post(
            f"/sessions/{sid}/steps",
            json={"seq": 0, "action": {"itemset": target, "operator": "by-distrib", "attribute": None}},
        )
        assert resp.status_code == 200, resp.text
        body = resp.json()
        assert body["step_index"] == 1
        assert body["step"]["action"]["operator"] == "by-distrib"
        pipeline = client.get(f"/sessions/{sid}/pipeline").json()
        assert len(pipeline["steps"]) == 2

    def test_invalid_action_names_precondition(self, client):
        view = make_session(client)
        sid = view["id"]
        # by-neighbors on an attribute that is not constrained
        card = view["current"][0]
        free_attr = next(
            name
            for name in client.get("/datasets").json()["datasets"][0]["attributes"]
            if name not in card["description"]
        )
        resp = client.post(
            f"/sessions/{sid}/steps",
            json={"seq": 0, "action": {"itemset": card["id"], "operator": "by-neighbors", "attribute": free_attr}},
        )
        assert resp.status_code == 400
        body = resp.json()
        assert body["error"] == "invalid_action"
        assert "not constrained" in body["detail"]

    def test_stale_sequence_conflicts(self, client):
        view = make_session(client)
        sid = view["id"]
        target = view["current"][0]["id"]
        action = {"itemset": target, "operator": "by-distrib", "attribute": None}
        first = client.post(f"/sessions/{sid}/steps", json={"seq": 0, "action": action})
        assert first.status_code == 200
        dup = client.post(f"/sessions/{sid}/steps", json={"seq": 0, "action": action})
        assert dup.status_code == 409
        assert dup.json()["error"] == "stale_sequence"

    def test_terminal_state_rejected(self, client):
        view = make_session(client, t=2)
        sid = view["id"]
        target = view["current"][0]["id"]
        action = {"itemset": target, "operator": "by-distrib", "attribute": None}
        ok = client.post(f"/sessions/{sid}/steps", json={"seq": 0, "action": action})
        assert ok.status_code == 200
        done = client.post(f"/sessions/{sid}/steps", json={"seq": 1, "action": action})
        assert done.status_code == 409
        assert done.json()["error"] == "session_done"

    def test_responses_carry_step_index(self, client):
        view = make_session(client)
        sid = view["id"]
        assert "step_index" in client.get(f"/sessions/{sid}").json()
        assert "step_index" in client.get(f"/sessions/{sid}/suggestions?n=1").json()


class TestSuggestions:
    def test_default_limit(self, client):
        view = make_session(client, mode="partial")
        got = client.get(f"/sessions/{view['id']}/suggestions").json()
        assert len(got["suggestions"]) <= 5

    def test_filter_by_itemset(self, client):
        view = make_session(client, mode="partial")
        target = view["current"][1]["id"]
        got = client.get(f"/sessions/{view['id']}/suggestions?itemset={target}&n=10").json()
        assert got["suggestions"]
        assert all(s["action"]["itemset"] == target for s in got["suggestions"])

    def test_scores_non_increasing(self, client):
        view = make_session(client, mode="partial")
        got = client.get(f"/sessions/{view['id']}/suggestions?n=8").json()
        scores = [s["score"] for s in got["suggestions"]]
        assert scores == sorted(scores, reverse=True)


class TestLogParity:
    def test_api_pipeline_matches_engine_log(self, client, synth, synth_scales, tmp_path):
        """The API-exposed pipeline view carries the same numbers the engine
        writes to its own log for the same action sequence."""
        import json

        from summex.engine import (
            SessionConfig,
            apply_step,
            build_step,
            start_session,
            write_pipeline_log,
        )
        from summex.metrics import UtilityWeights
        from summex.operators import action_from_json

        _, _, catalog, _ = synth
        view = make_session(client, k=4, t=6)
        sid = view["id"]
        actions = []
        for seq in range(3):
            state = client.get(f"/sessions/{sid}").json()
            target = state["current"][0]["id"]
            action = {"itemset": target, "operator": "by-distrib", "attribute": None}
            resp = client.post(f"/sessions/{sid}/steps", json={"seq": seq, "action": action})
            assert resp.status_code == 200
            actions.append(action)
        api_pipeline = client.get(f"/sessions/{sid}/pipeline").json()

        session = start_session(
            catalog,
            SessionConfig(mode="manual", strategy="top1sum", weights=UtilityWeights(), k=4, t_total=6),
            synth_scales,
        )
        for action in actions:
            step = build_step(session, action_from_json(action, catalog))
            apply_step(session, step)
        path = tmp_path / "api_parity.jsonl"
        write_pipeline_log(session, path)
        records = [json.loads(line) for line in path.read_text().splitlines()][1:]
        assert len(records) == len(api_pipeline["steps"])
        for record, api_step in zip(records, api_pipeline["steps"]):
            assert record["result"] == api_step["result"]
            assert record["utility"] == pytest.approx(api_step["utility"], abs=1e-12)
            assert record["raw"][0] == pytest.approx(api_step["raw"]["uniformity"], abs=1e-12)
