import json

import pytest
from fastapi.testclient import TestClient

from litforage.metadata import ProviderConfig
from litforage.service import create_app

from corpus import SEED_IDS


class StepClock:
    def __init__(self, start=5_000_000):
        self.t = start

    def __call__(self):
        self.t += 1000
        return self.t


@pytest.fixture()
def client(corpus, tmp_path):
    app = create_app(tmp_path / "svc", ProviderConfig.fixtures(corpus.root),
                     clock=StepClock())
    with TestClient(app) as tc:
        yield tc


def make_session(client, seeds=None):
    response = client.post("/sessions", json={
        "seed_ids": seeds or SEED_IDS, "topic": "svc test", "rng_seed": 11})
    assert response.status_code == 201, response.text
    return response.json()["session_id"]


def post_command(client, sid, command, modality="api"):
    return client.post("/sessions/%s/commands" % sid,
                       json={"modality": modality, "command": command})


class TestSessionLifecycle:
    def test_create_session_seeds_three_papers(self, client):
        response = client.post("/sessions", json={
            "seed_ids": SEED_IDS, "topic": "three seeds"})
        body = response.json()
        assert response.status_code == 201
        assert sorted(body["node_ids"]) == sorted(SEED_IDS)
        graph = client.get("/sessions/%s/graph" % body["session_id"]).json()
        assert [n["is_seed"] for n in graph["nodes"]] == [True] * 3

    def test_empty_seed_list_is_validation_error(self, client):
        response = client.post("/sessions", json={"seed_ids": []})
        assert response.status_code == 400
        body = response.json()
        assert body["code"] == "validation"
        assert set(body) == {"code", "message", "detail"}

    def test_bad_seed_id_atomic_and_named(self, client):
        response = client.post("/sessions", json={
            "seed_ids": ["gs01", "zz99", "pf01"]})
        assert response.status_code == 404
        assert "zz99" in response.json()["message"]
        # nothing was created
        assert client.app.state.sessions == {}

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/graph").status_code == 404


class TestCommands:
    def test_expand_returns_added_ids_and_logs_event(self, client, corpus):
        sid = make_session(client)
        response = post_command(client, sid, {
            "type": "expand", "mode": "thematic", "seeds": ["gs01"], "k": 2},
            modality="menu")
        assert response.status_code == 200
        added = response.json()["result"]["added_nodes"]
        assert added == corpus.recs_for(["gs01"])[:2]
        events = client.get("/sessions/%s/events" % sid).json()["events"]
        assert events[-1]["feature"] == "recommendation"
        assert events[-1]["modality"] == "menu"

    def test_annotate_empty_text_rejected_and_unlogged(self, client):
        sid = make_session(client)
        before = client.get("/sessions/%s/events" % sid).json()["events"]
        response = post_command(client, sid, {
            "type": "annotate", "id": "gs01", "text": "   "})
        assert response.status_code == 400
        assert response.json()["code"] == "validation"
        after = client.get("/sessions/%s/events" % sid).json()["events"]
        assert len(after) == len(before)

    def test_sequential_commands_log_in_execution_order(self, client):
        sid = make_session(client)
        post_command(client, sid, {"type": "pin", "id": "gs01",
                                   "pos": [1, 2, 3]})
        post_command(client, sid, {"type": "link", "a": "gs01", "b": "qo01"})
        events = client.get("/sessions/%s/events" % sid).json()["events"]
        actions = [e["action"] for e in events]
        assert actions == ["session_created", "pin", "link"]
        timestamps = [e["ts"] for e in events]
        assert timestamps == sorted(timestamps)

    def test_every_mutation_logs_exactly_one_event(self, client):
        sid = make_session(client)
        mutations = [
            {"type": "expand", "mode": "references", "id": "gs01", "k": 2},
            {"type": "cluster", "k": 2},
            {"type": "pin", "id": "gs01", "pos": [0, 0, 0]},
            {"type": "link", "a": "gs01", "b": "pf01"},
            {"type": "annotate", "id": "pf01", "text": "note"},
            {"type": "remove", "id": "qo01"},
        ]
        for command in mutations:
            before = len(client.get("/sessions/%s/events" % sid)
                         .json()["events"])
            assert post_command(client, sid, command).status_code == 200
            after = len(client.get("/sessions/%s/events" % sid)
                        .json()["events"])
            assert after == before + 1

    def test_malformed_command_is_protocol_error(self, client):
        sid = make_session(client)
        response = post_command(client, sid, {"no_type": True})
        assert response.status_code == 400
        assert response.json()["code"] == "protocol"

    def test_graph_is_canonical_json(self, client):
        sid = make_session(client)
        raw = client.get("/sessions/%s/graph" % sid).content
        assert raw.startswith(b'{"schema_version":1,')
        doc = json.loads(raw)
        assert {n["id"] for n in doc["nodes"]} == set(SEED_IDS)


class TestStream:
    def test_idle_subscribe_sends_exactly_one_graph_frame(self, client):
        sid = make_session(client)
        with client.websocket_connect("/sessions/%s/stream" % sid) as ws:
            frame = ws.receive_json()
            assert frame["type"] == "graph"
            assert {n["id"] for n in frame["doc"]["nodes"]} == set(SEED_IDS)
            # no further frames: issue a no-op read via a command-free check
            post_command(client, sid, {"type": "insights", "id": "gs01",
                                       "kind": "tldr"})
            event_frame = ws.receive_json()
            assert event_frame["type"] == "event"  # nothing between

    def test_pin_emits_event_then_positions_with_pinned_coordinate(
            self, client):
        sid = make_session(client)
        with client.websocket_connect("/sessions/%s/stream" % sid) as ws:
            assert ws.receive_json()["type"] == "graph"
            post_command(client, sid, {"type": "pin", "id": "gs01",
                                       "pos": [4.0, 5.0, 6.0]})
            first, second = ws.receive_json(), ws.receive_json()
            assert first["type"] == "event"
            assert first["action"] == "pin"
            assert second["type"] == "positions"
            assert second["positions"]["gs01"] == [4.0, 5.0, 6.0]

    def test_expand_emits_event_graph_positions_in_order(self, client,
                                                         corpus):
        sid = make_session(client)
        with client.websocket_connect("/sessions/%s/stream" % sid) as ws:
            assert ws.receive_json()["type"] == "graph"
            post_command(client, sid, {"type": "expand", "mode": "thematic",
                                       "seeds": ["pf01"], "k": 2})
            kinds = [ws.receive_json()["type"] for _ in range(3)]
            assert kinds == ["event", "graph", "positions"]

    def test_cluster_emits_event_clusters_positions(self, client):
        sid = make_session(client)
        with client.websocket_connect("/sessions/%s/stream" % sid) as ws:
            assert ws.receive_json()["type"] == "graph"
            post_command(client, sid, {"type": "cluster", "k": 2})
            kinds = [ws.receive_json()["type"] for _ in range(3)]
            assert kinds == ["event", "clusters", "positions"]

    def test_positions_ids_subset_of_last_graph_frame(self, client):
        sid = make_session(client)
        with client.websocket_connect("/sessions/%s/stream" % sid) as ws:
            known = {n["id"] for n in ws.receive_json()["doc"]["nodes"]}
            post_command(client, sid, {"type": "expand", "mode": "thematic",
                                       "seeds": ["gs01"], "k": 3})
            while True:
                frame = ws.receive_json()
                if frame["type"] == "graph":
                    known = {n["id"] for n in frame["doc"]["nodes"]}
                elif frame["type"] == "positions":
                    assert set(frame["positions"]) <= known
                    break

    def test_mirrored_state_equals_get_graph_after_quiescence(self, client):
        sid = make_session(client)
        with client.websocket_connect("/sessions/%s/stream" % sid) as ws:
            mirror = ws.receive_json()["doc"]
            post_command(client, sid, {"type": "expand", "mode": "thematic",
                                       "seeds": ["qo01"], "k": 2})
            post_command(client, sid, {"type": "pin", "id": "qo01",
                                       "pos": [1.0, 1.0, 1.0]})
            for _ in range(5):
                frame = ws.receive_json()
                if frame["type"] == "graph":
                    mirror = frame["doc"]
                elif frame["type"] == "positions":
                    for node_id, pos in frame["positions"].items():
                        mirror["layout"]["positions"][node_id] = pos
                    mirror["layout"]["alpha"] = frame["alpha"]
            server = client.get("/sessions/%s/graph" % sid).json()
            assert mirror["layout"]["positions"] == \
                server["layout"]["positions"]
            assert {n["id"] for n in mirror["nodes"]} == \
                {n["id"] for n in server["nodes"]}


class TestBackpressure:
    def test_positions_frames_coalesce_latest_wins(self, client):
        from litforage.service import Subscriber

        sub = Subscriber()
        sub.enqueue({"type": "graph", "doc": {}})
        sub.enqueue({"type": "positions", "positions": {"a": [1, 1, 1]}})
        sub.enqueue({"type": "positions", "positions": {"a": [2, 2, 2]}})
        sub.enqueue({"type": "positions", "positions": {"a": [3, 3, 3]}})
        frames = sub.drain()
        assert [f["type"] for f in frames] == ["graph", "positions"]
        assert frames[-1]["positions"]["a"] == [3, 3, 3]

    def test_structural_frames_never_dropped(self, client):
        from litforage.service import Subscriber

        sub = Subscriber()
        sub.enqueue({"type": "positions", "positions": {"a": [1, 1, 1]}})
        sub.enqueue({"type": "graph", "doc": {"v": 1}})
        sub.enqueue({"type": "positions", "positions": {"a": [2, 2, 2]}})
        sub.enqueue({"type": "graph", "doc": {"v": 2}})
        sub.enqueue({"type": "positions", "positions": {"a": [3, 3, 3]}})
        kinds = [f["type"] for f in sub.drain()]
        assert kinds == ["positions", "graph", "positions", "graph",
                         "positions"]
