"""HTTP/WebSocket service contract tests."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from langnav import data as bundled
from langnav.pipeline import CodegenConfig, World
from langnav.service import create_app


@pytest.fixture()
def client():
    world = World.load(bundled.scene_path("theater"))
    app = create_app(world, CodegenConfig(mode="fixture"))
    with TestClient(app) as test_client:
        yield test_client


COMMAND_BODY = {
    "text": "Go to the fire extinguisher",
    "scene": "theater",
    "fixture": "theater/go_to_the_fire_extinguisher",
    "target_object_id": "fire_extinguisher",
}


class TestCommandEndpoint:
    def test_successful_command(self, client):
        response = client.post("/api/command", json=COMMAND_BODY)
        assert response.status_code == 200
        payload = response.json()
        assert set(payload["stages"]) == {"code", "od", "wp", "path_exec"}
        assert all(payload["stages"][s]["passed"] for s in payload["stages"])
        assert payload["planned_path"]["reached_goal"]

    def test_malformed_body_400(self, client):
        assert client.post("/api/command", json={}).status_code == 400
        assert client.post("/api/command", json={"text": ""}).status_code == 400

    def test_unknown_scene_400(self, client):
        body = dict(COMMAND_BODY, scene="lobby")
        response = client.post("/api/command", json=body)
        assert response.status_code == 400

    def test_bad_representation_400(self, client):
        body = dict(COMMAND_BODY, representation="Z")
        assert client.post("/api/command", json=body).status_code == 400

    def test_concurrent_command_409(self, client):
        session = client.app.state.session
        assert session.busy.acquire(blocking=False)
        try:
            response = client.post("/api/command", json=COMMAND_BODY)
            assert response.status_code == 409
        finally:
            session.busy.release()
        assert client.post("/api/command", json=COMMAND_BODY).status_code == 200


class TestStateEndpoints:
    def test_state(self, client):
        payload = client.get("/api/state").json()
        assert payload["scene"] == "theater"
        assert set(payload["pose"]) == {"x", "y", "yaw"}

    def test_views_vector_payload(self, client):
        payload = client.get("/api/views").json()
        frames = {f["frame"] for f in payload["frames"]}
        assert frames == {"left", "front", "right"}
        front = next(f for f in payload["frames"] if f["frame"] == "front")
        assert front["width"] == 640
        assert front["rects"], "front view should see theater objects"
        assert {"object_id", "box", "depth", "label"} <= set(front["rects"][0])
        assert payload["panorama"]["total_width"] == 1960

    def test_map_dims_and_rle(self, client):
        payload = client.get("/api/map").json()
        assert payload["dims"] == [140, 100, 30]
        assert payload["resolution"] == 0.1
        total = sum(payload["rle"])
        assert total == 140 * 100 * 30

    def test_map_dims_ten_by_ten_scene(self):
        from conftest import make_scene
        from langnav.pipeline import World

        world = World.from_scene(make_scene(extent=(10, 10, 3), resolution=0.1))
        app = create_app(world, CodegenConfig(mode="fixture"))
        with TestClient(app) as local:
            payload = local.get("/api/map").json()
            assert payload["dims"] == [100, 100, 30]

    def test_state_updates_after_command(self, client):
        before = client.get("/api/state").json()["pose"]
        client.post("/api/command", json=COMMAND_BODY)
        after = client.get("/api/state").json()["pose"]
        assert (before["x"], before["y"]) != (after["x"], after["y"])


class TestWebSocket:
    def test_pose_stream_during_follow(self, client):
        with client.websocket_connect("/ws") as ws:
            response = client.post("/api/command", json=COMMAND_BODY)
            assert response.status_code == 200
            events = []
            for _ in range(500):
                events.append(ws.receive_json())
                if events[-1].get("type") == "status" and events[-1]["state"] == "idle":
                    break
            kinds = [e["type"] for e in events]
            assert kinds[0] == "status"
            assert "pose" in kinds
            poses = [e for e in events if e["type"] == "pose"]
            assert len(poses) >= 1
            times = [p["t"] for p in poses]
            assert times == sorted(times)
            # 10 Hz of simulated time
            deltas = [round(b - a, 3) for a, b in zip(times, times[1:])]
            assert all(abs(d - 0.1) < 1e-6 for d in deltas[:-1])
