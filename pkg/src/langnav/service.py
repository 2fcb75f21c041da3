"""HTTP/WebSocket service around one scene session.

A session owns one world; command execution is strictly serialized (a second
POST while one is running gets 409). WebSocket clients receive pose and
path-progress events emitted by the follower at 10 Hz of simulated time.
"""

from __future__ import annotations

import asyncio
import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from .pipeline import CodegenConfig, NavCommand, World, run_command
from .projection import PanoramaLayout
from .worldsim import render_views


class Session:
    """One scene, one robot, one command at a time."""

    def __init__(self, world: World, codegen: CodegenConfig):
        self.world = world
        self.codegen = codegen
        self.busy = threading.Lock()
        self.subscribers: list[asyncio.Queue] = []
        self.loop: asyncio.AbstractEventLoop | None = None

    def broadcast(self, event: dict) -> None:
        loop = self.loop
        if loop is None:
            return
        for queue in list(self.subscribers):
            loop.call_soon_threadsafe(queue.put_nowait, event)


def create_app(
    world: World,
    codegen: CodegenConfig | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    session = Session(world, codegen or CodegenConfig(mode="fixture"))

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        session.loop = asyncio.get_running_loop()
        yield

    app = FastAPI(title="langnav", version="0.1.0", lifespan=lifespan)
    app.state.session = session

    @app.post("/api/command")
    def post_command(body: dict):
        if not isinstance(body, dict) or not body.get("text"):
            return JSONResponse(status_code=400, content={"error": "missing command text"})
        scene_name = body.get("scene")
        if scene_name and scene_name != session.world.scene.name:
            return JSONResponse(
                status_code=400,
                content={"error": f"scene {scene_name!r} is not loaded"},
            )
        try:
            cmd = NavCommand(
                text=str(body["text"]),
                scene=session.world.scene.name,
                category=body.get("category", "Generic"),
                representation=body.get("representation", "A"),
                fixture_id=body.get("fixture"),
                target_object_id=body.get("target_object_id"),
                seed=int(body.get("seed", 0)),
            )
        except (ValueError, TypeError) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        if not session.busy.acquire(blocking=False):
            return JSONResponse(
                status_code=409, content={"error": "a command is already executing"}
            )
        try:
            session.broadcast({"type": "status", "state": "executing", "text": cmd.text})

            def pose_event(sim_t, state, progress):
                session.broadcast(
                    {
                        "type": "pose",
                        "t": round(sim_t, 3),
                        "x": state.x,
                        "y": state.y,
                        "yaw": state.yaw,
                        "progress": round(progress, 4),
                    }
                )

            report = run_command(
                cmd, session.world, session.codegen, pose_callback=pose_event
            )
            session.broadcast({"type": "status", "state": "idle", "text": cmd.text})
            return JSONResponse(content=report.to_dict())
        finally:
            session.busy.release()

    @app.get("/api/state")
    def get_state():
        robot = session.world.robot
        return {
            "scene": session.world.scene.name,
            "pose": {"x": robot.x, "y": robot.y, "yaw": robot.yaw},
        }

    @app.get("/api/views")
    def get_views():
        views = render_views(session.world.scene, session.world.robot)
        layout = PanoramaLayout(frame_width=session.world.scene.cameras.image_width)
        return {
            "frames": [
                {
                    "frame": view.frame,
                    "width": view.width,
                    "height": view.height,
                    "rects": [
                        {
                            "object_id": r.object_id,
                            "box": [r.left, r.lower, r.right, r.upper],
                            "depth": r.depth,
                            "label": session.world.scene.object_by_id(r.object_id).label,
                        }
                        for r in view.rects
                    ],
                }
                for view in views.frames.values()
            ],
            "panorama": {
                "order": list(layout.frame_order),
                "frame_width": layout.frame_width,
                "pad_px": layout.pad_px,
                "total_width": layout.total_width,
            },
        }

    @app.get("/api/map")
    def get_map():
        vmap = session.world.voxel_map
        return {
            "dims": list(vmap.dims),
            "resolution": vmap.resolution,
            "rle": vmap.rle_counts(),
        }

    @app.websocket("/ws")
    async def websocket_endpoint(ws: WebSocket):
        await ws.accept()
        queue: asyncio.Queue = asyncio.Queue()
        session.subscribers.append(queue)
        try:
            while True:
                event = await queue.get()
                await ws.send_json(event)
        except WebSocketDisconnect:
            pass
        finally:
            session.subscribers.remove(queue)

    if static_dir:
        # host the operator console from the same origin as the API
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
