"""Session-scoped HTTP + streaming service.

Endpoints:

    POST /sessions                        create a seeded session
    GET  /sessions/{id}/graph             canonical document JSON
    POST /sessions/{id}/commands          execute one command
    GET  /sessions/{id}/events            the interaction log
    WS   /sessions/{id}/stream            graph/positions/clusters/event frames

Per session, mutations run strictly sequentially under a lock and each
one appends exactly one interaction event before the response goes out.
Stream subscribers get a full ``graph`` frame on subscribe; afterwards,
structural changes send ``graph``, cluster changes send ``clusters``,
and layout changes send ``positions``. Positions frames coalesce
latest-wins under backpressure; structural frames are never dropped.

Command payloads mirror the hand-menu/voice feature set. The documented
speech aliases (see ``driver.VOICE_ALIASES``) map one-to-one onto these
commands; speech recognition itself is not part of the service.
"""

from __future__ import annotations

import asyncio
import time
from pathlib import Path

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response

from .canonical import canonical_bytes
from .driver import SessionDriver
from .errors import ForageError, NotFoundError, ProtocolError
from .insights import InsightEngine, InsightProvider
from .metadata import ProviderConfig, ScholarClient
from .session import Modality, SessionStore, read_events

HTTP_STATUS = {
    "validation": 400,
    "protocol": 400,
    "integrity": 409,
    "ordering": 409,
    "not_found": 404,
    "numeric": 400,
    "capacity": 413,
    "provider": 502,
    "rate_limit": 502,
    "transport": 502,
    "fixture_miss": 502,
    "parse": 400,
    "migration": 409,
    "replay_incomplete": 409,
    "replay_mismatch": 409,
}

MAX_POSITION_FRAMES_PER_SECOND = 30


class Subscriber:
    """Ordered frame queue; pending positions frames coalesce latest-wins."""

    def __init__(self) -> None:
        self.frames: list[dict] = []
        self.ready = asyncio.Event()
        self.closed = False

    def enqueue(self, frame: dict) -> None:
        if (frame["type"] == "positions" and self.frames
                and self.frames[-1]["type"] == "positions"):
            self.frames[-1] = frame
        else:
            self.frames.append(frame)
        self.ready.set()

    def drain(self) -> list[dict]:
        out, self.frames = self.frames, []
        self.ready.clear()
        return out


class SessionRuntime:
    """One live session: driver, writer lock, subscribers."""

    def __init__(self, driver: SessionDriver):
        self.driver = driver
        self.lock = asyncio.Lock()
        self.subscribers: list[Subscriber] = []
        self._last_positions_ts = 0.0
        driver.frame_sink = self._broadcast

    def _broadcast(self, kind: str, payload: dict) -> None:
        frame = {"type": kind, **payload}
        for sub in self.subscribers:
            sub.enqueue(frame)

    def subscribe(self) -> Subscriber:
        sub = Subscriber()
        self.subscribers.append(sub)
        sub.enqueue({"type": "graph", "doc": self.driver.doc.to_dict()})
        return sub

    def unsubscribe(self, sub: Subscriber) -> None:
        if sub in self.subscribers:
            self.subscribers.remove(sub)


def _error_response(err: ForageError) -> JSONResponse:
    status = HTTP_STATUS.get(err.code, 500)
    return JSONResponse(
        status_code=status,
        content={"code": err.code, "message": err.message,
                 "detail": err.detail})


def now_ms() -> int:
    return int(time.time() * 1000)


def create_app(root: str | Path, provider: ProviderConfig,
               insight_provider: InsightProvider | None = None,
               clock=now_ms) -> FastAPI:
    from contextlib import asynccontextmanager

    root = Path(root)
    sessions: dict[str, SessionRuntime] = {}

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        # session end: persist final documents and closing snapshots
        for runtime in sessions.values():
            runtime.driver.close(clock())

    app = FastAPI(title="litforage service", lifespan=lifespan)
    app.state.sessions = sessions
    app.state.clock = clock

    def make_client() -> ScholarClient:
        return ScholarClient(provider)

    def runtime_of(session_id: str) -> SessionRuntime:
        runtime = sessions.get(session_id)
        if runtime is None:
            raise NotFoundError("no session %r" % session_id,
                                {"session_id": session_id})
        return runtime

    def mount(driver: SessionDriver) -> SessionRuntime:
        runtime = SessionRuntime(driver)
        sessions[driver.session_id] = runtime
        return runtime

    app.state.mount = mount

    @app.exception_handler(ForageError)
    async def forage_error_handler(request: Request, err: ForageError):
        return _error_response(err)

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict):
        seed_ids = body.get("seed_ids") or []
        topic = body.get("topic")
        session_id = _fresh_id(sessions)
        driver = SessionDriver.create(
            seed_ids, topic, make_client(), clock(),
            store=SessionStore(root / "sessions" / session_id),
            session_id=session_id,
            rng_seed=body.get("rng_seed"),
            insight_engine=InsightEngine(insight_provider),
        )
        mount(driver)
        return {
            "session_id": driver.session_id,
            "topic": driver.doc.topic,
            "node_ids": driver.doc.node_ids(),
            "created_at": driver.doc.created_at,
        }

    @app.get("/sessions/{session_id}/graph")
    async def get_graph(session_id: str):
        runtime = runtime_of(session_id)
        return Response(content=runtime.driver.doc.to_canonical_json(),
                        media_type="application/json")

    @app.post("/sessions/{session_id}/commands")
    async def post_command(session_id: str, body: dict):
        runtime = runtime_of(session_id)
        command = body.get("command")
        if command is None:
            raise ProtocolError("body must carry a 'command' object")
        try:
            modality = Modality(body.get("modality", "api"))
        except ValueError:
            raise ProtocolError("unknown modality %r" % body.get("modality"))
        async with runtime.lock:
            result = runtime.driver.execute(command, modality, clock())
        return {"ok": True, "result": result}

    @app.get("/sessions/{session_id}/events")
    async def get_events(session_id: str):
        runtime = runtime_of(session_id)
        store = runtime.driver.store
        if store is None:
            return {"events": []}
        return {"events": [e.to_dict() for e in read_events(store.events_path)]}

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        runtime = sessions.get(session_id)
        if runtime is None:
            await websocket.close(code=4004)
            return
        await websocket.accept()
        sub = runtime.subscribe()
        try:
            while True:
                for frame in sub.drain():
                    await websocket.send_text(
                        canonical_bytes(frame).decode("utf-8"))
                # sleep until new frames arrive or the peer goes away
                ready = asyncio.ensure_future(sub.ready.wait())
                gone = asyncio.ensure_future(websocket.receive())
                done, pending = await asyncio.wait(
                    {ready, gone}, return_when=asyncio.FIRST_COMPLETED)
                for task in pending:
                    task.cancel()
                if gone in done:
                    message = gone.result()
                    if message.get("type") == "websocket.disconnect":
                        break
        except WebSocketDisconnect:
            pass
        finally:
            runtime.unsubscribe(sub)

    return app


def _fresh_id(sessions: dict) -> str:
    import uuid

    while True:
        candidate = uuid.uuid4().hex[:12]
        if candidate not in sessions:
            return candidate
