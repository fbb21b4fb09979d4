"""FastAPI application: websocket transport plus operational HTTP endpoints."""

from __future__ import annotations

import asyncio
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from ..corpus import load_corpus
from ..lobby import LobbyError
from ..protocol import (
    CLIENT_CODES,
    MessageCode,
    ProtocolError,
    SeqTracker,
    VersionMismatch,
    decode,
)
from .config import ServerSettings
from .eventlog import EventLog
from .hub import Connection, Hub

logger = logging.getLogger(__name__)


class RoomInfo(BaseModel):
    room_id: int
    zone_id: str
    member_count: int
    started: bool


class HealthInfo(BaseModel):
    status: str
    ready: bool
    rooms: int
    corpus_texts: int
    deterministic: bool


def create_app(settings: ServerSettings) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        corpus = load_corpus(settings.corpus_dir)  # fatal at boot if empty/invalid
        log = EventLog(settings.log_path)
        hub = Hub(settings, corpus, log)
        hub.start_task()
        app.state.hub = hub
        app.state.log = log
        logger.info(
            "serving with %d texts, seed %s (%s)",
            len(corpus),
            settings.base_seed,
            "deterministic" if settings.deterministic else "random",
        )
        try:
            yield
        finally:
            await hub.shutdown()
            log.close()

    app = FastAPI(title="miboard", version="0.1.0", lifespan=lifespan)

    @app.get("/healthz", response_model=HealthInfo)
    async def healthz() -> HealthInfo:
        hub: Hub = app.state.hub
        return HealthInfo(
            status="ok",
            ready=hub.ready,
            rooms=len(hub.rooms),
            corpus_texts=len(hub.corpus),
            deterministic=settings.deterministic,
        )

    @app.get("/rooms", response_model=list[RoomInfo])
    async def rooms() -> list[RoomInfo]:
        hub: Hub = app.state.hub
        fut = asyncio.get_running_loop().create_future()
        hub.post(("listing", fut))
        listing = await fut
        return [RoomInfo(**entry) for entry in listing]

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        hub: Hub = app.state.hub
        conn = Connection(websocket)
        conn.start_writer()
        tracker = SeqTracker()
        runtime = None
        pid = None
        try:
            while True:
                text = await websocket.receive_text()
                try:
                    frame = decode(text.encode("utf-8"))
                    tracker.check(frame.seq)
                except ProtocolError as err:
                    conn.send(MessageCode.ERROR, {"code": err.code, "message": str(err)})
                    if isinstance(err, VersionMismatch):
                        break
                    continue
                if frame.code is MessageCode.PING:
                    conn.send(MessageCode.PONG, {})
                    continue
                if frame.code not in CLIENT_CODES:
                    conn.send(
                        MessageCode.ERROR,
                        {"code": "unexpected_code", "message": f"{frame.code.value} is server-to-client", "ref_seq": frame.seq},
                    )
                    continue
                if runtime is None:
                    if frame.code is not MessageCode.JOIN_ZONE:
                        conn.send(
                            MessageCode.ERROR,
                            {"code": "join_first", "message": "send join_zone before anything else", "ref_seq": frame.seq},
                        )
                        continue
                    fut = asyncio.get_running_loop().create_future()
                    hub.post(("join", conn, frame.payload, fut))
                    try:
                        runtime, pid, _token = await fut
                    except LobbyError as err:
                        conn.send(MessageCode.ERROR, {"code": err.code, "message": str(err), "ref_seq": frame.seq})
                    continue
                if frame.code is MessageCode.JOIN_ZONE:
                    conn.send(
                        MessageCode.ERROR,
                        {"code": "duplicate_membership", "message": "already joined", "ref_seq": frame.seq},
                    )
                    continue
                runtime.post(("frame", pid, frame))
        except WebSocketDisconnect:
            pass
        except RuntimeError:
            pass  # receive after close
        finally:
            if runtime is not None and pid is not None:
                runtime.post(("disconnect", pid))
            await conn.shutdown()

    if settings.static_dir is not None and settings.static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=settings.static_dir, html=True), name="client")

    return app
