"""Actor-style executors: one lobby task, one task per room.

Connections never touch shared state directly. The websocket endpoint posts
messages to the hub queue (joins, leaves, room listings) or to a room queue
(game frames, chat, disconnects); each queue is drained by exactly one task,
so all lobby mutations are serialized and all events within a room are
totally ordered. Rooms talk back to the hub only by posting messages or
resolving futures.
"""

from __future__ import annotations

import asyncio
import logging
import secrets
import time
from dataclasses import dataclass

from ..core import Phase, RuleError
from ..corpus import Corpus, CorpusSession
from ..lobby import LobbyError, Zone
from ..protocol import (
    ChatRole,
    Frame,
    MessageCode,
    encode,
    gate_chat,
)
from ..seeds import room_corpus_seed, room_game_seed
from .config import ServerSettings
from .eventlog import EventLog
from .session import GameSession, SessionTimers

logger = logging.getLogger(__name__)

OUTBOX_LIMIT = 512


class Connection:
    """One websocket: an outbox queue drained by a dedicated writer task."""

    def __init__(self, websocket):
        self.websocket = websocket
        self.outbox: asyncio.Queue[bytes | None] = asyncio.Queue(OUTBOX_LIMIT)
        self.out_seq = 0
        self.open = True
        self._writer: asyncio.Task | None = None

    def start_writer(self) -> None:
        self._writer = asyncio.create_task(self._write_loop())

    async def _write_loop(self) -> None:
        try:
            while True:
                data = await self.outbox.get()
                if data is None:
                    break
                await self.websocket.send_text(data.decode("utf-8"))
        except Exception:
            self.open = False

    def send(self, code: MessageCode, payload: dict) -> None:
        if not self.open:
            return
        self.out_seq += 1
        data = encode(Frame(code=code, payload=payload, seq=self.out_seq))
        try:
            self.outbox.put_nowait(data)
        except asyncio.QueueFull:
            logger.warning("dropping connection with a full outbox")
            self.open = False

    async def shutdown(self) -> None:
        self.open = False
        if self._writer is not None:
            try:
                self.outbox.put_nowait(None)
            except asyncio.QueueFull:
                self._writer.cancel()
            await asyncio.gather(self._writer, return_exceptions=True)


@dataclass
class Seat:
    player_id: str
    name: str
    resume_token: str
    conn: Connection | None = None


class RoomRuntime:
    """Owns one room's session; consumes its queue in a single task."""

    def __init__(self, hub: "Hub", zone_id: str, room_id: int):
        self.hub = hub
        self.zone_id = zone_id
        self.room_id = room_id
        self.seats: dict[str, Seat] = {}
        self.queue: asyncio.Queue[tuple] = asyncio.Queue()
        self.session: GameSession | None = None
        self.corpus_session: CorpusSession | None = None
        self.game_counter = 0
        self.started = False
        self.task: asyncio.Task | None = None

    def start_task(self) -> None:
        self.task = asyncio.create_task(self.run(), name=f"room-{self.zone_id}-{self.room_id}")

    def post(self, message: tuple) -> None:
        self.queue.put_nowait(message)

    # ------------------------------------------------------------------

    async def run(self) -> None:
        while True:
            try:
                message = await asyncio.wait_for(self.queue.get(), timeout=self.hub.settings.tick_interval)
            except asyncio.TimeoutError:
                self._tick()
                continue
            if message[0] == "stop":
                break
            try:
                await self._handle(message)
            except Exception:
                logger.exception("room %s/%s failed handling %s", self.zone_id, self.room_id, message[0])

    async def _handle(self, message: tuple) -> None:
        kind = message[0]
        if kind == "member_joined":
            self._broadcast_roster()
        elif kind == "member_left":
            pid = message[1]
            self.seats.pop(pid, None)
            self._broadcast_roster()
        elif kind == "reconnect":
            _, pid, conn = message
            seat = self.seats.get(pid)
            if seat is None:
                conn.send(MessageCode.ERROR, {"code": "unknown_resume", "message": "seat no longer exists"})
                return
            seat.conn = conn
            self._send_roster_to(seat)
            if self.session is not None:
                self._dispatch(self.session.on_reconnect(pid, self.hub.now()))
        elif kind == "disconnect":
            pid = message[1]
            seat = self.seats.get(pid)
            if seat is not None:
                seat.conn = None
            if self.session is not None and not self.session.game.is_over():
                self._dispatch(self.session.on_disconnect(pid, self.hub.now()))
            elif not self.started:
                # Pre-start: a dropped connection leaves the room entirely.
                self.hub.post(("leave", self.zone_id, self.room_id, pid))
        elif kind == "frame":
            _, pid, frame = message
            await self._handle_frame(pid, frame)

    # ------------------------------------------------------------------

    def _seat_list(self) -> list[dict]:
        return [
            {"player_id": seat.player_id, "name": seat.name, "connected": seat.conn is not None}
            for seat in self.seats.values()
        ]

    def _send_roster_to(self, seat: Seat) -> None:
        if seat.conn is None:
            return
        seat.conn.send(
            MessageCode.ROOM_ASSIGNED,
            {
                "room_id": self.room_id,
                "zone": self.zone_id,
                "player_id": seat.player_id,
                "resume_token": seat.resume_token,
                "members": self._seat_list(),
                "started": self.started,
            },
        )

    def _broadcast_roster(self) -> None:
        for seat in self.seats.values():
            self._send_roster_to(seat)

    def _dispatch(self, sends) -> None:
        for to, code, payload in sends:
            if to is None:
                for seat in self.seats.values():
                    if seat.conn is not None:
                        seat.conn.send(code, payload)
            else:
                seat = self.seats.get(to)
                if seat is not None and seat.conn is not None:
                    seat.conn.send(code, payload)

    def _error_to(self, pid: str, code: str, message: str, ref_seq: int | None = None) -> None:
        seat = self.seats.get(pid)
        if seat is not None and seat.conn is not None:
            seat.conn.send(MessageCode.ERROR, {"code": code, "message": message, "ref_seq": ref_seq})

    # ------------------------------------------------------------------

    async def _handle_frame(self, pid: str, frame: Frame) -> None:
        code = frame.code
        if code is MessageCode.CHAT:
            self._chat(pid, frame)
            return
        if code is MessageCode.BEGIN_GAME:
            await self._begin(pid, frame)
            return
        if self.session is None:
            self._error_to(pid, "no_game", "the game has not started", frame.seq)
            return
        try:
            sends = self.session.handle_frame(pid, code, frame.payload, self.hub.now())
        except RuleError as err:
            self._error_to(pid, err.code, str(err), frame.seq)
            return
        self._dispatch(sends)

    def _chat(self, pid: str, frame: Frame) -> None:
        session = self.session
        if session is not None and not session.game.is_over():
            role = ChatRole.READER if pid == session.game.reader_id else ChatRole.GUESSER
            phase = session.game.phase
            if not gate_chat(phase, role):
                self._error_to(pid, "chat_closed", "chat is closed while the game waits on you", frame.seq)
                return
            if phase is Phase.DISCUSSION:
                # Capped discussion contributions travel as discuss_msg.
                self._error_to(pid, "use_discuss_msg", "send discussion contributions as discuss_msg", frame.seq)
                return
        payload = {"text": frame.payload["text"], "to": frame.payload.get("to"), "from_player": pid}
        target = frame.payload.get("to")
        if target is not None:
            self._dispatch([(target, MessageCode.CHAT, payload), (pid, MessageCode.CHAT, payload)])
        else:
            self._dispatch([(None, MessageCode.CHAT, payload)])

    async def _begin(self, pid: str, frame: Frame) -> None:
        if self.session is not None and self.session.game.is_over():
            self._start_session()  # reset for another game with the same roster
            return
        if self.session is not None:
            self._error_to(pid, "already_started", "game already in progress", frame.seq)
            return
        fut = asyncio.get_running_loop().create_future()
        self.hub.post(("mark_started", self.zone_id, self.room_id, pid, fut))
        try:
            await fut
        except LobbyError as err:
            self._error_to(pid, err.code, str(err), frame.seq)
            return
        self.started = True
        self._broadcast_roster()
        self._start_session()

    def _start_session(self) -> None:
        self.game_counter += 1
        room_seed = room_game_seed(self.hub.settings.base_seed, self.room_id, self.game_counter)
        if self.corpus_session is None:
            self.corpus_session = CorpusSession(
                self.hub.corpus, room_corpus_seed(self.hub.settings.base_seed, self.room_id)
            )
        members = [(seat.player_id, seat.name) for seat in self.seats.values()]
        self.session = GameSession(
            room_id=self.room_id,
            game_id=f"r{self.room_id}g{self.game_counter}",
            config=self.hub.settings.make_game_config(len(members), room_seed),
            members=members,
            corpus_session=self.corpus_session,
            log=self.hub.log,
            timers=SessionTimers(
                disconnect_grace=self.hub.settings.disconnect_grace,
                inactivity_timeout=self.hub.settings.inactivity_timeout,
            ),
            deterministic_ts=self.hub.settings.deterministic,
            emit_frames=True,
        )
        self._dispatch(self.session.start(self.hub.now()))

    def _tick(self) -> None:
        if self.session is not None and not self.session.game.is_over():
            self._dispatch(self.session.tick(self.hub.now()))


class Hub:
    """Lobby executor plus the registry of room executors."""

    def __init__(self, settings: ServerSettings, corpus: Corpus, log: EventLog):
        self.settings = settings
        self.corpus = corpus
        self.log = log
        self.zones: dict[str, Zone] = {}
        self.rooms: dict[tuple[str, int], RoomRuntime] = {}
        self.resume_registry: dict[str, tuple[str, int, str]] = {}
        self.queue: asyncio.Queue[tuple] = asyncio.Queue()
        self.task: asyncio.Task | None = None
        self.ready = False

    def now(self) -> float:
        return time.monotonic()

    def post(self, message: tuple) -> None:
        self.queue.put_nowait(message)

    def start_task(self) -> None:
        self.task = asyncio.create_task(self.run(), name="lobby")
        self.ready = True

    async def run(self) -> None:
        while True:
            message = await self.queue.get()
            if message[0] == "stop":
                break
            try:
                self._handle(message)
            except Exception:
                logger.exception("lobby failed handling %s", message[0])

    def _handle(self, message: tuple) -> None:
        kind = message[0]
        if kind == "join":
            _, conn, payload, fut = message
            try:
                fut.set_result(self._join(conn, payload))
            except LobbyError as err:
                fut.set_exception(err)
        elif kind == "leave":
            _, zone_id, room_id, pid = message
            self._leave(zone_id, room_id, pid)
        elif kind == "mark_started":
            _, zone_id, room_id, initiator, fut = message
            try:
                self.zones[zone_id].begin_game(room_id, initiator)
                fut.set_result(True)
            except LobbyError as err:
                fut.set_exception(err)
        elif kind == "listing":
            message[1].set_result(self.listing())

    def _join(self, conn: Connection, payload: dict) -> tuple[RoomRuntime, str, str]:
        resume = payload.get("resume")
        if resume:
            entry = self.resume_registry.get(resume)
            if entry is None:
                raise LobbyError("unknown_resume", "resume token not recognized")
            zone_id, room_id, pid = entry
            runtime = self.rooms.get((zone_id, room_id))
            if runtime is None:
                raise LobbyError("unknown_resume", "room no longer exists")
            runtime.post(("reconnect", pid, conn))
            return runtime, pid, resume
        zone_id = payload.get("zone") or self.settings.zone_default
        zone = self.zones.setdefault(zone_id, Zone(zone_id))
        room_id, ordinal = zone.peek_placement()
        pid = f"r{room_id}p{ordinal}"
        room = zone.find_or_create_room(pid)
        assert room.room_id == room_id
        runtime = self.rooms.get((zone_id, room_id))
        if runtime is None:
            runtime = RoomRuntime(self, zone_id, room_id)
            runtime.start_task()
            self.rooms[(zone_id, room_id)] = runtime
        token = (
            f"resume-{pid}" if self.settings.deterministic else secrets.token_urlsafe(12)
        )
        runtime.seats[pid] = Seat(player_id=pid, name=payload.get("name") or pid, resume_token=token, conn=conn)
        self.resume_registry[token] = (zone_id, room_id, pid)
        runtime.post(("member_joined", pid))
        return runtime, pid, token

    def _leave(self, zone_id: str, room_id: int, pid: str) -> None:
        zone = self.zones.get(zone_id)
        if zone is None:
            return
        try:
            zone.leave_room(pid)
        except LobbyError:
            return
        runtime = self.rooms.get((zone_id, room_id))
        if runtime is None:
            return
        if zone.room_of(pid) is None and all(r.room_id != room_id for r in zone.rooms):
            # Room was garbage-collected; stop its executor.
            runtime.post(("stop",))
            self.rooms.pop((zone_id, room_id), None)
            for token, entry in list(self.resume_registry.items()):
                if entry[0] == zone_id and entry[1] == room_id:
                    del self.resume_registry[token]
        else:
            runtime.post(("member_left", pid))

    def listing(self) -> list[dict]:
        rooms = []
        for zone in self.zones.values():
            rooms.extend(zone.listing())
        return rooms

    async def shutdown(self) -> None:
        for runtime in self.rooms.values():
            runtime.post(("stop",))
        self.post(("stop",))
        tasks = [r.task for r in self.rooms.values() if r.task is not None]
        if self.task is not None:
            tasks.append(self.task)
        if tasks:
            await asyncio.gather(*tasks, return_exceptions=True)
