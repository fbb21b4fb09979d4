"""Bots that play over the real websocket transport.

The same policies as the in-process harness, fed from state_sync payloads
instead of engine state. Joins are sequenced cohort by cohort so first-fit
matchmaking fills room 1, then room 2, and so on; the started games then run
concurrently. With equal seeds, an over-the-wire run reproduces the
in-process run event for event.
"""

from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass, field

import websockets

from .bots import BotView, Policy, build_policies
from .protocol import Frame, MessageCode, decode, encode

RECEIVE_TIMEOUT = 30.0


@dataclass
class RoomResult:
    room_id: int
    game_id: str
    winner: str | None
    win_reason: str | None
    final_scores: dict[str, int]
    final_hash: str
    errors: list[str] = field(default_factory=list)


class WireBot:
    """One websocket connection playing one seat."""

    def __init__(self, url: str, name: str, policy: Policy | None = None):
        self.url = url
        self.name = name
        self.policy = policy
        self.sock = None
        self.seq = 0
        self.pid: str | None = None
        self.room_id: int | None = None
        self.static: dict | None = None
        self.last_acted_seq = -1
        self.errors: list[str] = []
        self.result: dict | None = None

    async def connect(self) -> None:
        self.sock = await websockets.connect(self.url, open_timeout=RECEIVE_TIMEOUT)

    async def send(self, code: MessageCode, payload: dict) -> None:
        self.seq += 1
        await self.sock.send(encode(Frame(code=code, payload=payload, seq=self.seq)).decode("utf-8"))

    async def recv_frame(self) -> Frame:
        raw = await asyncio.wait_for(self.sock.recv(), timeout=RECEIVE_TIMEOUT)
        if isinstance(raw, str):
            raw = raw.encode("utf-8")
        return decode(raw)

    async def expect(self, code: MessageCode) -> dict:
        """Read frames until `code` arrives; unrelated traffic is skimmed."""
        while True:
            frame = await self.recv_frame()
            if frame.code is code:
                return frame.payload
            if frame.code is MessageCode.ERROR:
                raise RuntimeError(f"{self.name}: server error {frame.payload}")

    async def join(self, zone: str = "main") -> dict:
        await self.send(MessageCode.JOIN_ZONE, {"zone": zone, "name": self.name})
        payload = await self.expect(MessageCode.ROOM_ASSIGNED)
        self.pid = payload["player_id"]
        self.room_id = payload["room_id"]
        return payload

    async def play(self) -> None:
        """React to state syncs until the game finishes."""
        assert self.policy is not None and self.static is not None
        while True:
            frame = await self.recv_frame()
            if frame.code is MessageCode.ERROR:
                self.errors.append(json.dumps(frame.payload, sort_keys=True))
            elif frame.code is MessageCode.STATE_SYNC:
                sync = frame.payload
                if sync["phase"] == "game_over":
                    self.result = {
                        "game_id": sync["game_id"],
                        "winner": sync["winner"],
                        "win_reason": sync["win_reason"],
                        "scores": {p["player_id"]: p["score"] for p in sync["players"]},
                        "state_hash": sync["state_hash"],
                    }
                    return
                if (
                    sync["pending"]
                    and sync["pending"][0] == self.pid
                    and sync["event_seq"] > self.last_acted_seq
                ):
                    view = BotView.from_state_sync(sync, self.static)
                    code, payload = self.policy.act(view)
                    self.last_acted_seq = sync["event_seq"]
                    await self.send(code, payload)

    async def close(self) -> None:
        if self.sock is not None:
            await self.sock.close()


async def _run_room(
    url: str,
    room_id: int,
    players: int,
    policy: str | list[str],
    seed: int,
    seated: asyncio.Event,
) -> RoomResult:
    """Seat one cohort in a fresh room (signalling `seated`), play to the end."""
    pids = [f"r{room_id}p{i + 1}" for i in range(players)]
    policies = build_policies(policy, pids, seed, room_id)
    bots: list[WireBot] = []
    try:
        try:
            for i in range(players):
                bot = WireBot(url, name=f"bot{room_id}-{i + 1}")
                await bot.connect()
                payload = await bot.join()
                if payload["room_id"] != room_id:
                    raise RuntimeError(f"expected room {room_id}, got {payload['room_id']}")
                bot.policy = policies[payload["player_id"]]
                bots.append(bot)
            await bots[-1].send(MessageCode.BEGIN_GAME, {})
            for bot in bots:
                bot.static = await bot.expect(MessageCode.BEGIN_GAME)
        finally:
            seated.set()  # let the next cohort join even if this one failed
        await asyncio.gather(*(bot.play() for bot in bots))
    finally:
        for bot in bots:
            await bot.close()
    reference = bots[0].result
    assert reference is not None
    for bot in bots[1:]:
        if bot.result != reference:
            raise RuntimeError(f"bots in room {room_id} disagree on the final state")
    return RoomResult(
        room_id=room_id,
        game_id=reference["game_id"],
        winner=reference["winner"],
        win_reason=reference["win_reason"],
        final_scores=reference["scores"],
        final_hash=reference["state_hash"],
        errors=[e for bot in bots for e in bot.errors],
    )


async def live_drive(
    server_addr: str,
    games: int,
    players: int = 4,
    policy: str | list[str] = "random",
    seed: int = 0,
) -> list[RoomResult]:
    """Play `games` full games over the wire against a fresh server.

    Cohort k lands in room k (joins are sequenced); games run concurrently
    once seated. Raises if any room fails or bots disagree on final state.
    """
    url = server_addr if "://" in server_addr else f"ws://{server_addr}/ws"
    tasks: list[asyncio.Task] = []
    for room_id in range(1, games + 1):
        seated = asyncio.Event()
        tasks.append(asyncio.create_task(_run_room(url, room_id, players, policy, seed, seated)))
        await seated.wait()
    return list(await asyncio.gather(*tasks))
