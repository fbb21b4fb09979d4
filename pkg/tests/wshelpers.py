"""Synchronous websocket test client helpers (Starlette TestClient based)."""

import json

from miboard.protocol import Frame, MessageCode, decode, encode


class WS:
    """One test websocket with managed outbound seq numbers."""

    def __init__(self, raw_ws):
        self.raw = raw_ws
        self.seq = 0

    def send(self, code: MessageCode, payload: dict) -> None:
        self.seq += 1
        self.raw.send_text(encode(Frame(code=code, payload=payload, seq=self.seq)).decode())

    def send_raw(self, text: str) -> None:
        self.raw.send_text(text)

    def recv(self) -> Frame:
        return decode(self.raw.receive_text().encode())

    def expect(self, code: MessageCode) -> dict:
        """Read until a frame with `code` arrives; fail fast on error frames."""
        for _ in range(200):
            frame = self.recv()
            if frame.code is code:
                return frame.payload
            if frame.code is MessageCode.ERROR and code is not MessageCode.ERROR:
                raise AssertionError(f"server error while waiting for {code.value}: {frame.payload}")
        raise AssertionError(f"no {code.value} frame in 200 messages")

    def drain_until_sync(self) -> tuple[list[Frame], dict]:
        """Collect frames up to and including the next state_sync."""
        seen = []
        for _ in range(200):
            frame = self.recv()
            if frame.code is MessageCode.STATE_SYNC:
                return seen, frame.payload
            seen.append(frame)
        raise AssertionError("no state_sync in 200 messages")

    def join(self, zone: str = "main", name: str | None = None, resume: str | None = None) -> dict:
        payload = {"zone": zone}
        if name:
            payload["name"] = name
        if resume:
            payload["resume"] = resume
        self.send(MessageCode.JOIN_ZONE, payload)
        return self.expect(MessageCode.ROOM_ASSIGNED)


def act_and_sync(clients: dict[str, WS], actor: str, code: MessageCode, payload: dict) -> dict[str, dict]:
    """One accepted action: actor sends, every client drains to its state_sync."""
    clients[actor].send(code, payload)
    return {pid: ws.drain_until_sync()[1] for pid, ws in clients.items()}


def script_json(actions) -> str:
    return json.dumps(actions)
