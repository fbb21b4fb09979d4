"""Versioned wire codec for all client/server traffic.

One frame per transport message, UTF-8 JSON, at most 64 KiB:

    {"v": 1, "seq": 17, "code": "guess", "payload": {...}}

`seq` is per-sender and strictly increasing on a connection. Payload schemas
are fixed per code (see docs/protocol.md); where a code travels in both
directions the schema is the union of both shapes and the server enforces
which fields a client must supply. Chat and discussion text is opaque: it is
never parsed for control meaning, so nothing typed into a chat box can reach
the rules engine as anything but a transcript entry.

`decode` never lets an arbitrary byte string escalate past a typed
`ProtocolError`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .core.types import Phase, PowerCard, Strategy

PROTOCOL_VERSION = 1
MAX_FRAME_BYTES = 64 * 1024

_STRATEGY_VALUES = {s.value for s in Strategy}
_POWER_VALUES = {c.value for c in PowerCard}


class ProtocolError(Exception):
    """Rejected frame; `code` names the failure class on the wire."""

    code = "protocol_error"


class MalformedFrame(ProtocolError):
    code = "malformed"


class OversizeFrame(ProtocolError):
    code = "oversize"


class UnknownCode(ProtocolError):
    code = "unknown_code"


class SchemaViolation(ProtocolError):
    code = "schema_violation"


class VersionMismatch(ProtocolError):
    code = "version_mismatch"


class SequenceError(ProtocolError):
    code = "bad_seq"


class MessageCode(Enum):
    JOIN_ZONE = "join_zone"
    ROOM_ASSIGNED = "room_assigned"
    BEGIN_GAME = "begin_game"
    STATE_SYNC = "state_sync"
    TASK_DRAWN = "task_drawn"
    REDRAW = "redraw"
    SE_SUBMIT = "se_submit"
    GUESS = "guess"
    VOTE1_RESULT = "vote1_result"
    DISCUSS_MSG = "discuss_msg"
    DISCUSS_PASS = "discuss_pass"
    VOTE2 = "vote2"
    SCORE_RESULT = "score_result"
    PLAY_POWER = "play_power"
    SKIP_POWER = "skip_power"
    ROLL_RESULT = "roll_result"
    EVENT_APPLIED = "event_applied"
    GAME_OVER = "game_over"
    CHAT = "chat"
    ERROR = "error"
    PING = "ping"
    PONG = "pong"


# Codes a client may send; everything else is server-to-client only.
CLIENT_CODES = frozenset(
    {
        MessageCode.JOIN_ZONE,
        MessageCode.BEGIN_GAME,
        MessageCode.REDRAW,
        MessageCode.SE_SUBMIT,
        MessageCode.GUESS,
        MessageCode.DISCUSS_MSG,
        MessageCode.DISCUSS_PASS,
        MessageCode.VOTE2,
        MessageCode.PLAY_POWER,
        MessageCode.SKIP_POWER,
        MessageCode.CHAT,
        MessageCode.PING,
    }
)


class _Payload(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)


class ArgumentModel(_Payload):
    strategy: str
    reason: str = Field(min_length=1, max_length=80)
    span: Optional[list[int]] = Field(default=None, min_length=2, max_length=2)

    @field_validator("strategy")
    @classmethod
    def _known_strategy(cls, value: str) -> str:
        if value not in _STRATEGY_VALUES:
            raise ValueError(f"unknown strategy {value!r}")
        return value

    @field_validator("span")
    @classmethod
    def _non_negative(cls, value: Optional[list[int]]) -> Optional[list[int]]:
        if value is not None and any(v < 0 for v in value):
            raise ValueError("span offsets must be non-negative")
        return value


class AssignmentModel(_Payload):
    strategy: str
    point_value: int
    strategy_redraws_used: int = 0
    point_redraws_used: int = 0

    @field_validator("strategy")
    @classmethod
    def _known_strategy(cls, value: str) -> str:
        if value not in _STRATEGY_VALUES:
            raise ValueError(f"unknown strategy {value!r}")
        return value


class MemberModel(_Payload):
    player_id: str
    name: str
    connected: bool = True


class JoinZonePayload(_Payload):
    zone: str = Field(default="main", min_length=1, max_length=64)
    name: Optional[str] = Field(default=None, max_length=64)
    resume: Optional[str] = Field(default=None, max_length=128)


class RoomAssignedPayload(_Payload):
    room_id: int
    zone: str
    player_id: str
    resume_token: Optional[str] = None
    members: list[MemberModel]
    started: bool


class BeginGamePayload(_Payload):
    # Empty from clients; populated on the broadcast.
    game_id: Optional[str] = None
    players: Optional[list[str]] = None
    board_length: Optional[int] = None
    point_win_threshold: Optional[int] = None
    discussion_message_cap: Optional[int] = None
    discussion_time_limit: Optional[float] = None
    max_redraws: Optional[int] = None
    reasons: Optional[dict[str, list[str]]] = None


class TaskDrawnPayload(_Payload):
    reader: str
    turn: int
    target_index: int
    reveal_upto: int
    text_id: str
    assignment: Optional[AssignmentModel] = None  # reader's copy only


class RedrawPayload(_Payload):
    kind: Literal["strategy", "points"]
    reader: Optional[str] = None
    assignment: Optional[AssignmentModel] = None  # reader's copy only


class SeSubmitPayload(_Payload):
    text: str = Field(min_length=1, max_length=4000)
    reader: Optional[str] = None


class GuessPayload(_Payload):
    argument: Optional[ArgumentModel] = None  # required from clients; omitted on broadcast
    player: Optional[str] = None


class Vote1ResultPayload(_Payload):
    arguments: dict[str, Optional[ArgumentModel]]
    unanimous: bool
    assignment: AssignmentModel
    deltas: Optional[dict[str, int]] = None


class DiscussMsgPayload(_Payload):
    text: str = Field(min_length=1, max_length=1000)
    player: Optional[str] = None
    used: Optional[int] = None


class DiscussPassPayload(_Payload):
    player: Optional[str] = None


class Vote2Payload(_Payload):
    arguments: Optional[list[ArgumentModel]] = Field(default=None, min_length=1, max_length=5)
    player: Optional[str] = None


class ScoreResultPayload(_Payload):
    votes: dict[str, Optional[list[ArgumentModel]]]
    accepted: list[str]
    deltas: dict[str, int]
    totals: dict[str, int]


class PlayPowerPayload(_Payload):
    card: str
    target: Optional[str] = None
    player: Optional[str] = None

    @field_validator("card")
    @classmethod
    def _known_card(cls, value: str) -> str:
        if value not in _POWER_VALUES:
            raise ValueError(f"unknown power card {value!r}")
        return value


class SkipPowerPayload(_Payload):
    player: Optional[str] = None


class RollResultPayload(_Payload):
    player: str
    dice: list[int] = Field(min_length=1, max_length=2)
    total: int
    from_square: int
    to_square: int


class EventAppliedPayload(_Payload):
    player: str
    card: str
    from_square: int
    to_square: int
    power_drawn: Optional[str] = None


class GameOverPayload(_Payload):
    winner: Optional[str]
    reason: str
    scores: dict[str, int]
    tokens: dict[str, int]


class ChatPayload(_Payload):
    text: str = Field(min_length=1, max_length=1000)
    to: Optional[str] = None
    from_player: Optional[str] = None


class ErrorPayload(_Payload):
    code: str
    message: str
    ref_seq: Optional[int] = None


class PingPayload(_Payload):
    pass


class PongPayload(_Payload):
    pass


class PlayerSyncView(_Payload):
    player_id: str
    name: str
    score: int
    token: int
    frozen_turns: int
    connected: bool
    power_card_count: int
    power_cards: Optional[list[str]] = None  # own hand only
    discussion_messages_used: int
    passed_discussion: bool
    has_first_vote: bool
    has_second_vote: bool


class TextSyncView(_Payload):
    text_id: str
    title: str
    sentences: list[str]  # visible prefix only
    reveal_upto: int
    target_index: Optional[int]


class TranscriptEntry(_Payload):
    player: str
    text: str


class DiscussionSyncView(_Payload):
    transcript: list[TranscriptEntry]
    cap: int


class StateSyncPayload(_Payload):
    game_id: str
    room_id: int
    event_seq: int
    phase: str
    turn: int
    you: str
    reader: str
    players: list[PlayerSyncView]
    text: Optional[TextSyncView]
    assignment: Optional[AssignmentModel]
    self_explanation: Optional[str]
    first_votes: Optional[dict[str, Optional[ArgumentModel]]]
    second_votes: Optional[dict[str, Optional[list[ArgumentModel]]]]
    discussion: Optional[DiscussionSyncView]
    pending: list[str]
    chat_enabled: bool
    board_length: int
    winner: Optional[str]
    win_reason: Optional[str]
    state_hash: str


PAYLOAD_SCHEMAS: dict[MessageCode, type[_Payload]] = {
    MessageCode.JOIN_ZONE: JoinZonePayload,
    MessageCode.ROOM_ASSIGNED: RoomAssignedPayload,
    MessageCode.BEGIN_GAME: BeginGamePayload,
    MessageCode.STATE_SYNC: StateSyncPayload,
    MessageCode.TASK_DRAWN: TaskDrawnPayload,
    MessageCode.REDRAW: RedrawPayload,
    MessageCode.SE_SUBMIT: SeSubmitPayload,
    MessageCode.GUESS: GuessPayload,
    MessageCode.VOTE1_RESULT: Vote1ResultPayload,
    MessageCode.DISCUSS_MSG: DiscussMsgPayload,
    MessageCode.DISCUSS_PASS: DiscussPassPayload,
    MessageCode.VOTE2: Vote2Payload,
    MessageCode.SCORE_RESULT: ScoreResultPayload,
    MessageCode.PLAY_POWER: PlayPowerPayload,
    MessageCode.SKIP_POWER: SkipPowerPayload,
    MessageCode.ROLL_RESULT: RollResultPayload,
    MessageCode.EVENT_APPLIED: EventAppliedPayload,
    MessageCode.GAME_OVER: GameOverPayload,
    MessageCode.CHAT: ChatPayload,
    MessageCode.ERROR: ErrorPayload,
    MessageCode.PING: PingPayload,
    MessageCode.PONG: PongPayload,
}

_CODE_BY_VALUE = {code.value: code for code in MessageCode}


@dataclass(frozen=True)
class Frame:
    code: MessageCode
    payload: dict
    seq: int = 0
    v: int = PROTOCOL_VERSION


def _validate_payload(code: MessageCode, payload: object) -> dict:
    if not isinstance(payload, dict):
        raise SchemaViolation(f"payload for {code.value} must be an object")
    try:
        model = PAYLOAD_SCHEMAS[code].model_validate(payload)
    except ValidationError as exc:
        raise SchemaViolation(f"invalid {code.value} payload: {exc.errors()[0].get('msg', 'invalid')}") from exc
    return model.model_dump(mode="json", exclude_none=False)


def normalize_payload(code: MessageCode, payload: dict) -> dict:
    """Validated payload with schema defaults filled in (the decoded form)."""
    return _validate_payload(code, payload)


def encode(frame: Frame) -> bytes:
    """Serialize a frame, validating it against its code's schema."""
    payload = _validate_payload(frame.code, frame.payload)
    document = {"v": frame.v, "seq": frame.seq, "code": frame.code.value, "payload": payload}
    data = json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")
    if len(data) > MAX_FRAME_BYTES:
        raise OversizeFrame(f"frame is {len(data)} bytes; limit {MAX_FRAME_BYTES}")
    return data


def decode(data: bytes) -> Frame:
    """Parse and validate one frame; raises a ProtocolError subclass, never crashes."""
    if not isinstance(data, (bytes, bytearray)):
        raise MalformedFrame("frame must be bytes")
    if len(data) > MAX_FRAME_BYTES:
        raise OversizeFrame(f"frame is {len(data)} bytes; limit {MAX_FRAME_BYTES}")
    try:
        document = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError, RecursionError) as exc:
        raise MalformedFrame(f"not a JSON frame: {exc}") from exc
    if not isinstance(document, dict):
        raise MalformedFrame("frame must be a JSON object")
    if set(document) != {"v", "seq", "code", "payload"}:
        raise MalformedFrame("frame must have exactly the keys v, seq, code, payload")
    v = document["v"]
    if not isinstance(v, int) or isinstance(v, bool):
        raise MalformedFrame("v must be an integer")
    if v != PROTOCOL_VERSION:
        raise VersionMismatch(f"protocol version {v} unsupported; this server speaks {PROTOCOL_VERSION}")
    seq = document["seq"]
    if not isinstance(seq, int) or isinstance(seq, bool) or seq < 0:
        raise MalformedFrame("seq must be a non-negative integer")
    code_value = document["code"]
    if not isinstance(code_value, str):
        raise MalformedFrame("code must be a string")
    code = _CODE_BY_VALUE.get(code_value)
    if code is None:
        raise UnknownCode(f"unknown message code {code_value!r}")
    payload = _validate_payload(code, document["payload"])
    return Frame(code=code, payload=payload, seq=seq, v=v)


class SeqTracker:
    """Enforces strictly increasing per-connection sequence numbers."""

    def __init__(self) -> None:
        self.last: int | None = None

    def check(self, seq: int) -> None:
        if self.last is not None and seq <= self.last:
            raise SequenceError(f"seq {seq} not greater than last seen {self.last}")
        self.last = seq


class ChatRole(Enum):
    READER = "reader"
    GUESSER = "guesser"
    LOBBY = "lobby"


# Phases in which a role has no pending required action and may chat.
_IDLE_PHASES = {
    ChatRole.READER: frozenset({Phase.GUESSING}),
    ChatRole.GUESSER: frozenset({Phase.READER_COMPOSING, Phase.POWER_WINDOW, Phase.ROLL_AND_MOVE}),
}
_ALWAYS_OPEN = frozenset(
    {Phase.LOBBY, Phase.DISCUSSION, Phase.TASK_DRAW, Phase.FIRST_TALLY, Phase.SCORING, Phase.GAME_OVER}
)


def gate_chat(phase: Phase, role: ChatRole) -> bool:
    """Chat is open during discussion, in the lobby, and whenever the player
    has nothing the game is waiting on."""
    if role is ChatRole.LOBBY or phase in _ALWAYS_OPEN:
        return True
    return phase in _IDLE_PHASES[role]
