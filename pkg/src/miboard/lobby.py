"""Zones, capacity-bounded rooms, and first-fit matchmaking.

Pure data structures; the server wraps them in its lobby executor so that all
mutations are serialized. A joining player lands in the first room (creation
order) that has not started and has a free seat; otherwise a new room is
created. Started rooms admit nobody.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core.types import RuleError

ROOM_CAPACITY = 4
MIN_PLAYERS_TO_START = 3


class LobbyError(RuleError):
    pass


@dataclass
class Room:
    room_id: int
    zone_id: str
    members: list[str] = field(default_factory=list)
    started: bool = False
    joined_total: int = 0  # lifetime joins; ordinals are never reused

    def has_space(self) -> bool:
        return not self.started and len(self.members) < ROOM_CAPACITY

    def to_dict(self) -> dict:
        return {
            "room_id": self.room_id,
            "zone_id": self.zone_id,
            "member_count": len(self.members),
            "started": self.started,
        }


@dataclass
class Zone:
    zone_id: str
    rooms: list[Room] = field(default_factory=list)
    _next_room_id: int = 1

    def room(self, room_id: int) -> Room:
        for room in self.rooms:
            if room.room_id == room_id:
                return room
        raise LobbyError("unknown_room", f"no room {room_id} in zone {self.zone_id}")

    def room_of(self, player_id: str) -> Room | None:
        for room in self.rooms:
            if player_id in room.members:
                return room
        return None

    def peek_placement(self) -> tuple[int, int]:
        """(room_id, member ordinal) the next join would receive; no mutation."""
        for room in self.rooms:
            if room.has_space():
                return room.room_id, room.joined_total + 1
        return self._next_room_id, 1

    def find_or_create_room(self, player_id: str) -> Room:
        """First-fit join: earliest unstarted room with a free seat, else a new one."""
        if self.room_of(player_id) is not None:
            raise LobbyError("duplicate_membership", f"{player_id} is already in a room")
        for room in self.rooms:
            if room.has_space():
                room.members.append(player_id)
                room.joined_total += 1
                return room
        room = Room(
            room_id=self._next_room_id, zone_id=self.zone_id, members=[player_id], joined_total=1
        )
        self._next_room_id += 1
        self.rooms.append(room)
        return room

    def begin_game(self, room_id: int, initiator_id: str) -> Room:
        """Any member may start once the room has three players."""
        room = self.room(room_id)
        if initiator_id not in room.members:
            raise LobbyError("not_member", f"{initiator_id} is not in room {room_id}")
        if room.started:
            raise LobbyError("already_started", f"room {room_id} already started")
        if len(room.members) < MIN_PLAYERS_TO_START:
            raise LobbyError(
                "too_few_players",
                f"room {room_id} has {len(room.members)} players; {MIN_PLAYERS_TO_START} required",
            )
        room.started = True
        return room

    def leave_room(self, player_id: str) -> Room:
        """Remove a player from their unstarted room; empty rooms are dropped.

        Started rooms are the server's concern (disconnect policy), not the
        lobby's.
        """
        room = self.room_of(player_id)
        if room is None:
            raise LobbyError("not_in_room", f"{player_id} is not in any room")
        if room.started:
            raise LobbyError("room_started", f"room {room.room_id} already started")
        room.members.remove(player_id)
        if not room.members:
            self.rooms.remove(room)
        return room

    def listing(self) -> list[dict]:
        return [room.to_dict() for room in self.rooms]
