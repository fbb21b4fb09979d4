"""First-fit matchmaking against a brute-force model, plus gating rules."""

import random

import pytest

from miboard.lobby import LobbyError, MIN_PLAYERS_TO_START, ROOM_CAPACITY, Zone


def fill_room(zone, count, prefix):
    ids = [f"{prefix}{i}" for i in range(count)]
    for pid in ids:
        zone.find_or_create_room(pid)
    return ids


class TestFirstFit:
    def test_joins_first_open_room(self):
        zone = Zone("z")
        started = fill_room(zone, 3, "a")
        zone.begin_game(zone.rooms[0].room_id, started[0])
        fill_room(zone, 4, "b")  # second room, now full
        zone.find_or_create_room("c0")  # third room
        zone.find_or_create_room("c1")
        room = zone.find_or_create_room("d")
        assert room is zone.rooms[2]
        assert room.members == ["c0", "c1", "d"]

    def test_creates_room_when_none_eligible(self):
        zone = Zone("z")
        a = fill_room(zone, 3, "a")
        zone.begin_game(zone.rooms[0].room_id, a[0])
        fill_room(zone, 4, "b")
        room = zone.find_or_create_room("newcomer")
        assert room.room_id == 3
        assert room.members == ["newcomer"]

    def test_empty_zone_creates_first_room(self):
        zone = Zone("z")
        room = zone.find_or_create_room("solo")
        assert room.room_id == 1
        assert zone.listing() == [
            {"room_id": 1, "zone_id": "z", "member_count": 1, "started": False}
        ]

    def test_duplicate_membership_rejected(self):
        zone = Zone("z")
        zone.find_or_create_room("p")
        with pytest.raises(LobbyError) as err:
            zone.find_or_create_room("p")
        assert err.value.code == "duplicate_membership"


class TestBeginGame:
    def test_start_blocks_later_joins(self):
        zone = Zone("z")
        ids = fill_room(zone, 3, "a")
        room = zone.begin_game(1, ids[1])
        assert room.started
        late = zone.find_or_create_room("late")
        assert late.room_id == 2

    def test_too_few_players(self):
        zone = Zone("z")
        fill_room(zone, 2, "a")
        with pytest.raises(LobbyError) as err:
            zone.begin_game(1, "a0")
        assert err.value.code == "too_few_players"

    def test_non_member_cannot_start(self):
        zone = Zone("z")
        fill_room(zone, 3, "a")
        zone.find_or_create_room("elsewhere")  # fills same room (capacity 4)
        zone2 = Zone("z2")
        zone2.find_or_create_room("stranger")
        with pytest.raises(LobbyError) as err:
            zone.begin_game(1, "stranger")
        assert err.value.code == "not_member"

    def test_double_start_rejected(self):
        zone = Zone("z")
        ids = fill_room(zone, 3, "a")
        zone.begin_game(1, ids[0])
        with pytest.raises(LobbyError) as err:
            zone.begin_game(1, ids[0])
        assert err.value.code == "already_started"


class TestLeave:
    def test_last_member_leaving_deletes_room(self):
        zone = Zone("z")
        zone.find_or_create_room("p")
        zone.leave_room("p")
        assert zone.rooms == []

    def test_leaving_reopens_room_for_first_fit(self):
        zone = Zone("z")
        ids = fill_room(zone, 4, "a")
        zone.leave_room(ids[2])
        room = zone.find_or_create_room("b")
        assert room.room_id == 1
        assert "b" in room.members

    def test_leave_while_not_joined(self):
        zone = Zone("z")
        with pytest.raises(LobbyError) as err:
            zone.leave_room("ghost")
        assert err.value.code == "not_in_room"


class ModelLobby:
    """Independent reference model: plain dicts, re-scanned on every call."""

    def __init__(self):
        self.rooms = []  # (room_id, members list, started)
        self.next_id = 1

    def join(self, pid):
        for entry in self.rooms:
            if pid in entry["members"]:
                return "duplicate"
        for entry in self.rooms:
            if not entry["started"] and len(entry["members"]) < ROOM_CAPACITY:
                entry["members"].append(pid)
                return entry["room_id"]
        entry = {"room_id": self.next_id, "members": [pid], "started": False}
        self.next_id += 1
        self.rooms.append(entry)
        return entry["room_id"]

    def start(self, pid):
        for entry in self.rooms:
            if pid in entry["members"]:
                if entry["started"] or len(entry["members"]) < MIN_PLAYERS_TO_START:
                    return "rejected"
                entry["started"] = True
                return entry["room_id"]
        return "rejected"

    def leave(self, pid):
        for entry in self.rooms:
            if pid in entry["members"] and not entry["started"]:
                entry["members"].remove(pid)
                if not entry["members"]:
                    self.rooms.remove(entry)
                return entry["room_id"]
        return "rejected"

    def snapshot(self):
        return [(e["room_id"], tuple(e["members"]), e["started"]) for e in self.rooms]


def zone_snapshot(zone):
    return [(r.room_id, tuple(r.members), r.started) for r in zone.rooms]


def test_randomized_ops_match_model():
    rng = random.Random(20240817)
    zone = Zone("z")
    model = ModelLobby()
    population = [f"p{i}" for i in range(60)]
    joined = set()
    for step in range(10_000):
        op = rng.random()
        pid = rng.choice(population)
        if op < 0.55:
            expected = model.join(pid)
            if expected == "duplicate":
                with pytest.raises(LobbyError):
                    zone.find_or_create_room(pid)
            else:
                room = zone.find_or_create_room(pid)
                assert room.room_id == expected, f"step {step}"
                joined.add(pid)
        elif op < 0.8:
            if pid not in joined:
                continue
            expected = model.start(pid)
            room = zone.room_of(pid)
            if expected == "rejected":
                if room is not None:
                    with pytest.raises(LobbyError):
                        zone.begin_game(room.room_id, pid)
            else:
                assert zone.begin_game(room.room_id, pid).room_id == expected
        else:
            expected = model.leave(pid)
            if expected == "rejected":
                with pytest.raises(LobbyError):
                    zone.leave_room(pid)
            else:
                zone.leave_room(pid)
                joined.discard(pid)
        assert zone_snapshot(zone) == model.snapshot(), f"diverged at step {step}"
        # Gating invariants hold throughout.
        for room in zone.rooms:
            assert len(room.members) <= ROOM_CAPACITY
            if room.started:
                assert MIN_PLAYERS_TO_START <= len(room.members) <= ROOM_CAPACITY
