"""Append-only JSON-Lines session event log, and replay back through the engine.

Every accepted state transition is persisted as one line *before* any client
hears about it (write-ahead). Events of one game carry a gapless `seq`
starting at 1, so a log suffices to reconstruct the exact final state of
every game it contains.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator

from ..core import Argument, Game, GameConfig, PowerCard
from ..corpus import TextRecord


class ReplayError(Exception):
    """Corrupt or inconsistent event log; `offset` is the 1-based line number."""

    def __init__(self, code: str, message: str, offset: int | None = None):
        where = f" (line {offset})" if offset is not None else ""
        super().__init__(f"{message}{where}")
        self.code = code
        self.offset = offset


class EventLog:
    """Single-writer append-only log. `append` flushes before returning."""

    def __init__(self, path: str | Path | None = None, stream: IO[str] | None = None):
        if (path is None) == (stream is None):
            raise ValueError("pass exactly one of path or stream")
        self.path = Path(path) if path is not None else None
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._stream = open(self.path, "a", encoding="utf-8")
        else:
            assert stream is not None
            self._stream = stream

    def append(self, event: dict) -> None:
        self._stream.write(json.dumps(event, sort_keys=True, separators=(",", ":")))
        self._stream.write("\n")
        self._stream.flush()

    def close(self) -> None:
        if self.path is not None:
            self._stream.close()


def read_events(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, event) pairs; corrupt lines raise with their offset."""
    with open(path, encoding="utf-8") as stream:
        for offset, line in enumerate(stream, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ReplayError("corrupt_line", f"unparseable event: {exc.msg}", offset) from exc
            if not isinstance(event, dict) or "kind" not in event or "seq" not in event:
                raise ReplayError("corrupt_line", "event missing kind/seq", offset)
            yield offset, event


@dataclass
class ReplayedGame:
    room_id: int
    game_id: str
    game: Game
    event_count: int

    def final_state_json(self) -> str:
        return self.game.canonical_json()

    def state_hash(self) -> str:
        return self.game.state_hash()


def _expect(condition: bool, code: str, message: str, offset: int) -> None:
    if not condition:
        raise ReplayError(code, message, offset)


def _apply_event(game: Game, event: dict, offset: int) -> None:
    kind = event["kind"]
    actor = event.get("actor")
    payload = event.get("payload") or {}
    if kind == "task_drawn":
        if payload.get("new_text") is not None:
            game.install_text(TextRecord.from_dict(payload["new_text"]))
        assignment = game.draw_task()
        logged = payload.get("assignment") or {}
        _expect(
            assignment.strategy.value == logged.get("strategy")
            and assignment.point_value == logged.get("point_value"),
            "replay_mismatch",
            "replayed task draw diverged from the logged assignment",
            offset,
        )
    elif kind == "redraw":
        if payload["kind"] == "strategy":
            game.redraw_strategy()
        else:
            game.redraw_points()
    elif kind == "se_submit":
        game.submit_self_explanation(actor, payload["text"])
    elif kind == "guess":
        game.submit_guess(actor, Argument.from_dict(payload["argument"]))
    elif kind == "vote1_result":
        result = game.tally_first_vote()
        _expect(
            result["unanimous"] == payload.get("unanimous"),
            "replay_mismatch",
            "replayed first tally diverged",
            offset,
        )
    elif kind == "discuss_msg":
        game.post_discussion_message(actor, payload["text"])
    elif kind == "discuss_pass":
        game.pass_discussion(actor)
    elif kind == "discussion_closed":
        game.close_discussion(payload["elapsed"])
    elif kind == "vote2":
        game.submit_second_vote(actor, [Argument.from_dict(a) for a in payload["arguments"]])
    elif kind == "score_result":
        deltas = game.score_round()
        _expect(deltas == payload.get("deltas"), "replay_mismatch", "replayed scoring diverged", offset)
    elif kind == "play_power":
        game.play_power_card(actor, PowerCard(payload["card"]), payload.get("target"))
    elif kind == "skip_power":
        game.skip_power()
    elif kind == "roll_result":
        outcome = game.roll_and_move()
        _expect(
            outcome["dice"] == payload.get("dice"),
            "replay_mismatch",
            "replayed dice diverged from the log",
            offset,
        )
    elif kind == "player_forfeited":
        action = payload["action"]
        if action == "turn":
            game.skip_turn()
        elif action == "guess":
            game.forfeit_guess(actor)
        elif action == "second_vote":
            game.forfeit_second_vote(actor)
        elif action == "discussion":
            game.pass_discussion(actor)
        elif action == "power":
            game.skip_power()
        else:
            raise ReplayError("corrupt_line", f"unknown forfeit action {action!r}", offset)
    elif kind == "game_aborted":
        game.abort(payload.get("reason", "aborted"))
    elif kind == "player_disconnected":
        pass  # informational; no engine transition
    else:
        raise ReplayError("corrupt_line", f"unknown event kind {kind!r}", offset)


def replay(path: str | Path) -> dict[tuple[int, str], ReplayedGame]:
    """Re-apply a log through fresh engines; returns final states per game.

    Raises ReplayError on corrupt lines, seq gaps, or divergence between the
    log and the re-computed transitions.
    """
    games: dict[tuple[int, str], ReplayedGame] = {}
    last_seq: dict[tuple[int, str], int] = {}
    for offset, event in read_events(path):
        key = (event.get("room_id"), event.get("game_id"))
        seq = event["seq"]
        expected = last_seq.get(key, 0) + 1
        _expect(
            seq == expected,
            "gap_detected",
            f"game {key[1]} expected seq {expected}, found {seq}",
            offset,
        )
        last_seq[key] = seq
        kind = event["kind"]
        if kind == "game_created":
            _expect(key not in games, "corrupt_line", f"duplicate game_created for {key[1]}", offset)
            payload = event["payload"]
            game = Game.new(
                GameConfig.from_dict(payload["config"]),
                payload["players"],
                TextRecord.from_dict(payload["text"]),
            )
            games[key] = ReplayedGame(
                room_id=event.get("room_id"), game_id=event.get("game_id"), game=game, event_count=1
            )
        else:
            _expect(key in games, "corrupt_line", f"event before game_created for {key[1]}", offset)
            replayed = games[key]
            _apply_event(replayed.game, event, offset)
            replayed.event_count += 1
        _expect(
            games[key].game.phase.value == event.get("resulting_phase"),
            "replay_mismatch",
            f"phase {games[key].game.phase.value} does not match logged {event.get('resulting_phase')}",
            offset,
        )
    return games
