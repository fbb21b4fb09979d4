"""One game's server-side orchestration, independent of any transport.

`GameSession` wraps the rules engine and owns everything a host must add on
top of the pure rules: event sequencing and write-ahead logging, auto-running
the phases that need no player input, per-viewer redacted state snapshots,
inactivity/discussion timers, and the disconnect policy. It is synchronous
and clock-free (callers pass `now`), so the same code path serves the
network layer, the headless bot harness, and the timer tests.

Secrecy: the task assignment is the reader's secret until the first-round
arguments are revealed; first votes are hidden until the tally, second votes
until scoring. The event log is *not* redacted (it is the research record).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from ..core import (
    ACTOR_PHASES,
    Argument,
    Game,
    GameConfig,
    Phase,
    PowerCard,
    RuleError,
)
from ..corpus import CorpusSession, reveal_window
from ..protocol import ChatRole, MessageCode, gate_chat
from .eventlog import EventLog

DISCONNECT_GRACE = 60.0
INACTIVITY_TIMEOUT = 180.0

# (viewer, code, payload): viewer None means every connected member.
Send = tuple[str | None, MessageCode, dict]

TransitionHook = Callable[[str, Phase, Phase, Game], None]


@dataclass
class SessionTimers:
    disconnect_grace: float = DISCONNECT_GRACE
    inactivity_timeout: float = INACTIVITY_TIMEOUT


class GameSession:
    """Authoritative host-side state for a single game in a room."""

    def __init__(
        self,
        room_id: int,
        game_id: str,
        config: GameConfig,
        members: list[tuple[str, str]],
        corpus_session: CorpusSession,
        log: EventLog | None = None,
        *,
        timers: SessionTimers | None = None,
        deterministic_ts: bool = False,
        emit_frames: bool = True,
        on_transition: TransitionHook | None = None,
    ):
        self.room_id = room_id
        self.game_id = game_id
        self.config = config
        self.member_names = {pid: name for pid, name in members}
        self.player_ids = [pid for pid, _ in members]
        self.corpus_session = corpus_session
        self.log = log
        self.timers = timers or SessionTimers()
        self.deterministic_ts = deterministic_ts
        self.emit_frames = emit_frames
        self.on_transition = on_transition

        self.game: Game | None = None
        self.seq = 0
        self.disconnected: set[str] = set()
        self.departed: set[str] = set()
        self._grace_deadline: dict[str, float] = {}
        self._last_activity = 0.0
        self._discussion_started: float | None = None
        self._pending_new_text: dict | None = None

    # ------------------------------------------------------------------
    # Event plumbing
    # ------------------------------------------------------------------

    def _ts(self, now: float) -> float:
        # `now` is the caller's timer clock (often monotonic); the log keeps
        # wall time, or the seq itself when byte-stable logs are requested.
        del now
        if self.deterministic_ts:
            return float(self.seq)
        return time.time()

    def _record(self, kind: str, actor: str | None, payload: dict, now: float) -> None:
        """Persist one accepted transition (write-ahead: before any send)."""
        self.seq += 1
        if self.log is not None:
            self.log.append(
                {
                    "ts": self._ts(now),
                    "room_id": self.room_id,
                    "game_id": self.game_id,
                    "seq": self.seq,
                    "kind": kind,
                    "actor": actor,
                    "payload": payload,
                    "resulting_phase": self.game.phase.value,
                }
            )

    def _apply(
        self,
        kind: str,
        actor: str | None,
        op: Callable[[], object],
        payload_fn: Callable[[object], dict],
        now: float,
    ):
        """Run one engine op; on success log it and notify the trace hook."""
        assert self.game is not None
        before = self.game.phase
        result = op()
        payload = payload_fn(result)
        self._record(kind, actor, payload, now)
        if self.on_transition is not None:
            self.on_transition(kind, before, self.game.phase, self.game)
        self._last_activity = now
        if self.game.phase is Phase.DISCUSSION and before is not Phase.DISCUSSION:
            self._discussion_started = now
        return result, payload

    # ------------------------------------------------------------------
    # Lifecycle
    # ------------------------------------------------------------------

    def start(self, now: float = 0.0) -> list[Send]:
        """Create the game (selecting a text) and advance to the first actor."""
        assert self.game is None, "session already started"
        text = self.corpus_session.select_text()
        game = Game.new(self.config, self.player_ids, text)
        self.game = game
        sends: list[Send] = []
        self._record(
            "game_created",
            None,
            {
                "config": self.config.to_dict(),
                "players": self.player_ids,
                "names": dict(sorted(self.member_names.items())),
                "text": text.to_dict(),
            },
            now,
        )
        if self.on_transition is not None:
            self.on_transition("game_created", Phase.LOBBY, game.phase, game)
        self._last_activity = now
        if self.emit_frames:
            sends.append(
                (
                    None,
                    MessageCode.BEGIN_GAME,
                    {
                        "game_id": self.game_id,
                        "players": self.player_ids,
                        "board_length": self.config.board_length,
                        "point_win_threshold": self.config.point_win_threshold,
                        "discussion_message_cap": self.config.discussion_message_cap,
                        "discussion_time_limit": self.config.discussion_time_limit,
                        "max_redraws": self.config.max_redraws,
                        "reasons": {k: list(v) for k, v in sorted(self.config.reasons.items())},
                    },
                )
            )
        sends += self._advance(now)
        return sends + self._sync_all()

    # ------------------------------------------------------------------
    # Client actions
    # ------------------------------------------------------------------

    def handle_frame(self, pid: str, code: MessageCode, payload: dict, now: float = 0.0) -> list[Send]:
        """Apply one client game action. Raises RuleError on rejection."""
        assert self.game is not None
        game = self.game
        sends: list[Send] = []
        if code is MessageCode.REDRAW:
            if pid != game.reader_id:
                raise RuleError("not_reader", "only the reader may redraw")
            kind = payload["kind"]
            op = game.redraw_strategy if kind == "strategy" else game.redraw_points
            _, logged = self._apply(
                "redraw", pid, op, lambda a: {"kind": kind, "assignment": a.to_dict()}, now
            )
            if self.emit_frames:
                sends.append((None, MessageCode.REDRAW, {"kind": kind, "reader": pid}))
                sends.append((pid, MessageCode.REDRAW, {"kind": kind, "reader": pid, "assignment": logged["assignment"]}))
        elif code is MessageCode.SE_SUBMIT:
            text = payload["text"]
            self._apply(
                "se_submit",
                pid,
                lambda: game.submit_self_explanation(pid, text),
                lambda _: {"text": text},
                now,
            )
            if self.emit_frames:
                sends.append((None, MessageCode.SE_SUBMIT, {"text": text, "reader": pid}))
        elif code is MessageCode.GUESS:
            if payload.get("argument") is None:
                raise RuleError("missing_argument", "a guess must include an argument")
            argument = Argument.from_dict(payload["argument"])
            self._apply(
                "guess",
                pid,
                lambda: game.submit_guess(pid, argument),
                lambda _: {"argument": argument.to_dict()},
                now,
            )
            if self.emit_frames:
                sends.append((None, MessageCode.GUESS, {"player": pid}))
        elif code is MessageCode.DISCUSS_MSG:
            text = payload["text"]
            self._apply(
                "discuss_msg",
                pid,
                lambda: game.post_discussion_message(pid, text),
                lambda _: {"text": text},
                now,
            )
            if self.emit_frames:
                used = game.player(pid).discussion_messages_used
                sends.append((None, MessageCode.DISCUSS_MSG, {"text": text, "player": pid, "used": used}))
        elif code is MessageCode.DISCUSS_PASS:
            self._apply("discuss_pass", pid, lambda: game.pass_discussion(pid), lambda _: {}, now)
            if self.emit_frames:
                sends.append((None, MessageCode.DISCUSS_PASS, {"player": pid}))
        elif code is MessageCode.VOTE2:
            if payload.get("arguments") is None:
                raise RuleError("missing_arguments", "a second vote must include arguments")
            args = [Argument.from_dict(a) for a in payload["arguments"]]
            self._apply(
                "vote2",
                pid,
                lambda: game.submit_second_vote(pid, args),
                lambda _: {"arguments": [a.to_dict() for a in args]},
                now,
            )
            if self.emit_frames:
                sends.append((None, MessageCode.VOTE2, {"player": pid}))
        elif code is MessageCode.PLAY_POWER:
            card = PowerCard(payload["card"])
            target = payload.get("target")
            self._apply(
                "play_power",
                pid,
                lambda: game.play_power_card(pid, card, target),
                lambda _: {"card": card.value, "target": target},
                now,
            )
            if self.emit_frames:
                sends.append((None, MessageCode.PLAY_POWER, {"card": card.value, "target": target, "player": pid}))
        elif code is MessageCode.SKIP_POWER:
            self._apply("skip_power", pid, lambda: game.skip_power(pid), lambda _: {}, now)
            if self.emit_frames:
                sends.append((None, MessageCode.SKIP_POWER, {"player": pid}))
        else:
            raise RuleError("unexpected_code", f"{code.value} is not a game action")
        sends += self._advance(now)
        sends += self._forfeit_departed(now)
        return sends + self._sync_all()

    # ------------------------------------------------------------------
    # Server-advanced phases
    # ------------------------------------------------------------------

    def _advance(self, now: float) -> list[Send]:
        """Run phases that need no player input until an actor blocks."""
        game = self.game
        assert game is not None
        sends: list[Send] = []
        while True:
            if game.phase is Phase.TASK_DRAW:
                new_text = None
                if game.text_exhausted():
                    text = self.corpus_session.select_text()
                    game.install_text(text)
                    new_text = text.to_dict()
                reader = game.reader_id

                def draw():
                    return game.draw_task()

                assignment, logged = self._apply(
                    "task_drawn",
                    None,
                    draw,
                    lambda a: {
                        "assignment": a.to_dict(),
                        "turn": game.turn,
                        "target_index": game.current_target_index(),
                        "reveal_upto": reveal_window(game.text, game.text_turn)[1],
                        "new_text": new_text,
                    },
                    now,
                )
                if self.emit_frames:
                    base = {
                        "reader": reader,
                        "turn": game.turn,
                        "target_index": logged["target_index"],
                        "reveal_upto": logged["reveal_upto"],
                        "text_id": game.text.text_id,
                    }
                    sends.append((None, MessageCode.TASK_DRAWN, base))
                    sends.append((reader, MessageCode.TASK_DRAWN, {**base, "assignment": logged["assignment"]}))
            elif game.phase is Phase.FIRST_TALLY:
                _, logged = self._apply(
                    "vote1_result",
                    None,
                    game.tally_first_vote,
                    lambda r: {"unanimous": r["unanimous"], "deltas": r["deltas"]},
                    now,
                )
                if self.emit_frames:
                    sends.append(
                        (
                            None,
                            MessageCode.VOTE1_RESULT,
                            {
                                "arguments": {
                                    pid: arg.to_dict() if arg else None
                                    for pid, arg in sorted(game.first_votes.items())
                                },
                                "unanimous": logged["unanimous"],
                                "assignment": game.assignment.to_dict(),
                                "deltas": logged["deltas"],
                            },
                        )
                    )
            elif game.phase is Phase.SCORING:
                deltas, _ = self._apply(
                    "score_result",
                    None,
                    game.score_round,
                    lambda d: {"deltas": dict(sorted(d.items())), "accepted": game.current_round_accepted()},
                    now,
                )
                if self.emit_frames:
                    sends.append(
                        (
                            None,
                            MessageCode.SCORE_RESULT,
                            {
                                "votes": {
                                    pid: [a.to_dict() for a in args] if args is not None else None
                                    for pid, args in sorted(game.second_votes.items())
                                },
                                "accepted": game.current_round_accepted(),
                                "deltas": dict(sorted(deltas.items())),
                                "totals": {p.player_id: p.score for p in game.players},
                            },
                        )
                    )
            elif game.phase is Phase.ROLL_AND_MOVE:
                reader = game.reader_id
                outcome, _ = self._apply(
                    "roll_result",
                    None,
                    game.roll_and_move,
                    lambda o: dict(o),
                    now,
                )
                if self.emit_frames:
                    sends.append(
                        (
                            None,
                            MessageCode.ROLL_RESULT,
                            {
                                "player": reader,
                                "dice": outcome["dice"],
                                "total": outcome["total"],
                                "from_square": outcome["from"],
                                "to_square": min(outcome["from"] + outcome["total"], self.config.board_length - 1),
                            },
                        )
                    )
                    if outcome["event_card"] is not None:
                        sends.append(
                            (
                                None,
                                MessageCode.EVENT_APPLIED,
                                {
                                    "player": reader,
                                    "card": outcome["event_card"],
                                    "from_square": min(outcome["from"] + outcome["total"], self.config.board_length - 1),
                                    "to_square": outcome["to"],
                                    "power_drawn": outcome["power_drawn"],
                                },
                            )
                        )
                if game.is_over():
                    sends += self._game_over_frames()
            else:
                break
        return sends

    def _game_over_frames(self) -> list[Send]:
        game = self.game
        assert game is not None
        if not self.emit_frames:
            return []
        return [
            (
                None,
                MessageCode.GAME_OVER,
                {
                    "winner": game.winner_id,
                    "reason": game.win_reason or "aborted",
                    "scores": {p.player_id: p.score for p in game.players},
                    "tokens": {p.player_id: p.token for p in game.players},
                },
            )
        ]

    # ------------------------------------------------------------------
    # Disconnect policy and timers
    # ------------------------------------------------------------------

    def on_disconnect(self, pid: str, now: float = 0.0) -> list[Send]:
        game = self.game
        assert game is not None
        if pid in self.disconnected or game.is_over():
            return []
        self.disconnected.add(pid)
        self._grace_deadline[pid] = now + self.timers.disconnect_grace
        self._record("player_disconnected", pid, {"grace_until": self._grace_deadline[pid]}, now)
        return self._sync_all()

    def on_reconnect(self, pid: str, now: float = 0.0) -> list[Send]:
        self.disconnected.discard(pid)
        self.departed.discard(pid)
        self._grace_deadline.pop(pid, None)
        return self._sync_all()

    def live_players(self) -> list[str]:
        return [pid for pid in self.player_ids if pid not in self.departed]

    def _forfeit_departed(self, now: float) -> list[Send]:
        """Auto-pass every pending action owned by a departed player."""
        game = self.game
        assert game is not None
        sends: list[Send] = []
        progressed = True
        while progressed and not game.is_over():
            progressed = False
            for pid in game.pending_players():
                if pid not in self.departed:
                    continue
                sends += self._forfeit_one(pid, now)
                progressed = True
                break
            if progressed:
                sends += self._advance(now)
        return sends

    def _forfeit_one(self, pid: str, now: float) -> list[Send]:
        game = self.game
        assert game is not None
        if game.phase is Phase.READER_COMPOSING:
            action, op = "turn", game.skip_turn
        elif game.phase is Phase.GUESSING:
            action, op = "guess", (lambda: game.forfeit_guess(pid))
        elif game.phase is Phase.DISCUSSION:
            action, op = "discussion", (lambda: game.pass_discussion(pid))
        elif game.phase is Phase.SECOND_VOTE:
            action, op = "second_vote", (lambda: game.forfeit_second_vote(pid))
        elif game.phase is Phase.POWER_WINDOW:
            action, op = "power", game.skip_power
        else:
            return []
        self._apply("player_forfeited", pid, op, lambda _: {"action": action}, now)
        sends: list[Send] = []
        if self.emit_frames and action == "discussion":
            sends.append((None, MessageCode.DISCUSS_PASS, {"player": pid}))
        return sends

    def tick(self, now: float) -> list[Send]:
        """Fire due timers: disconnect graces, discussion limit, inactivity."""
        game = self.game
        assert game is not None
        if game.is_over():
            return []
        sends: list[Send] = []
        changed = False

        for pid, deadline in sorted(self._grace_deadline.items()):
            if now >= deadline:
                del self._grace_deadline[pid]
                self.departed.add(pid)
                changed = True
        if changed and len(self.live_players()) < 3:
            self._apply(
                "game_aborted", None, lambda: game.abort("too_few_players"), lambda _: {"reason": "too_few_players"}, now
            )
            sends += self._game_over_frames()
            return sends + self._sync_all()
        if changed:
            sends += self._forfeit_departed(now)

        if (
            game.phase is Phase.DISCUSSION
            and self._discussion_started is not None
            and now - self._discussion_started >= self.config.discussion_time_limit
        ):
            elapsed = now - self._discussion_started
            self._apply(
                "discussion_closed",
                None,
                lambda: game.close_discussion(elapsed),
                lambda _: {"elapsed": elapsed},
                now,
            )
            changed = True
            sends += self._advance(now)
            sends += self._forfeit_departed(now)

        if (
            not game.is_over()
            and game.phase in ACTOR_PHASES
            and now - self._last_activity >= self.timers.inactivity_timeout
        ):
            # Everyone the game is waiting on has gone quiet; pass them all.
            for pid in list(game.pending_players()):
                if game.phase not in ACTOR_PHASES or game.is_over():
                    break
                if pid in game.pending_players():
                    sends += self._forfeit_one(pid, now)
                    changed = True
            sends += self._advance(now)
            sends += self._forfeit_departed(now)
            self._last_activity = now

        if game.is_over():
            sends += self._game_over_frames()
        return (sends + self._sync_all()) if changed else sends

    # ------------------------------------------------------------------
    # Per-viewer state snapshots
    # ------------------------------------------------------------------

    def _sync_all(self) -> list[Send]:
        if not self.emit_frames:
            return []
        state_hash = self.game.state_hash() if self.game else ""
        return [
            (pid, MessageCode.STATE_SYNC, self.state_sync_for(pid, state_hash=state_hash))
            for pid in self.player_ids
            if pid not in self.disconnected
        ]

    def state_sync_for(self, viewer: str, state_hash: str | None = None) -> dict:
        """Redacted snapshot of the game as `viewer` may see it."""
        game = self.game
        assert game is not None
        phase = game.phase
        is_reader = viewer == game.reader_id
        assignment_revealed = phase not in (Phase.TASK_DRAW, Phase.READER_COMPOSING, Phase.GUESSING)
        first_votes_revealed = phase in (
            Phase.DISCUSSION,
            Phase.SECOND_VOTE,
            Phase.SCORING,
            Phase.POWER_WINDOW,
            Phase.ROLL_AND_MOVE,
            Phase.GAME_OVER,
        )
        second_votes_revealed = phase in (Phase.POWER_WINDOW, Phase.ROLL_AND_MOVE, Phase.GAME_OVER)
        upto = game.reveal_upto()
        role = ChatRole.READER if is_reader else ChatRole.GUESSER
        players = []
        for p in game.players:
            players.append(
                {
                    "player_id": p.player_id,
                    "name": self.member_names.get(p.player_id, p.player_id),
                    "score": p.score,
                    "token": p.token,
                    "frozen_turns": p.frozen_turns,
                    "connected": p.player_id not in self.disconnected,
                    "power_card_count": len(p.power_cards),
                    "power_cards": [c.value for c in p.power_cards] if p.player_id == viewer else None,
                    "discussion_messages_used": p.discussion_messages_used,
                    "passed_discussion": p.passed_discussion,
                    "has_first_vote": p.player_id in game.first_votes,
                    "has_second_vote": p.player_id in game.second_votes,
                }
            )
        return {
            "game_id": self.game_id,
            "room_id": self.room_id,
            "event_seq": self.seq,
            "phase": phase.value,
            "turn": game.turn,
            "you": viewer,
            "reader": game.reader_id,
            "players": players,
            "text": {
                "text_id": game.text.text_id,
                "title": game.text.title,
                "sentences": list(game.text.sentences[:upto]),
                "reveal_upto": upto,
                "target_index": game.current_target_index(),
            },
            "assignment": (
                game.assignment.to_dict()
                if game.assignment is not None and (is_reader or assignment_revealed)
                else None
            ),
            "self_explanation": game.self_explanation if phase is not Phase.READER_COMPOSING else None,
            "first_votes": (
                {pid: (arg.to_dict() if arg else None) for pid, arg in sorted(game.first_votes.items())}
                if first_votes_revealed
                else None
            ),
            "second_votes": (
                {
                    pid: ([a.to_dict() for a in args] if args is not None else None)
                    for pid, args in sorted(game.second_votes.items())
                }
                if second_votes_revealed
                else None
            ),
            "discussion": (
                {
                    "transcript": [{"player": pid, "text": text} for pid, text in game.discussion_transcript],
                    "cap": self.config.discussion_message_cap,
                }
                if phase is Phase.DISCUSSION or game.discussion_transcript
                else None
            ),
            "pending": game.pending_players(),
            "chat_enabled": gate_chat(phase, role),
            "board_length": self.config.board_length,
            "winner": game.winner_id,
            "win_reason": game.win_reason,
            "state_hash": state_hash if state_hash is not None else game.state_hash(),
        }
