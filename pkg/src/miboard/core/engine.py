"""Deterministic rules engine for a single game.

One `Game` instance owns the full authoritative state of one match. It does
no I/O and never reads a clock: all randomness comes from the seeded RNG
created at construction, and elapsed time arrives as an argument where a rule
needs it. Methods mutate the instance in place and raise `RuleError` on any
action that is illegal in the current phase; an exception leaves the state
unchanged.

A turn runs through the phases like this:

    TASK_DRAW -> READER_COMPOSING -> GUESSING -> FIRST_TALLY
        -> (unanimous)  POWER_WINDOW -> ROLL_AND_MOVE -> TASK_DRAW / GAME_OVER
        -> (split)      DISCUSSION -> SECOND_VOTE -> SCORING -> POWER_WINDOW ...

TASK_DRAW, FIRST_TALLY, SCORING, and ROLL_AND_MOVE require no player input;
the host advances them by calling draw_task, tally_first_vote, score_round,
and roll_and_move.
"""

from __future__ import annotations

import hashlib
import json
import random
from typing import Iterable, Mapping, Sequence

from ..corpus import TextRecord
from . import scoring
from .types import (
    Argument,
    EVENT_CARD_MOVES,
    EventCard,
    GameConfig,
    OTHER_REASON,
    Phase,
    PlayerState,
    PowerCard,
    RuleError,
    STRATEGY_ORDER,
    Strategy,
    TaskAssignment,
)

# Every phase transition the engine can produce. Trace checkers verify that
# observed (before, after) pairs stay inside this set.
LEGAL_PHASE_EDGES: frozenset[tuple[Phase, Phase]] = frozenset(
    [
        (Phase.LOBBY, Phase.TASK_DRAW),  # game creation
        (Phase.TASK_DRAW, Phase.TASK_DRAW),  # new text installed
        (Phase.TASK_DRAW, Phase.READER_COMPOSING),
        (Phase.READER_COMPOSING, Phase.READER_COMPOSING),  # redraws
        (Phase.READER_COMPOSING, Phase.GUESSING),
        (Phase.READER_COMPOSING, Phase.TASK_DRAW),  # forfeited turn
        (Phase.GUESSING, Phase.GUESSING),
        (Phase.GUESSING, Phase.FIRST_TALLY),
        (Phase.FIRST_TALLY, Phase.POWER_WINDOW),  # unanimous
        (Phase.FIRST_TALLY, Phase.DISCUSSION),
        (Phase.DISCUSSION, Phase.DISCUSSION),
        (Phase.DISCUSSION, Phase.SECOND_VOTE),
        (Phase.SECOND_VOTE, Phase.SECOND_VOTE),
        (Phase.SECOND_VOTE, Phase.SCORING),
        (Phase.SCORING, Phase.POWER_WINDOW),
        (Phase.POWER_WINDOW, Phase.ROLL_AND_MOVE),
        (Phase.ROLL_AND_MOVE, Phase.TASK_DRAW),
        (Phase.ROLL_AND_MOVE, Phase.GAME_OVER),
    ]
    # A game can be aborted from any live phase.
    + [(p, Phase.GAME_OVER) for p in Phase if p is not Phase.GAME_OVER]
)

# Phases in which the game sits waiting for specific players to act.
ACTOR_PHASES = (
    Phase.READER_COMPOSING,
    Phase.GUESSING,
    Phase.DISCUSSION,
    Phase.SECOND_VOTE,
    Phase.POWER_WINDOW,
)


def normalize_for_similarity(text: str) -> str:
    """Case- and whitespace-insensitive form used for the verbatim-copy check."""
    return " ".join(text.lower().split())


class Game:
    """Authoritative state of one match, owned by a single logical executor."""

    def __init__(
        self,
        config: GameConfig,
        player_ids: Sequence[str],
        text: TextRecord,
    ):
        config.validate()
        if len(player_ids) != config.player_count:
            raise RuleError(
                "wrong_player_count",
                f"config says {config.player_count} players, got {len(player_ids)}",
            )
        if len(set(player_ids)) != len(player_ids):
            raise RuleError("duplicate_player", "player ids must be unique")
        text.validate()

        self.config = config
        self.players = [PlayerState(player_id=pid) for pid in player_ids]
        self._index = {pid: i for i, pid in enumerate(player_ids)}
        self.rng = random.Random(config.rng_seed)
        self.text = text
        self.text_turn = 0  # turns taken on the current text; 1-based once drawn
        self.phase = Phase.TASK_DRAW
        self.reader_index = 0
        self.turn = 0  # total turns started this game
        self.assignment: TaskAssignment | None = None
        self.self_explanation: str | None = None
        self.first_votes: dict[str, Argument | None] = {}
        self.second_votes: dict[str, list[Argument] | None] = {}
        self.discussion_transcript: list[tuple[str, str]] = []
        self.extra_turn_pending = False
        self.double_dice_pending = False
        self.winner_id: str | None = None
        self.win_reason: str | None = None
        self.rounds: list[dict] = []
        self._round: dict | None = None
        self.event_deck: list[EventCard] = []
        self.power_deck: list[PowerCard] = []
        self._reshuffle_event_deck()
        self._reshuffle_power_deck()

    # ------------------------------------------------------------------
    # Construction and deck plumbing
    # ------------------------------------------------------------------

    @classmethod
    def new(cls, config: GameConfig, player_ids: Sequence[str], text: TextRecord) -> "Game":
        return cls(config, player_ids, text)

    def _reshuffle_event_deck(self) -> None:
        self.event_deck = [
            EventCard(key)
            for key, weight in sorted(self.config.event_deck_weights.items())
            for _ in range(weight)
        ]
        self.rng.shuffle(self.event_deck)

    def _reshuffle_power_deck(self) -> None:
        self.power_deck = [
            PowerCard(key)
            for key, weight in sorted(self.config.power_deck_weights.items())
            for _ in range(weight)
        ]
        self.rng.shuffle(self.power_deck)

    def _draw_event_card(self) -> EventCard:
        if not self.event_deck:
            self._reshuffle_event_deck()
        return self.event_deck.pop()

    def _draw_power_card(self) -> PowerCard:
        if not self.power_deck:
            self._reshuffle_power_deck()
        return self.power_deck.pop()

    # ------------------------------------------------------------------
    # Introspection helpers
    # ------------------------------------------------------------------

    @property
    def reader(self) -> PlayerState:
        return self.players[self.reader_index]

    @property
    def reader_id(self) -> str:
        return self.players[self.reader_index].player_id

    def player(self, player_id: str) -> PlayerState:
        try:
            return self.players[self._index[player_id]]
        except KeyError:
            raise RuleError("unknown_player", f"{player_id!r} is not in this game") from None

    def guesser_ids(self) -> list[str]:
        return [p.player_id for i, p in enumerate(self.players) if i != self.reader_index]

    def is_over(self) -> bool:
        return self.phase is Phase.GAME_OVER

    def text_exhausted(self) -> bool:
        return self.text_turn >= len(self.text.targets)

    def current_target_index(self) -> int | None:
        """1-indexed sentence number being self-explained this turn."""
        if self.text_turn == 0:
            return None
        return self.text.targets[self.text_turn - 1]

    def reveal_upto(self) -> int:
        """Highest 1-indexed sentence currently visible to players."""
        target = self.current_target_index()
        return target if target is not None else 0

    def current_round_accepted(self) -> list[str]:
        """Accepted strategies of the round being played, once scored."""
        if self._round is not None and "accepted" in self._round:
            return list(self._round["accepted"])
        return []

    def pending_players(self) -> list[str]:
        """Players the game is waiting on, in join order."""
        if self.phase is Phase.READER_COMPOSING or self.phase is Phase.POWER_WINDOW:
            return [self.reader_id]
        if self.phase is Phase.GUESSING:
            return [pid for pid in self.guesser_ids() if pid not in self.first_votes]
        if self.phase is Phase.DISCUSSION:
            cap = self.config.discussion_message_cap
            return [
                p.player_id
                for p in self.players
                if not p.passed_discussion and p.discussion_messages_used < cap
            ]
        if self.phase is Phase.SECOND_VOTE:
            return [p.player_id for p in self.players if p.player_id not in self.second_votes]
        return []

    def _require_phase(self, phase: Phase) -> None:
        if self.phase is not phase:
            raise RuleError(
                "wrong_phase",
                f"action requires phase {phase.value}, game is in {self.phase.value}",
            )

    # ------------------------------------------------------------------
    # Text installation (corpus hand-off when targets run out)
    # ------------------------------------------------------------------

    def install_text(self, text: TextRecord) -> None:
        """Swap in a fresh text once the current one has no targets left."""
        self._require_phase(Phase.TASK_DRAW)
        if not self.text_exhausted():
            raise RuleError("text_not_exhausted", "current text still has target sentences")
        text.validate()
        self.text = text
        self.text_turn = 0

    # ------------------------------------------------------------------
    # Task draw and redraws
    # ------------------------------------------------------------------

    def draw_task(self) -> TaskAssignment:
        self._require_phase(Phase.TASK_DRAW)
        if self.text_exhausted():
            raise RuleError("text_exhausted", "no target sentences left; install a new text")
        self.turn += 1
        self.text_turn += 1
        self.assignment = TaskAssignment(
            strategy=self.rng.choice(STRATEGY_ORDER),
            point_value=self.rng.choice(self.config.point_values),
        )
        self.self_explanation = None
        self.first_votes = {}
        self.second_votes = {}
        self.discussion_transcript = []
        self._round = {
            "turn": self.turn,
            "reader": self.reader_id,
            "text_id": self.text.text_id,
            "target_index": self.current_target_index(),
            "forfeited": False,
        }
        self.phase = Phase.READER_COMPOSING
        return self.assignment

    def _redraw(self, kind: str) -> TaskAssignment:
        self._require_phase(Phase.READER_COMPOSING)
        assignment = self.assignment
        assert assignment is not None
        used = assignment.strategy_redraws_used if kind == "strategy" else assignment.point_redraws_used
        if used >= self.config.max_redraws:
            raise RuleError("redraw_exhausted", f"no {kind} redraws left this turn")
        if kind == "strategy":
            # A redraw yields a genuinely new value, never the current one.
            options = [s for s in STRATEGY_ORDER if s is not assignment.strategy]
            assignment.strategy = self.rng.choice(options)
            assignment.strategy_redraws_used += 1
        else:
            options = [v for v in self.config.point_values if v != assignment.point_value]
            if options:
                assignment.point_value = self.rng.choice(options)
            assignment.point_redraws_used += 1
        return assignment

    def redraw_strategy(self) -> TaskAssignment:
        return self._redraw("strategy")

    def redraw_points(self) -> TaskAssignment:
        return self._redraw("points")

    # ------------------------------------------------------------------
    # Self-explanation and first-round voting
    # ------------------------------------------------------------------

    def submit_self_explanation(self, player_id: str, text: str) -> None:
        self._require_phase(Phase.READER_COMPOSING)
        if player_id != self.reader_id:
            raise RuleError("not_reader", f"{player_id} is not this turn's reader")
        if not text.strip():
            raise RuleError("empty_text", "self-explanation must be non-empty")
        target = self.text.sentence(self.current_target_index() or 1)
        if normalize_for_similarity(text) == normalize_for_similarity(target):
            raise RuleError("too_similar", "self-explanation is a verbatim copy of the target sentence")
        assert self.assignment is not None
        self.self_explanation = text
        # The reader implicitly argues for the specified strategy.
        self.first_votes = {
            self.reader_id: Argument(self.assignment.strategy, OTHER_REASON, None)
        }
        self.phase = Phase.GUESSING

    def _validate_argument(self, arg: Argument) -> None:
        if not isinstance(arg.strategy, Strategy):
            raise RuleError("invalid_strategy", f"unknown strategy {arg.strategy!r}")
        if arg.reason not in self.config.reasons_for(arg.strategy):
            raise RuleError(
                "invalid_reason",
                f"reason {arg.reason!r} is not offered for {arg.strategy.value}",
            )
        se_length = len(self.self_explanation or "")
        if arg.span is None:
            if arg.reason != OTHER_REASON:
                raise RuleError("invalid_span", f"reason {arg.reason!r} requires a highlighted span")
        else:
            start, end = arg.span
            if not (isinstance(start, int) and isinstance(end, int) and 0 <= start < end <= se_length):
                raise RuleError(
                    "invalid_span",
                    f"span [{start}, {end}) outside the self-explanation (length {se_length})",
                )

    def submit_guess(self, player_id: str, argument: Argument) -> None:
        self._require_phase(Phase.GUESSING)
        self.player(player_id)
        if player_id == self.reader_id:
            raise RuleError("reader_vote", "the reader does not guess")
        if player_id in self.first_votes:
            raise RuleError("duplicate_vote", f"{player_id} already voted this round")
        self._validate_argument(argument)
        self.first_votes[player_id] = argument
        if all(pid in self.first_votes for pid in self.guesser_ids()):
            self.phase = Phase.FIRST_TALLY

    def forfeit_guess(self, player_id: str) -> None:
        """Host-driven: an absent guesser selects nothing."""
        self._require_phase(Phase.GUESSING)
        self.player(player_id)
        if player_id == self.reader_id:
            raise RuleError("reader_vote", "the reader does not guess")
        if player_id in self.first_votes:
            raise RuleError("duplicate_vote", f"{player_id} already voted this round")
        self.first_votes[player_id] = None
        if all(pid in self.first_votes for pid in self.guesser_ids()):
            self.phase = Phase.FIRST_TALLY

    def tally_first_vote(self) -> dict:
        """Resolve the reveal: unanimous agreement scores now, otherwise discuss.

        Agreement means every guesser's recorded argument names the specified
        strategy (the reader's own argument is fixed to it); a forfeited vote
        breaks unanimity.
        """
        self._require_phase(Phase.FIRST_TALLY)
        assert self.assignment is not None and self._round is not None
        specified = self.assignment.strategy
        unanimous = all(
            arg is not None and arg.strategy is specified
            for pid, arg in self.first_votes.items()
            if pid != self.reader_id
        )
        self._round["self_explanation"] = self.self_explanation
        self._round["assignment"] = self.assignment.to_dict()
        self._round["first_votes"] = {
            pid: arg.to_dict() if arg else None for pid, arg in self.first_votes.items()
        }
        self._round["unanimous"] = unanimous
        if unanimous:
            votes = {
                pid: (arg.strategy,) if arg else ()
                for pid, arg in self.first_votes.items()
            }
            deltas = self._apply_scores(votes)
            self.phase = Phase.POWER_WINDOW
            return {"unanimous": True, "deltas": deltas}
        for p in self.players:
            p.discussion_messages_used = 0
            p.passed_discussion = False
        self.discussion_transcript = []
        self.phase = Phase.DISCUSSION
        return {"unanimous": False, "deltas": None}

    # ------------------------------------------------------------------
    # Discussion
    # ------------------------------------------------------------------

    def _maybe_finish_discussion(self) -> None:
        cap = self.config.discussion_message_cap
        if all(p.passed_discussion or p.discussion_messages_used >= cap for p in self.players):
            self.phase = Phase.SECOND_VOTE

    def post_discussion_message(self, player_id: str, text: str) -> None:
        self._require_phase(Phase.DISCUSSION)
        player = self.player(player_id)
        if player.passed_discussion:
            raise RuleError("after_pass", f"{player_id} already forfeited their responses")
        if player.discussion_messages_used >= self.config.discussion_message_cap:
            raise RuleError("cap_exceeded", "no discussion contributions left")
        if not text.strip():
            raise RuleError("empty_text", "discussion message must be non-empty")
        player.discussion_messages_used += 1
        self.discussion_transcript.append((player_id, text))
        self._maybe_finish_discussion()

    def pass_discussion(self, player_id: str) -> None:
        self._require_phase(Phase.DISCUSSION)
        player = self.player(player_id)
        if player.passed_discussion:
            raise RuleError("already_passed", f"{player_id} already passed")
        player.passed_discussion = True
        self._maybe_finish_discussion()

    def close_discussion(self, elapsed: float) -> None:
        """Time-limit close; legal once `elapsed` reaches the configured limit."""
        self._require_phase(Phase.DISCUSSION)
        if elapsed < self.config.discussion_time_limit:
            raise RuleError(
                "time_limit_not_reached",
                f"discussion closes at {self.config.discussion_time_limit}s, got {elapsed}s",
            )
        self.phase = Phase.SECOND_VOTE

    # ------------------------------------------------------------------
    # Second vote and scoring
    # ------------------------------------------------------------------

    def submit_second_vote(self, player_id: str, arguments: Iterable[Argument]) -> None:
        self._require_phase(Phase.SECOND_VOTE)
        self.player(player_id)
        if player_id in self.second_votes:
            raise RuleError("duplicate_submission", f"{player_id} already submitted a second vote")
        args = list(arguments)
        if not args:
            raise RuleError("empty_vote", "second vote must select at least one strategy")
        strategies = [a.strategy for a in args]
        if len(set(strategies)) != len(strategies):
            raise RuleError("duplicate_strategy", "second vote selects each strategy at most once")
        for arg in args:
            self._validate_argument(arg)
        assert self.assignment is not None
        if player_id == self.reader_id and self.assignment.strategy not in strategies:
            raise RuleError("reader_must_defend", "the reader's vote must include the specified strategy")
        # Canonical order keeps serialized state independent of submission order.
        args.sort(key=lambda a: (STRATEGY_ORDER.index(a.strategy), a.reason, a.span or (-1, -1)))
        self.second_votes[player_id] = args
        if len(self.second_votes) == len(self.players):
            self.phase = Phase.SCORING

    def forfeit_second_vote(self, player_id: str) -> None:
        """Host-driven: an absent player selects nothing in the second round."""
        self._require_phase(Phase.SECOND_VOTE)
        self.player(player_id)
        if player_id in self.second_votes:
            raise RuleError("duplicate_submission", f"{player_id} already submitted a second vote")
        self.second_votes[player_id] = None
        if len(self.second_votes) == len(self.players):
            self.phase = Phase.SCORING

    def _apply_scores(self, votes: Mapping[str, Sequence[Strategy]]) -> dict[str, int]:
        assert self.assignment is not None and self._round is not None
        deltas = scoring.score_votes(
            votes,
            reader_id=self.reader_id,
            specified=self.assignment.strategy,
            point_value=self.assignment.point_value,
            player_count=len(self.players),
        )
        for pid, delta in deltas.items():
            self.player(pid).score += delta
        accepted = scoring.accepted_strategies(votes, len(self.players))
        self._round["accepted"] = sorted(s.value for s in accepted)
        self._round["score_deltas"] = dict(sorted(deltas.items()))
        return deltas

    def score_round(self) -> dict[str, int]:
        """Apply second-round awards once every player has voted or forfeited."""
        self._require_phase(Phase.SCORING)
        assert self._round is not None
        votes = {
            pid: tuple(a.strategy for a in args) if args else ()
            for pid, args in self.second_votes.items()
        }
        self._round["discussion"] = list(self.discussion_transcript)
        self._round["second_votes"] = {
            pid: [a.to_dict() for a in args] if args is not None else None
            for pid, args in self.second_votes.items()
        }
        deltas = self._apply_scores(votes)
        self.phase = Phase.POWER_WINDOW
        return deltas

    # ------------------------------------------------------------------
    # Power cards, dice, movement
    # ------------------------------------------------------------------

    def play_power_card(self, player_id: str, card: PowerCard, target: str | None = None) -> None:
        self._require_phase(Phase.POWER_WINDOW)
        if player_id != self.reader_id:
            raise RuleError("not_reader", "only the reader may play a power card")
        reader = self.reader
        if card not in reader.power_cards:
            raise RuleError("card_not_held", f"{player_id} holds no {card.value} card")
        if card is PowerCard.FREEZE:
            if target is None or target == player_id:
                raise RuleError("invalid_target", "freeze requires another player as target")
            self.player(target).frozen_turns += 1
        elif card is PowerCard.EXTRA_TURN:
            self.extra_turn_pending = True
        elif card is PowerCard.DOUBLE_DICE:
            self.double_dice_pending = True
        reader.power_cards.remove(card)
        assert self._round is not None
        self._round["power_played"] = {"card": card.value, "target": target}
        self.phase = Phase.ROLL_AND_MOVE

    def skip_power(self, player_id: str | None = None) -> None:
        self._require_phase(Phase.POWER_WINDOW)
        if player_id is not None and player_id != self.reader_id:
            raise RuleError("not_reader", "only the reader resolves the power window")
        self.phase = Phase.ROLL_AND_MOVE

    def roll_and_move(self) -> dict:
        """Roll, move, draw an event card, check for a win, rotate the turn.

        Landing on the final square by the die roll wins immediately and no
        event card is drawn; otherwise the event card is applied (moves clamp
        to the board) and may itself end the game.
        """
        self._require_phase(Phase.ROLL_AND_MOVE)
        assert self._round is not None
        reader = self.reader
        last = self.config.board_length - 1
        if self.double_dice_pending:
            dice = [self.rng.randint(1, 6), self.rng.randint(1, 6)]
            self.double_dice_pending = False
        else:
            dice = [self.rng.randint(1, 6)]
        start = reader.token
        reader.token = min(start + sum(dice), last)
        event = None
        power_drawn = None
        if reader.token < last:
            event = self._draw_event_card()
            move = EVENT_CARD_MOVES[event]
            if move:
                reader.token = max(0, min(reader.token + move, last))
            else:
                power_drawn = self._draw_power_card()
                reader.power_cards.append(power_drawn)
        outcome = {
            "dice": list(dice),
            "total": sum(dice),
            "from": start,
            "event_card": event.value if event else None,
            "power_drawn": power_drawn.value if power_drawn else None,
            "to": reader.token,
        }
        self._round["roll"] = outcome
        winner = self.check_win()
        if winner is not None:
            self._finish_round(via_extra_turn=False, skipped=[])
            self.winner_id = winner
            self.win_reason = (
                "board" if self.player(winner).token == last else "points"
            )
            self.phase = Phase.GAME_OVER
            outcome["winner"] = winner
            return outcome
        skipped = self._rotate()
        outcome["next_reader"] = self.reader_id
        return outcome

    def _rotate(self) -> list[str]:
        """Advance the reader seat: extra turns repeat, frozen players skip."""
        skipped: list[str] = []
        if self.extra_turn_pending:
            self.extra_turn_pending = False
            self._finish_round(via_extra_turn=True, skipped=skipped)
        else:
            i = (self.reader_index + 1) % len(self.players)
            while self.players[i].frozen_turns > 0:
                self.players[i].frozen_turns -= 1
                skipped.append(self.players[i].player_id)
                i = (i + 1) % len(self.players)
            self._finish_round(via_extra_turn=False, skipped=skipped)
            self.reader_index = i
        self.phase = Phase.TASK_DRAW
        return skipped

    def _finish_round(self, via_extra_turn: bool, skipped: list[str]) -> None:
        assert self._round is not None
        self._round["extra_turn_next"] = via_extra_turn
        self._round["skipped_frozen"] = skipped
        self.rounds.append(self._round)
        self._round = None

    def skip_turn(self) -> None:
        """Forfeit the reader's turn with no points; host-driven."""
        self._require_phase(Phase.READER_COMPOSING)
        assert self._round is not None
        self._round["forfeited"] = True
        self._round["assignment"] = self.assignment.to_dict() if self.assignment else None
        self.extra_turn_pending = False
        self.double_dice_pending = False
        self._rotate()

    # ------------------------------------------------------------------
    # Win, abort, reset
    # ------------------------------------------------------------------

    def check_win(self) -> str | None:
        """Winner id, if any player has reached the last square or the point goal.

        Ties (several players qualifying at once) resolve by higher score,
        then earlier join order.
        """
        last = self.config.board_length - 1
        threshold = self.config.point_win_threshold
        candidates = [
            (i, p)
            for i, p in enumerate(self.players)
            if p.token >= last or p.score >= threshold
        ]
        if not candidates:
            return None
        best = min(candidates, key=lambda item: (-item[1].score, item[0]))
        return best[1].player_id

    def abort(self, reason: str = "aborted") -> None:
        if self.phase is Phase.GAME_OVER:
            raise RuleError("wrong_phase", "game already over")
        if self._round is not None:
            self._round["forfeited"] = True
            self._finish_round(via_extra_turn=False, skipped=[])
        self.winner_id = None
        self.win_reason = reason
        self.phase = Phase.GAME_OVER

    def reset(self, new_seed: int, text: TextRecord) -> "Game":
        """Fresh game with the same roster; callable only after game over."""
        self._require_phase(Phase.GAME_OVER)
        return Game(
            self.config.with_seed(new_seed),
            [p.player_id for p in self.players],
            text,
        )

    # ------------------------------------------------------------------
    # Serialization
    # ------------------------------------------------------------------

    def to_dict(self) -> dict:
        """Full state as JSON-serializable data (RNG internals excluded)."""
        return {
            "config": self.config.to_dict(),
            "players": [p.to_dict() for p in self.players],
            "phase": self.phase.value,
            "reader_index": self.reader_index,
            "turn": self.turn,
            "text": self.text.to_dict(),
            "text_turn": self.text_turn,
            "assignment": self.assignment.to_dict() if self.assignment else None,
            "self_explanation": self.self_explanation,
            "first_votes": {
                pid: arg.to_dict() if arg else None
                for pid, arg in sorted(self.first_votes.items())
            },
            "second_votes": {
                pid: [a.to_dict() for a in args] if args is not None else None
                for pid, args in sorted(self.second_votes.items())
            },
            "discussion_transcript": [list(entry) for entry in self.discussion_transcript],
            "event_deck": [c.value for c in self.event_deck],
            "power_deck": [c.value for c in self.power_deck],
            "extra_turn_pending": self.extra_turn_pending,
            "double_dice_pending": self.double_dice_pending,
            "winner": self.winner_id,
            "win_reason": self.win_reason,
            "rounds": self.rounds,
        }

    def canonical_json(self) -> str:
        """Stable serialized form: sorted keys, no whitespace."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def state_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()
