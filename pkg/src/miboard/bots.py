"""Headless simulated players and the in-process game driver.

Policies decide from a `BotView`, which can be built either from the live
engine (in-process runs) or from a state_sync payload (over-the-wire runs),
so the same policy with the same seed produces the same actions in both
modes. Actions are emitted in protocol shape: a (message code, payload) pair.

Drive order is deterministic: whenever several players could act, the first
pending player in join order moves next.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from .core import (
    Game,
    GameConfig,
    LEGAL_PHASE_EDGES,
    OTHER_REASON,
    Phase,
    Strategy,
)
from .corpus import Corpus, CorpusSession, TextRecord
from .protocol import MessageCode
from .seeds import bot_seed, room_corpus_seed, room_game_seed
from .server.eventlog import EventLog
from .server.session import GameSession

STRATEGY_VALUES = [s.value for s in Strategy]


def builtin_corpus() -> Corpus:
    """Small fixed corpus so simulations need no external files."""
    texts = [
        TextRecord(
            text_id="water-cycle",
            title="The Water Cycle",
            sentences=(
                "Water covers most of the planet's surface.",
                "The sun heats the oceans and drives evaporation.",
                "Water vapor rises and cools in the atmosphere.",
                "Cooling vapor condenses into droplets that form clouds.",
                "Droplets merge until they fall as rain or snow.",
                "Runoff carries the water back toward the oceans.",
                "Some water soaks into the ground and recharges aquifers.",
                "The cycle then begins again with fresh evaporation.",
            ),
            targets=(3, 5, 6, 8),
        ),
        TextRecord(
            text_id="photosynthesis",
            title="How Plants Make Food",
            sentences=(
                "Plants capture sunlight with a green pigment called chlorophyll.",
                "Light energy splits water molecules inside the leaf.",
                "The plant takes in carbon dioxide through tiny pores.",
                "Carbon dioxide and hydrogen combine into simple sugars.",
                "Oxygen leaves the plant as a by-product.",
                "Sugars travel to wherever the plant needs energy.",
                "Starch stores the leftover energy for later use.",
            ),
            targets=(2, 4, 6, 7),
        ),
        TextRecord(
            text_id="plate-tectonics",
            title="Moving Continents",
            sentences=(
                "The outer shell of the planet is broken into rigid plates.",
                "Heat from the interior keeps the mantle slowly churning.",
                "Plates ride on the mantle and drift a few centimeters a year.",
                "Where plates collide, mountains and trenches form.",
                "Where plates separate, new crust wells up from below.",
                "Earthquakes mark the boundaries where plates grind past each other.",
            ),
            targets=(3, 5, 6),
        ),
    ]
    return Corpus(texts={t.text_id: t for t in texts})


@dataclass
class BotView:
    """What a policy is allowed to see when choosing an action."""

    me: str
    phase: Phase
    reader: str
    player_ids: list[str]
    turn: int
    assignment_strategy: str | None
    assignment_point_value: int | None
    strategy_redraws_used: int
    point_redraws_used: int
    max_redraws: int
    se_text: str | None
    my_hand: list[str]
    my_discussion_used: int
    discussion_cap: int
    reasons: dict[str, list[str]]
    pending: list[str]

    @classmethod
    def from_game(cls, session: GameSession, pid: str) -> "BotView":
        game = session.game
        assert game is not None
        config = session.config
        is_reader = pid == game.reader_id
        assignment = game.assignment if (is_reader or game.phase not in (
            Phase.TASK_DRAW, Phase.READER_COMPOSING, Phase.GUESSING
        )) else None
        return cls(
            me=pid,
            phase=game.phase,
            reader=game.reader_id,
            player_ids=[p.player_id for p in game.players],
            turn=game.turn,
            assignment_strategy=assignment.strategy.value if assignment else None,
            assignment_point_value=assignment.point_value if assignment else None,
            strategy_redraws_used=assignment.strategy_redraws_used if assignment else 0,
            point_redraws_used=assignment.point_redraws_used if assignment else 0,
            max_redraws=config.max_redraws,
            se_text=game.self_explanation,
            my_hand=[c.value for c in game.player(pid).power_cards],
            my_discussion_used=game.player(pid).discussion_messages_used,
            discussion_cap=config.discussion_message_cap,
            reasons={k: list(v) for k, v in config.reasons.items()},
            pending=game.pending_players(),
        )

    @classmethod
    def from_state_sync(cls, sync: dict, static: dict) -> "BotView":
        """Build the same view from a state_sync payload plus the begin_game
        broadcast (`static`: reasons, caps, redraw budget)."""
        me = sync["you"]
        mine = next(p for p in sync["players"] if p["player_id"] == me)
        assignment = sync.get("assignment")
        return cls(
            me=me,
            phase=Phase(sync["phase"]),
            reader=sync["reader"],
            player_ids=[p["player_id"] for p in sync["players"]],
            turn=sync["turn"],
            assignment_strategy=assignment["strategy"] if assignment else None,
            assignment_point_value=assignment["point_value"] if assignment else None,
            strategy_redraws_used=assignment["strategy_redraws_used"] if assignment else 0,
            point_redraws_used=assignment["point_redraws_used"] if assignment else 0,
            max_redraws=static["max_redraws"],
            se_text=sync.get("self_explanation"),
            my_hand=list(mine.get("power_cards") or []),
            my_discussion_used=mine["discussion_messages_used"],
            discussion_cap=static["discussion_message_cap"],
            reasons=static["reasons"],
            pending=list(sync["pending"]),
        )

    def others(self) -> list[str]:
        return [pid for pid in self.player_ids if pid != self.me]


def se_text_for(strategy_value: str, turn: int) -> str:
    """Template self-explanation; embeds the strategy so honest bots can read it."""
    return f"({strategy_value}) turn {turn}: I connect this sentence to the ideas before it."


def strategy_from_se(se_text: str | None) -> str | None:
    if se_text and se_text.startswith("(") and ")" in se_text:
        value = se_text[1 : se_text.index(")")]
        if value in STRATEGY_VALUES:
            return value
    return None


Action = tuple[MessageCode, dict]


class Policy:
    """A decision rule; emits only actions legal in the view's phase."""

    name = "policy"

    def act(self, view: BotView) -> Action:
        raise NotImplementedError


class RandomPolicy(Policy):
    """Uniform choice among the legal actions at each decision point."""

    name = "random"

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def _argument(self, view: BotView, strategy_value: str) -> dict:
        reasons = view.reasons[strategy_value]
        reason = self.rng.choice(reasons)
        span = None
        if reason != OTHER_REASON:
            length = len(view.se_text or "")
            end = self.rng.randint(1, max(1, length))
            span = [0, end]
        return {"strategy": strategy_value, "reason": reason, "span": span}

    def act(self, view: BotView) -> Action:
        phase = view.phase
        rng = self.rng
        if phase is Phase.READER_COMPOSING:
            options = ["submit"]
            if view.strategy_redraws_used < view.max_redraws:
                options.append("redraw_strategy")
            if view.point_redraws_used < view.max_redraws:
                options.append("redraw_points")
            choice = rng.choice(options)
            if choice == "submit":
                return MessageCode.SE_SUBMIT, {"text": se_text_for(view.assignment_strategy, view.turn)}
            return MessageCode.REDRAW, {"kind": choice.removeprefix("redraw_")}
        if phase is Phase.GUESSING:
            strategy = rng.choice(STRATEGY_VALUES)
            return MessageCode.GUESS, {"argument": self._argument(view, strategy)}
        if phase is Phase.DISCUSSION:
            if view.my_discussion_used < view.discussion_cap and rng.random() < 0.5:
                return MessageCode.DISCUSS_MSG, {
                    "text": f"thought {view.my_discussion_used + 1} from {view.me}"
                }
            return MessageCode.DISCUSS_PASS, {}
        if phase is Phase.SECOND_VOTE:
            if view.me == view.reader:
                strategies = [view.assignment_strategy]
                if rng.random() < 0.5:
                    extra = rng.choice([s for s in STRATEGY_VALUES if s != view.assignment_strategy])
                    strategies.append(extra)
            else:
                count = rng.choice((1, 2))
                strategies = rng.sample(STRATEGY_VALUES, count)
            return MessageCode.VOTE2, {
                "arguments": [self._argument(view, s) for s in strategies]
            }
        if phase is Phase.POWER_WINDOW:
            options: list[Action] = [(MessageCode.SKIP_POWER, {})]
            for kind in sorted(set(view.my_hand)):
                if kind == "freeze":
                    options.extend(
                        (MessageCode.PLAY_POWER, {"card": kind, "target": t}) for t in view.others()
                    )
                else:
                    options.append((MessageCode.PLAY_POWER, {"card": kind}))
            return rng.choice(options)
        raise AssertionError(f"no action for phase {phase}")


class HonestPolicy(Policy):
    """Guesses the strategy announced in the SE with probability p."""

    name = "honest"

    def __init__(self, p: float, seed: int):
        self.p = p
        self.rng = random.Random(seed)

    def act(self, view: BotView) -> Action:
        phase = view.phase
        if phase is Phase.READER_COMPOSING:
            return MessageCode.SE_SUBMIT, {"text": se_text_for(view.assignment_strategy, view.turn)}
        if phase is Phase.GUESSING:
            announced = strategy_from_se(view.se_text) or self.rng.choice(STRATEGY_VALUES)
            if self.rng.random() < self.p:
                strategy = announced
            else:
                strategy = self.rng.choice([s for s in STRATEGY_VALUES if s != announced])
            return MessageCode.GUESS, {"argument": {"strategy": strategy, "reason": OTHER_REASON, "span": None}}
        if phase is Phase.DISCUSSION:
            return MessageCode.DISCUSS_PASS, {}
        if phase is Phase.SECOND_VOTE:
            if view.me == view.reader:
                strategy = view.assignment_strategy
            else:
                strategy = strategy_from_se(view.se_text) or self.rng.choice(STRATEGY_VALUES)
            return MessageCode.VOTE2, {
                "arguments": [{"strategy": strategy, "reason": OTHER_REASON, "span": None}]
            }
        if phase is Phase.POWER_WINDOW:
            return MessageCode.SKIP_POWER, {}
        raise AssertionError(f"no action for phase {phase}")


class ScriptedPolicy(Policy):
    """Plays a fixed action list; raises when the script runs dry."""

    name = "scripted"

    def __init__(self, actions: list[Action]):
        self.actions = list(actions)

    def act(self, view: BotView) -> Action:
        if not self.actions:
            raise RuntimeError(f"script for {view.me} exhausted in phase {view.phase.value}")
        return self.actions.pop(0)


def make_policy(spec: str, seed: int) -> Policy:
    """Parse a policy spec: "random", "honest:<p>"."""
    if spec == "random":
        return RandomPolicy(seed)
    if spec.startswith("honest"):
        _, _, p = spec.partition(":")
        return HonestPolicy(float(p) if p else 1.0, seed)
    raise ValueError(f"unknown policy spec {spec!r}")


class TraceChecker:
    """Validates every transition of a game against the declared invariants."""

    def __init__(self, config: GameConfig):
        self.config = config
        self.violations: list[str] = []
        self.phase_transitions: Counter = Counter()
        self._scores: dict[str, int] | None = None

    def __call__(self, kind: str, before: Phase, after: Phase, game: Game) -> None:
        self.phase_transitions[(before.value, after.value)] += 1
        if (before, after) not in LEGAL_PHASE_EDGES:
            self.violations.append(f"illegal phase edge {before.value} -> {after.value} via {kind}")
        scores = {p.player_id: p.score for p in game.players}
        if self._scores is not None:
            for pid, score in scores.items():
                if score < self._scores[pid]:
                    self.violations.append(f"score of {pid} decreased {self._scores[pid]} -> {score} via {kind}")
        self._scores = scores
        last = self.config.board_length - 1
        for p in game.players:
            if not 0 <= p.token <= last:
                self.violations.append(f"token of {p.player_id} out of range: {p.token}")
            if p.discussion_messages_used > self.config.discussion_message_cap:
                self.violations.append(f"{p.player_id} exceeded the discussion cap")
        if kind == "task_drawn":
            assert game.assignment is not None
            if game.assignment.point_value not in self.config.point_values:
                self.violations.append(f"point value {game.assignment.point_value} not configured")
            self._check_rotation(game)
        elif kind == "roll_result":
            roll = game.rounds[-1].get("roll") if game.rounds else None
            if game._round is not None:
                roll = game._round.get("roll", roll)
            if roll:
                dice = roll["dice"]
                if len(dice) not in (1, 2) or any(not 1 <= d <= 6 for d in dice):
                    self.violations.append(f"illegal dice {dice}")
        elif kind == "vote1_result":
            self._check_unanimity(game, after)

    def _check_rotation(self, game: Game) -> None:
        """Re-derive who should read this turn from the previous round record."""
        if not game.rounds:
            return
        previous = game.rounds[-1]
        roster = [p.player_id for p in game.players]
        if previous.get("extra_turn_next"):
            expected = previous["reader"]
        else:
            i = roster.index(previous["reader"])
            for skipped_pid in previous.get("skipped_frozen", []):
                i = (i + 1) % len(roster)
                if roster[i] != skipped_pid:
                    self.violations.append(f"skip order mismatch at turn {game.turn}")
                    return
            expected = roster[(i + 1) % len(roster)]
        if game.reader_id != expected:
            self.violations.append(
                f"rotation broke at turn {game.turn}: expected {expected}, got {game.reader_id}"
            )

    def _check_unanimity(self, game: Game, after: Phase) -> None:
        assert game.assignment is not None
        specified = game.assignment.strategy
        guesser_votes = [arg for pid, arg in game.first_votes.items() if pid != game.reader_id]
        unanimous = all(arg is not None and arg.strategy is specified for arg in guesser_votes)
        if unanimous and after is not Phase.POWER_WINDOW:
            self.violations.append("unanimous first vote did not skip discussion")
        if not unanimous and after is not Phase.DISCUSSION:
            self.violations.append("split first vote did not open discussion")


@dataclass
class GameSummary:
    game_id: str
    room_id: int
    winner: str | None
    win_reason: str | None
    turns: int
    final_scores: dict[str, int]
    final_hash: str
    discussion_phases: int
    transitions: int
    # Cumulative per-player scores after each completed round.
    score_trajectory: list[dict[str, int]] = field(default_factory=list)


@dataclass
class SimReport:
    games: list[GameSummary] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)
    phase_transitions: Counter = field(default_factory=Counter)
    elapsed: float = 0.0

    @property
    def games_per_second(self) -> float:
        return len(self.games) / self.elapsed if self.elapsed > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "games": len(self.games),
            "violations": self.violations,
            "elapsed_seconds": round(self.elapsed, 3),
            "games_per_second": round(self.games_per_second, 1),
            "winners": dict(Counter(g.winner for g in self.games)),
            "win_reasons": dict(Counter(g.win_reason for g in self.games)),
            "mean_turns": (
                round(sum(g.turns for g in self.games) / len(self.games), 2) if self.games else 0
            ),
            "discussion_phases": sum(g.discussion_phases for g in self.games),
            "phase_transitions": {f"{a}->{b}": n for (a, b), n in sorted(self.phase_transitions.items())},
            "per_game": [
                {
                    "game_id": g.game_id,
                    "winner": g.winner,
                    "reason": g.win_reason,
                    "rounds": g.turns,
                    "scores": g.final_scores,
                    "score_trajectory": g.score_trajectory,
                    "hash": g.final_hash,
                }
                for g in self.games
            ],
        }

    def summary_text(self) -> str:
        d = self.to_dict()
        lines = [
            f"games: {d['games']}  elapsed: {d['elapsed_seconds']}s  rate: {d['games_per_second']}/s",
            f"violations: {len(self.violations)}",
            f"winners: {d['winners']}",
            f"win reasons: {d['win_reasons']}",
            f"mean turns: {d['mean_turns']}  discussion phases: {d['discussion_phases']}",
        ]
        lines.extend(f"  VIOLATION: {v}" for v in self.violations[:20])
        return "\n".join(lines)


def drive_session(
    session: GameSession,
    policies: dict[str, Policy],
    max_steps: int = 200_000,
) -> GameSummary:
    """Run one started session to completion with in-process bots."""
    game = session.game
    assert game is not None
    steps = 0
    while not game.is_over():
        pending = game.pending_players()
        if not pending:
            raise RuntimeError(f"game stalled in phase {game.phase.value} with no pending players")
        actor = pending[0]
        view = BotView.from_game(session, actor)
        code, payload = policies[actor].act(view)
        session.handle_frame(actor, code, payload)
        steps += 1
        if steps > max_steps:
            raise RuntimeError("game exceeded step budget; possible livelock")
    discussion_phases = sum(1 for r in game.rounds if r.get("unanimous") is False)
    running = {p.player_id: 0 for p in game.players}
    trajectory = []
    for record in game.rounds:
        for pid, delta in record.get("score_deltas", {}).items():
            running[pid] += delta
        trajectory.append(dict(running))
    return GameSummary(
        game_id=session.game_id,
        room_id=session.room_id,
        winner=game.winner_id,
        win_reason=game.win_reason,
        turns=game.turn,
        final_scores={p.player_id: p.score for p in game.players},
        final_hash=game.state_hash(),
        discussion_phases=discussion_phases,
        transitions=steps,
        score_trajectory=trajectory,
    )


def player_ids_for_room(room_id: int, count: int) -> list[str]:
    return [f"r{room_id}p{i + 1}" for i in range(count)]


def build_policies(
    spec: str | list, player_ids: list[str], base_seed: int, room_id: int
) -> dict[str, Policy]:
    """Per-player policies from a shared spec string, a list of spec strings,
    or ready-made Policy instances (scripted seats)."""
    specs = [spec] * len(player_ids) if isinstance(spec, str) else list(spec)
    assert len(specs) == len(player_ids)
    return {
        pid: specs[i] if isinstance(specs[i], Policy) else make_policy(specs[i], bot_seed(base_seed, room_id, i))
        for i, pid in enumerate(player_ids)
    }


def simulate(
    games: int,
    players: int = 4,
    policy: str | list[str] = "random",
    seed: int = 0,
    *,
    corpus: Corpus | None = None,
    log: EventLog | None = None,
    game_config: GameConfig | None = None,
    check_invariants: bool = True,
    collect_per_game: Callable[[GameSession], None] | None = None,
) -> SimReport:
    """Run N full games in-process; returns a report with 0 expected violations."""
    corpus = corpus or builtin_corpus()
    base_config = game_config or GameConfig(player_count=players)
    report = SimReport()
    started = time.perf_counter()
    for index in range(games):
        room_id = index + 1
        pids = player_ids_for_room(room_id, players)
        config = base_config.with_seed(room_game_seed(seed, room_id, 1))
        checker = TraceChecker(config) if check_invariants else None
        session = GameSession(
            room_id=room_id,
            game_id=f"r{room_id}g1",
            config=config,
            members=[(pid, pid) for pid in pids],
            corpus_session=CorpusSession(corpus, room_corpus_seed(seed, room_id)),
            log=log,
            deterministic_ts=True,
            emit_frames=False,
            on_transition=checker,
        )
        session.start()
        policies = build_policies(policy, pids, seed, room_id)
        summary = drive_session(session, policies)
        report.games.append(summary)
        if checker is not None:
            report.violations.extend(checker.violations)
            report.phase_transitions.update(checker.phase_transitions)
        if collect_per_game is not None:
            collect_per_game(session)
    report.elapsed = time.perf_counter() - started
    return report
