"""Domain types shared by the rules engine and everything built on top of it.

All enums have a fixed declaration order; serialization relies on it, so new
members must only ever be appended.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping


class Strategy(Enum):
    """The five reading strategies players practice and identify."""

    COMPREHENSION_MONITORING = "comprehension_monitoring"
    PARAPHRASING = "paraphrasing"
    PREDICTION = "prediction"
    ELABORATION = "elaboration"
    BRIDGING = "bridging"


STRATEGY_ORDER: tuple[Strategy, ...] = tuple(Strategy)


class Phase(Enum):
    """Turn state machine. Legal edges are declared in `engine.LEGAL_PHASE_EDGES`."""

    LOBBY = "lobby"
    TASK_DRAW = "task_draw"
    READER_COMPOSING = "reader_composing"
    GUESSING = "guessing"
    FIRST_TALLY = "first_tally"
    DISCUSSION = "discussion"
    SECOND_VOTE = "second_vote"
    SCORING = "scoring"
    POWER_WINDOW = "power_window"
    ROLL_AND_MOVE = "roll_and_move"
    GAME_OVER = "game_over"


class EventCard(Enum):
    """Board effects drawn after a move. Magnitudes are bounded to 1..3."""

    FORWARD_1 = "forward_1"
    FORWARD_2 = "forward_2"
    FORWARD_3 = "forward_3"
    BACKWARD_1 = "backward_1"
    BACKWARD_2 = "backward_2"
    BACKWARD_3 = "backward_3"
    DRAW_POWER = "draw_power"


# Signed token displacement per event card (0 = draw a power card instead).
EVENT_CARD_MOVES: dict[EventCard, int] = {
    EventCard.FORWARD_1: 1,
    EventCard.FORWARD_2: 2,
    EventCard.FORWARD_3: 3,
    EventCard.BACKWARD_1: -1,
    EventCard.BACKWARD_2: -2,
    EventCard.BACKWARD_3: -3,
    EventCard.DRAW_POWER: 0,
}


class PowerCard(Enum):
    """Held abilities the reader may use before rolling."""

    EXTRA_TURN = "extra_turn"
    DOUBLE_DICE = "double_dice"
    FREEZE = "freeze"


OTHER_REASON = "other"

# Per-strategy reason codes offered by the cascading argument builder. Each
# strategy ends with "other", which is the one reason that does not require a
# highlighted span. The map is configurable per game via GameConfig.reasons.
DEFAULT_REASONS: dict[Strategy, tuple[str, ...]] = {
    Strategy.COMPREHENSION_MONITORING: (
        "expressed_understanding",
        "expressed_confusion",
        "checked_own_understanding",
        OTHER_REASON,
    ),
    Strategy.PARAPHRASING: (
        "restated_in_own_words",
        "simplified_wording",
        "reordered_the_ideas",
        OTHER_REASON,
    ),
    Strategy.PREDICTION: (
        "anticipated_next_content",
        "forecast_an_outcome",
        "posed_an_expectation",
        OTHER_REASON,
    ),
    Strategy.ELABORATION: (
        "linked_to_prior_knowledge",
        "added_an_example",
        "connected_to_experience",
        OTHER_REASON,
    ),
    Strategy.BRIDGING: (
        "linked_to_a_specific_sentence",
        "linked_with_a_previous_idea",
        "linked_to_a_global_theme",
        OTHER_REASON,
    ),
}


class RuleError(Exception):
    """A game action rejected by the rules engine.

    `code` is a stable machine-readable identifier carried onto the wire in
    Error frames; `message` is for humans.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _require(condition: bool, code: str, message: str) -> None:
    if not condition:
        raise RuleError(code, message)


@dataclass(frozen=True)
class Argument:
    """One justified strategy selection: strategy, reason, highlighted span.

    `span` is a [start, end) character range into the round's self-explanation.
    It is required for every reason except "other".
    """

    strategy: Strategy
    reason: str
    span: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "reason": self.reason,
            "span": list(self.span) if self.span is not None else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Argument":
        span = data.get("span")
        return cls(
            strategy=Strategy(data["strategy"]),
            reason=data["reason"],
            span=(span[0], span[1]) if span is not None else None,
        )


@dataclass
class TaskAssignment:
    """The turn's automated task card: one strategy and one point value."""

    strategy: Strategy
    point_value: int
    strategy_redraws_used: int = 0
    point_redraws_used: int = 0

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "point_value": self.point_value,
            "strategy_redraws_used": self.strategy_redraws_used,
            "point_redraws_used": self.point_redraws_used,
        }


@dataclass
class PlayerState:
    """Per-player game state. Scores only ever increase."""

    player_id: str
    score: int = 0
    token: int = 0
    power_cards: list[PowerCard] = field(default_factory=list)
    frozen_turns: int = 0
    discussion_messages_used: int = 0
    passed_discussion: bool = False

    def to_dict(self) -> dict:
        return {
            "player_id": self.player_id,
            "score": self.score,
            "token": self.token,
            "power_cards": [c.value for c in self.power_cards],
            "frozen_turns": self.frozen_turns,
            "discussion_messages_used": self.discussion_messages_used,
            "passed_discussion": self.passed_discussion,
        }


def _default_event_weights() -> dict[str, int]:
    return {c.value: 1 for c in EventCard}


def _default_power_weights() -> dict[str, int]:
    return {c.value: 1 for c in PowerCard}


def _default_reasons() -> dict[str, list[str]]:
    return {s.value: list(DEFAULT_REASONS[s]) for s in Strategy}


@dataclass
class GameConfig:
    """Every tunable rule constant lives here.

    Defaults give the standard game: 3-4 players, even point values 12-20,
    a 40-square board, 100 points to win, 3 discussion messages per player,
    a 120 s discussion limit, and one redraw of each kind per turn.
    """

    player_count: int = 4
    point_values: tuple[int, ...] = (12, 14, 16, 18, 20)
    board_length: int = 40
    point_win_threshold: int = 100
    discussion_message_cap: int = 3
    discussion_time_limit: float = 120.0
    max_redraws: int = 1
    event_deck_weights: dict[str, int] = field(default_factory=_default_event_weights)
    power_deck_weights: dict[str, int] = field(default_factory=_default_power_weights)
    reasons: dict[str, list[str]] = field(default_factory=_default_reasons)
    rng_seed: int = 0

    def validate(self) -> None:
        _require(self.player_count in (3, 4), "bad_config", "player_count must be 3 or 4")
        _require(len(self.point_values) > 0, "bad_config", "point_values must be non-empty")
        for v in self.point_values:
            _require(isinstance(v, int) and v > 0 and v % 2 == 0, "bad_config",
                     f"point values must be positive even integers, got {v!r}")
        _require(self.board_length >= 2, "bad_config", "board_length must be at least 2")
        _require(self.point_win_threshold > 0, "bad_config", "point_win_threshold must be positive")
        _require(self.discussion_message_cap > 0, "bad_config", "discussion_message_cap must be positive")
        _require(self.discussion_time_limit > 0, "bad_config", "discussion_time_limit must be positive")
        _require(self.max_redraws >= 0, "bad_config", "max_redraws must be non-negative")
        for name, weights, allowed in (
            ("event_deck_weights", self.event_deck_weights, {c.value for c in EventCard}),
            ("power_deck_weights", self.power_deck_weights, {c.value for c in PowerCard}),
        ):
            _require(any(w > 0 for w in weights.values()), "bad_config", f"{name} has no positive weight")
            for key, w in weights.items():
                _require(key in allowed, "bad_config", f"{name} has unknown card {key!r}")
                _require(isinstance(w, int) and w >= 0, "bad_config", f"{name}[{key!r}] must be a non-negative int")
        for strategy in Strategy:
            codes = self.reasons.get(strategy.value)
            _require(bool(codes), "bad_config", f"no reasons configured for {strategy.value}")
            _require(OTHER_REASON in codes, "bad_config",
                     f"reason list for {strategy.value} must include {OTHER_REASON!r}")

    def reasons_for(self, strategy: Strategy) -> list[str]:
        return self.reasons[strategy.value]

    def with_seed(self, seed: int) -> "GameConfig":
        return replace(self, rng_seed=seed)

    def to_dict(self) -> dict:
        return {
            "player_count": self.player_count,
            "point_values": list(self.point_values),
            "board_length": self.board_length,
            "point_win_threshold": self.point_win_threshold,
            "discussion_message_cap": self.discussion_message_cap,
            "discussion_time_limit": self.discussion_time_limit,
            "max_redraws": self.max_redraws,
            "event_deck_weights": dict(sorted(self.event_deck_weights.items())),
            "power_deck_weights": dict(sorted(self.power_deck_weights.items())),
            "reasons": {k: list(v) for k, v in sorted(self.reasons.items())},
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "GameConfig":
        kwargs = dict(data)
        if "point_values" in kwargs:
            kwargs["point_values"] = tuple(kwargs["point_values"])
        config = cls(**kwargs)
        config.validate()
        return config
