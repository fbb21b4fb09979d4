"""Pure, deterministic rules engine for one game."""

from .engine import ACTOR_PHASES, Game, LEGAL_PHASE_EDGES, normalize_for_similarity
from .scoring import SIDE_AWARD_POINTS, accepted_strategies, score_votes
from .types import (
    Argument,
    DEFAULT_REASONS,
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

__all__ = [
    "ACTOR_PHASES",
    "Argument",
    "DEFAULT_REASONS",
    "EVENT_CARD_MOVES",
    "EventCard",
    "Game",
    "GameConfig",
    "LEGAL_PHASE_EDGES",
    "OTHER_REASON",
    "Phase",
    "PlayerState",
    "PowerCard",
    "RuleError",
    "SIDE_AWARD_POINTS",
    "STRATEGY_ORDER",
    "Strategy",
    "TaskAssignment",
    "accepted_strategies",
    "normalize_for_similarity",
    "score_votes",
]
