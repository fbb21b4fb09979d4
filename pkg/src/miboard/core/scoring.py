"""Vote tallying and point awards.

A strategy is accepted when a strict majority of the roster selected it, the
reader's selection included. Awards per round:

  * the reader earns the task's point value if the specified strategy is
    accepted;
  * a guesser who selected the accepted specified strategy earns half the
    point value (point values are even, so halves are exact);
  * every player, reader included, earns 5 points per accepted strategy they
    selected that is not the specified one.

Nothing is ever deducted: all deltas are >= 0 by construction.
"""

from __future__ import annotations

from typing import Collection, Mapping

from .types import Strategy

SIDE_AWARD_POINTS = 5


def accepted_strategies(
    votes: Mapping[str, Collection[Strategy]], player_count: int
) -> set[Strategy]:
    """Strategies selected by a strict majority (count > player_count / 2).

    `votes` maps player id -> selected strategies; a forfeited vote is an
    empty collection. Absent voters still count in the denominator.
    """
    counts: dict[Strategy, int] = {}
    for selected in votes.values():
        for strategy in selected:
            counts[strategy] = counts.get(strategy, 0) + 1
    return {s for s, c in counts.items() if 2 * c > player_count}


def score_votes(
    votes: Mapping[str, Collection[Strategy]],
    reader_id: str,
    specified: Strategy,
    point_value: int,
    player_count: int,
) -> dict[str, int]:
    """Point deltas for one round of voting (first round uses singleton sets)."""
    accepted = accepted_strategies(votes, player_count)
    deltas = {pid: 0 for pid in votes}
    for pid, selected in votes.items():
        if pid == reader_id:
            if specified in accepted:
                deltas[pid] += point_value
        elif specified in accepted and specified in selected:
            deltas[pid] += point_value // 2
        for strategy in selected:
            if strategy in accepted and strategy is not specified:
                deltas[pid] += SIDE_AWARD_POINTS
    return deltas
