"""Rules-engine behavior: phases, voting, discussion, cards, movement, wins."""

import pytest

from miboard.core import (
    Argument,
    EventCard,
    Game,
    GameConfig,
    OTHER_REASON,
    Phase,
    PowerCard,
    RuleError,
    Strategy,
)
from conftest import make_config, make_text, other_arg

PIDS3 = ["p0", "p1", "p2"]
PIDS4 = ["p0", "p1", "p2", "p3"]


def new_game(players=4, seed=1, **overrides):
    pids = PIDS4 if players == 4 else PIDS3
    return Game.new(make_config(players, seed, **overrides), pids, make_text())


def start_round(game, se="I think this links back to the sun heating the oceans."):
    """Advance a fresh TASK_DRAW game to GUESSING."""
    game.draw_task()
    game.submit_self_explanation(game.reader_id, se)
    return game.assignment


def reach_power_window(game):
    """Drive one unanimous round to the power window."""
    assignment = start_round(game)
    for pid in game.guesser_ids():
        game.submit_guess(pid, other_arg(assignment.strategy))
    game.tally_first_vote()
    assert game.phase is Phase.POWER_WINDOW


class TestNewGame:
    def test_initial_state(self):
        game = new_game(players=3, seed=42)
        assert len(game.players) == 3
        assert [p.score for p in game.players] == [0, 0, 0]
        assert [p.token for p in game.players] == [0, 0, 0]
        assert game.phase is Phase.TASK_DRAW
        assert game.reader_id == "p0"

    def test_wrong_player_count(self):
        with pytest.raises(RuleError) as err:
            Game.new(make_config(players=3), ["a", "b"], make_text())
        assert err.value.code == "wrong_player_count"
        with pytest.raises(RuleError):
            Game.new(GameConfig(player_count=5), PIDS4 + ["p4"], make_text())

    def test_same_seed_is_bitwise_identical(self):
        a = new_game(seed=7)
        b = new_game(seed=7)
        assert a.canonical_json() == b.canonical_json()
        a.draw_task()
        b.draw_task()
        assert a.canonical_json() == b.canonical_json()

    def test_config_validation(self):
        with pytest.raises(RuleError):
            GameConfig(point_values=(13,)).validate()  # odd value
        with pytest.raises(RuleError):
            GameConfig(point_values=()).validate()
        with pytest.raises(RuleError):
            GameConfig(board_length=1).validate()


class TestTaskDraw:
    def test_draw_uses_configured_values(self):
        game = new_game(seed=11)
        assignment = game.draw_task()
        assert assignment.point_value in (12, 14, 16, 18, 20)
        assert isinstance(assignment.strategy, Strategy)
        assert game.phase is Phase.READER_COMPOSING

    def test_draw_wrong_phase(self):
        game = new_game()
        game.draw_task()
        with pytest.raises(RuleError) as err:
            game.draw_task()
        assert err.value.code == "wrong_phase"

    def test_seeded_draw_repeats(self):
        first = new_game(seed=7).draw_task()
        second = new_game(seed=7).draw_task()
        assert first.strategy is second.strategy
        assert first.point_value == second.point_value


class TestRedraw:
    def test_redraw_changes_value_and_spends_budget(self):
        game = new_game(seed=3)
        before = game.draw_task().strategy
        after = game.redraw_strategy().strategy
        assert after is not before
        with pytest.raises(RuleError) as err:
            game.redraw_strategy()
        assert err.value.code == "redraw_exhausted"

    def test_point_redraw_budget_is_separate(self):
        game = new_game(seed=3)
        game.draw_task()
        game.redraw_strategy()
        game.redraw_points()  # still allowed
        with pytest.raises(RuleError):
            game.redraw_points()

    def test_redraw_wrong_phase(self):
        game = new_game()
        start_round(game)
        with pytest.raises(RuleError) as err:
            game.redraw_strategy()
        assert err.value.code == "wrong_phase"


class TestSelfExplanation:
    def test_happy_path(self):
        game = new_game()
        game.draw_task()
        game.submit_self_explanation("p0", "This connects to what the sun does earlier.")
        assert game.phase is Phase.GUESSING
        # Reader's implicit argument for the specified strategy is recorded.
        assert game.first_votes["p0"].strategy is game.assignment.strategy

    def test_verbatim_copy_rejected(self):
        game = new_game()
        game.draw_task()
        target = game.text.sentence(game.current_target_index())
        with pytest.raises(RuleError) as err:
            game.submit_self_explanation("p0", "  " + target.upper() + "  ")
        assert err.value.code == "too_similar"
        assert game.phase is Phase.READER_COMPOSING

    def test_guesser_cannot_submit(self):
        game = new_game()
        game.draw_task()
        with pytest.raises(RuleError) as err:
            game.submit_self_explanation("p1", "an explanation")
        assert err.value.code == "not_reader"

    def test_empty_rejected(self):
        game = new_game()
        game.draw_task()
        with pytest.raises(RuleError) as err:
            game.submit_self_explanation("p0", "   ")
        assert err.value.code == "empty_text"


class TestGuessing:
    def test_last_guess_triggers_tally(self):
        game = new_game()
        assignment = start_round(game)
        guessers = game.guesser_ids()
        for pid in guessers[:-1]:
            game.submit_guess(pid, other_arg(assignment.strategy))
            assert game.phase is Phase.GUESSING
        game.submit_guess(guessers[-1], other_arg(assignment.strategy))
        assert game.phase is Phase.FIRST_TALLY

    def test_duplicate_vote(self):
        game = new_game()
        start_round(game)
        game.submit_guess("p1", other_arg(Strategy.BRIDGING))
        with pytest.raises(RuleError) as err:
            game.submit_guess("p1", other_arg(Strategy.PREDICTION))
        assert err.value.code == "duplicate_vote"

    def test_reader_cannot_guess(self):
        game = new_game()
        start_round(game)
        with pytest.raises(RuleError) as err:
            game.submit_guess("p0", other_arg(Strategy.BRIDGING))
        assert err.value.code == "reader_vote"

    def test_span_bounds(self):
        game = new_game()
        start_round(game, se="Short text.")
        arg = Argument(Strategy.BRIDGING, "linked_to_a_specific_sentence", (0, 99))
        with pytest.raises(RuleError) as err:
            game.submit_guess("p1", arg)
        assert err.value.code == "invalid_span"

    def test_span_required_unless_reason_is_other(self):
        game = new_game()
        start_round(game, se="Some longer explanation to highlight.")
        with pytest.raises(RuleError) as err:
            game.submit_guess("p1", Argument(Strategy.BRIDGING, "linked_to_a_global_theme", None))
        assert err.value.code == "invalid_span"
        game.submit_guess("p1", Argument(Strategy.BRIDGING, "linked_to_a_global_theme", (0, 4)))

    def test_unknown_reason(self):
        game = new_game()
        start_round(game)
        with pytest.raises(RuleError) as err:
            game.submit_guess("p1", Argument(Strategy.BRIDGING, "because", None))
        assert err.value.code == "invalid_reason"


class TestFirstTally:
    def test_unanimous_scores_and_skips_discussion(self):
        game = new_game()
        assignment = start_round(game)
        for pid in game.guesser_ids():
            game.submit_guess(pid, other_arg(assignment.strategy))
        result = game.tally_first_vote()
        assert result["unanimous"] is True
        assert game.phase is Phase.POWER_WINDOW
        p = assignment.point_value
        assert game.player("p0").score == p
        for pid in game.guesser_ids():
            assert game.player(pid).score == p // 2

    def test_split_enters_discussion(self):
        game = new_game()
        assignment = start_round(game)
        guessers = game.guesser_ids()
        wrong = next(s for s in Strategy if s is not assignment.strategy)
        game.submit_guess(guessers[0], other_arg(assignment.strategy))
        game.submit_guess(guessers[1], other_arg(assignment.strategy))
        game.submit_guess(guessers[2], other_arg(wrong))
        result = game.tally_first_vote()
        assert result["unanimous"] is False
        assert game.phase is Phase.DISCUSSION
        assert all(p.score == 0 for p in game.players)

    def test_three_player_split_discusses_even_without_conflict_majority(self):
        game = new_game(players=3)
        assignment = start_round(game)
        wrong = next(s for s in Strategy if s is not assignment.strategy)
        game.submit_guess("p1", other_arg(assignment.strategy))
        game.submit_guess("p2", other_arg(wrong))
        assert game.tally_first_vote()["unanimous"] is False
        assert game.phase is Phase.DISCUSSION

    def test_forfeited_guess_breaks_unanimity(self):
        game = new_game(players=3)
        assignment = start_round(game)
        game.submit_guess("p1", other_arg(assignment.strategy))
        game.forfeit_guess("p2")
        assert game.tally_first_vote()["unanimous"] is False


def drive_to_second_vote(game):
    """One split round: two right, rest wrong, everyone passes discussion."""
    assignment = start_round(game)
    guessers = game.guesser_ids()
    wrong = next(s for s in Strategy if s is not assignment.strategy)
    for pid in guessers[:-1]:
        game.submit_guess(pid, other_arg(assignment.strategy))
    game.submit_guess(guessers[-1], other_arg(wrong))
    game.tally_first_vote()
    for pid in [p.player_id for p in game.players]:
        game.pass_discussion(pid)
    assert game.phase is Phase.SECOND_VOTE
    return assignment


class TestDiscussion:
    def _split(self, game):
        assignment = start_round(game)
        guessers = game.guesser_ids()
        wrong = next(s for s in Strategy if s is not assignment.strategy)
        for pid in guessers[:-1]:
            game.submit_guess(pid, other_arg(assignment.strategy))
        game.submit_guess(guessers[-1], other_arg(wrong))
        game.tally_first_vote()

    def test_message_cap(self):
        game = new_game()
        self._split(game)
        for i in range(3):
            game.post_discussion_message("p1", f"point {i}")
        with pytest.raises(RuleError) as err:
            game.post_discussion_message("p1", "one more")
        assert err.value.code == "cap_exceeded"

    def test_no_posting_after_pass(self):
        game = new_game()
        self._split(game)
        game.pass_discussion("p1")
        with pytest.raises(RuleError) as err:
            game.post_discussion_message("p1", "changed my mind")
        assert err.value.code == "after_pass"

    def test_all_pass_moves_to_second_vote(self):
        game = new_game()
        self._split(game)
        for pid in ["p0", "p1", "p2", "p3"]:
            game.pass_discussion(pid)
        assert game.phase is Phase.SECOND_VOTE

    def test_everyone_at_cap_moves_on(self):
        game = new_game()
        self._split(game)
        for pid in ["p0", "p1", "p2", "p3"]:
            for i in range(3):
                game.post_discussion_message(pid, f"{pid} msg {i}")
        assert game.phase is Phase.SECOND_VOTE

    def test_time_limit_close(self):
        game = new_game()
        self._split(game)
        game.post_discussion_message("p1", "only one message")
        with pytest.raises(RuleError) as err:
            game.close_discussion(elapsed=119.0)
        assert err.value.code == "time_limit_not_reached"
        game.close_discussion(elapsed=120.0)
        assert game.phase is Phase.SECOND_VOTE


class TestSecondVote:
    def test_multi_select_and_scoring(self):
        game = new_game()
        assignment = drive_to_second_vote(game)
        spec = assignment.strategy
        other = next(s for s in Strategy if s is not spec)
        game.submit_second_vote("p0", [other_arg(spec)])
        game.submit_second_vote("p1", [other_arg(spec)])
        game.submit_second_vote("p2", [other_arg(spec), other_arg(other)])
        game.submit_second_vote("p3", [other_arg(other)])
        assert game.phase is Phase.SCORING
        deltas = game.score_round()
        p = assignment.point_value
        assert deltas == {"p0": p, "p1": p // 2, "p2": p // 2, "p3": 0}
        assert game.phase is Phase.POWER_WINDOW

    def test_empty_vote_rejected(self):
        game = new_game()
        drive_to_second_vote(game)
        with pytest.raises(RuleError) as err:
            game.submit_second_vote("p1", [])
        assert err.value.code == "empty_vote"

    def test_duplicate_submission(self):
        game = new_game()
        assignment = drive_to_second_vote(game)
        game.submit_second_vote("p1", [other_arg(assignment.strategy)])
        with pytest.raises(RuleError) as err:
            game.submit_second_vote("p1", [other_arg(assignment.strategy)])
        assert err.value.code == "duplicate_submission"

    def test_reader_must_defend_specified(self):
        game = new_game()
        assignment = drive_to_second_vote(game)
        other = next(s for s in Strategy if s is not assignment.strategy)
        with pytest.raises(RuleError) as err:
            game.submit_second_vote("p0", [other_arg(other)])
        assert err.value.code == "reader_must_defend"

    def test_forfeits_complete_the_round(self):
        game = new_game()
        assignment = drive_to_second_vote(game)
        game.submit_second_vote("p0", [other_arg(assignment.strategy)])
        for pid in ("p1", "p2", "p3"):
            game.forfeit_second_vote(pid)
        deltas = game.score_round()
        assert deltas == {"p0": 0, "p1": 0, "p2": 0, "p3": 0}  # 1 of 4 is no majority


class TestPowerAndMovement:
    def test_play_card_not_held(self):
        game = new_game()
        reach_power_window(game)
        with pytest.raises(RuleError) as err:
            game.play_power_card("p0", PowerCard.DOUBLE_DICE)
        assert err.value.code == "card_not_held"

    def test_freeze_skips_target(self):
        game = new_game()
        reach_power_window(game)
        game.reader.power_cards.append(PowerCard.FREEZE)
        game.play_power_card("p0", PowerCard.FREEZE, target="p1")
        assert game.player("p1").frozen_turns == 1
        game.roll_and_move()
        assert game.phase is Phase.TASK_DRAW
        assert game.reader_id == "p2"  # p1 skipped
        assert game.player("p1").frozen_turns == 0

    def test_freeze_needs_other_target(self):
        game = new_game()
        reach_power_window(game)
        game.reader.power_cards.append(PowerCard.FREEZE)
        with pytest.raises(RuleError) as err:
            game.play_power_card("p0", PowerCard.FREEZE, target="p0")
        assert err.value.code == "invalid_target"

    def test_double_dice_rolls_two(self):
        game = new_game(seed=5)
        reach_power_window(game)
        game.reader.power_cards.append(PowerCard.DOUBLE_DICE)
        game.play_power_card("p0", PowerCard.DOUBLE_DICE)
        outcome = game.roll_and_move()
        assert len(outcome["dice"]) == 2
        assert 2 <= outcome["total"] <= 12

    def test_extra_turn_repeats_reader(self):
        game = new_game()
        reach_power_window(game)
        game.reader.power_cards.append(PowerCard.EXTRA_TURN)
        game.play_power_card("p0", PowerCard.EXTRA_TURN)
        game.roll_and_move()
        assert game.phase is Phase.TASK_DRAW
        assert game.reader_id == "p0"

    def test_skip_power_moves_to_roll(self):
        game = new_game()
        reach_power_window(game)
        game.skip_power("p0")
        assert game.phase is Phase.ROLL_AND_MOVE

    def test_roll_bounds_and_rotation(self):
        game = new_game(seed=9)
        reach_power_window(game)
        game.skip_power()
        outcome = game.roll_and_move()
        assert 1 <= outcome["total"] <= 6
        assert 0 <= game.player("p0").token <= game.config.board_length - 1
        assert game.reader_id == "p1"

    def test_backward_event_clamps_at_zero(self):
        game = new_game()
        reach_power_window(game)
        game.skip_power()
        # Force a known roll/event by stacking the decks and patching the RNG draw.
        game.event_deck = [EventCard.BACKWARD_3]
        game.rng = _FixedRoll(1)
        game.roll_and_move()
        assert game.player("p0").token == 0

    def test_landing_on_last_square_wins_without_event(self):
        game = new_game()
        reach_power_window(game)
        game.skip_power()
        game.reader.token = game.config.board_length - 2
        deck_before = list(game.event_deck)
        game.rng = _FixedRoll(6)
        outcome = game.roll_and_move()
        assert game.phase is Phase.GAME_OVER
        assert game.winner_id == "p0"
        assert game.win_reason == "board"
        assert outcome["event_card"] is None
        assert game.event_deck == deck_before


class _FixedRoll:
    """Stub RNG: fixed die rolls, never used for anything else."""

    def __init__(self, value):
        self.value = value

    def randint(self, a, b):
        return self.value


class TestWinAndReset:
    def test_points_threshold_win(self):
        game = new_game()
        game.player("p2").score = 100
        assert game.check_win() == "p2"

    def test_no_winner_mid_board(self):
        game = new_game()
        game.player("p1").score = 99
        game.player("p1").token = 20
        assert game.check_win() is None

    def test_tie_breaks_on_score_then_join_order(self):
        game = new_game()
        game.player("p1").score = 100
        game.player("p3").score = 120
        assert game.check_win() == "p3"
        game.player("p1").score = 120
        assert game.check_win() == "p1"

    def test_reset_requires_game_over(self):
        game = new_game()
        with pytest.raises(RuleError) as err:
            game.reset(2, make_text("other"))
        assert err.value.code == "wrong_phase"

    def test_reset_gives_fresh_game(self):
        game = new_game()
        game.abort()
        fresh = game.reset(99, make_text("next-text"))
        assert fresh.phase is Phase.TASK_DRAW
        assert [p.score for p in fresh.players] == [0, 0, 0, 0]
        assert [p.token for p in fresh.players] == [0, 0, 0, 0]
        assert fresh.text.text_id == "next-text"

    def test_distinct_seeds_draw_differently_somewhere(self):
        draws = set()
        for seed in range(20):
            game = new_game(seed=seed)
            a = game.draw_task()
            draws.add((a.strategy, a.point_value))
        assert len(draws) > 1


class TestTextFlow:
    def test_text_exhaustion_and_install(self):
        game = new_game(players=3)
        # Text has 3 targets; burn them via forfeited turns.
        for _ in range(3):
            game.draw_task()
            game.skip_turn()
        assert game.text_exhausted()
        with pytest.raises(RuleError) as err:
            game.draw_task()
        assert err.value.code == "text_exhausted"
        game.install_text(make_text("second", targets=(2, 4)))
        game.draw_task()
        assert game.current_target_index() == 2

    def test_install_rejected_while_targets_remain(self):
        game = new_game()
        with pytest.raises(RuleError) as err:
            game.install_text(make_text("second"))
        assert err.value.code == "text_not_exhausted"

    def test_skip_turn_rotates_without_points(self):
        game = new_game()
        game.draw_task()
        game.skip_turn()
        assert game.phase is Phase.TASK_DRAW
        assert game.reader_id == "p1"
        assert all(p.score == 0 for p in game.players)
        assert game.rounds[-1]["forfeited"] is True
