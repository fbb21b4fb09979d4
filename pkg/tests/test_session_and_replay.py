"""GameSession orchestration: logging, replay, timers, disconnect policy."""

import json

import pytest

from miboard.bots import builtin_corpus, build_policies, player_ids_for_room, simulate
from miboard.core import GameConfig, Phase, RuleError
from miboard.corpus import CorpusSession
from miboard.protocol import MessageCode
from miboard.server.eventlog import EventLog, ReplayError, read_events, replay
from miboard.server.session import GameSession, SessionTimers


def make_session(tmp_path=None, *, players=3, seed=5, log=None, timers=None, emit_frames=False, config=None):
    pids = player_ids_for_room(1, players)
    cfg = (config or GameConfig(player_count=players)).with_seed(seed)
    session = GameSession(
        room_id=1,
        game_id="r1g1",
        config=cfg,
        members=[(pid, f"name-{pid}") for pid in pids],
        corpus_session=CorpusSession(builtin_corpus(), seed=seed),
        log=log,
        timers=timers,
        deterministic_ts=True,
        emit_frames=emit_frames,
    )
    return session


class TestEventLogBasics:
    def test_write_ahead_order_and_gapless_seq(self, tmp_path):
        log_path = tmp_path / "events.jsonl"
        log = EventLog(log_path)
        session = make_session(log=log, emit_frames=True)
        session.start()
        events = [e for _, e in read_events(log_path)]
        # game_created then the auto task draw, both already persisted.
        assert [e["kind"] for e in events] == ["game_created", "task_drawn"]
        assert [e["seq"] for e in events] == [1, 2]
        assert events[0]["resulting_phase"] == "task_draw"
        assert events[1]["resulting_phase"] == "reader_composing"
        log.close()

    def test_rejected_action_logs_nothing(self, tmp_path):
        log_path = tmp_path / "events.jsonl"
        log = EventLog(log_path)
        session = make_session(log=log)
        session.start()
        before = len(list(read_events(log_path)))
        with pytest.raises(RuleError):
            session.handle_frame("r1p2", MessageCode.SE_SUBMIT, {"text": "not my turn"})
        assert len(list(read_events(log_path))) == before
        log.close()

    def test_corrupt_line_reports_offset(self, tmp_path):
        log_path = tmp_path / "events.jsonl"
        log_path.write_text('{"kind":"game_created","seq":1}\nnot json at all\n')
        with pytest.raises(ReplayError) as err:
            list(read_events(log_path))
        assert err.value.offset == 2

    def test_empty_log_replays_to_nothing(self, tmp_path):
        log_path = tmp_path / "events.jsonl"
        log_path.write_text("")
        assert replay(log_path) == {}

    def test_seq_gap_detected(self, tmp_path):
        log_path = tmp_path / "events.jsonl"
        log = EventLog(log_path)
        session = make_session(log=log)
        session.start()
        lines = log_path.read_text().strip().splitlines()
        events = [json.loads(line) for line in lines]
        events[1]["seq"] = 5  # introduce a gap
        log_path.write_text("\n".join(json.dumps(e) for e in events) + "\n")
        with pytest.raises(ReplayError) as err:
            replay(log_path)
        assert err.value.code == "gap_detected"
        log.close()


class TestReplayEquivalence:
    def test_full_games_replay_byte_identically(self, tmp_path):
        log_path = tmp_path / "games.jsonl"
        log = EventLog(log_path)
        live_states = {}
        report = simulate(
            games=8,
            players=4,
            policy="random",
            seed=42,
            log=log,
            collect_per_game=lambda s: live_states.__setitem__((s.room_id, s.game_id), s.game.canonical_json()),
        )
        log.close()
        assert report.violations == []
        replayed = replay(log_path)
        assert set(replayed) == set(live_states)
        for key, live_json in live_states.items():
            assert replayed[key].final_state_json() == live_json

    def test_same_seed_same_log_bytes(self, tmp_path):
        paths = []
        for name in ("a.jsonl", "b.jsonl"):
            path = tmp_path / name
            log = EventLog(path)
            simulate(games=2, players=3, policy="random", seed=9, log=log)
            log.close()
            paths.append(path.read_bytes())
        assert paths[0] == paths[1]


class TestTimers:
    def test_discussion_timeout_forces_second_vote(self):
        session = make_session(players=3, seed=8)
        session.start()
        game = session.game
        # Drive to a split first vote.
        policies = build_policies("honest:0.0", player_ids_for_room(1, 3), 8, 1)
        while game.phase is not Phase.DISCUSSION:
            pending = game.pending_players()
            actor = pending[0]
            from miboard.bots import BotView

            code, payload = policies[actor].act(BotView.from_game(session, actor))
            if code is MessageCode.DISCUSS_PASS:
                break  # don't let bots finish the discussion themselves
            session.handle_frame(actor, code, payload, now=10.0)
        assert game.phase is Phase.DISCUSSION
        session.tick(now=10.0 + 119.0)
        assert game.phase is Phase.DISCUSSION
        session.tick(now=10.0 + 121.0)
        assert game.phase is Phase.SECOND_VOTE

    def test_reader_inactivity_skips_turn(self):
        timers = SessionTimers(inactivity_timeout=180.0)
        session = make_session(players=3, seed=8, timers=timers)
        session.start(now=0.0)
        game = session.game
        assert game.phase is Phase.READER_COMPOSING
        first_reader = game.reader_id
        session.tick(now=179.0)
        assert game.reader_id == first_reader
        session.tick(now=181.0)
        # Turn skipped with 0 points; next reader drew a task.
        assert game.phase is Phase.READER_COMPOSING
        assert game.reader_id != first_reader
        assert all(p.score == 0 for p in game.players)
        assert game.rounds[-1]["forfeited"] is True

    def test_no_timeout_events_in_fast_game(self, tmp_path):
        log_path = tmp_path / "fast.jsonl"
        log = EventLog(log_path)
        simulate(games=3, players=3, policy="random", seed=4, log=log)
        log.close()
        kinds = {e["kind"] for _, e in read_events(log_path)}
        assert "player_forfeited" not in kinds
        assert "discussion_closed" not in kinds
        assert "game_aborted" not in kinds


class TestDisconnects:
    def test_reconnect_within_grace_changes_nothing(self):
        session = make_session(players=3, seed=3, emit_frames=True)
        session.start(now=0.0)
        game = session.game
        session.on_disconnect("r1p2", now=5.0)
        assert "r1p2" in session.disconnected
        sends = session.on_reconnect("r1p2", now=15.0)
        # Reconnector gets a fresh state sync.
        assert any(to == "r1p2" and code is MessageCode.STATE_SYNC for to, code, _ in sends)
        session.tick(now=100.0)  # grace deadline long gone, but they returned
        assert not game.is_over()
        assert "r1p2" not in session.departed

    def test_reader_grace_expiry_skips_turn(self):
        session = make_session(players=4, seed=3)
        session.start(now=0.0)
        game = session.game
        reader = game.reader_id
        session.on_disconnect(reader, now=0.0)
        session.tick(now=59.0)
        assert game.reader_id == reader
        session.tick(now=61.0)
        assert game.reader_id != reader
        assert game.rounds[-1]["forfeited"] is True
        assert not game.is_over()  # 3 of 4 still live

    def test_too_many_departures_abort_game(self, tmp_path):
        log_path = tmp_path / "abort.jsonl"
        log = EventLog(log_path)
        session = make_session(players=4, seed=3, log=log)
        session.start(now=0.0)
        session.on_disconnect("r1p3", now=0.0)
        session.on_disconnect("r1p4", now=1.0)
        session.tick(now=62.0)
        game = session.game
        assert game.is_over()
        assert game.winner_id is None
        assert game.win_reason == "too_few_players"
        kinds = [e["kind"] for _, e in read_events(log_path)]
        assert kinds[-1] == "game_aborted"
        log.close()

    def test_departed_guesser_auto_forfeits_every_round(self):
        session = make_session(players=4, seed=12)
        session.start(now=0.0)
        game = session.game
        session.on_disconnect("r1p4", now=0.0)
        session.tick(now=61.0)
        assert "r1p4" in session.departed
        # Drive the rest of the game; p4 must never block it.
        policies = build_policies("honest:1.0", player_ids_for_room(1, 4), 7, 1)
        from miboard.bots import BotView

        steps = 0
        while not game.is_over():
            pending = [p for p in game.pending_players() if p != "r1p4"]
            assert pending, f"stalled waiting only on the departed player in {game.phase}"
            actor = pending[0]
            code, payload = policies[actor].act(BotView.from_game(session, actor))
            session.handle_frame(actor, code, payload, now=61.0)
            steps += 1
            assert steps < 10_000
        assert game.winner_id is not None
