"""Regenerates round.json: real wire frames for one full 3-player round.

Run from the repository root:

    python frontend/test/fixtures/generate_round.py

The round is scripted: reader submits an SE, one guesser agrees, one
disagrees (planting a discussion), everyone passes after one contribution,
the second vote accepts the specified strategy, the reader skips the power
window, and the die roll rotates the turn.
"""

import json
from pathlib import Path

from miboard.bots import builtin_corpus
from miboard.core import GameConfig
from miboard.corpus import CorpusSession
from miboard.protocol import MessageCode, normalize_payload
from miboard.server.session import GameSession

SEED = 424242
PLAYERS = ["r1p1", "r1p2", "r1p3"]
NAMES = {"r1p1": "Ada", "r1p2": "Bo", "r1p3": "Cy"}


def main() -> None:
    session = GameSession(
        room_id=1,
        game_id="r1g1",
        config=GameConfig(player_count=3, rng_seed=SEED),
        members=[(pid, NAMES[pid]) for pid in PLAYERS],
        corpus_session=CorpusSession(builtin_corpus(), seed=SEED),
        deterministic_ts=True,
        emit_frames=True,
    )
    streams = {pid: [] for pid in PLAYERS}
    counters = {pid: 0 for pid in PLAYERS}

    def push(to, code, payload):
        targets = PLAYERS if to is None else [to]
        for pid in targets:
            counters[pid] += 1
            streams[pid].append(
                {
                    "v": 1,
                    "seq": counters[pid],
                    "code": code.value,
                    "payload": normalize_payload(code, payload),
                }
            )

    # Roster frames ahead of the game (what the hub would send).
    for viewer in PLAYERS:
        push(
            viewer,
            MessageCode.ROOM_ASSIGNED,
            {
                "room_id": 1,
                "zone": "main",
                "player_id": viewer,
                "resume_token": f"resume-{viewer}",
                "members": [
                    {"player_id": pid, "name": NAMES[pid], "connected": True} for pid in PLAYERS
                ],
                "started": False,
            },
        )

    def dispatch(sends):
        for to, code, payload in sends:
            push(to, code, payload)

    dispatch(session.start())
    game = session.game
    reader = game.reader_id
    guessers = game.guesser_ids()
    specified = game.assignment.strategy.value
    other = "bridging" if specified != "bridging" else "elaboration"
    se_text = "This links the rain back to the heat that started the cycle."

    def act(pid, code, payload):
        dispatch(session.handle_frame(pid, code, payload))

    act(reader, MessageCode.SE_SUBMIT, {"text": se_text})
    act(guessers[0], MessageCode.GUESS, {"argument": {"strategy": specified, "reason": "other", "span": None}})
    # Planted disagreement: the second guesser names a different strategy.
    act(guessers[1], MessageCode.GUESS, {"argument": {"strategy": other, "reason": "other", "span": None}})
    assert game.phase.value == "discussion"
    act(guessers[1], MessageCode.DISCUSS_MSG, {"text": "I saw it differently - look at the second clause."})
    for pid in PLAYERS:
        act(pid, MessageCode.DISCUSS_PASS, {})
    assert game.phase.value == "second_vote"
    for pid in PLAYERS:
        act(pid, MessageCode.VOTE2, {"arguments": [{"strategy": specified, "reason": "other", "span": None}]})
    assert game.phase.value == "power_window"
    act(reader, MessageCode.SKIP_POWER, {})
    assert game.phase.value in ("task_draw", "reader_composing", "game_over")

    out = {
        "seed": SEED,
        "players": PLAYERS,
        "names": NAMES,
        "reader": reader,
        "specified": specified,
        "other": other,
        "se_text": se_text,
        "streams": streams,
    }
    target = Path(__file__).parent / "round.json"
    target.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
    print(f"wrote {target} ({sum(len(s) for s in streams.values())} frames)")


if __name__ == "__main__":
    main()
