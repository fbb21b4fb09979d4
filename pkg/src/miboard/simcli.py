"""`miboard-sim`: drive full games with headless bots, in-process or live.

Examples:

    miboard-sim --games 100 --players 3 --policy random --seed 1
    miboard-sim --games 10 --players 4 --policy honest:0.8 --seed 2 --json report.json
    miboard-sim --games 5 --server 127.0.0.1:8440 --seed 3
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click

from .bots import ScriptedPolicy, simulate
from .protocol import MessageCode
from .server.eventlog import EventLog


def _load_script(path: str):
    data = json.loads(Path(path).read_text())
    seats = data["seats"]
    return [
        ScriptedPolicy([(MessageCode(code), payload) for code, payload in seat])
        for seat in seats
    ]


def _parse_policy(spec: str, players: int):
    if spec.startswith("script:"):
        policies = _load_script(spec.removeprefix("script:"))
        if len(policies) != players:
            raise click.ClickException(f"script has {len(policies)} seats, --players is {players}")
        return policies
    return spec


@click.command()
@click.option("--games", default=1, show_default=True, help="number of full games to play")
@click.option("--players", type=click.Choice(["3", "4"]), default="4", show_default=True)
@click.option("--policy", default="random", show_default=True, help="random | honest:<p> | script:<file>")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--server", default=None, help="host:port of a live server; omit for in-process")
@click.option("--log", "log_path", default=None, type=click.Path(path_type=Path), help="write an event log (in-process mode)")
@click.option("--json", "json_path", default=None, type=click.Path(path_type=Path), help="write the full JSON report here")
def main(games: int, players: str, policy: str, seed: int, server: str | None, log_path: Path | None, json_path: Path | None) -> None:
    """Run headless bot games and report invariant violations."""
    player_count = int(players)
    parsed_policy = _parse_policy(policy, player_count)
    if server is not None:
        from .livebot import live_drive

        results = asyncio.run(live_drive(server, games, player_count, parsed_policy, seed))
        report_dict = {
            "mode": "live",
            "server": server,
            "games": len(results),
            "errors": [e for r in results for e in r.errors],
            "per_game": [
                {
                    "room_id": r.room_id,
                    "game_id": r.game_id,
                    "winner": r.winner,
                    "reason": r.win_reason,
                    "scores": r.final_scores,
                    "hash": r.final_hash,
                }
                for r in results
            ],
        }
        click.echo(f"live games: {len(results)}  errors: {len(report_dict['errors'])}")
        for entry in report_dict["per_game"]:
            click.echo(f"  {entry['game_id']}: winner {entry['winner']} ({entry['reason']})")
        failed = bool(report_dict["errors"])
    else:
        log = EventLog(log_path) if log_path is not None else None
        report = simulate(games, player_count, parsed_policy, seed, log=log)
        if log is not None:
            log.close()
        report_dict = {"mode": "in-process", **report.to_dict()}
        click.echo(report.summary_text())
        failed = bool(report.violations)
    if json_path is not None:
        json_path.write_text(json.dumps(report_dict, indent=2, sort_keys=True))
        click.echo(f"report written to {json_path}")
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
