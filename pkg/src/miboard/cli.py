"""`miboard` command line: serve, validate a corpus, replay and export logs.

Flags mirror MIBOARD_* environment variables (MIBOARD_LISTEN, MIBOARD_CORPUS,
MIBOARD_LOG, MIBOARD_SEED, MIBOARD_CONFIG, MIBOARD_STATIC).
"""

from __future__ import annotations

import csv
import json
import logging
import sys
from pathlib import Path

import click

from .corpus import CorpusError, load_corpus
from .server.config import DEFAULT_LISTEN, ServerSettings, load_game_overrides
from .server.eventlog import ReplayError, read_events, replay


@click.group()
def main() -> None:
    """MiBoard game server and log tooling."""
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--listen", default=DEFAULT_LISTEN, envvar="MIBOARD_LISTEN", show_default=True, help="host:port to bind")
@click.option("--corpus", "corpus_dir", required=True, envvar="MIBOARD_CORPUS", type=click.Path(exists=True, path_type=Path), help="directory (or zip) of text records")
@click.option("--log", "log_path", default="miboard-events.jsonl", envvar="MIBOARD_LOG", show_default=True, type=click.Path(path_type=Path), help="append-only event log")
@click.option("--seed", type=int, default=None, envvar="MIBOARD_SEED", help="base seed for deterministic mode")
@click.option("--config", "config_path", default=None, envvar="MIBOARD_CONFIG", type=click.Path(exists=True, path_type=Path), help="JSON file with game-rule overrides")
@click.option("--static", "static_dir", default=None, envvar="MIBOARD_STATIC", type=click.Path(path_type=Path), help="directory of built web-client assets to serve at /")
def serve(listen: str, corpus_dir: Path, log_path: Path, seed: int | None, config_path: Path | None, static_dir: Path | None) -> None:
    """Run the game server until interrupted."""
    import uvicorn

    from .server.app import create_app

    try:
        overrides = load_game_overrides(config_path)
    except (ValueError, json.JSONDecodeError) as err:
        raise click.ClickException(f"bad --config file: {err}")
    settings = ServerSettings(
        corpus_dir=corpus_dir,
        log_path=log_path,
        listen=listen,
        seed=seed,
        game_overrides=overrides,
        static_dir=static_dir,
    )
    try:
        app = create_app(settings)
        uvicorn.run(app, host=settings.host, port=settings.port, log_level="info")
    except CorpusError as err:
        raise click.ClickException(f"corpus failed to load: {err}")


@main.command("corpus-validate")
@click.argument("source", type=click.Path(exists=True, path_type=Path))
def corpus_validate(source: Path) -> None:
    """Validate every text record under SOURCE (directory or zip)."""
    try:
        corpus = load_corpus(source)
    except CorpusError as err:
        click.echo(f"INVALID [{err.code}] {err}", err=True)
        sys.exit(1)
    for text_id in corpus.ids():
        text = corpus[text_id]
        click.echo(f"ok {text_id}: {len(text.sentences)} sentences, targets {list(text.targets)}")
    click.echo(f"corpus valid: {len(corpus)} texts")


@main.command("replay")
@click.option("--log", "log_path", required=True, envvar="MIBOARD_LOG", type=click.Path(exists=True, path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="emit one JSON object per game")
def replay_cmd(log_path: Path, as_json: bool) -> None:
    """Rebuild final game states from an event log."""
    try:
        games = replay(log_path)
    except ReplayError as err:
        click.echo(f"REPLAY FAILED [{err.code}] {err}", err=True)
        sys.exit(1)
    for (room_id, game_id), replayed in sorted(games.items()):
        game = replayed.game
        if as_json:
            click.echo(json.dumps({
                "room_id": room_id,
                "game_id": game_id,
                "events": replayed.event_count,
                "phase": game.phase.value,
                "winner": game.winner_id,
                "scores": {p.player_id: p.score for p in game.players},
                "state_hash": replayed.state_hash(),
            }))
        else:
            scores = ", ".join(f"{p.player_id}={p.score}" for p in game.players)
            click.echo(
                f"{game_id} (room {room_id}): {replayed.event_count} events, phase {game.phase.value}, "
                f"winner {game.winner_id}, scores {scores}"
            )
    if not as_json:
        click.echo(f"replayed {len(games)} game(s)")


@main.command("export")
@click.option("--log", "log_path", required=True, envvar="MIBOARD_LOG", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def export(log_path: Path, out_dir: Path) -> None:
    """Flatten an event log into analysis-friendly CSV tables."""
    out_dir.mkdir(parents=True, exist_ok=True)
    events_csv = out_dir / "events.csv"
    scores_csv = out_dir / "score_deltas.csv"
    with open(events_csv, "w", newline="") as ef, open(scores_csv, "w", newline="") as sf:
        events_writer = csv.writer(ef)
        events_writer.writerow(["ts", "room_id", "game_id", "seq", "kind", "actor", "resulting_phase", "payload_json"])
        scores_writer = csv.writer(sf)
        scores_writer.writerow(["room_id", "game_id", "seq", "player_id", "delta"])
        count = 0
        for _, event in read_events(log_path):
            events_writer.writerow([
                event.get("ts"), event.get("room_id"), event.get("game_id"), event.get("seq"),
                event.get("kind"), event.get("actor"), event.get("resulting_phase"),
                json.dumps(event.get("payload"), sort_keys=True),
            ])
            count += 1
            payload = event.get("payload") or {}
            deltas = payload.get("deltas")
            if deltas:
                for pid, delta in sorted(deltas.items()):
                    scores_writer.writerow([event.get("room_id"), event.get("game_id"), event.get("seq"), pid, delta])
    click.echo(f"wrote {count} events to {events_csv} and score deltas to {scores_csv}")


if __name__ == "__main__":
    main()
