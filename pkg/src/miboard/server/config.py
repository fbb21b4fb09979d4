"""Server settings: CLI flags, environment overrides, game-config overrides.

Every CLI flag has a matching environment variable with the MIBOARD_ prefix
(MIBOARD_LISTEN, MIBOARD_CORPUS, MIBOARD_LOG, MIBOARD_SEED, MIBOARD_CONFIG).
"""

from __future__ import annotations

import json
import secrets
from dataclasses import dataclass, field
from pathlib import Path

from ..core import GameConfig

ENV_PREFIX = "MIBOARD"
DEFAULT_LISTEN = "127.0.0.1:8440"


@dataclass
class ServerSettings:
    corpus_dir: Path
    log_path: Path
    listen: str = DEFAULT_LISTEN
    seed: int | None = None
    game_overrides: dict = field(default_factory=dict)
    zone_default: str = "main"
    disconnect_grace: float = 60.0
    inactivity_timeout: float = 180.0
    tick_interval: float = 1.0
    static_dir: Path | None = None

    def __post_init__(self) -> None:
        self.corpus_dir = Path(self.corpus_dir)
        self.log_path = Path(self.log_path)
        if self.static_dir is not None:
            self.static_dir = Path(self.static_dir)
        # One boot-time seed keeps every room derivable; a fresh random seed
        # (logged at startup) preserves replayability even in live mode.
        self.deterministic = self.seed is not None
        self.base_seed = self.seed if self.seed is not None else secrets.randbits(63)

    @property
    def host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])

    def make_game_config(self, player_count: int, rng_seed: int) -> GameConfig:
        data = GameConfig().to_dict()
        data.update(self.game_overrides)
        data["player_count"] = player_count
        data["rng_seed"] = rng_seed
        return GameConfig.from_dict(data)


def load_game_overrides(path: str | Path | None) -> dict:
    if path is None:
        return {}
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError("game config overrides must be a JSON object")
    data.pop("player_count", None)  # always derived from the room roster
    return data
