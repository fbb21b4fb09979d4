"""Stable seed derivation so every subsystem gets an independent RNG stream."""

from __future__ import annotations

import hashlib


def derive_seed(base: int, *parts: object) -> int:
    """63-bit seed derived from a base seed and a stable label tuple.

    Uses sha256 over the repr, never `hash()` (which is randomized per
    process).
    """
    digest = hashlib.sha256(repr((base, parts)).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def room_game_seed(base: int, room_id: int, game_index: int) -> int:
    return derive_seed(base, "game", room_id, game_index)


def room_corpus_seed(base: int, room_id: int) -> int:
    return derive_seed(base, "corpus", room_id)


def bot_seed(base: int, room_id: int, player_index: int) -> int:
    return derive_seed(base, "bot", room_id, player_index)
