"""MiBoard: an authoritative multiplayer server and rules engine for a
reading-strategy board game.

Players take turns self-explaining target sentences of a science text using
an assigned reading strategy; the other players identify the strategy, argue
their picks, and earn points through majority votes. This package provides
the deterministic rules engine, text corpus tooling, lobby matchmaking, the
wire protocol, the game server, and a headless bot harness.
"""

import logging

__version__ = "0.1.0"

# Library logging stays quiet unless the host application configures it.
logging.getLogger(__name__).addHandler(logging.NullHandler())
