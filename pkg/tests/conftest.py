import pytest

from miboard.core import Argument, GameConfig, OTHER_REASON, Strategy
from miboard.corpus import TextRecord

SENTENCES = (
    "Water covers most of the planet's surface.",
    "The sun heats the oceans and drives evaporation.",
    "Water vapor rises and cools in the atmosphere.",
    "Cooling vapor condenses into droplets that form clouds.",
    "Droplets merge until they fall as rain or snow.",
    "Runoff carries the water back toward the oceans.",
    "Some water soaks into the ground and recharges aquifers.",
    "The cycle then begins again with fresh evaporation.",
)


def make_text(text_id: str = "water-cycle", targets=(3, 5, 6)) -> TextRecord:
    return TextRecord(
        text_id=text_id,
        title="The Water Cycle",
        sentences=SENTENCES,
        targets=tuple(targets),
    )


def make_config(players: int = 4, seed: int = 1, **overrides) -> GameConfig:
    return GameConfig(player_count=players, rng_seed=seed, **overrides)


def other_arg(strategy: Strategy) -> Argument:
    """Span-free argument, valid in any phase that accepts arguments."""
    return Argument(strategy, OTHER_REASON, None)


@pytest.fixture
def text():
    return make_text()
