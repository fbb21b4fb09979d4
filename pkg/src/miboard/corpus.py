"""Science-text corpus: loading, validation, selection, and reveal windows.

A corpus is a directory (or zip archive) of JSON documents, one per text:

    {
      "id": "water-cycle",
      "title": "The Water Cycle",
      "sentences": ["...", "..."],
      "targets": [3, 5, 6]
    }

Sentences are pre-split at authoring time; `targets` are 1-indexed sentence
numbers, strictly increasing. During a game, turn t reveals sentences
1..targets[t-1] and the reader self-explains sentence targets[t-1].
"""

from __future__ import annotations

import json
import logging
import random
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

logger = logging.getLogger(__name__)


class CorpusError(Exception):
    """Invalid corpus document or corpus-level problem.

    `source` identifies the offending file where known.
    """

    def __init__(self, code: str, message: str, source: str | None = None):
        super().__init__(message if source is None else f"{source}: {message}")
        self.code = code
        self.source = source


@dataclass(frozen=True)
class TextRecord:
    """One science text: ordered sentences plus 1-indexed target sentences."""

    text_id: str
    title: str
    sentences: tuple[str, ...]
    targets: tuple[int, ...]

    def validate(self, source: str | None = None) -> None:
        if not self.text_id:
            raise CorpusError("missing_id", "text id must be non-empty", source)
        if not self.sentences:
            raise CorpusError("no_sentences", "text has no sentences", source)
        if any(not s.strip() for s in self.sentences):
            raise CorpusError("blank_sentence", "texts may not contain blank sentences", source)
        if not self.targets:
            raise CorpusError("no_targets", "text has no target sentences", source)
        for t in self.targets:
            if not isinstance(t, int) or isinstance(t, bool):
                raise CorpusError("target_not_int", f"target {t!r} is not an integer", source)
            if not 1 <= t <= len(self.sentences):
                raise CorpusError(
                    "target_out_of_range",
                    f"target {t} outside 1..{len(self.sentences)}",
                    source,
                )
        if any(b <= a for a, b in zip(self.targets, self.targets[1:])):
            raise CorpusError("targets_not_increasing", f"targets {list(self.targets)} must be strictly increasing", source)

    def sentence(self, index: int) -> str:
        """1-indexed sentence access."""
        return self.sentences[index - 1]

    def to_dict(self) -> dict:
        return {
            "id": self.text_id,
            "title": self.title,
            "sentences": list(self.sentences),
            "targets": list(self.targets),
        }

    @classmethod
    def from_dict(cls, data: Mapping, source: str | None = None) -> "TextRecord":
        for key in ("id", "sentences", "targets"):
            if key not in data:
                raise CorpusError("missing_field", f"missing field {key!r}", source)
        record = cls(
            text_id=str(data["id"]),
            title=str(data.get("title", data["id"])),
            sentences=tuple(str(s) for s in data["sentences"]),
            targets=tuple(data["targets"]),
        )
        record.validate(source)
        return record


def reveal_window(text: TextRecord, turn_number: int) -> tuple[int, int]:
    """Inclusive 1-indexed sentence range visible on the given turn.

    Turn t shows sentences 1 through targets[t-1]; the upper bound is the
    turn's target sentence.
    """
    if not 1 <= turn_number <= len(text.targets):
        raise CorpusError(
            "turn_out_of_range",
            f"turn {turn_number} outside 1..{len(text.targets)} for text {text.text_id}",
        )
    return (1, text.targets[turn_number - 1])


@dataclass(frozen=True)
class Corpus:
    """Immutable, validated set of texts keyed by id."""

    texts: Mapping[str, TextRecord]

    def __len__(self) -> int:
        return len(self.texts)

    def __getitem__(self, text_id: str) -> TextRecord:
        return self.texts[text_id]

    def ids(self) -> list[str]:
        return sorted(self.texts)


def _iter_documents(source: Path) -> Iterable[tuple[str, bytes]]:
    if source.is_dir():
        for path in sorted(source.glob("*.json")):
            yield str(path), path.read_bytes()
    elif zipfile.is_zipfile(source):
        with zipfile.ZipFile(source) as archive:
            for name in sorted(archive.namelist()):
                if name.endswith(".json") and not name.endswith("/"):
                    yield f"{source}!{name}", archive.read(name)
    else:
        raise CorpusError("bad_source", f"{source} is neither a directory nor a zip archive")


def load_corpus(source: str | Path) -> Corpus:
    """Load and validate every text document under a directory or zip archive."""
    source = Path(source)
    if not source.exists():
        raise CorpusError("bad_source", f"{source} does not exist")
    texts: dict[str, TextRecord] = {}
    for name, raw in _iter_documents(source):
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusError("malformed_json", f"line {exc.lineno}: {exc.msg}", name) from exc
        record = TextRecord.from_dict(data, source=name)
        if record.text_id in texts:
            raise CorpusError("duplicate_id", f"duplicate text id {record.text_id!r}", name)
        texts[record.text_id] = record
    if not texts:
        raise CorpusError("empty_corpus", f"no text documents found under {source}")
    return Corpus(texts=texts)


@dataclass
class CorpusSession:
    """Seeded no-repeat text selection for one game session.

    Texts are drawn uniformly from the not-yet-used pool; once the pool is
    exhausted the used set recycles (with a warning) so a live game never
    stalls.
    """

    corpus: Corpus
    seed: int
    available: list[str] = field(default_factory=list)
    used: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._rng = random.Random(self.seed)
        if not self.available and not self.used:
            self.available = self.corpus.ids()

    def select_text(self) -> TextRecord:
        if not self.corpus.texts:
            raise CorpusError("empty_corpus", "cannot select from an empty corpus")
        if not self.available:
            logger.warning("corpus exhausted after %d texts; recycling used set", len(self.used))
            self.available = self.corpus.ids()
            self.used = []
        index = self._rng.randrange(len(self.available))
        text_id = self.available.pop(index)
        self.used.append(text_id)
        return self.corpus[text_id]
