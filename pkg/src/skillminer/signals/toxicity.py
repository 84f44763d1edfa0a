"""Pluggable comment toxicity scoring.

Anything with a ``score(body) -> float`` method in [0, 1] can act as a
scorer. The bundled :class:`LexiconScorer` counts severe-term matches.
"""

from __future__ import annotations

import hashlib
import os
import re
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol, runtime_checkable

TOXIC_THRESHOLD = 0.5
TERM_WEIGHT = 0.4


@runtime_checkable
class ToxicityScorer(Protocol):
    def score(self, body: str) -> float: ...


class LexiconScorer:
    def __init__(self, terms: Iterable[str], identifier: str | None = None):
        self.terms = tuple(sorted({t.strip().lower() for t in terms if t.strip()}))
        digest = hashlib.sha256("\n".join(self.terms).encode("utf-8")).hexdigest()[:12]
        self.identifier = identifier or f"lexicon:{digest}"
        if self.terms:
            # longest first so multi-word phrases win over their prefixes
            alternatives = "|".join(
                r"\s+".join(map(re.escape, t.split())) for t in sorted(self.terms, key=lambda t: (-len(t), t))
            )
            self._pattern = re.compile(rf"(?<!\w)(?:{alternatives})(?!\w)", re.IGNORECASE)
        else:
            self._pattern = None

    def matches(self, body: str) -> int:
        if self._pattern is None:
            return 0
        return len(self._pattern.findall(body))

    def score(self, body: str) -> float:
        return min(1.0, TERM_WEIGHT * self.matches(body))

    def __repr__(self) -> str:
        return f"LexiconScorer({len(self.terms)} terms, {self.identifier})"


def _parse_lexicon(text: str) -> list[str]:
    return [line.strip() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]


def load_lexicon(path: str | os.PathLike) -> LexiconScorer:
    return LexiconScorer(_parse_lexicon(Path(path).read_text(encoding="utf-8")))


def default_scorer() -> LexiconScorer:
    text = resources.files("skillminer").joinpath("data", "toxicity_lexicon.txt").read_text(encoding="utf-8")
    return LexiconScorer(_parse_lexicon(text))


def is_toxic(scorer: ToxicityScorer, body: str) -> bool:
    return scorer.score(body) > TOXIC_THRESHOLD
