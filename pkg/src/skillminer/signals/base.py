"""Signal catalog, result types and helpers shared by the evaluators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from dateutil.relativedelta import relativedelta

from ..errors import PreconditionError, UnknownUserError
from ..model import ActivityArchive, UserRef, format_timestamp

TEACHING = "teaching"
COMMITMENT = "commitment"
PRACTICES = "practices"
LANGUAGE_PREFIX = "lang:"

SIGNAL_CODES: dict[str, tuple[str, ...]] = {
    TEACHING: tuple(f"T{n}" for n in range(1, 9)),
    COMMITMENT: tuple(f"C{n}" for n in range(1, 7)),
    "language": tuple(f"L{n}" for n in range(1, 6)),
    PRACTICES: tuple(f"P{n}" for n in range(1, 7)),
}

DESCRIPTIONS = {
    "T1": "worked on pull requests opened by newcomers (>= 3 PRs)",
    "T2": "left a review comment on someone else's pull request",
    "T3": "commented on someone else's pull request",
    "T4": "a commit changing >= 5 lines of Markdown",
    "T5": "a commit changing >= 5 lines of community health files",
    "T6": "sole commenter besides the author on >= 3 threads",
    "T7": "no issue response faster than one hour in the last 3 months",
    "T8": "at most one toxic comment in the last year",
    "C1": ">= 36 calendar months with a contribution",
    "C2": ">= 12 calendar months with a contribution",
    "C3": "discusses >= 70% of own PRs in one repo in the last year",
    "C4": "follower count at or above the 75th percentile",
    "C5": "write access to a repository owned by someone else",
    "C6": "commits to one repo at or above the 75th percentile",
    "L1": "at least one commit in the language",
    "L2": "lines changed at or above the 20th percentile",
    "L3": "lines changed at or above the 40th percentile",
    "L4": "lines changed at or above the 60th percentile",
    "L5": "lines changed at or above the 80th percentile",
    "P1": "authored a commit",
    "P2": "opened a pull request",
    "P3": "opened an issue",
    "P4": "commented on someone else's pull request",
    "P5": "commented on someone else's issue",
    "P6": "assigned to or closed an issue, or merged a pull request",
}


def language_skill(language: str) -> str:
    return LANGUAGE_PREFIX + language.lower()


def skill_family(skill: str) -> str:
    return "language" if skill.startswith(LANGUAGE_PREFIX) else skill


@dataclass(frozen=True, order=True)
class SignalId:
    skill: str
    code: str

    def __post_init__(self):
        family = skill_family(self.skill)
        if family not in SIGNAL_CODES:
            raise ValueError(f"unknown skill {self.skill!r}")
        if self.code not in SIGNAL_CODES[family]:
            raise ValueError(f"signal {self.code} does not belong to {self.skill}")


def signal_ids(skill: str) -> list[SignalId]:
    return [SignalId(skill, code) for code in SIGNAL_CODES[skill_family(skill)]]


@dataclass(frozen=True)
class SignalResult:
    id: SignalId
    value: bool
    evidence: tuple[str, ...] = ()
    vacuous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "evidence", tuple(self.evidence))
        if self.value and not self.evidence:
            raise ValueError(f"{self.id.code}: a true signal needs evidence")

    def to_dict(self) -> dict:
        out = {"code": self.id.code, "value": self.value, "evidence": list(self.evidence)}
        if self.vacuous:
            out["vacuous"] = True
        return out


@lru_cache(maxsize=1)
def _community_health() -> dict:
    text = resources.files("skillminer").joinpath("data", "community_health.json").read_text(encoding="utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class SignalConfig:
    """Tunable definitions that the signal model leaves open."""

    newcomer_window: timedelta = timedelta(days=90)
    newcomer_max_prior: int = 5
    negate_t7: bool = False
    community_health_names: frozenset[str] = field(
        default_factory=lambda: frozenset(name.upper() for name in _community_health()["names"])
    )
    community_health_dirs: tuple[str, ...] = field(default_factory=lambda: tuple(_community_health()["directories"]))


DEFAULT_CONFIG = SignalConfig()


def months_before(as_of: datetime, months: int) -> datetime:
    return as_of - relativedelta(months=months)


def window_label(start: datetime, end: datetime) -> str:
    return f"window:({format_timestamp(start)}, {format_timestamp(end)}]"


def require_user(archive: ActivityArchive, login: str, as_of: datetime) -> UserRef:
    user = archive.index.user(login)
    if user is None:
        raise UnknownUserError(login)
    if as_of > archive.captured_at:
        raise PreconditionError(
            f"as_of {format_timestamp(as_of)} is after the archive capture time {format_timestamp(archive.captured_at)}"
        )
    return user


def results(skill: str, values: Sequence[tuple[bool, Iterable[str]] | tuple[bool, Iterable[str], bool]]) -> list[SignalResult]:
    out = []
    for sid, entry in zip(signal_ids(skill), values, strict=True):
        value, evidence, *rest = entry
        out.append(SignalResult(sid, value, tuple(evidence), vacuous=bool(rest and rest[0])))
    return out
