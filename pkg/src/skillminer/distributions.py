"""Population baselines for percentile signals.

A :class:`DistributionTable` is a sorted sample of one metric over a reference
population of users. Percentiles use the nearest-rank method, so every
percentile value is an actual sample.
"""

from __future__ import annotations

import json
import math
import os
import re
from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from numbers import Real
from pathlib import Path
from typing import Iterable, Mapping

from .errors import PreconditionError, UnknownUserError, UnusableTableError, ValidationError
from .exclusion import ExclusionRuleSet, LanguageMap, is_excluded
from .model import ActivityArchive, format_timestamp, login_key, parse_timestamp

FOLLOWERS = "followers"
COMMITS_PER_REPO = "commits_per_repo"


def lines_changed_metric(language: str) -> str:
    return f"lines_changed[{language}]"


@dataclass(frozen=True)
class DistributionTable:
    metric_id: str
    samples: tuple[Real, ...]
    population_size: int
    built_at: datetime
    source_note: str = ""

    def __post_init__(self):
        samples = tuple(self.samples)
        object.__setattr__(self, "samples", samples)
        if any(b < a for a, b in zip(samples, samples[1:])):
            raise ValidationError(f"{self.metric_id}: samples must be sorted ascending")
        if any(s < 0 for s in samples):
            raise ValidationError(f"{self.metric_id}: samples must be non-negative")
        if self.population_size != len(samples):
            raise ValidationError(f"{self.metric_id}: population_size must equal the number of samples")

    @classmethod
    def from_samples(cls, metric_id: str, samples: Iterable[Real], built_at: datetime, source_note: str = ""):
        ordered = tuple(sorted(samples))
        return cls(metric_id, ordered, len(ordered), built_at, source_note)

    @property
    def usable(self) -> bool:
        return self.population_size >= 2

    def to_dict(self) -> dict:
        return {
            "metric_id": self.metric_id,
            "samples": list(self.samples),
            "population_size": self.population_size,
            "built_at": format_timestamp(self.built_at),
            "source_note": self.source_note,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> DistributionTable:
        try:
            samples = data["samples"]
            if not isinstance(samples, list) or not all(
                isinstance(s, (int, float)) and not isinstance(s, bool) for s in samples
            ):
                raise ValidationError(f"{data.get('metric_id')}: samples must be a list of numbers")
            return cls(
                metric_id=str(data["metric_id"]),
                samples=tuple(samples),
                population_size=int(data["population_size"]),
                built_at=parse_timestamp(data["built_at"]),
                source_note=str(data.get("source_note", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed distribution table: {exc}") from None


def percentile_value(table: DistributionTable, p: Real) -> Real:
    """Nearest-rank percentile: the sample at 1-based rank ceil(p/100 * n)."""
    if not table.usable:
        raise UnusableTableError(table.metric_id, table.population_size)
    if isinstance(p, bool) or not isinstance(p, Real) or not 0 < p <= 100:
        raise PreconditionError(f"percentile {p!r} must lie in (0, 100]")
    n = table.population_size
    rank = math.ceil(Fraction(p) * n / 100)
    return table.samples[rank - 1]


def at_or_above(table: DistributionTable, value: Real, p: Real) -> bool:
    return value >= percentile_value(table, p)


# --- per-user metrics ---------------------------------------------------------


def language_lines(
    archive: ActivityArchive,
    login: str,
    rules: ExclusionRuleSet,
    language_map: LanguageMap,
    as_of: datetime,
) -> Counter[str]:
    """Lines added plus deleted per language over the user's non-excluded files."""
    totals: Counter[str] = Counter()
    for commit in archive.index.commits_by_author.get(login_key(login), ()):
        if commit.authored_at > as_of:
            continue
        for f in commit.files:
            language = language_map.classify(f.path)
            if language is None or is_excluded(f.path, rules, language):
                continue
            totals[language] += f.lines_changed
    return totals


def commits_per_repo(archive: ActivityArchive, login: str, as_of: datetime) -> Counter[str]:
    return Counter(
        c.repo for c in archive.index.commits_by_author.get(login_key(login), ()) if c.authored_at <= as_of
    )


def build_distributions(
    archive: ActivityArchive,
    population: Iterable[str],
    rules: ExclusionRuleSet,
    language_map: LanguageMap,
    as_of: datetime,
    *,
    nonzero_baselines: bool = False,
    source_note: str = "",
) -> dict[str, DistributionTable]:
    """Build one table per metric over ``population``.

    Users with no lines in a language contribute a 0 sample to that
    language's table unless ``nonzero_baselines`` is set. Commits per repo has
    one sample per (user, repo) pair with at least one commit.
    """
    logins = list(population)
    if len(logins) < 2:
        raise PreconditionError("population must contain at least 2 users")
    if len({login_key(x) for x in logins}) != len(logins):
        raise PreconditionError("population contains duplicate logins")
    users = []
    for login in logins:
        user = archive.index.user(login)
        if user is None:
            raise UnknownUserError(login)
        users.append(user)

    followers = [u.follower_count for u in users]
    per_repo: list[int] = []
    lines: dict[str, list[int]] = {lang: [] for lang in language_map.languages}
    for user in users:
        per_repo.extend(commits_per_repo(archive, user.login, as_of).values())
        totals = language_lines(archive, user.login, rules, language_map, as_of)
        for language in language_map.languages:
            v = totals.get(language, 0)
            if v or not nonzero_baselines:
                lines[language].append(v)

    note = source_note or f"{len(users)} users; as_of {format_timestamp(as_of)}"
    if nonzero_baselines:
        note += "; nonzero baselines"
    tables = {
        FOLLOWERS: DistributionTable.from_samples(FOLLOWERS, followers, as_of, note),
        COMMITS_PER_REPO: DistributionTable.from_samples(COMMITS_PER_REPO, per_repo, as_of, note),
    }
    for language, samples in lines.items():
        metric = lines_changed_metric(language)
        tables[metric] = DistributionTable.from_samples(metric, samples, as_of, note)
    return tables


# --- persistence ----------------------------------------------------------------


def table_filename(metric_id: str) -> str:
    slug = metric_id.lower().replace("#", "sharp").replace("+", "plus")
    slug = re.sub(r"[^a-z0-9]+", "_", slug).strip("_")
    return f"{slug}.json"


def save_tables(tables: Mapping[str, DistributionTable], directory: str | os.PathLike) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for metric_id in sorted(tables):
        text = json.dumps(tables[metric_id].to_dict(), indent=2) + "\n"
        (out / table_filename(metric_id)).write_text(text, encoding="utf-8")


def load_tables(directory: str | os.PathLike) -> dict[str, DistributionTable]:
    root = Path(directory)
    if not root.is_dir():
        raise ValidationError(f"distributions directory {directory} does not exist")
    tables: dict[str, DistributionTable] = {}
    for path in sorted(root.glob("*.json")):
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        table = DistributionTable.from_dict(data)
        if table.metric_id in tables:
            raise ValidationError(f"{path}: duplicate table for {table.metric_id}")
        tables[table.metric_id] = table
    return tables
