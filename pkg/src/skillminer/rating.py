"""Skill levels from signal tallies, and per-user skill reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Mapping, Sequence

from .distributions import COMMITS_PER_REPO, FOLLOWERS, DistributionTable, lines_changed_metric
from .errors import MissingTableError, PreconditionError, UnusableTableError, ValidationError
from .exclusion import ExclusionRuleSet, LanguageMap
from .model import ActivityArchive, format_timestamp, parse_timestamp
from .signals import (
    COMMITMENT,
    DEFAULT_CONFIG,
    PRACTICES,
    TEACHING,
    SignalConfig,
    SignalId,
    SignalResult,
    ToxicityScorer,
    eval_commitment,
    eval_language,
    eval_practices,
    eval_teaching,
    language_skill,
    signal_ids,
)


def rate(present: int, total: int) -> int:
    """Map N of M present signals to a 0-5 level.

    Levels cover the fraction N/M in right-closed fifths: 0 only for N = 0,
    then (0, 0.2] -> 1, (0.2, 0.4] -> 2, ..., (0.8, 1] -> 5. Comparisons are
    done in integers (5N <= kM) so boundaries such as 1/5 are exact.
    """
    if isinstance(present, bool) or isinstance(total, bool):
        raise PreconditionError("rate takes integer counts")
    if total < 1 or present < 0 or present > total:
        raise PreconditionError(f"rate({present}, {total}) needs 0 <= N <= M and M >= 1")
    if present == 0:
        return 0
    for level in range(1, 6):
        if 5 * present <= level * total:
            return level
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class SkillRating:
    skill: str
    level: int
    signals_present: int
    signals_total: int
    signal_results: tuple[SignalResult, ...] = ()

    @classmethod
    def from_results(cls, skill: str, signal_results: Sequence[SignalResult]) -> SkillRating:
        present = sum(r.value for r in signal_results)
        total = len(signal_results)
        return cls(skill, rate(present, total), present, total, tuple(signal_results))

    def to_dict(self) -> dict:
        return {
            "skill": self.skill,
            "level": self.level,
            "signals_present": self.signals_present,
            "signals_total": self.signals_total,
            "signals": [r.to_dict() for r in self.signal_results],
        }


@dataclass(frozen=True)
class SkillReport:
    login: str
    as_of: datetime
    ratings: tuple[SkillRating, ...]
    provenance: Mapping[str, object] = field(default_factory=dict)

    def rating(self, skill: str) -> SkillRating | None:
        for r in self.ratings:
            if r.skill == skill:
                return r
        return None

    def to_dict(self) -> dict:
        return {
            "login": self.login,
            "as_of": format_timestamp(self.as_of),
            "ratings": [r.to_dict() for r in self.ratings],
            "provenance": dict(self.provenance),
        }


def skill_order(languages: Iterable[str]) -> list[str]:
    return [TEACHING, COMMITMENT, PRACTICES] + sorted(language_skill(lang) for lang in languages)


def required_metrics(languages: Iterable[str]) -> list[str]:
    return [FOLLOWERS, COMMITS_PER_REPO] + [lines_changed_metric(lang) for lang in sorted(languages)]


def check_tables(tables: Mapping[str, DistributionTable], languages: Iterable[str]) -> None:
    for metric_id in required_metrics(languages):
        table = tables.get(metric_id)
        if table is None:
            raise MissingTableError(metric_id)
        if not table.usable:
            raise UnusableTableError(metric_id, table.population_size)


def build_report(
    user: str,
    archive: ActivityArchive,
    rules: ExclusionRuleSet,
    language_map: LanguageMap,
    tables: Mapping[str, DistributionTable],
    scorer: ToxicityScorer,
    languages: Iterable[str],
    as_of: datetime | None = None,
    config: SignalConfig = DEFAULT_CONFIG,
) -> SkillReport:
    languages = sorted(set(languages), key=str.lower)
    for lang in languages:
        if lang not in language_map.extensions:
            raise PreconditionError(f"language {lang!r} is not in the language map")
    check_tables(tables, languages)
    as_of = archive.captured_at if as_of is None else as_of

    by_skill = {
        TEACHING: eval_teaching(user, archive, rules, scorer, as_of, config),
        COMMITMENT: eval_commitment(user, archive, tables, as_of),
        PRACTICES: eval_practices(user, archive, as_of),
    }
    for lang in languages:
        by_skill[language_skill(lang)] = eval_language(user, lang, archive, rules, language_map, tables, as_of)

    ratings = tuple(SkillRating.from_results(skill, by_skill[skill]) for skill in skill_order(languages))
    provenance = {
        "archive_captured_at": format_timestamp(archive.captured_at),
        "distributions": {m: format_timestamp(tables[m].built_at) for m in required_metrics(languages)},
        "exclusion_rules": rules.identifier,
        "toxicity_lexicon": getattr(scorer, "identifier", type(scorer).__name__),
    }
    if config.negate_t7:
        provenance["t7_negated"] = True
    login = archive.index.user(user).login
    return SkillReport(login, as_of, ratings, provenance)


def dumps_report(report: SkillReport) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def render_text(report: SkillReport) -> str:
    lines = [f"{report.login} (as of {format_timestamp(report.as_of)})"]
    for r in report.ratings:
        lines.append(f"{r.skill}: {r.level}/5 ({r.signals_present}/{r.signals_total} signals)")
    return "\n".join(lines) + "\n"


def report_from_dict(data: Mapping) -> SkillReport:
    """Rebuild a report from its JSON form, re-checking level consistency."""
    try:
        ratings = []
        for raw in data["ratings"]:
            skill = raw["skill"]
            results = []
            for sig in raw["signals"]:
                results.append(
                    SignalResult(SignalId(skill, sig["code"]), bool(sig["value"]), tuple(sig["evidence"]), bool(sig.get("vacuous", False)))
                )
            if [r.id for r in results] != signal_ids(skill):
                raise ValidationError(f"{data.get('login')}: {skill} does not list its signals in order")
            rating = SkillRating.from_results(skill, results)
            if (rating.level, rating.signals_present, rating.signals_total) != (
                raw["level"],
                raw["signals_present"],
                raw["signals_total"],
            ):
                raise ValidationError(f"{data.get('login')}: {skill} level does not match its signals")
            ratings.append(rating)
        return SkillReport(str(data["login"]), parse_timestamp(data["as_of"]), tuple(ratings), dict(data.get("provenance", {})))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed skill report: {exc}") from None
