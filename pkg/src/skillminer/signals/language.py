"""Signals for knowledge of one programming language (L1-L5)."""

from __future__ import annotations

from datetime import datetime
from typing import Mapping

from ..distributions import DistributionTable, language_lines, lines_changed_metric, percentile_value
from ..exclusion import ExclusionRuleSet, LanguageMap, is_excluded
from ..model import ActivityArchive, login_key
from .base import SignalResult, language_skill, require_user, results
from .commitment import require_table

PERCENTILES = (20, 40, 60, 80)


def eval_language(
    user: str,
    language: str,
    archive: ActivityArchive,
    rules: ExclusionRuleSet,
    language_map: LanguageMap,
    tables: Mapping[str, DistributionTable],
    as_of: datetime,
) -> list[SignalResult]:
    table = require_table(tables, lines_changed_metric(language))
    require_user(archive, user, as_of)

    touching = []
    for c in archive.index.commits_by_author.get(login_key(user), ()):
        if c.authored_at > as_of:
            continue
        if any(language_map.classify(f.path) == language and not is_excluded(f.path, rules, language) for f in c.files):
            touching.append(f"commit:{c.sha}")
    entries = [(bool(touching), touching)]

    v = language_lines(archive, user, rules, language_map, as_of).get(language, 0)
    for p in PERCENTILES:
        threshold = percentile_value(table, p)
        entries.append((v >= threshold, [f"lines={v}", f"p{p}={threshold}"]))
    return results(language_skill(language), entries)
