"""Signals for commitment towards a project (C1-C6)."""

from __future__ import annotations

from collections import defaultdict
from datetime import datetime
from typing import Mapping

from dateutil.relativedelta import relativedelta

from ..distributions import COMMITS_PER_REPO, FOLLOWERS, DistributionTable, commits_per_repo, percentile_value
from ..errors import MissingTableError
from ..model import ActivityArchive, login_key
from .base import COMMITMENT, SignalResult, require_user, results, window_label

DISCUSSION_SHARE = (7, 10)


def contribution_months(archive: ActivityArchive, user: str, as_of: datetime) -> set[str]:
    """Calendar months (UTC, ``YYYY-MM``) with a commit, PR, issue or comment."""
    idx = archive.index
    me = login_key(user)
    times = [c.authored_at for c in idx.commits_by_author.get(me, ())]
    times += [p.opened_at for p in idx.prs_by_author.get(me, ())]
    times += [i.opened_at for i in idx.issues_by_author.get(me, ())]
    times += [c.created_at for c in idx.comments_by_author.get(me, ())]
    return {t.strftime("%Y-%m") for t in times if t <= as_of}


def require_table(tables: Mapping[str, DistributionTable], metric_id: str) -> DistributionTable:
    table = tables.get(metric_id)
    if table is None:
        raise MissingTableError(metric_id)
    return table


def eval_commitment(
    user: str,
    archive: ActivityArchive,
    tables: Mapping[str, DistributionTable],
    as_of: datetime,
) -> list[SignalResult]:
    followers_table = require_table(tables, FOLLOWERS)
    per_repo_table = require_table(tables, COMMITS_PER_REPO)
    ref = require_user(archive, user, as_of)
    idx = archive.index
    me = login_key(user)

    months = sorted(contribution_months(archive, user, as_of))
    month_evidence = [f"month:{m}" for m in months]
    c1 = (len(months) >= 36, month_evidence)
    c2 = (len(months) >= 12, month_evidence)

    # C3: per repo share of own recent PRs the user also commented on
    start = as_of - relativedelta(years=1)
    by_repo: dict[str, list] = defaultdict(list)
    for pr in idx.prs_by_author.get(me, ()):
        if start < pr.opened_at <= as_of:
            by_repo[pr.repo].append(pr)
    num, den = DISCUSSION_SHARE
    c3 = (False, [window_label(start, as_of)])
    ratios = []
    for repo in sorted(by_repo):
        prs = sorted(by_repo[repo], key=lambda p: p.id)
        discussed = [
            p for p in prs
            if any(login_key(c.author_login) == me and c.created_at <= as_of for c in idx.comments_by_thread.get(p.thread, ()))
        ]
        ratios.append(f"repo:{repo} discussed={len(discussed)}/{len(prs)}")
        if den * len(discussed) >= num * len(prs):
            evidence = [f"repo:{repo}", f"discussed={len(discussed)}/{len(prs)}", window_label(start, as_of)]
            evidence += [f"pr:{p.id}" for p in prs]
            c3 = (True, evidence)
            break
    else:
        if ratios:
            c3 = (False, ratios + [window_label(start, as_of)])

    p75 = percentile_value(followers_table, 75)
    c4 = (ref.follower_count >= p75, [f"followers={ref.follower_count}", f"p75={p75}"])

    writable = [
        f"repo:{r.full_name}"
        for r in archive.repos
        if login_key(r.owner_login) != me and me in {login_key(w) for w in r.writers}
    ]
    c5 = (bool(writable), writable)

    threshold = percentile_value(per_repo_table, 75)
    counts = commits_per_repo(archive, user, as_of)
    heavy = [f"repo:{repo} commits={n}" for repo, n in sorted(counts.items()) if n >= threshold]
    c6 = (bool(heavy), heavy + [f"p75={threshold}"])

    return results(COMMITMENT, [c1, c2, c3, c4, c5, c6])
