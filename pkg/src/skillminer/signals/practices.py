"""Signals for familiarity with everyday OSS practices (P1-P6)."""

from __future__ import annotations

from datetime import datetime

from ..model import ActivityArchive, login_key
from .base import PRACTICES, SignalResult, require_user, results


def eval_practices(user: str, archive: ActivityArchive, as_of: datetime) -> list[SignalResult]:
    require_user(archive, user, as_of)
    idx = archive.index
    me = login_key(user)

    commits = [f"commit:{c.sha}" for c in idx.commits_by_author.get(me, ()) if c.authored_at <= as_of]
    prs = [f"pr:{p.id}" for p in idx.prs_by_author.get(me, ()) if p.opened_at <= as_of]
    issues = [f"issue:{i.id}" for i in idx.issues_by_author.get(me, ()) if i.opened_at <= as_of]

    on_prs, on_issues = [], []
    for c in idx.comments_by_author.get(me, ()):
        if c.created_at > as_of or login_key(idx.thread(c.thread).author_login) == me:
            continue
        (on_prs if c.thread.type == "pull_request" else on_issues).append(f"comment:{c.id}")

    roles = []
    for i in archive.issues:
        if i.opened_at <= as_of and me in {login_key(a) for a in i.assignee_logins}:
            roles.append(f"assigned:issue:{i.id}")
        if i.closed_at is not None and i.closed_at <= as_of and login_key(i.closed_by_login) == me:
            roles.append(f"closed:issue:{i.id}")
    for p in archive.pull_requests:
        if p.merged and p.merged_at <= as_of and login_key(p.merged_by_login) == me:
            roles.append(f"merged:pr:{p.id}")

    return results(
        PRACTICES,
        [(bool(e), e) for e in (commits, prs, issues, on_prs, on_issues, roles)],
    )
