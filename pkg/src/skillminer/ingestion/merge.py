from __future__ import annotations

from ..errors import MergeConflictError
from ..model import ActivityArchive, login_key


def _union(name: str, left, right, key) -> list:
    merged = {key(r): r for r in left}
    for r in right:
        k = key(r)
        if k in merged and merged[k] != r:
            raise MergeConflictError(f"{name}:{k}")
        merged[k] = r
    return list(merged.values())


def merge_archives(a: ActivityArchive, b: ActivityArchive) -> ActivityArchive:
    """Union two archives by primary key.

    Records sharing a key must be identical; the capture time is the later of
    the two.
    """
    return ActivityArchive(
        users=_union("user", a.users, b.users, lambda u: login_key(u.login)),
        repos=_union("repo", a.repos, b.repos, lambda r: r.full_name),
        commits=_union("commit", a.commits, b.commits, lambda c: c.sha),
        pull_requests=_union("pull_request", a.pull_requests, b.pull_requests, lambda p: p.id),
        issues=_union("issue", a.issues, b.issues, lambda i: i.id),
        comments=_union("comment", a.comments, b.comments, lambda c: c.id),
        captured_at=max(a.captured_at, b.captured_at),
    )
