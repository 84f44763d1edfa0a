"""Signals for teaching others to take part in a project (T1-T8)."""

from __future__ import annotations

from datetime import datetime, timedelta

from dateutil.relativedelta import relativedelta

from ..exclusion import ExclusionRuleSet, is_excluded
from ..model import ActivityArchive, Commit, PullRequest, login_key
from .base import DEFAULT_CONFIG, TEACHING, SignalConfig, SignalResult, months_before, require_user, results, window_label
from .toxicity import ToxicityScorer, is_toxic

FAST_RESPONSE = timedelta(hours=1)


def thread_label(thread) -> str:
    return f"pr:{thread.id}" if isinstance(thread, PullRequest) else f"issue:{thread.id}"


def is_newcomer(archive: ActivityArchive, pr: PullRequest, config: SignalConfig = DEFAULT_CONFIG) -> bool:
    """Whether the PR author was new to the repository when opening the PR."""
    times = archive.index.event_times.get((pr.repo, login_key(pr.author_login)), [])
    if not times or times[0] < pr.opened_at - config.newcomer_window:
        return False
    prior = sum(1 for t in times if t < pr.opened_at)
    return prior <= config.newcomer_max_prior


def is_markdown(path: str) -> bool:
    return path.lower().endswith(".md")


def is_community_health(path: str, config: SignalConfig = DEFAULT_CONFIG) -> bool:
    folded = path.casefold()
    for directory in config.community_health_dirs:
        if folded.startswith(directory.casefold() + "/"):
            return True
    stem = path.rsplit("/", 1)[-1].split(".", 1)[0]
    return stem.upper() in config.community_health_names


def _doc_commits(commits: list[Commit], rules: ExclusionRuleSet, match) -> tuple[list[str], int]:
    """Commits whose matching, non-excluded files sum to at least 5 changed lines."""
    evidence = []
    best = 0
    for c in commits:
        lines = sum(f.lines_changed for f in c.files if match(f) and not is_excluded(f.path, rules))
        best = max(best, lines)
        if lines >= 5:
            evidence.append(f"commit:{c.sha}")
    return evidence, best


def eval_teaching(
    user: str,
    archive: ActivityArchive,
    rules: ExclusionRuleSet,
    scorer: ToxicityScorer,
    as_of: datetime,
    config: SignalConfig = DEFAULT_CONFIG,
) -> list[SignalResult]:
    require_user(archive, user, as_of)
    idx = archive.index
    me = login_key(user)
    commits = [c for c in idx.commits_by_author.get(me, ()) if c.authored_at <= as_of]
    comments = [c for c in idx.comments_by_author.get(me, ()) if c.created_at <= as_of]

    def others_pr(comment) -> PullRequest | None:
        if comment.thread.type != "pull_request":
            return None
        pr = idx.pull_requests[comment.thread.id]
        return None if login_key(pr.author_login) == me else pr

    # T1: distinct newcomer PRs the user committed to or commented on
    touched: dict[int, list[str]] = {}
    for c in commits:
        for pr in idx.prs_by_commit.get(c.sha, ()):
            if login_key(pr.author_login) != me and pr.opened_at <= as_of:
                touched.setdefault(pr.id, []).append(f"commit:{c.sha}")
    for c in comments:
        pr = others_pr(c)
        if pr is not None:
            touched.setdefault(pr.id, []).append(f"comment:{c.id}")
    t1_evidence = []
    t1_count = 0
    for pr_id in sorted(touched):
        if is_newcomer(archive, idx.pull_requests[pr_id], config):
            t1_count += 1
            t1_evidence.append(f"pr:{pr_id}")
            t1_evidence.extend(sorted(touched[pr_id]))
    t1 = (t1_count >= 3, t1_evidence)

    # T2 / T3
    review = [f"comment:{c.id}" for c in comments if c.kind == "pr-review-comment" and others_pr(c)]
    on_prs = [f"comment:{c.id}" for c in comments if others_pr(c)]
    t2 = (bool(review), review)
    t3 = (bool(on_prs), on_prs)

    # T4 / T5
    md, md_best = _doc_commits(commits, rules, lambda f: is_markdown(f.path))
    health, health_best = _doc_commits(commits, rules, lambda f: is_community_health(f.path, config))
    t4 = (bool(md), md or [f"max_markdown_lines={md_best}"])
    t5 = (bool(health), health or [f"max_community_health_lines={health_best}"])

    # T6: threads by others where the user is the only other commenter
    solo = []
    for ref in sorted({c.thread for c in comments}):
        thread = idx.thread(ref)
        author = login_key(thread.author_login)
        if author == me:
            continue
        commenters = {login_key(c.author_login) for c in idx.comments_by_thread[ref] if c.created_at <= as_of}
        if commenters - {author} == {me}:
            solo.append(thread_label(thread))
    t6 = (len(solo) >= 3, solo)

    # T7: first responses to others' issues inside the last three months
    start = months_before(as_of, 3)
    fast, slow = [], []
    for ref in sorted({c.thread for c in comments if c.thread.type == "issue"}):
        issue = idx.issues[ref.id]
        if login_key(issue.author_login) == me:
            continue
        first = next(c for c in idx.comments_by_thread[ref] if login_key(c.author_login) == me)
        if not start < first.created_at <= as_of:
            continue
        bucket = fast if first.created_at - issue.opened_at < FAST_RESPONSE else slow
        bucket.append(f"comment:{first.id}")
    window = window_label(start, as_of)
    if config.negate_t7:
        t7 = (bool(fast), fast + [window])
    elif fast:
        t7 = (False, fast + [window])
    elif slow:
        t7 = (True, slow + [window, "fast_responses=0"])
    else:
        t7 = (True, [window, "responses=0"], True)

    # T8: toxic comments within the last year
    year_start = as_of - relativedelta(years=1)
    in_year = [c for c in comments if year_start < c.created_at]
    toxic = [f"comment:{c.id}" for c in in_year if is_toxic(scorer, c.body)]
    t8_evidence = toxic + [window_label(year_start, as_of), f"toxic_comments={len(toxic)}", f"comments={len(in_year)}"]
    t8 = (len(toxic) <= 1, t8_evidence, not in_year)

    return results(TEACHING, [t1, t2, t3, t4, t5, t6, t7, t8])
