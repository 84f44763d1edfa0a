"""Seeded random archives, plus extensions that only add activity for one user."""

from __future__ import annotations

import random
from datetime import timedelta

from builders import AS_OF, ArchiveBuilder

USER = "u"
OTHERS = ("a", "b", "c", "d")
REPOS = ("u/home", "a/lib", "b/app")
PATHS = (
    "src/main.py", "lib/util.py", "web/app.ts", "web/index.js", "README.md", "docs/intro.md",
    "CONTRIBUTING.md", "node_modules/x/index.js", "vendor/gem/a.rb", "scripts/run.sh", "Main.java",
)
SPAN = timedelta(days=4 * 365)


def _when(rng: random.Random, after=None):
    lo = after or AS_OF - SPAN
    seconds = int((AS_OF - lo).total_seconds())
    return lo + timedelta(seconds=rng.randint(0, max(seconds, 0)))


def _files(rng):
    return [(rng.choice(PATHS), rng.randint(0, 40), rng.randint(0, 10)) for _ in range(rng.randint(0, 3))]


def _add(b: ArchiveBuilder, rng: random.Random, author: str) -> None:
    kind = rng.choice(("commit", "commit", "pr", "issue", "comment", "comment"))
    repo = rng.choice(REPOS)
    if kind == "commit":
        c = b.commit(author, repo, _when(rng), _files(rng))
        if rng.random() < 0.3:
            b.pr(author, repo, c.authored_at, shas=[c.sha])
    elif kind == "pr":
        b.pr(author, repo, _when(rng))
    elif kind == "issue":
        b.issue(author, repo, _when(rng))
    else:
        threads = b.prs + b.issues
        if not threads:
            return
        thread = rng.choice(threads)
        body = rng.choice(("thanks", "looks good", "please fix this", "you idiot, stupid code"))
        kinds = ["pr-comment", "pr-review-comment"] if thread.thread.type == "pull_request" else ["issue-comment"]
        b.comment(author, thread, _when(rng, thread.opened_at), kind=rng.choice(kinds), body=body)


def base_builder(rng: random.Random) -> ArchiveBuilder:
    b = ArchiveBuilder()
    b.user(USER, rng.randint(0, 20))
    for name in REPOS:
        writers = [w for w in (USER, *OTHERS) if rng.random() < 0.3]
        b.repo(name, writers=writers)
    for _ in range(rng.randint(0, 25)):
        _add(b, rng, rng.choice((USER, *OTHERS, "n1", "n2")))
    return b


def archive_pair(seed: int):
    """Return (before, after) where ``after`` only adds records authored by USER."""
    rng = random.Random(seed)
    b = base_builder(rng)
    before = b.build()
    for _ in range(rng.randint(1, 12)):
        _add(b, rng, USER)
    return before, b.build()
