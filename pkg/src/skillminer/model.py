"""Activity archive: domain records, validation and the on-disk JSON format.

An archive is an immutable snapshot of users, repositories, commits, pull
requests, issues and comments. Constructing an :class:`ActivityArchive`
normalizes every collection into primary-key order and validates referential
integrity, so any instance that exists is valid.
"""

from __future__ import annotations

import json
import os
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import cached_property
from pathlib import Path
from typing import Any, Literal, Union

from .errors import ArchiveIOError, ArchiveParseError, IntegrityError

CommentKind = Literal["issue-comment", "pr-comment", "pr-review-comment"]
ThreadKind = Literal["issue", "pull_request"]

COMMENT_KINDS = ("issue-comment", "pr-comment", "pr-review-comment")
THREAD_KINDS = ("issue", "pull_request")


def login_key(login: str) -> str:
    """Logins compare case-insensitively."""
    return login.casefold()


def parse_timestamp(text: str) -> datetime:
    if not isinstance(text, str):
        raise ValueError(f"expected ISO-8601 string, got {text!r}")
    value = text.strip()
    if value.endswith("Z") or value.endswith("z"):
        value = value[:-1] + "+00:00"
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class UserRef:
    login: str
    follower_count: int = 0


@dataclass(frozen=True)
class RepoRef:
    full_name: str
    owner_login: str
    writers: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "writers", frozenset(self.writers))


@dataclass(frozen=True)
class FileChange:
    path: str
    lines_added: int = 0
    lines_deleted: int = 0

    @property
    def lines_changed(self) -> int:
        return self.lines_added + self.lines_deleted


@dataclass(frozen=True)
class Commit:
    sha: str
    repo: str
    author_login: str
    authored_at: datetime
    files: tuple[FileChange, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "files", tuple(self.files))


@dataclass(frozen=True)
class PullRequest:
    id: int
    repo: str
    author_login: str
    opened_at: datetime
    merged: bool = False
    merged_by_login: str | None = None
    merged_at: datetime | None = None
    commit_shas: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "commit_shas", tuple(self.commit_shas))

    @property
    def thread(self) -> ThreadRef:
        return ThreadRef("pull_request", self.id)


@dataclass(frozen=True)
class Issue:
    id: int
    repo: str
    author_login: str
    opened_at: datetime
    closed_by_login: str | None = None
    closed_at: datetime | None = None
    assignee_logins: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "assignee_logins", frozenset(self.assignee_logins))

    @property
    def thread(self) -> ThreadRef:
        return ThreadRef("issue", self.id)


@dataclass(frozen=True, order=True)
class ThreadRef:
    type: ThreadKind
    id: int


@dataclass(frozen=True)
class Comment:
    id: int
    thread: ThreadRef
    author_login: str
    created_at: datetime
    kind: CommentKind
    body: str = ""


Thread = Union[PullRequest, Issue]


@dataclass(frozen=True)
class ActivityArchive:
    users: tuple[UserRef, ...] = ()
    repos: tuple[RepoRef, ...] = ()
    commits: tuple[Commit, ...] = ()
    pull_requests: tuple[PullRequest, ...] = ()
    issues: tuple[Issue, ...] = ()
    comments: tuple[Comment, ...] = ()
    captured_at: datetime = field(default_factory=lambda: datetime(1970, 1, 1, tzinfo=timezone.utc))

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(sorted(self.users, key=lambda u: (login_key(u.login), u.login))))
        object.__setattr__(self, "repos", tuple(sorted(self.repos, key=lambda r: r.full_name)))
        object.__setattr__(self, "commits", tuple(sorted(self.commits, key=lambda c: c.sha)))
        object.__setattr__(self, "pull_requests", tuple(sorted(self.pull_requests, key=lambda p: p.id)))
        object.__setattr__(self, "issues", tuple(sorted(self.issues, key=lambda i: i.id)))
        object.__setattr__(self, "comments", tuple(sorted(self.comments, key=lambda c: c.id)))
        validate_archive(self)

    @cached_property
    def index(self) -> ArchiveIndex:
        return ArchiveIndex(self)

    def has_user(self, login: str) -> bool:
        return login_key(login) in self.index.users


class ArchiveIndex:
    """Lookup tables over an archive. Built once, lazily, per archive."""

    def __init__(self, archive: ActivityArchive):
        self.users = {login_key(u.login): u for u in archive.users}
        self.repos = {r.full_name: r for r in archive.repos}
        self.commits = {c.sha: c for c in archive.commits}
        self.pull_requests = {p.id: p for p in archive.pull_requests}
        self.issues = {i.id: i for i in archive.issues}

        self.commits_by_author: dict[str, list[Commit]] = defaultdict(list)
        self.prs_by_author: dict[str, list[PullRequest]] = defaultdict(list)
        self.issues_by_author: dict[str, list[Issue]] = defaultdict(list)
        self.comments_by_author: dict[str, list[Comment]] = defaultdict(list)
        self.comments_by_thread: dict[ThreadRef, list[Comment]] = defaultdict(list)
        # (repo, login key) -> every event time of that login in that repo
        self.event_times: dict[tuple[str, str], list[datetime]] = defaultdict(list)

        for c in archive.commits:
            self.commits_by_author[login_key(c.author_login)].append(c)
            self.event_times[(c.repo, login_key(c.author_login))].append(c.authored_at)
        self.prs_by_commit: dict[str, list[PullRequest]] = defaultdict(list)
        for p in archive.pull_requests:
            self.prs_by_author[login_key(p.author_login)].append(p)
            for sha in p.commit_shas:
                self.prs_by_commit[sha].append(p)
            self.event_times[(p.repo, login_key(p.author_login))].append(p.opened_at)
        for i in archive.issues:
            self.issues_by_author[login_key(i.author_login)].append(i)
            self.event_times[(i.repo, login_key(i.author_login))].append(i.opened_at)
        for c in archive.comments:
            self.comments_by_author[login_key(c.author_login)].append(c)
            self.comments_by_thread[c.thread].append(c)
            repo = self.thread(c.thread).repo
            self.event_times[(repo, login_key(c.author_login))].append(c.created_at)
        for comments in self.comments_by_thread.values():
            comments.sort(key=lambda c: (c.created_at, c.id))
        for times in self.event_times.values():
            times.sort()

    def user(self, login: str) -> UserRef | None:
        return self.users.get(login_key(login))

    def thread(self, ref: ThreadRef) -> Thread:
        if ref.type == "pull_request":
            return self.pull_requests[ref.id]
        return self.issues[ref.id]


# --- validation -------------------------------------------------------------


def _check_instant(value: Any, what: str, record: str) -> None:
    if not isinstance(value, datetime) or value.tzinfo is None:
        raise IntegrityError(f"{what} must be a UTC datetime", record=record)
    if value.utcoffset().total_seconds() != 0:
        raise IntegrityError(f"{what} must be in UTC", record=record)
    if value.microsecond:
        raise IntegrityError(f"{what} must have second precision", record=record)


def _check_count(value: Any, what: str, record: str) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise IntegrityError(f"{what} must be a non-negative integer", record=record)


def validate_archive(a: ActivityArchive) -> None:
    """Raise :class:`IntegrityError` unless every archive invariant holds."""
    _check_instant(a.captured_at, "captured_at", "archive")

    logins: set[str] = set()
    for u in a.users:
        rec = f"user {u.login!r}"
        if not isinstance(u.login, str) or not u.login:
            raise IntegrityError("login must be non-empty", record=rec)
        if login_key(u.login) in logins:
            raise IntegrityError("duplicate login", record=rec)
        logins.add(login_key(u.login))
        _check_count(u.follower_count, "follower_count", rec)

    def need_user(login: Any, rec: str, what: str) -> None:
        if not isinstance(login, str) or login_key(login) not in logins:
            raise IntegrityError(f"{what} {login!r} does not resolve to a user", record=rec)

    repos: set[str] = set()
    for r in a.repos:
        rec = f"repo {r.full_name!r}"
        if not isinstance(r.full_name, str) or r.full_name.count("/") != 1 or "" in r.full_name.split("/"):
            raise IntegrityError("full_name must be owner/name", record=rec)
        if r.full_name in repos:
            raise IntegrityError("duplicate full_name", record=rec)
        repos.add(r.full_name)
        need_user(r.owner_login, rec, "owner_login")
        for w in sorted(r.writers):
            need_user(w, rec, "writer")

    def need_repo(name: Any, rec: str) -> None:
        if name not in repos:
            raise IntegrityError(f"repo {name!r} does not resolve", record=rec)

    def check_time(t: datetime, what: str, rec: str) -> None:
        _check_instant(t, what, rec)
        if t > a.captured_at:
            raise IntegrityError(f"{what} is after captured_at", record=rec)

    commits: dict[str, Commit] = {}
    for c in a.commits:
        rec = f"commit {c.sha!r}"
        if not isinstance(c.sha, str) or not c.sha:
            raise IntegrityError("sha must be non-empty", record=rec)
        if c.sha in commits:
            raise IntegrityError("duplicate sha", record=rec)
        commits[c.sha] = c
        need_repo(c.repo, rec)
        need_user(c.author_login, rec, "author_login")
        check_time(c.authored_at, "authored_at", rec)
        for f in c.files:
            if not isinstance(f.path, str) or not f.path:
                raise IntegrityError("file path must be non-empty", record=rec)
            if ".." in f.path.split("/"):
                raise IntegrityError(f"file path {f.path!r} contains '..'", record=rec)
            _check_count(f.lines_added, f"lines_added of {f.path!r}", rec)
            _check_count(f.lines_deleted, f"lines_deleted of {f.path!r}", rec)

    prs: dict[int, PullRequest] = {}
    for p in a.pull_requests:
        rec = f"pull request {p.id!r}"
        if not isinstance(p.id, int) or isinstance(p.id, bool):
            raise IntegrityError("id must be an integer", record=rec)
        if p.id in prs:
            raise IntegrityError("duplicate id", record=rec)
        prs[p.id] = p
        need_repo(p.repo, rec)
        need_user(p.author_login, rec, "author_login")
        check_time(p.opened_at, "opened_at", rec)
        if p.merged != (p.merged_by_login is not None) or p.merged != (p.merged_at is not None):
            raise IntegrityError("merged must hold exactly when merged_by_login and merged_at are set", record=rec)
        if p.merged:
            need_user(p.merged_by_login, rec, "merged_by_login")
            check_time(p.merged_at, "merged_at", rec)
            if p.merged_at < p.opened_at:
                raise IntegrityError("merged_at precedes opened_at", record=rec)
        for sha in p.commit_shas:
            if sha not in commits:
                raise IntegrityError(f"commit {sha!r} does not resolve", record=rec)
            if commits[sha].repo != p.repo:
                raise IntegrityError(f"commit {sha!r} belongs to another repo", record=rec)

    issues: dict[int, Issue] = {}
    for i in a.issues:
        rec = f"issue {i.id!r}"
        if not isinstance(i.id, int) or isinstance(i.id, bool):
            raise IntegrityError("id must be an integer", record=rec)
        if i.id in issues:
            raise IntegrityError("duplicate id", record=rec)
        issues[i.id] = i
        need_repo(i.repo, rec)
        need_user(i.author_login, rec, "author_login")
        check_time(i.opened_at, "opened_at", rec)
        if (i.closed_at is None) != (i.closed_by_login is None):
            raise IntegrityError("closed_at and closed_by_login must be set together", record=rec)
        if i.closed_at is not None:
            need_user(i.closed_by_login, rec, "closed_by_login")
            check_time(i.closed_at, "closed_at", rec)
            if i.closed_at < i.opened_at:
                raise IntegrityError("closed_at precedes opened_at", record=rec)
        for login in sorted(i.assignee_logins):
            need_user(login, rec, "assignee")

    seen: set[int] = set()
    for c in a.comments:
        rec = f"comment {c.id!r}"
        if not isinstance(c.id, int) or isinstance(c.id, bool):
            raise IntegrityError("id must be an integer", record=rec)
        if c.id in seen:
            raise IntegrityError("duplicate id", record=rec)
        seen.add(c.id)
        if c.kind not in COMMENT_KINDS:
            raise IntegrityError(f"unknown kind {c.kind!r}", record=rec)
        if not isinstance(c.thread, ThreadRef) or c.thread.type not in THREAD_KINDS:
            raise IntegrityError("thread must reference an issue or pull request", record=rec)
        thread = (prs if c.thread.type == "pull_request" else issues).get(c.thread.id)
        if thread is None:
            raise IntegrityError(f"{c.thread.type} {c.thread.id} does not resolve", record=rec)
        if c.kind == "pr-review-comment" and c.thread.type != "pull_request":
            raise IntegrityError("pr-review-comment must be on a pull request", record=rec)
        if c.kind == "pr-comment" and c.thread.type != "pull_request":
            raise IntegrityError("pr-comment must be on a pull request", record=rec)
        if c.kind == "issue-comment" and c.thread.type != "issue":
            raise IntegrityError("issue-comment must be on an issue", record=rec)
        need_user(c.author_login, rec, "author_login")
        check_time(c.created_at, "created_at", rec)
        if c.created_at < thread.opened_at:
            raise IntegrityError("created_at precedes the thread's opened_at", record=rec)
        if not isinstance(c.body, str):
            raise IntegrityError("body must be text", record=rec)


# --- serialization ----------------------------------------------------------


def _ts(dt: datetime | None) -> str | None:
    return None if dt is None else format_timestamp(dt)


def archive_to_dict(a: ActivityArchive) -> dict[str, Any]:
    return {
        "users": [{"login": u.login, "follower_count": u.follower_count} for u in a.users],
        "repos": [
            {"full_name": r.full_name, "owner_login": r.owner_login, "writers": sorted(r.writers)}
            for r in a.repos
        ],
        "commits": [
            {
                "sha": c.sha,
                "repo": c.repo,
                "author_login": c.author_login,
                "authored_at": _ts(c.authored_at),
                "files": [
                    {"path": f.path, "lines_added": f.lines_added, "lines_deleted": f.lines_deleted}
                    for f in c.files
                ],
            }
            for c in a.commits
        ],
        "pull_requests": [
            {
                "id": p.id,
                "repo": p.repo,
                "author_login": p.author_login,
                "opened_at": _ts(p.opened_at),
                "merged": p.merged,
                "merged_by_login": p.merged_by_login,
                "merged_at": _ts(p.merged_at),
                "commit_shas": list(p.commit_shas),
            }
            for p in a.pull_requests
        ],
        "issues": [
            {
                "id": i.id,
                "repo": i.repo,
                "author_login": i.author_login,
                "opened_at": _ts(i.opened_at),
                "closed_by_login": i.closed_by_login,
                "closed_at": _ts(i.closed_at),
                "assignee_logins": sorted(i.assignee_logins),
            }
            for i in a.issues
        ],
        "comments": [
            {
                "id": c.id,
                "thread": {"type": c.thread.type, "id": c.thread.id},
                "author_login": c.author_login,
                "created_at": _ts(c.created_at),
                "kind": c.kind,
                "body": c.body,
            }
            for c in a.comments
        ],
        "captured_at": _ts(a.captured_at),
    }


class _RecordReader:
    """Field access on one raw JSON record with errors that name the record."""

    def __init__(self, raw: Any, record: str):
        if not isinstance(raw, dict):
            raise ArchiveParseError("expected an object", record=record)
        self.raw = raw
        self.record = record

    def get(self, key: str, kind: type | tuple[type, ...], *, optional: bool = False, default: Any = None):
        if key not in self.raw or self.raw[key] is None:
            if optional:
                return default
            raise ArchiveParseError(f"missing field {key!r}", record=self.record)
        value = self.raw[key]
        if kind is int and isinstance(value, bool):
            raise ArchiveParseError(f"field {key!r} must be an integer", record=self.record)
        if not isinstance(value, kind):
            raise ArchiveParseError(f"field {key!r} has wrong type {type(value).__name__}", record=self.record)
        return value

    def time(self, key: str, *, optional: bool = False) -> datetime | None:
        value = self.get(key, str, optional=optional)
        if value is None:
            return None
        try:
            return parse_timestamp(value)
        except ValueError as exc:
            raise ArchiveParseError(f"field {key!r}: {exc}", record=self.record) from None

    def strings(self, key: str, *, optional: bool = False) -> list[str]:
        values = self.get(key, list, optional=optional, default=[])
        if not all(isinstance(v, str) for v in values):
            raise ArchiveParseError(f"field {key!r} must be a list of strings", record=self.record)
        return values


def _records(data: dict, key: str) -> list:
    value = data.get(key, [])
    if not isinstance(value, list):
        raise ArchiveParseError(f"top-level {key!r} must be an array", record=key)
    return value


def archive_from_dict(data: Any) -> ActivityArchive:
    if not isinstance(data, dict):
        raise ArchiveParseError("top-level value must be an object")
    users = []
    for n, raw in enumerate(_records(data, "users")):
        r = _RecordReader(raw, f"users[{n}]")
        users.append(UserRef(r.get("login", str), r.get("follower_count", int, optional=True, default=0)))
    repos = []
    for n, raw in enumerate(_records(data, "repos")):
        r = _RecordReader(raw, f"repos[{n}]")
        repos.append(RepoRef(r.get("full_name", str), r.get("owner_login", str), frozenset(r.strings("writers", optional=True))))
    commits = []
    for n, raw in enumerate(_records(data, "commits")):
        r = _RecordReader(raw, f"commits[{n}]")
        files = []
        for m, fraw in enumerate(r.get("files", list, optional=True, default=[])):
            fr = _RecordReader(fraw, f"commits[{n}].files[{m}]")
            files.append(FileChange(fr.get("path", str), fr.get("lines_added", int), fr.get("lines_deleted", int)))
        commits.append(Commit(r.get("sha", str), r.get("repo", str), r.get("author_login", str), r.time("authored_at"), tuple(files)))
    prs = []
    for n, raw in enumerate(_records(data, "pull_requests")):
        r = _RecordReader(raw, f"pull_requests[{n}]")
        prs.append(
            PullRequest(
                id=r.get("id", int),
                repo=r.get("repo", str),
                author_login=r.get("author_login", str),
                opened_at=r.time("opened_at"),
                merged=r.get("merged", bool, optional=True, default=False),
                merged_by_login=r.get("merged_by_login", str, optional=True),
                merged_at=r.time("merged_at", optional=True),
                commit_shas=tuple(r.strings("commit_shas", optional=True)),
            )
        )
    issues = []
    for n, raw in enumerate(_records(data, "issues")):
        r = _RecordReader(raw, f"issues[{n}]")
        issues.append(
            Issue(
                id=r.get("id", int),
                repo=r.get("repo", str),
                author_login=r.get("author_login", str),
                opened_at=r.time("opened_at"),
                closed_by_login=r.get("closed_by_login", str, optional=True),
                closed_at=r.time("closed_at", optional=True),
                assignee_logins=frozenset(r.strings("assignee_logins", optional=True)),
            )
        )
    comments = []
    for n, raw in enumerate(_records(data, "comments")):
        r = _RecordReader(raw, f"comments[{n}]")
        tr = _RecordReader(r.get("thread", dict), f"comments[{n}].thread")
        kind = r.get("kind", str)
        comments.append(
            Comment(
                id=r.get("id", int),
                thread=ThreadRef(tr.get("type", str), tr.get("id", int)),
                author_login=r.get("author_login", str),
                created_at=r.time("created_at"),
                kind=kind,
                body=r.get("body", str, optional=True, default=""),
            )
        )
    if "captured_at" not in data:
        raise ArchiveParseError("missing field 'captured_at'", record="archive")
    captured_at = _RecordReader(data, "archive").time("captured_at")
    return ActivityArchive(
        users=users,
        repos=repos,
        commits=commits,
        pull_requests=prs,
        issues=issues,
        comments=comments,
        captured_at=captured_at,
    )


def dumps_archive(a: ActivityArchive) -> str:
    return json.dumps(archive_to_dict(a), indent=2, ensure_ascii=False) + "\n"


def loads_archive(text: str) -> ActivityArchive:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArchiveParseError(exc.msg, line=exc.lineno) from None
    return archive_from_dict(data)


def load_archive(path: str | os.PathLike) -> ActivityArchive:
    """Read and validate an archive file.

    Raises :class:`ArchiveParseError` for malformed JSON or records and
    :class:`IntegrityError` for dangling references.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ArchiveIOError(f"cannot read archive {path}: {exc.strerror}") from None
    return loads_archive(text)


def save_archive(archive: ActivityArchive, path: str | os.PathLike) -> None:
    try:
        Path(path).write_text(dumps_archive(archive), encoding="utf-8")
    except OSError as exc:
        raise ArchiveIOError(f"cannot write archive {path}: {exc.strerror}") from None

