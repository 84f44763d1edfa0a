"""Build an activity archive from the GitHub REST and GraphQL APIs."""

from __future__ import annotations

import json
import logging
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Any, Callable, Iterator
from urllib.parse import quote, urlencode

from dateutil.relativedelta import relativedelta

from ..errors import AuthError, FetchError, PartialFetchError, PreconditionError, RateLimitError
from ..model import ActivityArchive, Comment, Commit, FileChange, Issue, PullRequest, RepoRef, ThreadRef, UserRef, login_key, parse_timestamp
from .transport import API_ROOT, Response, Transport

logger = logging.getLogger(__name__)

TOKEN_ENV = "SKILLMINER_TOKEN"
DEFAULT_LOOKBACK = relativedelta(years=4)
_NEXT_LINK = re.compile(r'<([^>]+)>\s*;\s*rel="next"')
_NUMBER_TAIL = re.compile(r"/(\d+)$")


def utcnow() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


@dataclass(frozen=True)
class FetchSpec:
    logins: tuple[str, ...] = ()
    repos: tuple[str, ...] = ()
    since: datetime | None = None
    auth_token: str | None = field(default=None, repr=False)
    page_size: int = 100

    def __post_init__(self):
        object.__setattr__(self, "logins", tuple(self.logins))
        object.__setattr__(self, "repos", tuple(self.repos))
        if not self.logins and not self.repos:
            raise PreconditionError("a fetch needs at least one login or repository")
        if not 1 <= self.page_size <= 100:
            raise PreconditionError("page_size must be between 1 and 100")
        for name in self.repos:
            if name.count("/") != 1:
                raise PreconditionError(f"repository {name!r} must be owner/name")


@dataclass
class RateLimitState:
    remaining: int | None = None
    reset_at: datetime | None = None
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def update(self, response: Response) -> None:
        remaining = response.header("x-ratelimit-remaining")
        reset = response.header("x-ratelimit-reset")
        with self._lock:
            if remaining is not None:
                self.remaining = int(remaining)
            if reset is not None:
                self.reset_at = datetime.fromtimestamp(int(reset), timezone.utc)

    def exhausted(self, now: datetime) -> datetime | None:
        with self._lock:
            if self.remaining == 0 and self.reset_at is not None and now < self.reset_at:
                return self.reset_at
        return None


@dataclass
class FetchReport:
    requests: int = 0
    dropped_commits: int = 0
    dropped_records: int = 0
    completed: list[str] = field(default_factory=list)


class _HttpFailure(Exception):
    def __init__(self, status: int, url: str):
        self.status = status
        super().__init__(f"HTTP {status} for {url}")


@dataclass
class _RepoData:
    repo: RepoRef
    commits: list[Commit] = field(default_factory=list)
    pull_requests: list[PullRequest] = field(default_factory=list)
    issues: list[Issue] = field(default_factory=list)
    comments: list[Comment] = field(default_factory=list)
    logins: set[str] = field(default_factory=set)


class GitHubFetcher:
    def __init__(self, spec: FetchSpec, transport: Transport, *, clock: Callable[[], datetime] = utcnow, api_root: str = API_ROOT):
        self.spec = spec
        self.transport = transport
        self.clock = clock
        self.api_root = api_root.rstrip("/")
        self.rate = RateLimitState()
        self.report = FetchReport()
        self._lock = threading.Lock()
        now = clock()
        self.since = spec.since if spec.since is not None else now - DEFAULT_LOOKBACK
        if self.since >= now:
            raise PreconditionError("since must lie in the past")

    # --- HTTP ------------------------------------------------------------------

    def _headers(self) -> dict[str, str]:
        headers = {"Accept": "application/vnd.github+json"}
        if self.spec.auth_token:
            headers["Authorization"] = f"Bearer {self.spec.auth_token}"
        return headers

    def _call(self, method: str, url: str, json_body: Any = None) -> Response:
        blocked = self.rate.exhausted(self.clock())
        if blocked is not None:
            raise RateLimitError(blocked)
        response = self.transport.request(method, url, headers=self._headers(), json_body=json_body)
        with self._lock:
            self.report.requests += 1
        self.rate.update(response)
        if response.status in (403, 429):
            if response.header("x-ratelimit-remaining") == "0" and response.header("x-ratelimit-reset"):
                raise RateLimitError(datetime.fromtimestamp(int(response.header("x-ratelimit-reset")), timezone.utc))
            retry_after = response.header("retry-after")
            if retry_after is not None:
                raise RateLimitError(self.clock() + timedelta(seconds=int(retry_after)))
        if response.status in (401, 403):
            raise AuthError(f"HTTP {response.status} for {url}: check {TOKEN_ENV}")
        if response.status >= 400:
            raise _HttpFailure(response.status, url)
        return response

    def _url(self, path: str, **params) -> str:
        query = urlencode({k: v for k, v in params.items() if v is not None})
        return f"{self.api_root}{path}" + (f"?{query}" if query else "")

    def get(self, path: str, **params) -> Any:
        return self._call("GET", self._url(path, **params)).body

    def paginate(self, path: str, **params) -> Iterator[dict]:
        url: str | None = self._url(path, per_page=self.spec.page_size, **params)
        while url:
            response = self._call("GET", url)
            if not isinstance(response.body, list):
                raise _HttpFailure(response.status, url)
            yield from response.body
            m = _NEXT_LINK.search(response.header("link") or "")
            url = m.group(1) if m else None

    # --- records ---------------------------------------------------------------

    def _since_iso(self) -> str:
        return self.since.strftime("%Y-%m-%dT%H:%M:%SZ")

    @staticmethod
    def _login(obj: Any) -> str | None:
        if isinstance(obj, dict) and isinstance(obj.get("login"), str):
            return obj["login"]
        return None

    def _drop(self, what: str, ident: Any) -> None:
        logger.info("dropping %s %s: no resolvable login", what, ident)
        with self._lock:
            if what == "commit":
                self.report.dropped_commits += 1
            else:
                self.report.dropped_records += 1

    def owned_repos(self, login: str) -> list[str]:
        return [r["full_name"] for r in self.paginate(f"/users/{quote(login)}/repos", type="owner")]

    def fetch_repo(self, full_name: str) -> _RepoData:
        base = f"/repos/{full_name}"
        meta = self.get(base)
        owner = meta["owner"]["login"]
        full_name = meta.get("full_name", full_name)
        writers = {owner}
        for c in self.paginate(f"{base}/collaborators", affiliation="all"):
            if self._login(c) and (c.get("permissions") or {}).get("push"):
                writers.add(c["login"])
        data = _RepoData(RepoRef(full_name, owner, frozenset(writers)))
        data.logins.update(writers)

        for item in self.paginate(f"{base}/commits", since=self._since_iso()):
            author = self._login(item.get("author"))
            if author is None:
                self._drop("commit", item.get("sha"))
                continue
            when = parse_timestamp(item["commit"]["author"]["date"])
            if when < self.since:
                continue
            detail = self.get(f"{base}/commits/{item['sha']}")
            files = tuple(
                FileChange(f["filename"], int(f.get("additions", 0)), int(f.get("deletions", 0)))
                for f in detail.get("files") or ()
            )
            data.commits.append(Commit(item["sha"], full_name, author, when, files))
            data.logins.add(author)
        known_shas = {c.sha for c in data.commits}

        pr_numbers: dict[int, PullRequest] = {}
        for item in self.paginate(f"{base}/pulls", state="all"):
            author = self._login(item.get("user"))
            opened = parse_timestamp(item["created_at"])
            if opened < self.since:
                continue
            if author is None:
                self._drop("pull request", item.get("id"))
                continue
            number = int(item["number"])
            merged_by = merged_at = None
            if item.get("merged_at"):
                merged_by = self._login(self.get(f"{base}/pulls/{number}").get("merged_by"))
                if merged_by is not None:
                    merged_at = parse_timestamp(item["merged_at"])
            shas = tuple(
                c["sha"] for c in self.paginate(f"{base}/pulls/{number}/commits") if c.get("sha") in known_shas
            )
            pr = PullRequest(int(item["id"]), full_name, author, opened, merged_by is not None, merged_by, merged_at, shas)
            pr_numbers[number] = pr
            data.pull_requests.append(pr)
            data.logins.update(x for x in (author, merged_by) if x)

        issue_numbers: dict[int, Issue] = {}
        for item in self.paginate(f"{base}/issues", state="all", since=self._since_iso()):
            if "pull_request" in item:
                continue
            author = self._login(item.get("user"))
            opened = parse_timestamp(item["created_at"])
            if opened < self.since:
                continue
            if author is None:
                self._drop("issue", item.get("id"))
                continue
            number = int(item["number"])
            closed_by = closed_at = None
            if item.get("closed_at"):
                closed_by = self._login(self.get(f"{base}/issues/{number}").get("closed_by"))
                if closed_by is not None:
                    closed_at = parse_timestamp(item["closed_at"])
            assignees = frozenset(a["login"] for a in item.get("assignees") or () if self._login(a))
            issue = Issue(int(item["id"]), full_name, author, opened, closed_by, closed_at, assignees)
            issue_numbers[number] = issue
            data.issues.append(issue)
            data.logins.update(assignees)
            data.logins.update(x for x in (author, closed_by) if x)

        for item in self.paginate(f"{base}/issues/comments", since=self._since_iso()):
            number = _thread_number(item.get("issue_url"))
            if number in pr_numbers:
                ref, kind, opened = ThreadRef("pull_request", pr_numbers[number].id), "pr-comment", pr_numbers[number].opened_at
            elif number in issue_numbers:
                ref, kind, opened = ThreadRef("issue", issue_numbers[number].id), "issue-comment", issue_numbers[number].opened_at
            else:
                continue
            self._add_comment(data, item, ref, kind, opened)

        for item in self.paginate(f"{base}/pulls/comments", since=self._since_iso()):
            number = _thread_number(item.get("pull_request_url"))
            if number not in pr_numbers:
                continue
            pr = pr_numbers[number]
            self._add_comment(data, item, ThreadRef("pull_request", pr.id), "pr-review-comment", pr.opened_at)
        return data

    def _add_comment(self, data: _RepoData, item: dict, ref: ThreadRef, kind: str, opened: datetime) -> None:
        author = self._login(item.get("user"))
        if author is None:
            self._drop("comment", item.get("id"))
            return
        created = parse_timestamp(item["created_at"])
        if created < self.since or created < opened:
            return
        data.comments.append(Comment(int(item["id"]), ref, author, created, kind, item.get("body") or ""))
        data.logins.add(author)

    def follower_counts(self, logins: list[str]) -> dict[str, int]:
        """Follower totals via GraphQL, batched ``page_size`` logins per query."""
        counts: dict[str, int] = {}
        for start in range(0, len(logins), self.spec.page_size):
            batch = logins[start : start + self.spec.page_size]
            fields = " ".join(
                f"u{n}: repositoryOwner(login: {json.dumps(login)}) {{ login ... on User {{ followers {{ totalCount }} }} }}"
                for n, login in enumerate(batch)
            )
            body = self._call("POST", f"{self.api_root}/graphql", {"query": f"query {{ {fields} }}"}).body or {}
            result = body.get("data") or {}
            for n, login in enumerate(batch):
                node = result.get(f"u{n}") or {}
                counts[login] = int(((node.get("followers") or {}).get("totalCount")) or 0)
        return counts

    # --- driver ----------------------------------------------------------------

    def run(self, workers: int = 1) -> ActivityArchive:
        completed: list[str] = []
        repos: list[str] = list(dict.fromkeys(self.spec.repos))
        pending = [f"user:{x}" for x in self.spec.logins] + [f"repo:{x}" for x in repos]

        def fail(exc: Exception) -> FetchError:
            missing = [e for e in pending if e not in completed]
            if isinstance(exc, FetchError):
                exc.completed, exc.missing = list(completed), missing
                return exc
            return PartialFetchError(str(exc), completed=list(completed), missing=missing)

        try:
            for login in self.spec.logins:
                for name in self.owned_repos(login):
                    if name not in repos:
                        repos.append(name)
                        pending.append(f"repo:{name}")
        except (FetchError, _HttpFailure) as exc:
            raise fail(exc) from None

        results: dict[str, _RepoData] = {}

        def one(name: str) -> None:
            results[name] = self.fetch_repo(name)
            with self._lock:
                completed.append(f"repo:{name}")

        try:
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    for future in [pool.submit(one, name) for name in repos]:
                        future.result()
            else:
                for name in repos:
                    one(name)

            wanted: dict[str, str] = {}
            for login in list(self.spec.logins) + [x for d in results.values() for x in sorted(d.logins)]:
                wanted.setdefault(login_key(login), login)
            counts = self.follower_counts(sorted(wanted.values(), key=str.casefold))
            completed.extend(f"user:{x}" for x in self.spec.logins)
        except (FetchError, _HttpFailure) as exc:
            raise fail(exc) from None

        self.report.completed = sorted(completed)
        datas = [results[name] for name in repos]
        return ActivityArchive(
            users=[UserRef(login, counts.get(login, 0)) for login in wanted.values()],
            repos=[d.repo for d in datas],
            commits=[c for d in datas for c in d.commits],
            pull_requests=[p for d in datas for p in d.pull_requests],
            issues=[i for d in datas for i in d.issues],
            comments=[c for d in datas for c in d.comments],
            captured_at=self.clock(),
        )


def _thread_number(url: Any) -> int | None:
    if not isinstance(url, str):
        return None
    m = _NUMBER_TAIL.search(url)
    return int(m.group(1)) if m else None


def fetch_archive(
    spec: FetchSpec,
    transport: Transport,
    *,
    clock: Callable[[], datetime] = utcnow,
    report: FetchReport | None = None,
    workers: int = 1,
) -> ActivityArchive:
    """Fetch everything ``spec`` names and return it as a validated archive.

    ``clock`` supplies the capture time (and the default look-back origin);
    pass a fixed clock to make replays from recorded fixtures reproducible.
    If ``report`` is given it is filled with request and drop counts.
    """
    fetcher = GitHubFetcher(spec, transport, clock=clock)
    archive = fetcher.run(workers=workers)
    if report is not None:
        report.__dict__.update(fetcher.report.__dict__)
    return archive
