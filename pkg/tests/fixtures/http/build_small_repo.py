"""Writes the recorded responses under small-repo/.

The payloads below are hand-written in the shape the GitHub REST/GraphQL
APIs return (trimmed to the fields the fetcher reads). Re-run after editing:

    python tests/fixtures/http/build_small_repo.py
"""
import json
import shutil
from pathlib import Path
from urllib.parse import urlencode

from skillminer.ingestion.transport import fixture_name

OUT = Path(__file__).parent / "small-repo"
API = "https://api.github.com"
REPO = f"{API}/repos/kit/lantern"
SINCE = "2020-01-01T00:00:00Z"
PAGE = 2


def url(base, **params):
    return base + ("?" + urlencode(params) if params else "")


def user(login):
    return {"login": login, "type": "User"}


def link(next_url):
    return {"Link": f'<{next_url}>; rel="next"'}


RATE = {"X-RateLimit-Remaining": "4990", "X-RateLimit-Reset": "1622505600"}

commits_url = f"{REPO}/commits"
list_commits = [
    {"sha": "s1", "author": user("kit"), "commit": {"author": {"date": "2020-03-01T10:00:00Z"}}},
    {"sha": "s2", "author": user("kit"), "commit": {"author": {"date": "2020-08-15T16:20:00Z"}}},
    {"sha": "s3", "author": user("rue"), "commit": {"author": {"date": "2021-01-10T09:00:00Z"}}},
    {"sha": "s4", "author": user("rue"), "commit": {"author": {"date": "2021-02-01T11:00:00Z"}}},
    {"sha": "s5", "author": user("rue"), "commit": {"author": {"date": "2021-02-02T08:45:00Z"}}},
    # committed with an e-mail that maps to no account
    {"sha": "s6", "author": None, "commit": {"author": {"date": "2021-02-03T08:00:00Z"}}},
]
commit_files = {
    "s1": [{"filename": "README.md", "additions": 20, "deletions": 0},
           {"filename": "src/lantern.py", "additions": 100, "deletions": 0}],
    "s2": [{"filename": "src/lantern.py", "additions": 30, "deletions": 10},
           {"filename": "node_modules/x/index.js", "additions": 500, "deletions": 0}],
    "s3": [{"filename": "lib/light.js", "additions": 40, "deletions": 0}],
    "s4": [{"filename": "src/lantern.py", "additions": 15, "deletions": 5},
           {"filename": "CONTRIBUTING.md", "additions": 8, "deletions": 0}],
    "s5": [{"filename": "scripts/run.sh", "additions": 6, "deletions": 0}],
}

exchanges = [
    ("GET", url(REPO), {"full_name": "kit/lantern", "owner": user("kit")}, {}),
    ("GET", url(f"{REPO}/collaborators", per_page=PAGE, affiliation="all"),
     [dict(user("kit"), permissions={"push": True, "admin": True}),
      dict(user("rue"), permissions={"push": True, "admin": False})], {}),
]

page_urls = [url(commits_url, per_page=PAGE, since=SINCE)] + [
    url(commits_url, per_page=PAGE, since=SINCE, page=n) for n in (2, 3)
]
for n in range(3):
    headers = link(page_urls[n + 1]) if n < 2 else {}
    exchanges.append(("GET", page_urls[n], list_commits[2 * n : 2 * n + 2], headers))
for sha, files in commit_files.items():
    exchanges.append(("GET", url(f"{commits_url}/{sha}"), {"sha": sha, "files": files}, {}))

exchanges += [
    ("GET", url(f"{REPO}/pulls", per_page=PAGE, state="all"), [
        {"id": 9003, "number": 3, "user": user("rue"), "created_at": "2021-02-01T12:00:00Z",
         "merged_at": "2021-02-03T10:00:00Z"},
        {"id": 9004, "number": 4, "user": user("kit"), "created_at": "2021-01-10T10:00:00Z",
         "merged_at": None},
    ], {}),
    ("GET", url(f"{REPO}/pulls/3"), {"id": 9003, "number": 3, "merged_by": user("kit")}, {}),
    ("GET", url(f"{REPO}/pulls/3/commits", per_page=PAGE), [{"sha": "s4"}, {"sha": "s5"}], {}),
    ("GET", url(f"{REPO}/pulls/4/commits", per_page=PAGE), [{"sha": "s3"}], {}),
]

issues_p1 = url(f"{REPO}/issues", per_page=PAGE, state="all", since=SINCE)
issues_p2 = url(f"{REPO}/issues", per_page=PAGE, state="all", since=SINCE, page=2)
exchanges += [
    ("GET", issues_p1, [
        {"id": 8001, "number": 1, "user": user("rue"), "created_at": "2020-11-02T09:00:00Z",
         "closed_at": "2020-11-04T09:00:00Z", "assignees": []},
        {"id": 9003, "number": 3, "user": user("rue"), "created_at": "2021-02-01T12:00:00Z",
         "closed_at": "2021-02-03T10:00:00Z", "assignees": [], "pull_request": {"url": f"{REPO}/pulls/3"}},
    ], link(issues_p2)),
    ("GET", issues_p2, [
        {"id": 8002, "number": 2, "user": user("kit"), "created_at": "2021-03-15T09:00:00Z",
         "closed_at": None, "assignees": [user("rue")]},
    ], {}),
    ("GET", url(f"{REPO}/issues/1"), {"id": 8001, "number": 1, "closed_by": user("kit")}, {}),
    ("GET", url(f"{REPO}/issues/comments", per_page=PAGE, since=SINCE), [
        {"id": 7001, "user": user("kit"), "created_at": "2020-11-02T09:30:00Z",
         "body": "Thanks for the report, looking now.", "issue_url": f"{REPO}/issues/1"},
        {"id": 7002, "user": user("kit"), "created_at": "2021-02-02T10:00:00Z",
         "body": "Nice work, merging after CI.", "issue_url": f"{REPO}/issues/3"},
    ], {}),
    ("GET", url(f"{REPO}/pulls/comments", per_page=PAGE, since=SINCE), [
        {"id": 7101, "user": user("kit"), "created_at": "2021-02-01T15:00:00Z",
         "body": "Could this use pathlib?", "pull_request_url": f"{REPO}/pulls/3"},
    ], {}),
]

graphql_query = {
    "query": 'query { u0: repositoryOwner(login: "kit") { login ... on User { followers { totalCount } } } '
    'u1: repositoryOwner(login: "rue") { login ... on User { followers { totalCount } } } }'
}


def main():
    if OUT.exists():
        shutil.rmtree(OUT)
    OUT.mkdir()
    seq = 0
    for method, u, body, headers in exchanges:
        seq += 1
        record = {"method": method, "url": u, "status": 200, "headers": dict(RATE, **headers), "body": body}
        (OUT / fixture_name(seq, method, u)).write_text(json.dumps(record, indent=2) + "\n")
    seq += 1
    graphql = {"data": {"u0": {"login": "kit", "followers": {"totalCount": 12}},
                        "u1": {"login": "rue", "followers": {"totalCount": 3}}}}
    record = {"method": "POST", "url": f"{API}/graphql", "status": 200, "headers": RATE, "body": graphql}
    (OUT / fixture_name(seq, "POST", f"{API}/graphql", graphql_query)).write_text(json.dumps(record, indent=2) + "\n")


if __name__ == "__main__":
    main()
