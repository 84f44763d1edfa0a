from .github import TOKEN_ENV, FetchReport, FetchSpec, GitHubFetcher, RateLimitState, fetch_archive
from .merge import merge_archives
from .transport import FixtureTransport, HttpxTransport, RecordingTransport, Response, Transport

__all__ = [
    "TOKEN_ENV",
    "FetchReport",
    "FetchSpec",
    "FixtureTransport",
    "GitHubFetcher",
    "HttpxTransport",
    "RateLimitState",
    "RecordingTransport",
    "Response",
    "Transport",
    "fetch_archive",
    "merge_archives",
]
