"""HTTP transports: a live one and a replay one backed by recorded responses.

Recorded responses live in a directory as ``NNN-<method>-<urlhash>.json``
files, each holding ``{"method", "url", "status", "headers", "body"}``. The
hash covers the method, the URL with its query sorted, and the JSON request
body if there is one. ``NNN`` orders repeated responses to the same request.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Protocol
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

import httpx

from ..errors import RuntimeFailure

API_ROOT = "https://api.github.com"
_FIXTURE_NAME = re.compile(r"^(\d{3,})-([a-z]+)-([0-9a-f]+)\.json$")


@dataclass
class Response:
    status: int
    headers: dict[str, str] = field(default_factory=dict)
    body: Any = None

    def __post_init__(self):
        self.headers = {k.lower(): str(v) for k, v in self.headers.items()}

    def header(self, name: str) -> str | None:
        return self.headers.get(name.lower())


class Transport(Protocol):
    """Anything that can answer ``request``; implementations must be thread-safe."""

    def request(self, method: str, url: str, *, headers: Mapping[str, str] | None = None, json_body: Any = None) -> Response: ...


def canonical_url(url: str) -> str:
    parts = urlsplit(url)
    query = urlencode(sorted(parse_qsl(parts.query, keep_blank_values=True)))
    return urlunsplit((parts.scheme, parts.netloc, parts.path, query, ""))


def request_key(method: str, url: str, json_body: Any = None) -> str:
    text = f"{method.upper()} {canonical_url(url)}"
    if json_body is not None:
        text += "\n" + json.dumps(json_body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def fixture_name(seq: int, method: str, url: str, json_body: Any = None) -> str:
    return f"{seq:03d}-{method.lower()}-{request_key(method, url, json_body)}.json"


class FixtureTransport:
    """Replays recorded responses; never touches the network."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)
        if not self.directory.is_dir():
            raise RuntimeFailure(f"fixture directory {directory} does not exist")
        self._responses: dict[tuple[str, str], list[Response]] = defaultdict(list)
        for path in sorted(self.directory.iterdir(), key=lambda p: p.name):
            m = _FIXTURE_NAME.match(path.name)
            if not m:
                continue
            data = json.loads(path.read_text(encoding="utf-8"))
            self._responses[(m.group(2), m.group(3))].append(
                Response(int(data["status"]), data.get("headers", {}), data.get("body"))
            )
        self._served: dict[tuple[str, str], int] = defaultdict(int)
        self._lock = threading.Lock()
        self.requests: list[tuple[str, str]] = []

    def request(self, method, url, *, headers=None, json_body=None):
        key = (method.lower(), request_key(method, url, json_body))
        with self._lock:
            self.requests.append((method.upper(), url))
            recorded = self._responses.get(key)
            if not recorded:
                return Response(404, {}, {"message": f"no recorded response for {method.upper()} {url}"})
            n = self._served[key]
            self._served[key] = n + 1
            return recorded[min(n, len(recorded) - 1)]


class RecordingTransport:
    """Wraps another transport and writes every exchange as a fixture file."""

    def __init__(self, inner: Transport, directory: str | os.PathLike):
        self.inner = inner
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._seq = 0
        self._lock = threading.Lock()

    def request(self, method, url, *, headers=None, json_body=None):
        response = self.inner.request(method, url, headers=headers, json_body=json_body)
        with self._lock:
            self._seq += 1
            name = fixture_name(self._seq, method, url, json_body)
            record = {"method": method.upper(), "url": url, "status": response.status, "headers": response.headers, "body": response.body}
            (self.directory / name).write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return response


class HttpxTransport:
    def __init__(self, timeout: float = 30.0):
        self._client = httpx.Client(timeout=timeout, follow_redirects=True)

    def request(self, method, url, *, headers=None, json_body=None):
        try:
            r = self._client.request(method, url, headers=dict(headers or {}), json=json_body)
        except httpx.HTTPError as exc:
            raise RuntimeFailure(f"{method} {url}: {exc}") from None
        try:
            body = r.json() if r.content else None
        except ValueError:
            body = r.text
        return Response(r.status_code, dict(r.headers), body)

    def close(self) -> None:
        self._client.close()
