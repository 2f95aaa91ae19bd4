"""Threaded mock of the hosting REST API, driven by an in-memory description.

Exercises the real HTTP client end to end (pagination, auth, rate limiting)
without any network access beyond localhost.
"""

from __future__ import annotations

import base64
import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

_ISSUES_RE = re.compile(r"^/repos/([^/]+)/([^/]+)/issues$")
_COMMENTS_RE = re.compile(r"^/repos/([^/]+)/([^/]+)/issues/(\d+)/comments$")
_PR_COMMITS_RE = re.compile(r"^/repos/([^/]+)/([^/]+)/pulls/(\d+)/commits$")
_COMMIT_RE = re.compile(r"^/repos/([^/]+)/([^/]+)/commits/([0-9a-f]+)$")
_CONTENTS_RE = re.compile(r"^/repos/([^/]+)/([^/]+)/contents/(.+)$")


class MockGitHub:
    """repos: slug -> {"issues": [...], "comments": {n: [...]},
    "pr_commits": {n: [sha]}, "commits": {sha: {...}}, "files": {(sha, path): str}}
    """

    def __init__(
        self,
        repos: dict[str, dict],
        *,
        require_token: str | None = None,
        rate_limit_after: int | None = None,
    ) -> None:
        self.repos = repos
        self.require_token = require_token
        self.rate_limit_after = rate_limit_after
        self.request_count = 0
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args) -> None:
                pass

            def _send(self, status: int, payload, headers: dict[str, str] | None = None) -> None:
                body = json.dumps(payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                for key, value in (headers or {}).items():
                    self.send_header(key, value)
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self) -> None:  # noqa: N802
                outer.request_count += 1
                if (
                    outer.rate_limit_after is not None
                    and outer.request_count > outer.rate_limit_after
                ):
                    self._send(429, {"message": "rate limited"}, {"Retry-After": "7"})
                    return
                if outer.require_token is not None:
                    expected = f"Bearer {outer.require_token}"
                    if self.headers.get("Authorization") != expected:
                        self._send(401, {"message": "bad credentials"})
                        return

                url = urlparse(self.path)
                params = {k: v[0] for k, v in parse_qs(url.query).items()}
                path = url.path

                match = _ISSUES_RE.match(path)
                if match:
                    repo = outer._repo(match)
                    if repo is None:
                        self._send(404, {"message": "not found"})
                        return
                    rows = [r for r in repo["issues"] if r.get("state") == params.get("state", "closed")]
                    self._send(200, _page(rows, params))
                    return

                match = _COMMENTS_RE.match(path)
                if match:
                    repo = outer._repo(match)
                    if repo is None:
                        self._send(404, {"message": "not found"})
                        return
                    rows = repo.get("comments", {}).get(int(match.group(3)), [])
                    self._send(200, _page(rows, params))
                    return

                match = _PR_COMMITS_RE.match(path)
                if match:
                    repo = outer._repo(match)
                    shas = repo.get("pr_commits", {}).get(int(match.group(3)), [])
                    self._send(200, _page([{"sha": s} for s in shas], params))
                    return

                match = _COMMIT_RE.match(path)
                if match:
                    repo = outer._repo(match)
                    info = repo.get("commits", {}).get(match.group(3))
                    if info is None:
                        self._send(404, {"message": "unknown commit"})
                        return
                    self._send(200, info)
                    return

                match = _CONTENTS_RE.match(path)
                if match:
                    repo = outer._repo(match)
                    blob = repo.get("files", {}).get((params.get("ref", ""), match.group(3)))
                    if blob is None:
                        self._send(404, {"message": "no such file"})
                        return
                    encoded = base64.b64encode(blob.encode("utf-8")).decode("ascii")
                    self._send(200, {"content": encoded, "encoding": "base64"})
                    return

                self._send(404, {"message": f"unhandled path {path}"})

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def _repo(self, match: re.Match) -> dict | None:
        return self.repos.get(f"{match.group(1)}/{match.group(2)}")

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def __enter__(self) -> "MockGitHub":
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self._server.shutdown()
        self._server.server_close()


def _page(rows: list, params: dict) -> list:
    per_page = int(params.get("per_page", 100))
    page = int(params.get("page", 1))
    start = (page - 1) * per_page
    return rows[start : start + per_page]


def issue_row(number: int, title: str, body: str, *, pr: bool = False, state: str = "closed") -> dict:
    row = {
        "number": number,
        "title": title,
        "body": body,
        "state": state,
        "user": {"login": "reporter"},
    }
    if pr:
        row["pull_request"] = {"url": f"pulls/{number}"}
    return row


def comment_row(author: str, created_at: str, body: str) -> dict:
    return {"user": {"login": author}, "created_at": created_at, "body": body}
