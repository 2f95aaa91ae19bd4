"""Read-only client for a GitHub-style hosting REST API.

The base URL is configurable so tests (and air-gapped runs) can point it at a
local mock server. Only the endpoints the pipeline needs are wrapped: closed
issues/PRs with comment threads, PR commit lists, commit details, and file
contents at a ref.
"""

from __future__ import annotations

import base64
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Iterable

import requests

from qflake.corpus.models import (
    ISSUE,
    PULL_REQUEST,
    CaseArtifact,
    Comment,
    CommitInfo,
    RepositoryRef,
    case_id,
    parse_utc,
)
from qflake.errors import AuthError, NotFoundError, ProviderError, RateLimitedError

logger = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://api.github.com"
_RETRYABLE_STATUS = {500, 502, 503, 504}


class HostingApiClient:
    def __init__(
        self,
        base_url: str = DEFAULT_BASE_URL,
        token: str | None = None,
        *,
        per_page: int = 100,
        max_retries: int = 3,
        parallelism: int = 4,
        timeout_s: float = 30.0,
        exclude_comment_authors: Iterable[str] = (),
        session: requests.Session | None = None,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.token = token
        self.per_page = per_page
        self.max_retries = max_retries
        self.parallelism = max(1, parallelism)
        self.timeout_s = timeout_s
        # Bot comments are kept by default; dropping them silently would change
        # the full-report text, so exclusion is an explicit opt-in pattern list.
        self._author_excludes = [re.compile(p) for p in exclude_comment_authors]
        self._session = session or requests.Session()

    # -- transport ----------------------------------------------------------

    def _get(self, path: str, params: dict[str, Any] | None = None) -> Any:
        url = f"{self.base_url}{path}"
        headers = {"Accept": "application/vnd.github+json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        last_exc: Exception | None = None
        for attempt in range(self.max_retries):
            try:
                resp = self._session.get(
                    url, params=params, headers=headers, timeout=self.timeout_s
                )
            except requests.RequestException as exc:
                last_exc = exc
                time.sleep(min(2.0, 0.2 * 2**attempt))
                continue
            if resp.status_code == 200:
                return resp.json()
            if resp.status_code in (403, 429) and (
                resp.headers.get("Retry-After")
                or resp.headers.get("X-RateLimit-Remaining") == "0"
            ):
                retry_after = float(resp.headers.get("Retry-After", "60"))
                raise RateLimitedError(f"rate limited on {url}", retry_after_s=retry_after)
            if resp.status_code in (401, 403):
                raise AuthError(f"credentials rejected for {url} ({resp.status_code})")
            if resp.status_code == 404:
                raise NotFoundError(f"not found: {url}")
            if resp.status_code in _RETRYABLE_STATUS:
                last_exc = ProviderError(f"{url} returned {resp.status_code}")
                time.sleep(min(2.0, 0.2 * 2**attempt))
                continue
            raise ProviderError(f"{url} returned unexpected status {resp.status_code}")
        raise ProviderError(f"{url} unreachable after {self.max_retries} attempts: {last_exc}")

    def _paged(self, path: str, params: dict[str, Any] | None = None) -> list[Any]:
        items: list[Any] = []
        page = 1
        while True:
            merged = dict(params or {})
            merged.update({"per_page": self.per_page, "page": page})
            batch = self._get(path, merged)
            if not isinstance(batch, list):
                raise ProviderError(f"{path} returned a non-list page")
            items.extend(batch)
            if len(batch) < self.per_page:
                return items
            page += 1

    # -- endpoints ----------------------------------------------------------

    def _author_excluded(self, author: str) -> bool:
        return any(pattern.search(author) for pattern in self._author_excludes)

    def fetch_comments(self, repo: RepositoryRef, number: int) -> tuple[Comment, ...]:
        rows = self._paged(f"/repos/{repo.platform}/{repo.name}/issues/{number}/comments")
        comments = [
            Comment(
                author=(row.get("user") or {}).get("login", ""),
                created_at=parse_utc(row["created_at"]),
                body=row.get("body") or "",
            )
            for row in rows
            if not self._author_excluded((row.get("user") or {}).get("login", ""))
        ]
        comments.sort(key=lambda c: c.created_at)
        return tuple(comments)

    def fetch_closed_artifacts(self, repo: RepositoryRef) -> list[CaseArtifact]:
        """Every closed issue and PR of the repo, with full comment threads,
        ordered by (kind, number)."""
        rows = self._paged(
            f"/repos/{repo.platform}/{repo.name}/issues", {"state": "closed"}
        )
        numbers = [int(row["number"]) for row in rows]
        with ThreadPoolExecutor(max_workers=self.parallelism) as pool:
            threads = list(pool.map(lambda n: self.fetch_comments(repo, n), numbers))
        artifacts = []
        for row, comments in zip(rows, threads):
            kind = PULL_REQUEST if row.get("pull_request") else ISSUE
            number = int(row["number"])
            artifacts.append(
                CaseArtifact(
                    id=case_id(repo, number, kind),
                    kind=kind,
                    number=number,
                    title=row.get("title") or "",
                    description=row.get("body") or "",
                    comments=comments,
                    state=row.get("state", "closed"),
                )
            )
        artifacts.sort(key=lambda a: a.sort_key())
        return artifacts

    def fetch_pr_commits(self, repo: RepositoryRef, number: int) -> list[str]:
        rows = self._paged(f"/repos/{repo.platform}/{repo.name}/pulls/{number}/commits")
        return [row["sha"] for row in rows]

    def fetch_commit(self, repo: RepositoryRef, sha: str) -> CommitInfo:
        row = self._get(f"/repos/{repo.platform}/{repo.name}/commits/{sha}")
        return CommitInfo(
            sha=row["sha"],
            parents=tuple(p["sha"] for p in row.get("parents", [])),
            files=tuple(f["filename"] for f in row.get("files", [])),
        )

    def fetch_file(self, repo: RepositoryRef, sha: str, path: str) -> bytes | None:
        """File bytes at a ref, or None when the file does not exist there."""
        try:
            row = self._get(
                f"/repos/{repo.platform}/{repo.name}/contents/{path}", {"ref": sha}
            )
        except NotFoundError:
            return None
        if row.get("encoding") == "base64":
            return base64.b64decode(row["content"])
        return str(row.get("content", "")).encode("utf-8")


def fetch_closed_artifacts(repo: RepositoryRef, api: HostingApiClient) -> list[CaseArtifact]:
    return api.fetch_closed_artifacts(repo)
