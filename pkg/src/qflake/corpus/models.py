"""Domain types for the mined corpus.

All timestamps are normalized to UTC. Snapshot values are immutable after
construction and safe to share read-only across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

ISSUE = "issue"
PULL_REQUEST = "pull_request"

_KIND_ORDER = {ISSUE: 0, PULL_REQUEST: 1}


def to_utc(ts: datetime) -> datetime:
    """Normalize a timestamp to UTC; naive datetimes are taken as UTC."""
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_utc(ts: datetime) -> str:
    return to_utc(ts).isoformat()


def parse_utc(text: str) -> datetime:
    return to_utc(datetime.fromisoformat(text.replace("Z", "+00:00")))


@dataclass(frozen=True)
class RepositoryRef:
    platform: str
    name: str
    default_branch: str = "main"

    def __post_init__(self) -> None:
        if not self.platform or not self.name:
            raise ValueError("platform and name must be non-empty")

    @property
    def slug(self) -> str:
        return f"{self.platform}/{self.name}"


@dataclass(frozen=True)
class Comment:
    author: str
    created_at: datetime
    body: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "created_at", to_utc(self.created_at))


def case_id(repo: RepositoryRef, number: int, kind: str = ISSUE) -> str:
    """Stable case key: ``platform/name#number`` with a ``:pr`` suffix for PRs."""
    suffix = ":pr" if kind == PULL_REQUEST else ""
    return f"{repo.platform}/{repo.name}#{number}{suffix}"


@dataclass(frozen=True)
class CaseArtifact:
    id: str
    kind: str
    number: int
    title: str
    description: str
    comments: tuple[Comment, ...] = ()
    state: str = "closed"
    linked_prs: tuple[str, ...] = ()
    linked_commits: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown artifact kind: {self.kind!r}")
        if self.number <= 0:
            raise ValueError("artifact number must be positive")
        object.__setattr__(self, "comments", tuple(self.comments))
        object.__setattr__(self, "linked_prs", tuple(self.linked_prs))
        object.__setattr__(self, "linked_commits", tuple(self.linked_commits))
        ordered = sorted(self.comments, key=lambda c: c.created_at)
        if list(ordered) != list(self.comments):
            object.__setattr__(self, "comments", tuple(ordered))
        if self.kind == PULL_REQUEST and self.id in self.linked_prs:
            raise ValueError("a pull request cannot link itself")

    @property
    def repo_slug(self) -> str:
        return self.id.split("#", 1)[0]

    def sort_key(self) -> tuple[str, int, int]:
        return (self.repo_slug, _KIND_ORDER[self.kind], self.number)


@dataclass(frozen=True)
class CommitInfo:
    """Parent linkage and touched paths for a fetched commit."""

    sha: str
    parents: tuple[str, ...]
    files: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "files", tuple(self.files))


@dataclass(frozen=True)
class FetchFailure:
    commit: str
    path: str
    reason: str


@dataclass(frozen=True)
class Snapshot:
    created_at: datetime
    repositories: tuple[RepositoryRef, ...] = ()
    artifacts: tuple[CaseArtifact, ...] = ()
    commits: tuple[CommitInfo, ...] = ()
    file_payloads: dict[tuple[str, str], bytes] = field(default_factory=dict)
    fetch_failures: tuple[FetchFailure, ...] = ()

    def __post_init__(self) -> None:
        # Canonical ordering at construction keeps serialization byte-stable
        # and makes snapshot equality independent of assembly order.
        object.__setattr__(self, "created_at", to_utc(self.created_at))
        object.__setattr__(
            self,
            "repositories",
            tuple(sorted(self.repositories, key=lambda r: (r.platform, r.name))),
        )
        object.__setattr__(
            self, "artifacts", tuple(sorted(self.artifacts, key=lambda a: a.sort_key()))
        )
        object.__setattr__(
            self, "commits", tuple(sorted(self.commits, key=lambda c: c.sha))
        )
        object.__setattr__(
            self,
            "fetch_failures",
            tuple(sorted(self.fetch_failures, key=lambda f: (f.commit, f.path))),
        )
        slugs = [r.slug for r in self.repositories]
        if len(set(slugs)) != len(slugs):
            raise ValueError("duplicate (platform, name) in snapshot repositories")

    def artifact_by_id(self, artifact_id: str) -> CaseArtifact | None:
        return self._artifact_index().get(artifact_id)

    def _artifact_index(self) -> dict[str, CaseArtifact]:
        cached = self.__dict__.get("_index")
        if cached is None:
            cached = {a.id: a for a in self.artifacts}
            self.__dict__["_index"] = cached
        return cached

    def commit_by_sha(self, sha: str) -> CommitInfo | None:
        for info in self.commits:
            if info.sha == sha:
                return info
        return None

    def known_commits(self) -> set[str]:
        known = {info.sha for info in self.commits}
        known.update(commit for commit, _ in self.file_payloads)
        known.update(f.commit for f in self.fetch_failures)
        return known

    def payload_text(self, commit: str, path: str) -> str | None:
        raw = self.file_payloads.get((commit, path))
        if raw is None:
            return None
        return raw.decode("utf-8")

    def with_artifacts(self, artifacts: list[CaseArtifact]) -> "Snapshot":
        return replace(self, artifacts=tuple(artifacts))
