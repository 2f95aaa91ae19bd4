"""Cross-reference resolution: connect a case to its fixing PRs and commits.

References are scanned from the description and comment bodies ("#N", commit
hashes, PR URLs) and merged with any links the hosting API reported. Anything
that cannot be resolved against the snapshot is dropped with a warning rather
than kept as a dangling link.
"""

from __future__ import annotations

import logging
import re
from dataclasses import replace
from typing import Iterable

from qflake.corpus.models import PULL_REQUEST, CaseArtifact, Snapshot

logger = logging.getLogger(__name__)

_NUMBER_REF = re.compile(r"(?<![\w/])#(\d+)\b")
_URL_REF = re.compile(r"https?://[^\s/]+/([\w.-]+)/([\w.-]+)/(pull|issues)/(\d+)")
_COMMIT_REF = re.compile(r"\b[0-9a-f]{7,40}\b")


def _scan_texts(artifact: CaseArtifact) -> Iterable[str]:
    yield artifact.description
    for comment in artifact.comments:
        yield comment.body


def link_case(
    artifact: CaseArtifact,
    snapshot: Snapshot,
    api_links: Iterable[str] = (),
) -> CaseArtifact:
    """Populate linked_prs/linked_commits from text references and API links."""
    known_commits = snapshot.known_commits()
    prs: list[str] = list(artifact.linked_prs)
    commits: list[str] = list(artifact.linked_commits)

    def add_pr(candidate_id: str, source: str) -> None:
        if candidate_id == artifact.id:
            return
        target = snapshot.artifact_by_id(candidate_id)
        if target is None or target.kind != PULL_REQUEST:
            logger.warning("dropping unresolvable PR reference %r in %s (%s)",
                           candidate_id, artifact.id, source)
            return
        if candidate_id not in prs:
            prs.append(candidate_id)

    def add_commit(sha: str, source: str) -> None:
        matches = [known for known in known_commits if known.startswith(sha)]
        if len(matches) != 1:
            logger.warning("dropping unresolvable commit reference %r in %s (%s)",
                           sha, artifact.id, source)
            return
        if matches[0] not in commits:
            commits.append(matches[0])

    for text in _scan_texts(artifact):
        for match in _NUMBER_REF.finditer(text):
            add_pr(f"{artifact.repo_slug}#{match.group(1)}:pr", "text #N")
        for match in _URL_REF.finditer(text):
            owner, name, ref_kind, number = match.groups()
            if ref_kind != "pull":
                continue
            add_pr(f"{owner}/{name}#{number}:pr", "text URL")
        for match in _COMMIT_REF.finditer(text):
            token = match.group(0)
            # Bare "#123" digits also match the hex pattern; require a letter.
            if any(c.isalpha() for c in token):
                add_commit(token, "text hash")

    for link in api_links:
        if link.startswith("commit:"):
            add_commit(link.split(":", 1)[1], "api event")
        else:
            add_pr(link, "api event")

    return replace(artifact, linked_prs=tuple(prs), linked_commits=tuple(commits))


def effective_commits(artifact: CaseArtifact, snapshot: Snapshot) -> list[str]:
    """Fixing commits of a case: its own links plus those of its linked PRs,
    deduplicated in first-seen order."""
    seen: list[str] = []
    for sha in artifact.linked_commits:
        if sha not in seen:
            seen.append(sha)
    for pr_id in artifact.linked_prs:
        pr = snapshot.artifact_by_id(pr_id)
        if pr is None:
            continue
        for sha in pr.linked_commits:
            if sha not in seen:
                seen.append(sha)
    return seen
