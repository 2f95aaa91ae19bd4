"""Mining of closed issue reports and pull requests into an offline snapshot."""

from qflake.corpus.github import HostingApiClient, fetch_closed_artifacts
from qflake.corpus.links import link_case
from qflake.corpus.models import (
    CaseArtifact,
    Comment,
    CommitInfo,
    FetchFailure,
    RepositoryRef,
    Snapshot,
)
from qflake.corpus.snapshot import read_snapshot, write_snapshot

__all__ = [
    "CaseArtifact",
    "Comment",
    "CommitInfo",
    "FetchFailure",
    "HostingApiClient",
    "RepositoryRef",
    "Snapshot",
    "fetch_closed_artifacts",
    "link_case",
    "read_snapshot",
    "write_snapshot",
]
