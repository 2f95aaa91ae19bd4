"""Labeled cases with full provenance."""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from qflake.corpus.models import CaseArtifact, to_utc
from qflake.taxonomy import ROOT_CAUSE_NAMES, UNKNOWN_CAUSE, FixPattern

SOURCE_ORIGINAL = "original_dataset"
SOURCE_NEGATIVE_SAMPLING = "negative_sampling"
SOURCE_HARD_NEGATIVE = "hard_negative"

_SOURCE_RE = re.compile(
    r"^(original_dataset|negative_sampling|hard_negative|expansion_iter_[0-9]+)$"
)

_VALID_CAUSES = set(ROOT_CAUSE_NAMES) | {UNKNOWN_CAUSE}
_VALID_FIXES = {f.value for f in FixPattern}


def expansion_source(iteration: int) -> str:
    return f"expansion_iter_{iteration}"


@dataclass(frozen=True)
class Provenance:
    source: str
    reviewer_ids: tuple[str, ...] = ()
    reviewed_at: datetime | None = None

    def __post_init__(self) -> None:
        if not _SOURCE_RE.match(self.source):
            raise ValueError(f"unknown provenance source {self.source!r}")
        object.__setattr__(self, "reviewer_ids", tuple(self.reviewer_ids))
        if self.reviewed_at is not None:
            object.__setattr__(self, "reviewed_at", to_utc(self.reviewed_at))


@dataclass(frozen=True)
class LabeledCase:
    """A case plus its flakiness label, zero-or-more root causes, optional fix
    patterns (paired by index with the causes), and review provenance.

    Semantic invariants (flaky iff causes non-empty, reviewer counts) are
    checked by ``validate_dataset`` so that a non-conforming dataset can still
    be loaded and reported on.
    """

    case: CaseArtifact
    flaky: bool
    root_causes: tuple[str, ...] = ()
    fix_patterns: tuple[str, ...] = ()
    provenance: Provenance = Provenance(SOURCE_ORIGINAL)

    def __post_init__(self) -> None:
        object.__setattr__(self, "root_causes", tuple(self.root_causes))
        object.__setattr__(self, "fix_patterns", tuple(self.fix_patterns))
        for cause in self.root_causes:
            if cause not in _VALID_CAUSES:
                raise ValueError(f"unknown root cause {cause!r}")
        for fix in self.fix_patterns:
            if fix not in _VALID_FIXES:
                raise ValueError(f"unknown fix pattern {fix!r}")

    @property
    def id(self) -> str:
        return self.case.id

    def known_causes(self) -> tuple[str, ...]:
        """Root causes excluding Unknown (the RQ5-scorable labels)."""
        return tuple(c for c in self.root_causes if c != UNKNOWN_CAUSE)

    def cause_fix_pairs(self) -> list[tuple[str, str]]:
        """(cause, fix) observation pairs; a missing fix defaults to Others."""
        pairs = []
        for i, cause in enumerate(self.root_causes):
            fix = self.fix_patterns[i] if i < len(self.fix_patterns) else FixPattern.OTHERS.value
            pairs.append((cause, fix))
        return pairs
