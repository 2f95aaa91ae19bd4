"""Iterative expansion of the seed set with human-confirmed labels.

Each step applies reviewer decisions to the pending queue, folds confirmations
into the effective seed set, and re-ranks the remaining corpus. State is a
versioned, replayable record persisted after every step so an interrupted
expansion run resumes without losing or duplicating labels.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping

from qflake.errors import IoError, SchemaVersionMismatchError, UnknownCandidateError
from qflake.simsearch.embedding import EmbeddingVector
from qflake.simsearch.ranking import DEFAULT_QUEUE_SIZE, RankedCandidate, rank_candidates

STATE_SCHEMA_VERSION = "1"

CONFIRM = "confirm"
REJECT = "reject"


@dataclass(frozen=True)
class TriageLabel:
    decision: str
    root_causes: tuple[str, ...] = ()
    reviewer: str = ""
    note: str = ""

    def __post_init__(self) -> None:
        if self.decision not in (CONFIRM, REJECT):
            raise ValueError(f"unknown decision {self.decision!r}")
        object.__setattr__(self, "root_causes", tuple(self.root_causes))


@dataclass(frozen=True)
class LabelEvent:
    iteration: int
    case_id: str
    label: TriageLabel


@dataclass(frozen=True)
class ExpansionState:
    iteration: int
    seed_ids: frozenset[str]
    confirmed_by_iteration: tuple[tuple[str, ...], ...] = ()
    rejected_ids: frozenset[str] = frozenset()
    pending_queue: tuple[RankedCandidate, ...] = ()
    queue_size: int = DEFAULT_QUEUE_SIZE
    events: tuple[LabelEvent, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed_ids", frozenset(self.seed_ids))
        object.__setattr__(self, "rejected_ids", frozenset(self.rejected_ids))
        object.__setattr__(
            self,
            "confirmed_by_iteration",
            tuple(tuple(batch) for batch in self.confirmed_by_iteration),
        )
        object.__setattr__(self, "pending_queue", tuple(self.pending_queue))
        object.__setattr__(self, "events", tuple(self.events))
        confirmed = self.confirmed_ids()
        if self.seed_ids & confirmed or self.seed_ids & self.rejected_ids \
                or confirmed & self.rejected_ids:
            raise ValueError("seed, confirmed, and rejected sets must be disjoint")
        scores = [c.score for c in self.pending_queue]
        if scores != sorted(scores, reverse=True):
            raise ValueError("pending queue must be sorted by descending score")

    def confirmed_ids(self) -> frozenset[str]:
        return frozenset(cid for batch in self.confirmed_by_iteration for cid in batch)

    def all_seeds(self) -> frozenset[str]:
        """Original seeds plus every confirmation so far."""
        return self.seed_ids | self.confirmed_ids()

    def labeled_ids(self) -> frozenset[str]:
        return self.confirmed_ids() | self.rejected_ids

    @property
    def fixed_point(self) -> bool:
        if not self.pending_queue:
            return True
        return self.iteration > 0 and not self.confirmed_by_iteration[-1]

    def label_for(self, case_id: str) -> TriageLabel | None:
        for event in reversed(self.events):
            if event.case_id == case_id:
                return event.label
        return None


def initial_state(
    corpus: list[str],
    seeds: list[str],
    embeddings: Mapping[str, EmbeddingVector],
    *,
    k: int = DEFAULT_QUEUE_SIZE,
) -> ExpansionState:
    queue = rank_candidates(corpus, seeds, embeddings, k)
    return ExpansionState(
        iteration=0,
        seed_ids=frozenset(seeds),
        pending_queue=tuple(queue),
        queue_size=k,
    )


def expansion_step(
    state: ExpansionState,
    labels: Mapping[str, TriageLabel],
    corpus: list[str],
    embeddings: Mapping[str, EmbeddingVector],
) -> ExpansionState:
    """Apply one triage round and re-rank.

    Confirmed ids join the effective seed set for the next iteration; rejected
    ids are never re-queued. Every labeled id must be in the pending queue.
    """
    queued = {c.case_id for c in state.pending_queue}
    for cid in labels:
        if cid not in queued:
            raise UnknownCandidateError(f"{cid} is not in the pending queue")

    confirmed = tuple(sorted(cid for cid, lab in labels.items() if lab.decision == CONFIRM))
    rejected = frozenset(cid for cid, lab in labels.items() if lab.decision == REJECT)
    next_iteration = state.iteration + 1
    events = state.events + tuple(
        LabelEvent(next_iteration, cid, labels[cid]) for cid in sorted(labels)
    )

    seeds_after = state.all_seeds() | set(confirmed)
    rejected_after = state.rejected_ids | rejected
    queue = rank_candidates(
        corpus,
        seeds_after,
        embeddings,
        state.queue_size,
        excluded=rejected_after,
    )
    return replace(
        state,
        iteration=next_iteration,
        confirmed_by_iteration=state.confirmed_by_iteration + (confirmed,),
        rejected_ids=rejected_after,
        pending_queue=tuple(queue),
        events=events,
    )


# --- persistence -------------------------------------------------------------


def save_state(state: ExpansionState, path: str | Path) -> None:
    target = Path(path)
    record = {
        "schema_version": STATE_SCHEMA_VERSION,
        "iteration": state.iteration,
        "seed_ids": sorted(state.seed_ids),
        "confirmed_by_iteration": [list(batch) for batch in state.confirmed_by_iteration],
        "rejected_ids": sorted(state.rejected_ids),
        "queue_size": state.queue_size,
        "pending_queue": [
            {"case_id": c.case_id, "score": c.score, "nearest_seed_id": c.nearest_seed_id}
            for c in state.pending_queue
        ],
        "events": [
            {
                "iteration": e.iteration,
                "case_id": e.case_id,
                "decision": e.label.decision,
                "root_causes": list(e.label.root_causes),
                "reviewer": e.label.reviewer,
                "note": e.label.note,
            }
            for e in state.events
        ],
    }
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp = target.with_suffix(target.suffix + ".tmp")
        tmp.write_text(
            json.dumps(record, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
        os.replace(tmp, target)
    except OSError as exc:
        raise IoError(f"cannot write expansion state to {target}: {exc}") from exc


def load_state(path: str | Path) -> ExpansionState:
    source = Path(path)
    try:
        record = json.loads(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoError(f"cannot read expansion state from {source}: {exc}") from exc
    version = record.get("schema_version")
    if version != STATE_SCHEMA_VERSION:
        raise SchemaVersionMismatchError(
            f"expansion state schema {version!r} is not supported"
        )
    return ExpansionState(
        iteration=record["iteration"],
        seed_ids=frozenset(record["seed_ids"]),
        confirmed_by_iteration=tuple(tuple(b) for b in record["confirmed_by_iteration"]),
        rejected_ids=frozenset(record["rejected_ids"]),
        pending_queue=tuple(
            RankedCandidate(c["case_id"], c["score"], c["nearest_seed_id"])
            for c in record["pending_queue"]
        ),
        queue_size=record["queue_size"],
        events=tuple(
            LabelEvent(
                e["iteration"],
                e["case_id"],
                TriageLabel(e["decision"], tuple(e["root_causes"]), e["reviewer"], e["note"]),
            )
            for e in record["events"]
        ),
    )
