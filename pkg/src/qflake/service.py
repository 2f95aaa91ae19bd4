"""HTTP triage service: the human-in-the-loop side of the expansion loop.

Reviewers pull ranked candidates (report text plus pre-fix diff), submit
confirm/reject labels with root causes, and advance the expansion iteration.
State mutations are serialized through one lock (single writer); every response
carries the current iteration number. Labels buffer between iterations and are
applied atomically by POST /iterate, which is what folds confirmations into
the seed set. Gold labels of already-finalized dataset cases are never exposed
or accepted here.
"""

from __future__ import annotations

import json
import logging
import threading
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field

from qflake.codectx import diff_changed_files
from qflake.corpus.models import Snapshot
from qflake.errors import NoLinkedChangeError
from qflake.promptkit.conditions import ReportLevel
from qflake.promptkit.conversation import build_report_text
from qflake.simsearch.embedding import EmbeddingVector
from qflake.simsearch.expansion import (
    CONFIRM,
    ExpansionState,
    TriageLabel,
    expansion_step,
    load_state,
    save_state,
)
from qflake.taxonomy import ROOT_CAUSE_NAMES

logger = logging.getLogger(__name__)


class LabelRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    case_id: str = Field(min_length=1)
    decision: Literal["confirm", "reject"]
    root_causes: list[str] = Field(default_factory=list)
    reviewer: str = ""
    note: str = ""


class TriageService:
    def __init__(
        self,
        state_path: str | Path,
        embeddings: dict[str, EmbeddingVector],
        snapshot: Snapshot | None = None,
        protected_ids: frozenset[str] = frozenset(),
    ) -> None:
        self.state_path = Path(state_path)
        self.embeddings = embeddings
        self.corpus = sorted(embeddings)
        self.snapshot = snapshot
        self.protected_ids = protected_ids
        self.state: ExpansionState = load_state(self.state_path)
        self.pending_labels: dict[str, TriageLabel] = {}
        self._lock = threading.Lock()
        self._buffer_path = self.state_path.with_suffix(self.state_path.suffix + ".labels")
        if self._buffer_path.exists():
            raw = json.loads(self._buffer_path.read_text(encoding="utf-8"))
            self.pending_labels = {
                cid: TriageLabel(
                    rec["decision"], tuple(rec["root_causes"]), rec["reviewer"], rec["note"]
                )
                for cid, rec in raw.items()
            }

    def _persist_buffer(self) -> None:
        payload = {
            cid: {
                "decision": label.decision,
                "root_causes": list(label.root_causes),
                "reviewer": label.reviewer,
                "note": label.note,
            }
            for cid, label in self.pending_labels.items()
        }
        self._buffer_path.write_text(
            json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )

    # -- views ---------------------------------------------------------------

    def state_view(self) -> dict:
        confirmed = self.state.confirmed_by_iteration
        return {
            "iteration": self.state.iteration,
            "seed_count": len(self.state.all_seeds()),
            "confirmed_by_iteration": [len(batch) for batch in confirmed],
            "confirmed_total": len(self.state.confirmed_ids()),
            "rejected_total": len(self.state.rejected_ids),
            "queue_length": len(self._visible_queue()),
            "pending_label_count": len(self.pending_labels),
            "fixed_point": self.state.fixed_point,
        }

    def _visible_queue(self):
        return [
            c
            for c in self.state.pending_queue
            if c.case_id not in self.pending_labels and c.case_id not in self.protected_ids
        ]

    def _diff_view(self, case_id: str) -> list[dict]:
        if self.snapshot is None:
            return []
        artifact = self.snapshot.artifact_by_id(case_id)
        if artifact is None:
            return []
        try:
            changes = diff_changed_files(artifact, self.snapshot)
        except NoLinkedChangeError:
            return []
        return [
            {
                "path": change.path,
                "before": change.before,
                "after": change.after,
                "changed_line_ranges_before": [list(r) for r in change.changed_line_ranges_before],
            }
            for change in changes
        ]

    def queue_view(self) -> dict:
        items = []
        for candidate in self._visible_queue():
            report = ""
            title = ""
            if self.snapshot is not None:
                artifact = self.snapshot.artifact_by_id(candidate.case_id)
                if artifact is not None:
                    title = artifact.title
                    report = build_report_text(artifact, ReportLevel.FULL)
            items.append(
                {
                    "case_id": candidate.case_id,
                    "title": title,
                    "score": candidate.score,
                    "nearest_seed_id": candidate.nearest_seed_id,
                    "report_text": report,
                    "diff": self._diff_view(candidate.case_id),
                    "suggested_root_causes": [],
                }
            )
        return {"iteration": self.state.iteration, "items": items}

    # -- mutations -------------------------------------------------------------

    def submit_label(self, request: LabelRequest) -> dict:
        with self._lock:
            cid = request.case_id
            if cid in self.protected_ids:
                raise HTTPException(409, f"{cid} is a finalized dataset case")
            if cid in self.pending_labels or cid in self.state.labeled_ids():
                raise HTTPException(409, f"{cid} is already labeled")
            queued = {c.case_id for c in self.state.pending_queue}
            if cid not in queued:
                raise HTTPException(400, f"{cid} is not in the pending queue")
            if request.decision == CONFIRM:
                bad = [c for c in request.root_causes if c not in ROOT_CAUSE_NAMES]
                if bad or not request.root_causes:
                    raise HTTPException(
                        400, "confirmation requires at least one canonical root cause"
                    )
            self.pending_labels[cid] = TriageLabel(
                request.decision,
                tuple(request.root_causes),
                request.reviewer,
                request.note,
            )
            self._persist_buffer()
            return {
                "iteration": self.state.iteration,
                "case_id": cid,
                "decision": request.decision,
                "pending_label_count": len(self.pending_labels),
            }

    def iterate(self) -> dict:
        with self._lock:
            labels = dict(self.pending_labels)
            self.state = expansion_step(self.state, labels, self.corpus, self.embeddings)
            save_state(self.state, self.state_path)
            self.pending_labels = {}
            self._persist_buffer()
            return self.state_view()


def create_app(service: TriageService, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="qflake triage")

    @app.get("/state")
    def get_state() -> dict:
        return service.state_view()

    @app.get("/queue")
    def get_queue() -> dict:
        return service.queue_view()

    @app.post("/labels")
    def post_labels(request: LabelRequest) -> dict:
        return service.submit_label(request)

    @app.post("/iterate")
    def post_iterate() -> dict:
        return service.iterate()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app
