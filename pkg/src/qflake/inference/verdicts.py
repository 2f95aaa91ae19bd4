"""Verdict parsing and the append-only verdict store.

Parsing is strict-first: an exact canonical token match wins; otherwise a
case-insensitive search must find exactly one canonical label. Anything else is
unusable — the parser never guesses between two matched labels, and the raw
response is always retained for audit.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from qflake.errors import IoError
from qflake.promptkit.conversation import STAGE_RQ5, Conversation
from qflake.taxonomy import (
    FLAKY_TOKEN,
    NON_FLAKY_TOKEN,
    RootCauseClass,
    parse_root_cause,
)

OUTCOME_FLAKY = "flaky"
OUTCOME_NON_FLAKY = "non_flaky"
OUTCOME_ROOT_CAUSE = "root_cause"
OUTCOME_UNUSABLE = "unusable"

_NON_FLAKY_RE = re.compile(r"non-flaky", re.IGNORECASE)
_FLAKY_RE = re.compile(r"flaky", re.IGNORECASE)


@dataclass(frozen=True)
class Verdict:
    stage: str
    outcome: str
    raw_response: str
    latency_ms: int = 0
    provider: str = ""
    root_cause: RootCauseClass | None = None

    def __post_init__(self) -> None:
        if (self.outcome == OUTCOME_ROOT_CAUSE) != (self.root_cause is not None):
            raise ValueError("root_cause must be set exactly for root_cause outcomes")
        if self.outcome == OUTCOME_ROOT_CAUSE and self.stage != STAGE_RQ5:
            raise ValueError("root_cause outcomes only occur at the rq5 stage")

    @property
    def usable(self) -> bool:
        return self.outcome != OUTCOME_UNUSABLE


def parse_verdict(raw: str, stage: str) -> tuple[str, RootCauseClass | None]:
    """Outcome for a raw model response at the given stage."""
    text = raw.strip()
    if stage == STAGE_RQ5:
        exact = parse_root_cause(text) or parse_root_cause(text.strip("\"'.").strip())
        if exact is not None:
            return OUTCOME_ROOT_CAUSE, exact
        found = {
            cause
            for cause in RootCauseClass
            if re.search(re.escape(cause.value), text, re.IGNORECASE)
        }
        if RootCauseClass.OTHERS in found and len(found) > 1:
            # "Others" can appear as a substring of prose; prefer a specific class.
            found.discard(RootCauseClass.OTHERS)
        if len(found) == 1:
            return OUTCOME_ROOT_CAUSE, found.pop()
        return OUTCOME_UNUSABLE, None

    if text == FLAKY_TOKEN:
        return OUTCOME_FLAKY, None
    if text == NON_FLAKY_TOKEN:
        return OUTCOME_NON_FLAKY, None
    non_flaky_hits = len(_NON_FLAKY_RE.findall(text))
    flaky_hits = len(_FLAKY_RE.findall(text)) - non_flaky_hits
    if non_flaky_hits > 0 and flaky_hits == 0:
        return OUTCOME_NON_FLAKY, None
    if flaky_hits > 0 and non_flaky_hits == 0:
        return OUTCOME_FLAKY, None
    return OUTCOME_UNUSABLE, None


def verdict_from_response(
    raw: str, stage: str, *, latency_ms: int = 0, provider: str = ""
) -> Verdict:
    outcome, cause = parse_verdict(raw, stage)
    return Verdict(
        stage=stage,
        outcome=outcome,
        raw_response=raw,
        latency_ms=latency_ms,
        provider=provider,
        root_cause=cause,
    )


def conversation_hash(conversation: Conversation) -> str:
    digest = hashlib.sha256()
    for turn in conversation.turns:
        digest.update(turn.role.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(turn.content.encode("utf-8"))
        digest.update(b"\x01")
    return digest.hexdigest()[:16]


class VerdictStore:
    """Append-only line-delimited record store, keyed by
    (case_id, condition, model_id, run_id, stage).

    Single-writer semantics; re-running an experiment never duplicates a key,
    which is what makes interrupted runs resumable.
    """

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: dict[tuple[str, str, str, str, str], dict] = {}
        if self.path.exists():
            try:
                for line in self.path.read_text(encoding="utf-8").splitlines():
                    if not line.strip():
                        continue
                    rec = json.loads(line)
                    self._records[self._key_of(rec)] = rec
            except OSError as exc:
                raise IoError(f"cannot read verdict store {self.path}: {exc}") from exc

    @staticmethod
    def _key_of(rec: dict) -> tuple[str, str, str, str, str]:
        return (rec["case_id"], rec["condition"], rec["model_id"], rec["run_id"], rec["stage"])

    def __len__(self) -> int:
        return len(self._records)

    def has(self, case_id: str, condition: str, model_id: str, run_id: str, stage: str) -> bool:
        with self._lock:
            return (case_id, condition, model_id, run_id, stage) in self._records

    def get(
        self, case_id: str, condition: str, model_id: str, run_id: str, stage: str
    ) -> Verdict | None:
        with self._lock:
            rec = self._records.get((case_id, condition, model_id, run_id, stage))
        if rec is None:
            return None
        return _verdict_from_record(rec)

    def append(
        self,
        *,
        case_id: str,
        condition: str,
        model_id: str,
        run_id: str,
        verdict: Verdict,
        conversation_digest: str,
    ) -> None:
        key = (case_id, condition, model_id, run_id, verdict.stage)
        rec = {
            "case_id": case_id,
            "condition": condition,
            "model_id": model_id,
            "run_id": run_id,
            "stage": verdict.stage,
            "outcome": verdict.outcome,
            "root_cause": verdict.root_cause.value if verdict.root_cause else None,
            "raw_response": verdict.raw_response,
            "latency_ms": verdict.latency_ms,
            "provider": verdict.provider,
            "conversation_hash": conversation_digest,
        }
        with self._lock:
            if key in self._records:
                raise IoError(
                    f"verdict already stored for {key}; completions are never re-sampled"
                )
            try:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as handle:
                    handle.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
            except OSError as exc:
                raise IoError(f"cannot append to verdict store {self.path}: {exc}") from exc
            self._records[key] = rec

    def records(self) -> Iterator[dict]:
        yield from self._records.values()


def _verdict_from_record(rec: dict) -> Verdict:
    cause = parse_root_cause(rec["root_cause"]) if rec.get("root_cause") else None
    return Verdict(
        stage=rec["stage"],
        outcome=rec["outcome"],
        raw_response=rec["raw_response"],
        latency_ms=rec["latency_ms"],
        provider=rec["provider"],
        root_cause=cause,
    )
