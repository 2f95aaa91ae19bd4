"""Canonical on-disk snapshot format.

Layout: ``<out>/snapshot.jsonl`` plus one payload file per fetched blob under
``<out>/payloads/<commit>/<path>``. The jsonl stream starts with a header record
carrying schema version "1"; records are emitted in a canonical order and with
canonical JSON so writing the same snapshot twice is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from qflake.corpus.models import (
    CaseArtifact,
    Comment,
    CommitInfo,
    FetchFailure,
    RepositoryRef,
    Snapshot,
    format_utc,
    parse_utc,
)
from qflake.errors import IoError, SchemaVersionMismatchError

SCHEMA_VERSION = "1"
SNAPSHOT_FILE = "snapshot.jsonl"
PAYLOAD_DIR = "payloads"


def _dump(record: dict[str, Any]) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def _artifact_record(a: CaseArtifact) -> dict[str, Any]:
    return {
        "record": "artifact",
        "id": a.id,
        "kind": a.kind,
        "number": a.number,
        "title": a.title,
        "description": a.description,
        "comments": [
            {"author": c.author, "created_at": format_utc(c.created_at), "body": c.body}
            for c in a.comments
        ],
        "state": a.state,
        "linked_prs": list(a.linked_prs),
        "linked_commits": list(a.linked_commits),
    }


def _artifact_from_record(rec: dict[str, Any]) -> CaseArtifact:
    return CaseArtifact(
        id=rec["id"],
        kind=rec["kind"],
        number=rec["number"],
        title=rec["title"],
        description=rec["description"],
        comments=tuple(
            Comment(c["author"], parse_utc(c["created_at"]), c["body"])
            for c in rec["comments"]
        ),
        state=rec["state"],
        linked_prs=tuple(rec["linked_prs"]),
        linked_commits=tuple(rec["linked_commits"]),
    )


def write_snapshot(snapshot: Snapshot, out_dir: str | Path) -> None:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        lines: list[str] = []
        lines.append(
            _dump(
                {
                    "record": "header",
                    "schema_version": SCHEMA_VERSION,
                    "created_at": format_utc(snapshot.created_at),
                }
            )
        )
        for repo in sorted(snapshot.repositories, key=lambda r: (r.platform, r.name)):
            lines.append(
                _dump(
                    {
                        "record": "repository",
                        "platform": repo.platform,
                        "name": repo.name,
                        "default_branch": repo.default_branch,
                    }
                )
            )
        for artifact in sorted(snapshot.artifacts, key=lambda a: a.sort_key()):
            lines.append(_dump(_artifact_record(artifact)))
        for info in sorted(snapshot.commits, key=lambda c: c.sha):
            lines.append(
                _dump(
                    {
                        "record": "commit",
                        "sha": info.sha,
                        "parents": list(info.parents),
                        "files": list(info.files),
                    }
                )
            )
        for (commit, path), blob in sorted(snapshot.file_payloads.items()):
            lines.append(
                _dump(
                    {
                        "record": "payload",
                        "commit": commit,
                        "path": path,
                        "sha256": hashlib.sha256(blob).hexdigest(),
                        "size": len(blob),
                    }
                )
            )
            target = out / PAYLOAD_DIR / commit / path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(blob)
        for failure in sorted(snapshot.fetch_failures, key=lambda f: (f.commit, f.path)):
            lines.append(
                _dump(
                    {
                        "record": "fetch_failure",
                        "commit": failure.commit,
                        "path": failure.path,
                        "reason": failure.reason,
                    }
                )
            )
        (out / SNAPSHOT_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write snapshot to {out}: {exc}") from exc


def read_snapshot(in_dir: str | Path) -> Snapshot:
    src = Path(in_dir)
    index = src / SNAPSHOT_FILE
    try:
        raw_lines = index.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read snapshot from {src}: {exc}") from exc
    if not raw_lines:
        raise SchemaVersionMismatchError(f"{index} is empty")

    header = json.loads(raw_lines[0])
    if header.get("record") != "header":
        raise SchemaVersionMismatchError(f"{index} does not start with a header record")
    version = header.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatchError(
            f"snapshot schema version {version!r} is not supported (expected {SCHEMA_VERSION!r})"
        )

    repositories: list[RepositoryRef] = []
    artifacts: list[CaseArtifact] = []
    commits: list[CommitInfo] = []
    payloads: dict[tuple[str, str], bytes] = {}
    failures: list[FetchFailure] = []
    for line in raw_lines[1:]:
        if not line.strip():
            continue
        rec = json.loads(line)
        kind = rec.get("record")
        if kind == "repository":
            repositories.append(
                RepositoryRef(rec["platform"], rec["name"], rec["default_branch"])
            )
        elif kind == "artifact":
            artifacts.append(_artifact_from_record(rec))
        elif kind == "commit":
            commits.append(CommitInfo(rec["sha"], tuple(rec["parents"]), tuple(rec["files"])))
        elif kind == "payload":
            blob_path = src / PAYLOAD_DIR / rec["commit"] / rec["path"]
            try:
                blob = blob_path.read_bytes()
            except OSError as exc:
                raise IoError(f"missing payload file {blob_path}: {exc}") from exc
            digest = hashlib.sha256(blob).hexdigest()
            if digest != rec["sha256"]:
                raise IoError(f"payload {blob_path} does not match its recorded sha256")
            payloads[(rec["commit"], rec["path"])] = blob
        elif kind == "fetch_failure":
            failures.append(FetchFailure(rec["commit"], rec["path"], rec["reason"]))
        else:
            raise SchemaVersionMismatchError(f"unknown record type {kind!r} in {index}")

    return Snapshot(
        created_at=parse_utc(header["created_at"]),
        repositories=tuple(repositories),
        artifacts=tuple(artifacts),
        commits=tuple(commits),
        file_payloads=payloads,
        fetch_failures=tuple(failures),
    )
