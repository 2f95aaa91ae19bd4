"""Filesystem layout of the labeled dataset and its validation.

Cases live under ``<root>/{full|method}/{flaky|non-flaky}/<case-slug>/`` with a
label record, the report texts, and the code-context files for that level. The
two level trees are self-contained and carry byte-identical label records; the
filesystem layout is the source of truth (no database backend).
"""

from __future__ import annotations

import json
import re
import shutil
from dataclasses import dataclass, field
from pathlib import Path

from qflake.codectx import (
    CodeContext,
    ContextLevel,
    ContextUnit,
    MissingReason,
    diff_changed_files,
)
from qflake.corpus.models import CaseArtifact, Snapshot, format_utc, parse_utc
from qflake.errors import SchemaError, ValidationError
from qflake.promptkit.conditions import ReportLevel
from qflake.promptkit.conversation import build_report_text
from qflake.store.labels import LabeledCase, Provenance

LABEL_SCHEMA_VERSION = "1"

_LEVEL_DIRS = {ContextLevel.PARTIAL: "method", ContextLevel.FULL: "full"}
_LABEL_DIRS = {True: "flaky", False: "non-flaky"}

_SLUG_UNSAFE = re.compile(r"[^A-Za-z0-9._-]")


def case_slug(case_id: str) -> str:
    return _SLUG_UNSAFE.sub("-", case_id.replace("/", "__").replace("#", "__").replace(":", "__"))


@dataclass
class Dataset:
    cases: list[LabeledCase] = field(default_factory=list)
    contexts: dict[str, dict[ContextLevel, CodeContext]] = field(default_factory=dict)

    def by_id(self) -> dict[str, LabeledCase]:
        return {c.id: c for c in self.cases}

    def flaky_cases(self) -> list[LabeledCase]:
        return [c for c in self.cases if c.flaky]

    def non_flaky_cases(self) -> list[LabeledCase]:
        return [c for c in self.cases if not c.flaky]

    def context(self, case_id: str, level: ContextLevel) -> CodeContext | None:
        return self.contexts.get(case_id, {}).get(level)


# --- serialization helpers ---------------------------------------------------


def _artifact_record(case: CaseArtifact) -> dict:
    return {
        "id": case.id,
        "kind": case.kind,
        "number": case.number,
        "title": case.title,
        "description": case.description,
        "comments": [
            {"author": c.author, "created_at": format_utc(c.created_at), "body": c.body}
            for c in case.comments
        ],
        "state": case.state,
        "linked_prs": list(case.linked_prs),
        "linked_commits": list(case.linked_commits),
    }


def _artifact_from_record(rec: dict, path: Path) -> CaseArtifact:
    from qflake.corpus.models import Comment

    try:
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
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad artifact record: {exc}", str(path)) from exc


def _label_record(case: LabeledCase) -> str:
    record = {
        "schema_version": LABEL_SCHEMA_VERSION,
        "case": _artifact_record(case.case),
        "flaky": case.flaky,
        "root_causes": list(case.root_causes),
        "fix_patterns": list(case.fix_patterns),
        "provenance": {
            "source": case.provenance.source,
            "reviewer_ids": list(case.provenance.reviewer_ids),
            "reviewed_at": format_utc(case.provenance.reviewed_at)
            if case.provenance.reviewed_at
            else None,
        },
    }
    return json.dumps(record, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def _label_from_record(path: Path) -> LabeledCase:
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"unreadable label record: {exc}", str(path)) from exc
    version = record.get("schema_version")
    if version != LABEL_SCHEMA_VERSION:
        raise SchemaError(f"label schema {version!r} is not supported", str(path))
    prov = record.get("provenance", {})
    try:
        return LabeledCase(
            case=_artifact_from_record(record["case"], path),
            flaky=bool(record["flaky"]),
            root_causes=tuple(record.get("root_causes", [])),
            fix_patterns=tuple(record.get("fix_patterns", [])),
            provenance=Provenance(
                source=prov.get("source", "original_dataset"),
                reviewer_ids=tuple(prov.get("reviewer_ids", [])),
                reviewed_at=parse_utc(prov["reviewed_at"]) if prov.get("reviewed_at") else None,
            ),
        )
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"bad label record: {exc}", str(path)) from exc


def _unit_filename(index: int, unit: ContextUnit) -> str:
    base = unit.unit_name if unit.unit_name != "<file>" else Path(unit.path).name
    safe = _SLUG_UNSAFE.sub("-", base) or "unit"
    suffix = Path(unit.path).suffix or ".txt"
    if not safe.endswith(suffix):
        safe += suffix
    return f"{index:03d}_{safe}"


def _context_record(context: CodeContext, filenames: list[str]) -> str:
    if context.present:
        record = {
            "schema_version": LABEL_SCHEMA_VERSION,
            "level": context.level.value,
            "status": "present",
            "units": [
                {"path": u.path, "unit_name": u.unit_name, "file": f"code/{name}"}
                for u, name in zip(context.units, filenames)
            ],
        }
    else:
        record = {
            "schema_version": LABEL_SCHEMA_VERSION,
            "level": context.level.value,
            "status": "missing",
            "missing_reason": context.missing_reason.value,
        }
    return json.dumps(record, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def _context_from_record(path: Path, case_dir: Path) -> CodeContext:
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"unreadable context record: {exc}", str(path)) from exc
    level = ContextLevel(record["level"])
    if record["status"] == "missing":
        return CodeContext(level, (), "missing", MissingReason(record["missing_reason"]))
    units = []
    for entry in record["units"]:
        unit_path = case_dir / entry["file"]
        try:
            text = unit_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError(f"missing context unit file: {exc}", str(unit_path)) from exc
        units.append(ContextUnit(entry["path"], entry["unit_name"], text))
    return CodeContext(level, tuple(units), "present")


# --- persist / load ----------------------------------------------------------


def persist_case(
    case: LabeledCase,
    contexts: dict[ContextLevel, CodeContext],
    root: str | Path,
) -> None:
    """Write one case under both level trees; overwriting is idempotent."""
    if not case.case.description.strip():
        raise ValidationError(f"{case.id} has an empty description")
    root_path = Path(root)
    label_bytes = _label_record(case)
    report_partial = build_report_text(case.case, ReportLevel.PARTIAL)
    report_full = build_report_text(case.case, ReportLevel.FULL)

    for level, level_dir in _LEVEL_DIRS.items():
        context = contexts.get(level)
        if context is None:
            context = CodeContext(level, (), "missing", MissingReason.NO_CODE_CHANGE)
        if context.level is not level:
            raise ValidationError(f"{case.id}: context level mismatch for {level_dir}")
        case_dir = root_path / level_dir / _LABEL_DIRS[case.flaky] / case_slug(case.id)
        if case_dir.exists():
            shutil.rmtree(case_dir)
        case_dir.mkdir(parents=True)
        (case_dir / "label.json").write_text(label_bytes, encoding="utf-8")
        (case_dir / "report_partial.txt").write_text(report_partial, encoding="utf-8")
        (case_dir / "report_full.txt").write_text(report_full, encoding="utf-8")
        filenames = [_unit_filename(i, u) for i, u in enumerate(context.units)]
        (case_dir / "context.json").write_text(
            _context_record(context, filenames), encoding="utf-8"
        )
        if filenames:
            code_dir = case_dir / "code"
            code_dir.mkdir()
            for unit, name in zip(context.units, filenames):
                (code_dir / name).write_text(unit.text, encoding="utf-8")


def persist_dataset(dataset: Dataset, root: str | Path) -> None:
    for case in dataset.cases:
        persist_case(case, dataset.contexts.get(case.id, {}), root)


def load_dataset(root: str | Path) -> Dataset:
    """Inverse of persist. Raises SchemaError (with the offending path) on a
    malformed layout, including orphan directories present in only one tree."""
    root_path = Path(root)
    if not root_path.is_dir():
        raise SchemaError("dataset root does not exist", str(root_path))

    found: dict[ContextLevel, dict[str, Path]] = {}
    for level, level_dir in _LEVEL_DIRS.items():
        found[level] = {}
        base = root_path / level_dir
        if not base.is_dir():
            raise SchemaError(f"missing {level_dir}/ tree", str(base))
        for label_dir in sorted(base.iterdir()):
            if not label_dir.is_dir():
                continue
            if label_dir.name not in ("flaky", "non-flaky"):
                raise SchemaError("unexpected directory in level tree", str(label_dir))
            for case_dir in sorted(label_dir.iterdir()):
                if not case_dir.is_dir():
                    continue
                found[level][case_dir.name] = case_dir

    method_slugs = set(found[ContextLevel.PARTIAL])
    full_slugs = set(found[ContextLevel.FULL])
    for orphan in sorted(method_slugs ^ full_slugs):
        where = "method" if orphan in method_slugs else "full"
        raise SchemaError(
            f"case {orphan!r} exists only in the {where}/ tree", str(root_path)
        )

    dataset = Dataset()
    for slug in sorted(method_slugs):
        method_dir = found[ContextLevel.PARTIAL][slug]
        full_dir = found[ContextLevel.FULL][slug]
        method_label = (method_dir / "label.json").read_text(encoding="utf-8")
        full_label = (full_dir / "label.json").read_text(encoding="utf-8")
        if method_label != full_label:
            raise SchemaError(
                "label records differ between method/ and full/ trees",
                str(full_dir / "label.json"),
            )
        case = _label_from_record(method_dir / "label.json")
        dataset.cases.append(case)
        dataset.contexts[case.id] = {
            ContextLevel.PARTIAL: _context_from_record(method_dir / "context.json", method_dir),
            ContextLevel.FULL: _context_from_record(full_dir / "context.json", full_dir),
        }
    return dataset


# --- validation ----------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    case_id: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.case_id}: {self.message}"


def validate_dataset(dataset: Dataset, *, min_reviewers: int = 2) -> list[Violation]:
    """Invariant checks; every finding is a value, nothing raises.

    Confirmed flaky cases need at least ``min_reviewers`` reviewers (the
    cross-examination rule; configurable down to 1).
    """
    violations: list[Violation] = []
    seen: set[str] = set()
    for labeled in dataset.cases:
        cid = labeled.id
        if cid in seen:
            violations.append(Violation(cid, "unique-id", "duplicate case id"))
        seen.add(cid)
        if not labeled.case.description.strip():
            violations.append(Violation(cid, "description", "empty description"))
        if labeled.flaky and not labeled.root_causes:
            violations.append(
                Violation(cid, "root-causes", "flaky case with no root cause labels")
            )
        if not labeled.flaky and labeled.root_causes:
            violations.append(
                Violation(cid, "root-causes", "non-flaky case carries root cause labels")
            )
        if labeled.fix_patterns and len(labeled.fix_patterns) != len(labeled.root_causes):
            violations.append(
                Violation(
                    cid,
                    "fix-patterns",
                    "fix patterns must be empty or pair one-to-one with root causes",
                )
            )
        if labeled.flaky and len(labeled.provenance.reviewer_ids) < min_reviewers:
            violations.append(
                Violation(
                    cid,
                    "reviewers",
                    f"flaky case reviewed by {len(labeled.provenance.reviewer_ids)} "
                    f"reviewer(s); {min_reviewers} required",
                )
            )
        partial = dataset.context(cid, ContextLevel.PARTIAL)
        full = dataset.context(cid, ContextLevel.FULL)
        if partial is not None and partial.present and (full is None or not full.present):
            violations.append(
                Violation(cid, "context", "method context present without full context")
            )

    flaky_count = len(dataset.flaky_cases())
    non_flaky_count = len(dataset.non_flaky_cases())
    if flaky_count != non_flaky_count:
        violations.append(
            Violation(
                "<dataset>",
                "balance",
                f"{flaky_count} flaky vs {non_flaky_count} non-flaky cases",
            )
        )
    return violations


# --- export --------------------------------------------------------------------


def export_archive(dataset: Dataset, out: str | Path, snapshot: Snapshot | None = None) -> None:
    """Flat publication archive: report text, labels, and before/after code."""
    out_path = Path(out)
    out_path.mkdir(parents=True, exist_ok=True)
    manifest = []
    for labeled in sorted(dataset.cases, key=lambda c: c.id):
        slug = case_slug(labeled.id)
        case_dir = out_path / slug
        if case_dir.exists():
            shutil.rmtree(case_dir)
        case_dir.mkdir(parents=True)
        (case_dir / "report.txt").write_text(
            build_report_text(labeled.case, ReportLevel.FULL), encoding="utf-8"
        )
        (case_dir / "label.json").write_text(_label_record(labeled), encoding="utf-8")
        if snapshot is not None:
            try:
                changes = diff_changed_files(labeled.case, snapshot)
            except Exception:
                changes = []
            for change in changes:
                for side, text in (("before", change.before), ("after", change.after)):
                    if text is None:
                        continue
                    target = case_dir / side / change.path
                    target.parent.mkdir(parents=True, exist_ok=True)
                    target.write_text(text, encoding="utf-8")
        manifest.append(
            {
                "id": labeled.id,
                "slug": slug,
                "flaky": labeled.flaky,
                "root_causes": list(labeled.root_causes),
            }
        )
    (out_path / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
