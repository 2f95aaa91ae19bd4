from __future__ import annotations

import hashlib
import json
import shutil
from datetime import datetime, timezone
from pathlib import Path

import pytest

from qflake.corpus.models import CaseArtifact
from qflake.errors import SchemaError
from qflake.store.dataset import (
    Dataset,
    case_slug,
    export_archive,
    load_dataset,
    persist_case,
    persist_dataset,
    validate_dataset,
)
from qflake.store.labels import LabeledCase, Provenance

NOW = datetime(2024, 5, 1, tzinfo=timezone.utc)


def _tree_digest(root: Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            digest.update(str(path.relative_to(root)).encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


def _labeled(cid: str = "Acme/qsim#1", flaky: bool = True) -> LabeledCase:
    number = int(cid.split("#")[1].split(":")[0])
    return LabeledCase(
        case=CaseArtifact(
            id=cid, kind="issue", number=number, title="t",
            description="something broke",
        ),
        flaky=flaky,
        root_causes=("Randomness (PRNG)",) if flaky else (),
        fix_patterns=("Fix Seed",) if flaky else (),
        provenance=Provenance("original_dataset", ("r1", "r2"), NOW),
    )


class TestLayout:
    def test_flaky_case_lives_under_both_level_trees(self, tmp_path):
        persist_case(_labeled(), {}, tmp_path)
        slug = case_slug("Acme/qsim#1")
        assert (tmp_path / "method" / "flaky" / slug / "label.json").exists()
        assert (tmp_path / "full" / "flaky" / slug / "label.json").exists()

    def test_non_flaky_without_code_gets_missing_markers(self, tmp_path):
        persist_case(_labeled(flaky=False), {}, tmp_path)
        slug = case_slug("Acme/qsim#1")
        for tree in ("method", "full"):
            record = json.loads(
                (tmp_path / tree / "non-flaky" / slug / "context.json").read_text()
            )
            assert record["status"] == "missing"
            assert record["missing_reason"] == "no_code_change"

    def test_report_files_written_at_both_levels(self, tmp_path):
        persist_case(_labeled(), {}, tmp_path)
        slug = case_slug("Acme/qsim#1")
        case_dir = tmp_path / "method" / "flaky" / slug
        assert (case_dir / "report_partial.txt").exists()
        assert (case_dir / "report_full.txt").exists()


class TestRoundTrip:
    def test_load_inverts_persist_on_replica(self, replica_dataset, tmp_path):
        persist_dataset(replica_dataset, tmp_path)
        loaded = load_dataset(tmp_path)
        assert sorted(c.id for c in loaded.cases) == sorted(
            c.id for c in replica_dataset.cases
        )
        original_by_id = replica_dataset.by_id()
        for case in loaded.cases:
            assert case == original_by_id[case.id]
        for cid, contexts in loaded.contexts.items():
            assert contexts == replica_dataset.contexts[cid]

    def test_re_persist_is_byte_idempotent(self, replica_dataset, tmp_path):
        persist_dataset(replica_dataset, tmp_path)
        first = _tree_digest(tmp_path)
        persist_dataset(replica_dataset, tmp_path)
        assert _tree_digest(tmp_path) == first

    def test_persisted_replica_validates_clean(self, replica_dataset, tmp_path):
        persist_dataset(replica_dataset, tmp_path)
        assert validate_dataset(load_dataset(tmp_path)) == []


class TestValidation:
    def test_flaky_with_no_causes_is_violation(self):
        case = LabeledCase(
            case=_labeled().case, flaky=True, root_causes=(),
            provenance=Provenance("original_dataset", ("a", "b")),
        )
        violations = validate_dataset(Dataset(cases=[case, _labeled("Acme/qsim#2", False)]))
        assert any(v.rule == "root-causes" for v in violations)

    def test_duplicate_id_is_violation(self):
        violations = validate_dataset(Dataset(cases=[_labeled(), _labeled()]))
        assert any(v.rule == "unique-id" for v in violations)

    def test_imbalance_is_violation(self):
        violations = validate_dataset(Dataset(cases=[_labeled()]))
        assert any(v.rule == "balance" for v in violations)

    def test_reviewer_minimum_is_configurable(self):
        case = LabeledCase(
            case=_labeled().case, flaky=True, root_causes=("Network",),
            provenance=Provenance("original_dataset", ("only-one",)),
        )
        dataset = Dataset(cases=[case, _labeled("Acme/qsim#2", False)])
        assert any(v.rule == "reviewers" for v in validate_dataset(dataset))
        assert not any(
            v.rule == "reviewers" for v in validate_dataset(dataset, min_reviewers=1)
        )

    def test_unpaired_fix_patterns_flagged(self):
        case = LabeledCase(
            case=_labeled().case, flaky=True,
            root_causes=("Network", "Others"), fix_patterns=("Synchronize",),
            provenance=Provenance("original_dataset", ("a", "b")),
        )
        violations = validate_dataset(Dataset(cases=[case, _labeled("Acme/qsim#2", False)]))
        assert any(v.rule == "fix-patterns" for v in violations)

    def test_unknown_cause_name_rejected_at_construction(self):
        with pytest.raises(ValueError):
            LabeledCase(case=_labeled().case, flaky=True, root_causes=("Gremlins",))

    def test_bad_provenance_source_rejected(self):
        with pytest.raises(ValueError):
            Provenance("made_up_source")


class TestSchemaErrors:
    def _persisted(self, tmp_path) -> Path:
        persist_dataset(
            Dataset(cases=[_labeled(), _labeled("Acme/qsim#2", False)]), tmp_path
        )
        return tmp_path

    def test_orphan_directory_raises(self, tmp_path):
        root = self._persisted(tmp_path)
        slug = case_slug("Acme/qsim#2")
        shutil.rmtree(root / "full" / "non-flaky" / slug)
        with pytest.raises(SchemaError, match="only in the method"):
            load_dataset(root)

    def test_diverging_label_records_raise(self, tmp_path):
        root = self._persisted(tmp_path)
        slug = case_slug("Acme/qsim#1")
        target = root / "full" / "flaky" / slug / "label.json"
        record = json.loads(target.read_text())
        record["flaky"] = False
        target.write_text(json.dumps(record, sort_keys=True, indent=2) + "\n")
        with pytest.raises(SchemaError, match="label records differ"):
            load_dataset(root)

    def test_future_label_schema_raises(self, tmp_path):
        root = self._persisted(tmp_path)
        for tree in ("method", "full"):
            target = root / tree / "flaky" / case_slug("Acme/qsim#1") / "label.json"
            record = json.loads(target.read_text())
            record["schema_version"] = "99"
            target.write_text(json.dumps(record, sort_keys=True, indent=2) + "\n")
        with pytest.raises(SchemaError, match="schema"):
            load_dataset(root)

    def test_missing_dataset_root_raises(self, tmp_path):
        with pytest.raises(SchemaError):
            load_dataset(tmp_path / "nope")


class TestExport:
    def test_archive_contains_reports_labels_and_code(self, replica, tmp_path):
        snapshot, dataset = replica
        export_archive(dataset, tmp_path, snapshot)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert len(manifest) == 142
        listing_case = next(
            entry for entry in manifest if entry["slug"] == case_slug("Qiskit/qiskit#101")
        )
        case_dir = tmp_path / listing_case["slug"]
        assert (case_dir / "report.txt").exists()
        assert (case_dir / "label.json").exists()
        before = list((case_dir / "before").rglob("*.py"))
        after = list((case_dir / "after").rglob("*.py"))
        assert before and after
