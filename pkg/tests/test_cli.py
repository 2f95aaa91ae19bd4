from __future__ import annotations

import json
from pathlib import Path

from qflake.cli import EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION, corpus_case_ids, main
from qflake.corpus.snapshot import write_snapshot
from qflake.store.dataset import case_slug


class TestValidateCommand:
    def test_pristine_replica_exits_zero(self, replica_dataset_dir, capsys):
        code = main(["validate", "--dataset", str(replica_dataset_dir)])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "71 flaky + 71 non-flaky" in out
        assert "0 violations" in out

    def test_broken_dataset_exits_one(self, replica_dataset_dir, tmp_path, capsys):
        import shutil

        broken = tmp_path / "broken"
        shutil.copytree(replica_dataset_dir, broken)
        slug = case_slug("NetKet/netket#101")
        for tree in ("method", "full"):
            target = broken / tree / "flaky" / slug / "label.json"
            record = json.loads(target.read_text())
            record["root_causes"] = []
            record["fix_patterns"] = []
            target.write_text(json.dumps(record, ensure_ascii=False, sort_keys=True, indent=2) + "\n")
        code = main(["validate", "--dataset", str(broken)])
        assert code == EXIT_VALIDATION
        assert "root-causes" in capsys.readouterr().out

    def test_missing_dataset_is_validation_error(self, tmp_path):
        assert main(["validate", "--dataset", str(tmp_path / "absent")]) == EXIT_VALIDATION


class TestReportCommand:
    def test_taxonomy_table_matches_published_counts(self, replica_dataset_dir, capsys):
        code = main(["report", "--table", "taxonomy", "--dataset", str(replica_dataset_dir)])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        randomness_row = next(line for line in out.splitlines() if line.startswith("Randomness"))
        cells = randomness_row.split("\t")
        assert cells[1] == "12"          # Fix Seed column
        assert cells[-2] == "14"         # grand total
        assert cells[-1] == "19.2%"
        totals_row = next(line for line in out.splitlines() if line.startswith("Grand Total"))
        assert totals_row.split("\t")[1] == "12"
        assert "73 observations from 71 cases (2 with multiple labels)" in out

    def test_repos_table_flags_inconsistent_rows(self, capsys):
        code = main(["report", "--table", "repos"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "netket\t416\t7\t1.68%" in out
        assert "Quantum\t111\t4\t3.60%" in out
        assert "azure-quantum-python\t89\t3\t3.37%" in out
        assert "0.82%" in out
        flagged = out.split("Flagged rows", 1)[1]
        assert "Qiskit/qiskit:" in flagged
        assert "Qiskit/qiskit-ibm-provider:" in flagged

    def test_results_table_round_trips_through_files(self, replica_dataset_dir, tmp_path, capsys):
        out_dir = tmp_path / "exp"
        code = main(
            [
                "experiment",
                "--dataset", str(replica_dataset_dir),
                "--provider", "mock",
                "--conditions", "base",
                "--out", str(out_dir),
            ]
        )
        assert code == EXIT_OK
        capsys.readouterr()
        code = main(["report", "--table", "results", "--results", str(out_dir / "results.jsonl")])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "mock-scripted-v1" in out
        assert "{R_p, C_p}" in out
        assert "43*" in out


class TestRankAndNegatives:
    def test_rank_then_sample_negatives_flow(self, replica_snapshot, tmp_path, capsys):
        snap_dir = tmp_path / "snapshot"
        write_snapshot(replica_snapshot, snap_dir)
        seeds_file = tmp_path / "seeds.txt"
        corpus = corpus_case_ids(replica_snapshot)
        seeds_file.write_text("\n".join(corpus[:3]) + "\n")
        state_file = tmp_path / "state.json"

        code = main(
            [
                "rank",
                "--snapshot", str(snap_dir),
                "--state", str(state_file),
                "--seeds", str(seeds_file),
                "--k", "10",
            ]
        )
        assert code == EXIT_OK
        assert state_file.exists()
        assert Path(f"{state_file}.embeddings.jsonl").exists()
        assert "queue of 10 candidates" in capsys.readouterr().out

        out_file = tmp_path / "negatives.txt"
        code = main(
            [
                "sample-negatives",
                "--state", str(state_file),
                "--threshold", "0.5",
                "--n", "20",
                "--out", str(out_file),
            ]
        )
        assert code == EXIT_OK
        picked = out_file.read_text().splitlines()
        assert picked
        assert not (set(picked) & set(corpus[:3]))

    def test_rank_with_unknown_seed_is_config_error(self, replica_snapshot, tmp_path):
        snap_dir = tmp_path / "snapshot"
        write_snapshot(replica_snapshot, snap_dir)
        seeds_file = tmp_path / "seeds.txt"
        seeds_file.write_text("No/such#1\n")
        code = main(
            [
                "rank",
                "--snapshot", str(snap_dir),
                "--state", str(tmp_path / "state.json"),
                "--seeds", str(seeds_file),
            ]
        )
        assert code == EXIT_CONFIG


class TestExtractCode:
    def test_extract_code_rebuilds_contexts(self, replica, tmp_path, capsys):
        from qflake.store.dataset import persist_dataset

        snapshot, dataset = replica
        snap_dir = tmp_path / "snapshot"
        write_snapshot(snapshot, snap_dir)
        dataset_dir = tmp_path / "dataset"
        persist_dataset(dataset, dataset_dir)

        code = main(
            ["extract-code", "--snapshot", str(snap_dir), "--dataset", str(dataset_dir)]
        )
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "44 with method context" in out
        assert "64 with full context" in out


class TestExportCommand:
    def test_export_writes_manifest(self, replica_dataset_dir, tmp_path, capsys):
        out = tmp_path / "archive"
        code = main(["export", "--dataset", str(replica_dataset_dir), "--out", str(out)])
        assert code == EXIT_OK
        manifest = json.loads((out / "manifest.json").read_text())
        assert len(manifest) == 142


class TestIngestCommand:
    def test_ingest_via_mock_server(self, tmp_path, capsys, monkeypatch):
        from .mock_github import MockGitHub, comment_row, issue_row

        sha = "ab12cd34ef56ab12cd34ef56ab12cd34ef56ab12"
        parent = "ff12cd34ef56ab12cd34ef56ab12cd34ef56ab99"
        repos = {
            "Acme/qsim": {
                "issues": [
                    issue_row(1, "flaky thing", "test flips; fixed by #2"),
                    issue_row(2, "the fix", "seed it", pr=True),
                ],
                "comments": {1: [comment_row("a", "2024-01-01T00:00:00Z", "confirmed")]},
                "pr_commits": {2: [sha]},
                "commits": {
                    sha: {
                        "sha": sha,
                        "parents": [{"sha": parent}],
                        "files": [{"filename": "test_x.py"}],
                    }
                },
                "files": {
                    (sha, "test_x.py"): "def test_x():\n    assert f(seed=1)\n",
                    (parent, "test_x.py"): "def test_x():\n    assert f()\n",
                },
            }
        }
        monkeypatch.delenv("QFLAKE_API_TOKEN", raising=False)
        with MockGitHub(repos) as server:
            code = main(
                [
                    "ingest",
                    "--api-base", server.base_url,
                    "--repos", "Acme/qsim",
                    "--out", str(tmp_path / "snap"),
                ]
            )
        assert code == EXIT_OK
        from qflake.corpus.snapshot import read_snapshot

        snapshot = read_snapshot(tmp_path / "snap")
        issue = snapshot.artifact_by_id("Acme/qsim#1")
        assert issue.linked_prs == ("Acme/qsim#2:pr",)
        pr = snapshot.artifact_by_id("Acme/qsim#2:pr")
        assert pr.linked_commits == (sha,)
        assert (parent, "test_x.py") in snapshot.file_payloads
        assert (sha, "test_x.py") in snapshot.file_payloads
