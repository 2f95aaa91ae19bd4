"""Bundled paper-replica fixture dataset.

Builds, fully deterministically, the 142-case balanced dataset (71 flaky + 71
non-flaky) whose statistics reproduce the published tables: the repository
table (with its known arithmetic quirks kept verbatim and flagged, never
silently fixed), the cause-by-fix taxonomy (73 observations from 71 cases, two
of them double-labeled), and the per-condition observation totals
(44/64 at the partial/full code levels, dropping to 38/56 under the
full-report grouping because some artifacts have no comment thread).

Report texts carry scripted tokens the deterministic mock provider reacts to:
a flakiness marker, one root-cause keyword each, and two corruption markers
that yield unusable outputs, so experiment accounting can be asserted exactly.

``python -m qflake.fixtures <out-dir>`` materializes the dataset and snapshot.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from qflake.codectx import ContextLevel, build_code_context
from qflake.corpus.models import (
    ISSUE,
    PULL_REQUEST,
    CaseArtifact,
    Comment,
    CommitInfo,
    FetchFailure,
    RepositoryRef,
    Snapshot,
    case_id,
)
from qflake.evaluator.tables import ReferenceRepoRow
from qflake.inference.providers import (
    MOCK_CORRUPT_BINARY_MARKER,
    MOCK_CORRUPT_CAUSE_MARKER,
    MOCK_FLAKY_MARKER,
)
from qflake.store.dataset import Dataset
from qflake.store.labels import (
    SOURCE_HARD_NEGATIVE,
    SOURCE_NEGATIVE_SAMPLING,
    SOURCE_ORIGINAL,
    LabeledCase,
    Provenance,
    expansion_source,
)
from qflake.taxonomy import UNKNOWN_CAUSE, FixPattern, RootCauseClass

# --- the printed repository table (kept verbatim, quirks included) -------------

REFERENCE_REPO_TABLE: tuple[ReferenceRepoRow, ...] = (
    ReferenceRepoRow("Qiskit", "qiskit", "Python", 4533, 29, 0.55),
    ReferenceRepoRow("Qiskit", "qiskit-aer", "Python", 766, 3, 0.39),
    ReferenceRepoRow("Qiskit", "qiskit-ibm-runtime", "Python", 849, 3, 0.35),
    ReferenceRepoRow("Qiskit", "qiskit-ibm-provider", "Python", 341, 8, 0.23),
    ReferenceRepoRow("Qiskit Community", "qiskit-nature", "Python", 385, 1, 0.26),
    ReferenceRepoRow("Qiskit Community", "qiskit-experiments", "Python", 389, 3, 0.77),
    ReferenceRepoRow("Qiskit Community", "qiskit-machine-learning", "Python", 306, 4, 1.30),
    ReferenceRepoRow("Microsoft", "azure-quantum-python", "Python", 89, 3, 3.37),
    ReferenceRepoRow("Microsoft", "QuantumLibraries", "Q#", 137, 4, 2.91),
    ReferenceRepoRow("Microsoft", "Quantum", "Q#", 111, 4, 3.60),
    ReferenceRepoRow("TensorFlow", "quantum", "Python", 306, 1, 0.32),
    ReferenceRepoRow("NetKet", "netket", "Python", 416, 7, 1.68),
)

STATED_FLAKY_TOTAL = 71
STATED_CLOSED_TOTAL = 8628

REPOSITORIES: tuple[RepositoryRef, ...] = tuple(
    RepositoryRef(row.platform, row.name) for row in REFERENCE_REPO_TABLE
)

CLOSED_COUNTS: dict[str, int] = {
    f"{row.platform}/{row.name}": row.closed_reports for row in REFERENCE_REPO_TABLE
}

# Per-repo flaky counts in the dataset. The printed flaky column sums to 70
# against a stated total of 71; the extra case is parked on qiskit, whose
# printed row is arithmetically inconsistent anyway and gets flagged.
_FLAKY_PER_REPO: tuple[int, ...] = (30, 3, 3, 8, 1, 3, 4, 3, 4, 4, 1, 7)
_NON_FLAKY_PER_REPO: tuple[int, ...] = (20, 5, 5, 5, 4, 4, 4, 4, 4, 4, 4, 8)

# Cause keyword planted in each description; the scripted mock predicts the
# first keyword it finds, falling back to Others.
_CAUSE_KEYWORD_SENTENCES: dict[str, str] = {
    "seed": "The failure traces back to the default random seed picked by the circuit generator.",
    "tolerance": "The assertion compares floating point results against a tolerance that is too tight.",
    "dependency pin": "It only shows up after the latest dependency pin changed what the resolver installs.",
    "parallel": "The build fans out in parallel workers that collide on a shared address.",
    "reference image": "The visual comparison picks up a stale reference image index.",
    "unhandled": "The run aborts with an unhandled exception when the sampled value leaves the expected range.",
    "socket": "The callback check finishes before the socket test releases its connection.",
    "insertion order": "The comparison relies on dictionary insertion order across interpreter versions.",
}

_CAUSE_TO_KEYWORD: dict[str, str] = {
    RootCauseClass.RANDOMNESS.value: "seed",
    RootCauseClass.FLOATING_POINT.value: "tolerance",
    RootCauseClass.SOFTWARE_ENV.value: "dependency pin",
    RootCauseClass.MULTI_THREADING.value: "parallel",
    RootCauseClass.VISUALIZATION.value: "reference image",
    RootCauseClass.UNHANDLED_EXCEPTIONS.value: "unhandled",
    RootCauseClass.NETWORK.value: "socket",
    RootCauseClass.UNORDERED_COLLECTION.value: "insertion order",
}

_BASE_TIME = datetime(2024, 3, 1, 9, 0, 0, tzinfo=timezone.utc)
_REVIEW_TIME = datetime(2024, 5, 10, 15, 0, 0, tzinfo=timezone.utc)
_SNAPSHOT_TIME = datetime(2024, 6, 1, 12, 0, 0, tzinfo=timezone.utc)
_REVIEWERS = ("r.alvarez", "m.chen")

# Code payload kinds.
_KIND_METHOD = "method"          # Python test file, change inside a method
_KIND_MODULE = "module"          # Python file, change outside any function
_KIND_CONFIG = "config"          # non-source text file (tox.ini, requirements)
_KIND_QSHARP = "qsharp"          # Q# source file
_KIND_FETCH_FAILED = "fetch_failed"
_KIND_NONE = "none"


@dataclass(frozen=True)
class _FlakySpec:
    causes: tuple[str, ...]
    fixes: tuple[str, ...]
    code_kind: str
    has_comments: bool = True
    marker: bool = True
    keyword: str | None = None
    corrupt_binary: bool = False
    corrupt_cause: bool = False
    linked_via_pr: bool = False


_DEFAULT_KEYWORD = "__default__"


def _single(
    cause: RootCauseClass,
    fix: FixPattern,
    kind: str,
    *,
    keyword: str | None = _DEFAULT_KEYWORD,
    **kw,
) -> _FlakySpec:
    if keyword == _DEFAULT_KEYWORD:
        keyword = _CAUSE_TO_KEYWORD.get(cause.value)
    return _FlakySpec((cause.value,), (fix.value,), kind, keyword=keyword, **kw)


def _flaky_specs() -> list[_FlakySpec]:
    """The 71 flaky cases, in a fixed order that pins every planted property.

    Indices 0-43 have method context, 44-63 full context only, 64-70 none.
    The comment-less cases (six with method context, two more with only full
    context) are the ones that drop out of the full-report grouping.
    """
    r, f = RootCauseClass, FixPattern
    specs: list[_FlakySpec] = []

    # 0-10: Randomness / Fix Seed. #0 is the seeded-circuit exemplar case;
    # 1-3 have no comments; #4 produces a corrupted classification response.
    specs.append(_single(r.RANDOMNESS, f.FIX_SEED, _KIND_METHOD, linked_via_pr=True))
    for i in range(1, 11):
        specs.append(
            _single(
                r.RANDOMNESS,
                f.FIX_SEED,
                _KIND_METHOD,
                has_comments=i not in (1, 2, 3),
                corrupt_binary=i == 4,
                linked_via_pr=i in (6, 7, 8, 9, 10),
            )
        )
    # 11-12: Randomness / Others.
    specs += [
        _single(r.RANDOMNESS, f.OTHERS, _KIND_METHOD, linked_via_pr=True),
        _single(r.RANDOMNESS, f.OTHERS, _KIND_METHOD, linked_via_pr=True),
    ]
    # 13: Software Environment / Others with method context.
    specs.append(_single(r.SOFTWARE_ENV, f.OTHERS, _KIND_METHOD, linked_via_pr=True))
    # 14-17: Multi-threading / Make Single Thread. #14 comment-less, #15 yields
    # a corrupted root-cause response, #16 linked through a PR.
    for i in range(14, 18):
        specs.append(
            _single(
                r.MULTI_THREADING,
                f.MAKE_SINGLE_THREAD,
                _KIND_METHOD,
                has_comments=i != 14,
                corrupt_cause=i == 15,
                linked_via_pr=i == 16,
            )
        )
    # 18-21: Multi-threading / Others.
    specs += [_single(r.MULTI_THREADING, f.OTHERS, _KIND_METHOD) for _ in range(4)]
    # 22-25: Floating Point / Adjust Tolerance; #22 comment-less.
    for i in range(22, 26):
        specs.append(
            _single(r.FLOATING_POINT, f.ADJUST_TOLERANCE, _KIND_METHOD, has_comments=i != 22)
        )
    # 26-27: Floating Point / Others; #26 carries a misleading keyword.
    specs += [
        _single(r.FLOATING_POINT, f.OTHERS, _KIND_METHOD, keyword="seed"),
        _single(r.FLOATING_POINT, f.OTHERS, _KIND_METHOD),
    ]
    # 28-31: Visualization / Others; #28 comment-less, #29 misleading keyword.
    for i in range(28, 32):
        extra = {"keyword": "socket"} if i == 29 else {}
        specs.append(
            _single(r.VISUALIZATION, f.OTHERS, _KIND_METHOD, has_comments=i != 28, **extra)
        )
    # 32-36: Network / Others; #32-33 lack the flakiness marker, #34 misleads.
    for i in range(32, 37):
        extra = {"keyword": "parallel"} if i == 34 else {}
        specs.append(
            _single(r.NETWORK, f.OTHERS, _KIND_METHOD, marker=i not in (32, 33), **extra)
        )
    # 37: Unordered Collection / Use Keys for Order.
    specs.append(_single(r.UNORDERED_COLLECTION, f.USE_KEYS_FOR_ORDER, _KIND_METHOD))
    # 38-41: Others / Others with method context; #38 lacks the marker,
    # #39 carries a misleading keyword.
    for i in range(38, 42):
        extra = {"keyword": "tolerance"} if i == 39 else {}
        specs.append(_single(r.OTHERS, f.OTHERS, _KIND_METHOD, marker=i != 38, **extra))
    # 42-43: the two double-labeled cases.
    specs.append(
        _FlakySpec(
            causes=(r.RANDOMNESS.value, r.FLOATING_POINT.value),
            fixes=(f.FIX_SEED.value, f.ADJUST_TOLERANCE.value),
            code_kind=_KIND_METHOD,
            keyword="seed",
        )
    )
    specs.append(
        _FlakySpec(
            causes=(r.MULTI_THREADING.value, r.NETWORK.value),
            fixes=(f.OTHERS.value, f.SYNCHRONIZE.value),
            code_kind=_KIND_METHOD,
            keyword="socket",
        )
    )

    # 44-46: Software Environment / Alter Software Env., config-file fixes;
    # #44 lacks the flakiness marker.
    for i in range(44, 47):
        specs.append(
            _single(r.SOFTWARE_ENV, f.ALTER_SOFTWARE_ENV, _KIND_CONFIG, marker=i != 44)
        )
    # 47: Multi-threading / Others, config-file fix (parallel docs build).
    specs.append(_single(r.MULTI_THREADING, f.OTHERS, _KIND_CONFIG))
    # 48-49: Software Environment / Alter Software Env., module-level Python;
    # #48 carries a misleading keyword.
    specs += [
        _single(r.SOFTWARE_ENV, f.ALTER_SOFTWARE_ENV, _KIND_MODULE, keyword="seed"),
        _single(r.SOFTWARE_ENV, f.ALTER_SOFTWARE_ENV, _KIND_MODULE),
    ]
    # 50-51: Software Environment / Others, module-level Python.
    specs += [_single(r.SOFTWARE_ENV, f.OTHERS, _KIND_MODULE) for _ in range(2)]
    # 52-55: Unhandled Exceptions / Add Exception Handler, Q# fixes;
    # #52 lacks the marker, #53 carries a misleading keyword.
    for i in range(52, 56):
        extra = {"keyword": "insertion order"} if i == 53 else {}
        specs.append(
            _single(
                r.UNHANDLED_EXCEPTIONS,
                f.ADD_EXCEPTION_HANDLER,
                _KIND_QSHARP,
                marker=i != 52,
                **extra,
            )
        )
    # 56-63: Others / Others, Q# fixes; #56-57 have no comments.
    for i in range(56, 64):
        specs.append(_single(r.OTHERS, f.OTHERS, _KIND_QSHARP, has_comments=i not in (56, 57)))

    # 64-66: unknown cause, payload fetch failed.
    specs += [
        _FlakySpec((UNKNOWN_CAUSE,), (f.OTHERS.value,), _KIND_FETCH_FAILED)
        for _ in range(3)
    ]
    # 67-70: unknown cause, no linked change at all.
    specs += [
        _FlakySpec((UNKNOWN_CAUSE,), (f.OTHERS.value,), _KIND_NONE) for _ in range(4)
    ]
    return specs


# --- text assembly -------------------------------------------------------------


def _flaky_description(spec: _FlakySpec, test_name: str) -> str:
    if spec.marker:
        opening = (
            f"The test {test_name} fails {MOCK_FLAKY_MARKER} on CI. "
            "Re-running the exact same commit turns it green again."
        )
    else:
        opening = (
            f"The test {test_name} reports a different outcome on repeated runs "
            "of the same commit, with no code change in between."
        )
    sentences = [opening]
    if spec.keyword is not None:
        sentences.append(_CAUSE_KEYWORD_SENTENCES[spec.keyword])
    else:
        sentences.append("No single component stands out in the logs.")
    if spec.corrupt_binary:
        sentences.append(MOCK_CORRUPT_BINARY_MARKER)
    if spec.corrupt_cause:
        sentences.append(MOCK_CORRUPT_CAUSE_MARKER)
    return " ".join(sentences)


def _non_flaky_description(hard_negative: bool, test_name: str) -> str:
    if hard_negative:
        return (
            f"The reporter claims {test_name} fails {MOCK_FLAKY_MARKER}, but every "
            "attached log shows the same assertion message at the same line; this "
            "looks like a genuine regression rather than test instability."
        )
    return (
        f"Running {test_name} aborts with a clear import error introduced by the "
        "latest refactoring. The failure reproduces on every run and disappears "
        "after reverting the offending change."
    )


def _comments(case_index: int, created: datetime) -> tuple[Comment, ...]:
    first = Comment(
        author="ci-watcher",
        created_at=created + timedelta(minutes=10),
        body="Reproduced on the 2024.03 runner image; logs archived.",
    )
    second = Comment(
        author=_REVIEWERS[case_index % 2],
        created_at=created + timedelta(minutes=45),
        body="Closing as resolved by the linked change after two clean weeks.",
    )
    return (first, second) if case_index % 3 else (first,)


# --- code payloads ---------------------------------------------------------------

LISTING_TEST_NAME = "test_append_circuit"

LISTING_BEFORE = '''"""Circuit composition tests."""

import numpy as np

from qiskit.circuit.random import random_circuit


class TestCompose:
    def setup_method(self):
        self.depth = 4

    def test_append_circuit(self, num_qubits):
        ...
        first_circuit = random_circuit(num_qubits[0], depth)
        ...
        for num in num_qubits[1:]:
            circuit = random_circuit(num, depth)

    def test_width_is_preserved(self):
        assert TestCompose is not None
'''

LISTING_AFTER = LISTING_BEFORE.replace(
    "random_circuit(num_qubits[0], depth)",
    "random_circuit(num_qubits[0], depth, seed=4200)",
).replace(
    "random_circuit(num, depth)",
    "random_circuit(num, depth, seed=4200)",
)


def _method_payload(index: int, test_name: str) -> tuple[str, str, str]:
    if index == 0:
        return f"test/compose/test_case_{index:03d}.py", LISTING_BEFORE, LISTING_AFTER
    helper = f"collect_counts_{index:03d}"
    before = f'''"""Regression tests (case {index:03d})."""

import numpy as np

from quantum_testkit import {helper}


class TestCase{index:03d}:
    def setup_method(self):
        self.samples = 128

    def {test_name}(self):
        result = {helper}(self.samples)
        window = result.take(3)
        assert window == list(range(3))

    def test_shape_is_stable(self):
        assert {helper} is not None
'''
    after = before.replace(
        "window = result.take(3)",
        "window = list(sorted(result.take(3)))",
    )
    return f"test/regression/test_case_{index:03d}.py", before, after


def _module_payload(index: int) -> tuple[str, str, str]:
    before = f'''"""Runtime environment pins (case {index:03d})."""

SUPPORTED_PYTHON = "3.10"
RESOLVER_STRATEGY = "backtracking"
RUNNER_IMAGE = "quantum-ci:2024.02"
'''
    after = before.replace('quantum-ci:2024.02', 'quantum-ci:2024.03')
    return f"src/runtime/pins_{index:03d}.py", before, after


def _config_payload(index: int) -> tuple[str, str, str]:
    if index % 2 == 0:
        before = (
            "[testenv:docs]\n"
            "commands = sphinx-build -W -b html -j auto docs/ docs/_build/html {posargs}\n"
        )
        after = before.replace(" -j auto", "")
        return "tox.ini", before, after
    before = "numpy!=1.19\nscipy>=1.8\n"
    after = "scipy>=1.8\n"
    return "requirements.txt", before, after


def _qsharp_payload(index: int) -> tuple[str, str, str]:
    before = (
        f"namespace Quantum.Preparation.Case{index:03d} {{\n"
        "    operation CheckPreparation() : Unit {\n"
        "        ApplyXorInPlace(keepCoeff[idx], keepCoeffRegister);\n"
        "    }\n"
        "}\n"
    )
    after = before.replace(
        "        ApplyXorInPlace(keepCoeff[idx], keepCoeffRegister);\n",
        "        if (keepCoeff[idx] >= 0) {\n"
        "            ApplyXorInPlace(keepCoeff[idx], keepCoeffRegister);\n"
        "        }\n",
    )
    return f"src/preparation/Case{index:03d}.qs", before, after


def _commit_pair(cid: str) -> tuple[str, str]:
    fix = hashlib.sha256(f"{cid}:fix".encode("utf-8")).hexdigest()[:40]
    parent = hashlib.sha256(f"{cid}:parent".encode("utf-8")).hexdigest()[:40]
    return fix, parent


# --- builder ---------------------------------------------------------------------


@dataclass
class _Builder:
    artifacts: list[CaseArtifact] = field(default_factory=list)
    commits: list[CommitInfo] = field(default_factory=list)
    payloads: dict[tuple[str, str], bytes] = field(default_factory=dict)
    failures: list[FetchFailure] = field(default_factory=list)
    labeled: list[LabeledCase] = field(default_factory=list)
    counters: dict[str, int] = field(default_factory=dict)

    def next_number(self, repo: RepositoryRef, *, start: int, step: int) -> int:
        key = f"{repo.slug}:{start}"
        number = self.counters.get(key, start)
        self.counters[key] = number + step
        return number


def _repo_slots(per_repo: tuple[int, ...]) -> list[RepositoryRef]:
    slots: list[RepositoryRef] = []
    for repo, count in zip(REPOSITORIES, per_repo):
        slots.extend([repo] * count)
    return slots


def _provenance_for(index: int) -> Provenance:
    if index < 46:
        source = SOURCE_ORIGINAL
    elif index < 61:
        source = expansion_source(1)
    else:
        source = expansion_source(2)
    return Provenance(
        source=source,
        reviewer_ids=_REVIEWERS,
        reviewed_at=_REVIEW_TIME + timedelta(minutes=index),
    )


def build_replica_snapshot_and_dataset() -> tuple[Snapshot, Dataset]:
    builder = _Builder()
    specs = _flaky_specs()
    flaky_repos = _repo_slots(_FLAKY_PER_REPO)
    assert len(specs) == len(flaky_repos) == 71

    for index, (spec, repo) in enumerate(zip(specs, flaky_repos)):
        _add_flaky_case(builder, index, spec, repo)

    non_flaky_repos = _repo_slots(_NON_FLAKY_PER_REPO)
    for index, repo in enumerate(non_flaky_repos):
        _add_non_flaky_case(builder, index, repo, hard_negative=index < 4)

    snapshot = Snapshot(
        created_at=_SNAPSHOT_TIME,
        repositories=REPOSITORIES,
        artifacts=tuple(sorted(builder.artifacts, key=lambda a: a.sort_key())),
        commits=tuple(builder.commits),
        file_payloads=builder.payloads,
        fetch_failures=tuple(builder.failures),
    )

    dataset = Dataset()
    for labeled in builder.labeled:
        dataset.cases.append(labeled)
        dataset.contexts[labeled.id] = {
            level: build_code_context(labeled.case, level, snapshot)
            for level in (ContextLevel.PARTIAL, ContextLevel.FULL)
        }
    return snapshot, dataset


def _add_flaky_case(
    builder: _Builder, index: int, spec: _FlakySpec, repo: RepositoryRef
) -> None:
    number = builder.next_number(repo, start=101, step=7)
    cid = case_id(repo, number)
    test_name = LISTING_TEST_NAME if index == 0 else f"test_case_{index:03d}"
    created = _BASE_TIME + timedelta(hours=index)

    fix_sha, parent_sha = _commit_pair(cid)
    linked_prs: tuple[str, ...] = ()
    linked_commits: tuple[str, ...] = ()
    if spec.code_kind != _KIND_NONE:
        if spec.linked_via_pr:
            pr_number = number + 1
            pr_id = case_id(repo, pr_number, PULL_REQUEST)
            builder.artifacts.append(
                CaseArtifact(
                    id=pr_id,
                    kind=PULL_REQUEST,
                    number=pr_number,
                    title=f"Stabilize {test_name}",
                    description=f"Fixes #{number} by pinning the offending behavior.",
                    state="closed",
                    linked_commits=(fix_sha,),
                )
            )
            linked_prs = (pr_id,)
        else:
            linked_commits = (fix_sha,)

    if spec.code_kind == _KIND_METHOD:
        path, before, after = _method_payload(index, test_name)
    elif spec.code_kind == _KIND_MODULE:
        path, before, after = _module_payload(index)
    elif spec.code_kind == _KIND_CONFIG:
        path, before, after = _config_payload(index)
    elif spec.code_kind == _KIND_QSHARP:
        path, before, after = _qsharp_payload(index)
    else:
        path = before = after = ""

    if spec.code_kind in (_KIND_METHOD, _KIND_MODULE, _KIND_CONFIG, _KIND_QSHARP):
        builder.commits.append(CommitInfo(fix_sha, (parent_sha,), (path,)))
        builder.payloads[(parent_sha, path)] = before.encode("utf-8")
        builder.payloads[(fix_sha, path)] = after.encode("utf-8")
    elif spec.code_kind == _KIND_FETCH_FAILED:
        blob_path = f"src/unresolved/case_{index:03d}.py"
        builder.commits.append(CommitInfo(fix_sha, (parent_sha,), (blob_path,)))
        builder.failures.append(
            FetchFailure(parent_sha, blob_path, "HTTP 500 fetching blob")
        )
        builder.failures.append(FetchFailure(fix_sha, blob_path, "HTTP 500 fetching blob"))

    artifact = CaseArtifact(
        id=cid,
        kind=ISSUE,
        number=number,
        title=f"{repo.name}: {test_name} keeps flipping between pass and fail",
        description=_flaky_description(spec, test_name),
        comments=_comments(index, created) if spec.has_comments else (),
        state="closed",
        linked_prs=linked_prs,
        linked_commits=linked_commits,
    )
    builder.artifacts.append(artifact)
    builder.labeled.append(
        LabeledCase(
            case=artifact,
            flaky=True,
            root_causes=spec.causes,
            fix_patterns=spec.fixes,
            provenance=_provenance_for(index),
        )
    )


def _add_non_flaky_case(
    builder: _Builder, index: int, repo: RepositoryRef, *, hard_negative: bool
) -> None:
    number = builder.next_number(repo, start=701, step=3)
    cid = case_id(repo, number)
    test_name = f"test_build_{index:03d}"
    created = _BASE_TIME + timedelta(hours=200 + index)
    artifact = CaseArtifact(
        id=cid,
        kind=ISSUE,
        number=number,
        title=f"{repo.name}: {test_name} fails after the latest merge",
        description=_non_flaky_description(hard_negative, test_name),
        comments=_comments(index, created) if index % 2 == 0 else (),
        state="closed",
    )
    builder.artifacts.append(artifact)
    builder.labeled.append(
        LabeledCase(
            case=artifact,
            flaky=False,
            provenance=Provenance(
                source=SOURCE_HARD_NEGATIVE if hard_negative else SOURCE_NEGATIVE_SAMPLING,
                reviewer_ids=_REVIEWERS if hard_negative else (),
                reviewed_at=_REVIEW_TIME if hard_negative else None,
            ),
        )
    )


def build_replica_dataset() -> Dataset:
    return build_replica_snapshot_and_dataset()[1]


def main(argv: list[str] | None = None) -> int:
    import argparse

    from qflake.corpus.snapshot import write_snapshot
    from qflake.store.dataset import persist_dataset

    parser = argparse.ArgumentParser(description="materialize the bundled fixture dataset")
    parser.add_argument("out", help="output directory")
    args = parser.parse_args(argv)

    snapshot, dataset = build_replica_snapshot_and_dataset()
    write_snapshot(snapshot, f"{args.out}/snapshot")
    persist_dataset(dataset, f"{args.out}/dataset")
    print(f"wrote snapshot and dataset under {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
