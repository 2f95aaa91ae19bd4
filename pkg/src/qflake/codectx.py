"""Recover pre-fix code for a case and isolate it at method or file granularity.

The "before" state of a fix is the parent of the first fixing commit; the
"after" state is the last fixing commit. Changed line ranges are computed with a
longest-common-subsequence line diff, and method-level extraction uses a real
grammar parse of the source (the CPython ``ast`` module), never regex heuristics.
"""

from __future__ import annotations

import ast
import difflib
from dataclasses import dataclass
from enum import Enum

from qflake.corpus.links import effective_commits
from qflake.corpus.models import CaseArtifact, Snapshot
from qflake.errors import NoLinkedChangeError, NonPythonError, ParseFailureError

# Source-code extensions that are not Python: method-level extraction reports
# these as non_python. Anything else (configs, docs, data) has no notion of an
# enclosing method at all and reports no_enclosing_function instead.
_NON_PYTHON_SOURCE_EXTS = {
    ".qs", ".js", ".ts", ".java", ".c", ".h", ".cpp", ".cc", ".hpp",
    ".cs", ".rs", ".go", ".rb", ".php", ".scala", ".kt", ".swift",
}

DEFAULT_FULL_CONTEXT_BUDGET = 60_000
TRUNCATION_MARKER = "\n# [truncated: context budget exceeded]"

FILE_UNIT = "<file>"


class ContextLevel(Enum):
    PARTIAL = "partial"
    FULL = "full"

    def __str__(self) -> str:
        return self.value


class MissingReason(Enum):
    NON_PYTHON = "non_python"
    NO_ENCLOSING_FUNCTION = "no_enclosing_function"
    NO_CODE_CHANGE = "no_code_change"
    FETCH_FAILED = "fetch_failed"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FileChange:
    path: str
    before: str | None
    after: str | None
    changed_line_ranges_before: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        ranges = tuple(tuple(r) for r in self.changed_line_ranges_before)
        if self.before is None and ranges:
            raise ValueError("an added file cannot have before-side ranges")
        if list(ranges) != sorted(ranges):
            raise ValueError("changed ranges must be sorted")
        for (s1, e1), (s2, _) in zip(ranges, ranges[1:]):
            if s2 <= e1:
                raise ValueError("changed ranges must not overlap")
        object.__setattr__(self, "changed_line_ranges_before", ranges)


@dataclass(frozen=True)
class ContextUnit:
    path: str
    unit_name: str
    text: str


@dataclass(frozen=True)
class CodeContext:
    level: ContextLevel
    units: tuple[ContextUnit, ...] = ()
    status: str = "missing"
    missing_reason: MissingReason | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", tuple(self.units))
        if (self.status == "present") != bool(self.units):
            raise ValueError("status must be 'present' exactly when units are non-empty")
        if self.status == "present" and self.missing_reason is not None:
            raise ValueError("present context cannot carry a missing reason")
        if self.status == "missing" and self.missing_reason is None:
            raise ValueError("missing context must carry a reason")
        if self.level is ContextLevel.FULL:
            for unit in self.units:
                if unit.unit_name != FILE_UNIT:
                    raise ValueError("full-level units must be whole files")

    @property
    def present(self) -> bool:
        return self.status == "present"

    def text(self) -> str:
        return "\n\n".join(u.text for u in self.units)


# --- diffing ----------------------------------------------------------------


def line_diff_ranges(before: str, after: str) -> tuple[tuple[int, int], ...]:
    """1-based inclusive ranges of before-lines touched by the edit.

    Replacements and deletions map to their before-side lines; a pure insertion
    maps to the line it was inserted after, so the enclosing function of the
    insertion point is still recoverable.
    """
    matcher = difflib.SequenceMatcher(
        None, before.splitlines(), after.splitlines(), autojunk=False
    )
    raw: list[tuple[int, int]] = []
    for op, i1, i2, _j1, _j2 in matcher.get_opcodes():
        if op in ("replace", "delete"):
            raw.append((i1 + 1, i2))
        elif op == "insert" and i1 >= 1:
            raw.append((i1, i1))
    raw.sort()
    merged: list[tuple[int, int]] = []
    for start, end in raw:
        if merged and start <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return tuple(merged)


def diff_changed_files(case: CaseArtifact, snapshot: Snapshot) -> list[FileChange]:
    """One FileChange per file touched by the case's fixing commits.

    Files whose payloads are absent from the snapshot (recorded fetch failures)
    are skipped here; ``build_code_context`` reports them as missing context.
    """
    commits = effective_commits(case, snapshot)
    if not commits:
        raise NoLinkedChangeError(f"{case.id} has no linked commits or PRs")

    first = snapshot.commit_by_sha(commits[0])
    before_sha = first.parents[0] if first and first.parents else None
    after_sha = commits[-1]

    touched: list[str] = []
    for sha in commits:
        info = snapshot.commit_by_sha(sha)
        if info is None:
            continue
        for path in info.files:
            if path not in touched:
                touched.append(path)

    changes: list[FileChange] = []
    for path in sorted(touched):
        before = snapshot.payload_text(before_sha, path) if before_sha else None
        after = snapshot.payload_text(after_sha, path)
        if before is None and after is None:
            continue
        ranges = line_diff_ranges(before, after) if before is not None and after is not None else ()
        if before is not None and after is None:
            # File deleted by the fix: the whole before text was touched.
            ranges = ((1, max(1, len(before.splitlines()))),)
        changes.append(
            FileChange(
                path=path,
                before=before,
                after=after,
                changed_line_ranges_before=ranges,
            )
        )
    return changes


# --- method-level extraction -------------------------------------------------


@dataclass(frozen=True)
class _FunctionSpan:
    name: str
    start: int
    end: int
    depth: int


def _function_spans(source: str) -> list[_FunctionSpan]:
    try:
        tree = ast.parse(source)
    except (SyntaxError, ValueError) as exc:
        raise ParseFailureError(str(exc)) from exc

    spans: list[_FunctionSpan] = []

    def visit(node: ast.AST, depth: int) -> None:
        for child in ast.iter_child_nodes(node):
            if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef)):
                start = min([child.lineno] + [d.lineno for d in child.decorator_list])
                spans.append(_FunctionSpan(child.name, start, child.end_lineno or start, depth))
                visit(child, depth + 1)
            else:
                visit(child, depth)

    visit(tree, 0)
    return spans


def extract_method_context(change: FileChange) -> list[ContextUnit]:
    """Source text of every innermost function enclosing a changed line.

    Each function appears at most once, in file order. Raises NonPythonError
    for non-Python source files and ParseFailureError for malformed Python.
    """
    if change.before is None:
        return []
    if not change.path.endswith(".py"):
        raise NonPythonError(f"{change.path} is not Python source")

    spans = _function_spans(change.before)
    lines = change.before.splitlines()
    chosen: dict[tuple[int, int], _FunctionSpan] = {}
    for start, end in change.changed_line_ranges_before:
        for line in range(start, end + 1):
            enclosing = [s for s in spans if s.start <= line <= s.end]
            if not enclosing:
                continue
            innermost = max(enclosing, key=lambda s: (s.depth, s.start))
            chosen[(innermost.start, innermost.end)] = innermost

    units = []
    for span in sorted(chosen.values(), key=lambda s: s.start):
        text = "\n".join(lines[span.start - 1 : span.end])
        units.append(ContextUnit(path=change.path, unit_name=span.name, text=text))
    return units


# --- context assembly ---------------------------------------------------------


def _truncate(text: str, budget: int) -> str:
    if len(text) <= budget:
        return text
    return text[:budget] + TRUNCATION_MARKER


def build_code_context(
    case: CaseArtifact,
    level: ContextLevel,
    snapshot: Snapshot,
    *,
    full_context_budget: int = DEFAULT_FULL_CONTEXT_BUDGET,
) -> CodeContext:
    """Pre-fix code context for a case, or an explicit missing marker.

    Missing is a value, not an error; the most specific reason wins so that
    evaluation totals can account for every exclusion.
    """
    try:
        changes = diff_changed_files(case, snapshot)
    except NoLinkedChangeError:
        return CodeContext(level, (), "missing", MissingReason.NO_CODE_CHANGE)

    commits = set(effective_commits(case, snapshot))
    commits.update(
        snapshot.commit_by_sha(sha).parents[0]
        for sha in commits.copy()
        if snapshot.commit_by_sha(sha) and snapshot.commit_by_sha(sha).parents
    )
    fetch_failed = any(f.commit in commits for f in snapshot.fetch_failures)

    if not changes:
        reason = MissingReason.FETCH_FAILED if fetch_failed else MissingReason.NO_CODE_CHANGE
        return CodeContext(level, (), "missing", reason)

    if level is ContextLevel.FULL:
        units = tuple(
            ContextUnit(c.path, FILE_UNIT, _truncate(c.before, full_context_budget))
            for c in changes
            if c.before is not None
        )
        if units:
            return CodeContext(level, units, "present")
        return CodeContext(level, (), "missing", MissingReason.NO_CODE_CHANGE)

    units_list: list[ContextUnit] = []
    saw_non_python_source = False
    saw_unitless_python_or_config = False
    for change in changes:
        if change.before is None:
            continue
        try:
            extracted = extract_method_context(change)
        except NonPythonError:
            if _is_non_python_source(change.path):
                saw_non_python_source = True
            else:
                saw_unitless_python_or_config = True
            continue
        except ParseFailureError:
            saw_unitless_python_or_config = True
            continue
        if extracted:
            units_list.extend(extracted)
        else:
            saw_unitless_python_or_config = True

    if units_list:
        return CodeContext(level, tuple(units_list), "present")
    if saw_unitless_python_or_config or not saw_non_python_source:
        return CodeContext(level, (), "missing", MissingReason.NO_ENCLOSING_FUNCTION)
    return CodeContext(level, (), "missing", MissingReason.NON_PYTHON)


def _is_non_python_source(path: str) -> bool:
    dot = path.rfind(".")
    return dot >= 0 and path[dot:].lower() in _NON_PYTHON_SOURCE_EXTS
