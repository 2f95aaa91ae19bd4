"""Dataset statistics and experiment tables.

Rendering follows the published table conventions: metrics to 4 decimals,
repo percentages to 2 decimals, taxonomy percentages to 1 decimal. Repo-table
checking treats the per-row T and F counts as ground truth and the printed
percentage as derived: rows whose printed percentage disagrees with F/T x 100
are flagged, never silently reproduced.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping, Sequence

from qflake.store.dataset import Dataset
from qflake.taxonomy import UNKNOWN_CAUSE, FixPattern, RootCauseClass


def round_half_up(value: float, digits: int) -> float:
    quantum = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def percent(numerator: int, denominator: int, digits: int) -> float:
    if denominator == 0:
        return 0.0
    return round_half_up(numerator / denominator * 100.0, digits)


# --- repository statistics -----------------------------------------------------


@dataclass(frozen=True)
class RepoStats:
    platform: str
    name: str
    closed_reports: int   # T
    flaky_reports: int    # F
    percentage: float     # P == F/T x 100, 2 decimals

    @property
    def slug(self) -> str:
        return f"{self.platform}/{self.name}"


def repo_stats(dataset: Dataset, closed_counts: Mapping[str, int]) -> list[RepoStats]:
    """Per-repo flaky counts from the dataset, T counts from the snapshot side."""
    flaky_by_repo: dict[str, int] = {}
    for labeled in dataset.flaky_cases():
        slug = labeled.case.repo_slug
        flaky_by_repo[slug] = flaky_by_repo.get(slug, 0) + 1
    rows = []
    for slug in sorted(set(flaky_by_repo) | set(closed_counts)):
        platform, _, name = slug.partition("/")
        t = closed_counts.get(slug, 0)
        f = flaky_by_repo.get(slug, 0)
        rows.append(RepoStats(platform, name, t, f, percent(f, t, 2)))
    return rows


def overall_rate(total_flaky: int, total_closed: int) -> float:
    return percent(total_flaky, total_closed, 2)


@dataclass(frozen=True)
class ReferenceRepoRow:
    """One printed row of the published repository table."""

    platform: str
    name: str
    language: str
    closed_reports: int
    flaky_reports: int
    printed_percentage: float


def check_reference_table(
    rows: Sequence[ReferenceRepoRow],
    *,
    stated_flaky_total: int,
    stated_closed_total: int,
) -> list[str]:
    """Arithmetic-consistency flags for a printed table.

    A row is flagged when its printed percentage does not equal F/T x 100 at
    two decimals; the totals row is flagged when the F column does not sum to
    the stated total.
    """
    flags = []
    for row in rows:
        computed = percent(row.flaky_reports, row.closed_reports, 2)
        if abs(computed - row.printed_percentage) >= 0.005:
            flags.append(
                f"{row.platform}/{row.name}: printed {row.printed_percentage:.2f}% "
                f"but {row.flaky_reports}/{row.closed_reports} = {computed:.2f}%"
            )
    column_sum = sum(row.flaky_reports for row in rows)
    if column_sum != stated_flaky_total:
        flags.append(
            f"totals: flaky column sums to {column_sum} "
            f"but the stated total is {stated_flaky_total}"
        )
    t_sum = sum(row.closed_reports for row in rows)
    if t_sum != stated_closed_total:
        flags.append(
            f"totals: closed column sums to {t_sum} "
            f"but the stated total is {stated_closed_total}"
        )
    return flags


def render_repo_stats(
    rows: Sequence[RepoStats] | Sequence[ReferenceRepoRow],
    flags: Iterable[str] = (),
    *,
    stated_flaky_total: int | None = None,
    stated_closed_total: int | None = None,
) -> str:
    lines = ["Platform\tRepository\tT\tF\tP"]
    for row in rows:
        if isinstance(row, ReferenceRepoRow):
            computed = percent(row.flaky_reports, row.closed_reports, 2)
        else:
            computed = row.percentage
        lines.append(
            f"{row.platform}\t{row.name}\t{row.closed_reports}\t"
            f"{row.flaky_reports}\t{computed:.2f}%"
        )
    if stated_flaky_total is not None and stated_closed_total is not None:
        lines.append(
            f"Total\t\t{stated_closed_total}\t{stated_flaky_total}\t"
            f"{overall_rate(stated_flaky_total, stated_closed_total):.2f}%"
        )
    flag_list = list(flags)
    if flag_list:
        lines.append("")
        lines.append("Flagged rows (printed percentage disagrees with F/T):")
        lines.extend(f"  ! {flag}" for flag in flag_list)
    return "\n".join(lines) + "\n"


# --- taxonomy (cause x fix) ------------------------------------------------------

# Published row/column order of the cause-by-fix table.
TAXONOMY_CAUSE_ORDER: tuple[str, ...] = (
    RootCauseClass.RANDOMNESS.value,
    RootCauseClass.SOFTWARE_ENV.value,
    RootCauseClass.MULTI_THREADING.value,
    RootCauseClass.FLOATING_POINT.value,
    RootCauseClass.VISUALIZATION.value,
    RootCauseClass.UNHANDLED_EXCEPTIONS.value,
    RootCauseClass.NETWORK.value,
    RootCauseClass.UNORDERED_COLLECTION.value,
    RootCauseClass.OTHERS.value,
    UNKNOWN_CAUSE,
)

TAXONOMY_FIX_ORDER: tuple[str, ...] = tuple(f.value for f in FixPattern)


@dataclass(frozen=True)
class TaxonomyCell:
    cause: str
    fix: str
    count: int


@dataclass(frozen=True)
class TaxonomyReport:
    cells: tuple[TaxonomyCell, ...]
    cause_totals: dict[str, int]
    fix_totals: dict[str, int]
    grand_total: int
    case_count: int
    multi_label_case_count: int

    def count(self, cause: str, fix: str) -> int:
        for cell in self.cells:
            if cell.cause == cause and cell.fix == fix:
                return cell.count
        return 0


def taxonomy_report(dataset: Dataset) -> TaxonomyReport:
    """Counts per (cause, fix) pair. A case with k root-cause labels contributes
    k observations, so the grand total can exceed the case count."""
    counts: dict[tuple[str, str], int] = {}
    flaky = dataset.flaky_cases()
    multi = 0
    for labeled in flaky:
        pairs = labeled.cause_fix_pairs()
        if len(pairs) > 1:
            multi += 1
        for cause, fix in pairs:
            counts[(cause, fix)] = counts.get((cause, fix), 0) + 1

    cells = tuple(
        TaxonomyCell(cause, fix, counts[(cause, fix)])
        for cause in TAXONOMY_CAUSE_ORDER
        for fix in TAXONOMY_FIX_ORDER
        if (cause, fix) in counts
    )
    cause_totals = {
        cause: sum(c.count for c in cells if c.cause == cause)
        for cause in TAXONOMY_CAUSE_ORDER
    }
    fix_totals = {
        fix: sum(c.count for c in cells if c.fix == fix) for fix in TAXONOMY_FIX_ORDER
    }
    return TaxonomyReport(
        cells=cells,
        cause_totals=cause_totals,
        fix_totals=fix_totals,
        grand_total=sum(counts.values()),
        case_count=len(flaky),
        multi_label_case_count=multi,
    )


def render_taxonomy(report: TaxonomyReport) -> str:
    header = ["Cause category", *TAXONOMY_FIX_ORDER, "Grand Total", "Percentage"]
    lines = ["\t".join(header)]
    for cause in TAXONOMY_CAUSE_ORDER:
        total = report.cause_totals.get(cause, 0)
        if total == 0:
            continue
        row = [cause]
        for fix in TAXONOMY_FIX_ORDER:
            count = report.count(cause, fix)
            row.append(str(count) if count else "")
        row.append(str(total))
        row.append(f"{percent(total, report.grand_total, 1):.1f}%")
        lines.append("\t".join(row))

    totals_row = ["Grand Total"]
    percent_row = ["Percentage"]
    for fix in TAXONOMY_FIX_ORDER:
        total = report.fix_totals.get(fix, 0)
        totals_row.append(str(total) if total else "")
        percent_row.append(f"{percent(total, report.grand_total, 1):.1f}%" if total else "")
    totals_row.extend([str(report.grand_total), "100%"])
    percent_row.extend(["100%", ""])
    lines.append("\t".join(totals_row))
    lines.append("\t".join(percent_row))
    lines.append("")
    lines.append(
        f"{report.grand_total} observations from {report.case_count} cases "
        f"({report.multi_label_case_count} with multiple labels)"
    )
    return "\n".join(lines) + "\n"


# --- experiment results table -----------------------------------------------------


def render_results_table(cells: Sequence) -> str:
    """Delimited table mirroring the published results columns:
    Model, Context, F1 (RQ3/RQ5), MCC (RQ3/RQ5), Recall (RQ3/RQ4),
    Total Observations (RQ3/RQ4/RQ5)."""

    def fmt(value: float | None) -> str:
        return f"{value:.4f}" if value is not None else "-"

    header = [
        "Model", "Context",
        "F1.RQ3", "F1.RQ5", "MCC.RQ3", "MCC.RQ5",
        "Recall.RQ3", "Recall.RQ4",
        "Total.RQ3", "Total.RQ4", "Total.RQ5",
    ]
    lines = ["\t".join(header)]
    for cell in cells:
        if cell.incomplete:
            lines.append(
                "\t".join(
                    [cell.model_id, cell.condition.display(), "incomplete:", cell.note]
                )
            )
            continue
        lines.append(
            "\t".join(
                [
                    cell.model_id,
                    cell.condition.display(),
                    fmt(cell.rq3.f1),
                    fmt(cell.rq5.weighted_f1),
                    fmt(cell.rq3.mcc),
                    fmt(cell.rq5.mcc),
                    fmt(cell.rq3.recall),
                    fmt(cell.rq4.recall),
                    cell.rq3.totals_display(),
                    cell.rq4.totals_display(),
                    cell.rq5.totals_display(),
                ]
            )
        )
    return "\n".join(lines) + "\n"
