"""The factorial condition matrix: report level x code level x enrichment."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class ReportLevel(Enum):
    PARTIAL = "Rp"  # initial description only
    FULL = "Rf"     # description plus all comments

    def __str__(self) -> str:
        return self.value


class CodeContextLevel(Enum):
    NONE = "C0"
    PARTIAL = "Cp"  # enclosing-method text
    FULL = "Cf"     # full pre-fix file listing

    def __str__(self) -> str:
        return self.value


class EnrichmentLevel(Enum):
    NONE = "E0"
    PARTIAL = "Ep"  # few-shot example chosen by cosine rank over partial reports
    FULL = "Ef"     # few-shot example chosen by cosine rank over full reports

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class ExperimentCondition:
    report_level: ReportLevel
    code_level: CodeContextLevel
    enrichment: EnrichmentLevel = EnrichmentLevel.NONE

    @property
    def key(self) -> str:
        return f"{self.report_level.value}.{self.code_level.value}.{self.enrichment.value}"

    def display(self) -> str:
        """Row label matching the published table style, e.g. ``E_p{R_f, C_p}``."""
        inner = "{R_%s, C_%s}" % (
            "p" if self.report_level is ReportLevel.PARTIAL else "f",
            "p" if self.code_level is CodeContextLevel.PARTIAL else "f",
        )
        if self.code_level is CodeContextLevel.NONE:
            inner = "{R_%s}" % ("p" if self.report_level is ReportLevel.PARTIAL else "f")
        if self.enrichment is EnrichmentLevel.NONE:
            return inner
        suffix = "p" if self.enrichment is EnrichmentLevel.PARTIAL else "f"
        return f"E_{suffix}{inner}"

    def without_code(self) -> "ExperimentCondition":
        return ExperimentCondition(self.report_level, CodeContextLevel.NONE, self.enrichment)

    @staticmethod
    def from_key(key: str) -> "ExperimentCondition":
        r, c, e = key.split(".")
        return ExperimentCondition(ReportLevel(r), CodeContextLevel(c), EnrichmentLevel(e))


def enumerate_conditions(include_enrichment: bool = False) -> list[ExperimentCondition]:
    """The studied code-bearing cells, in table row-block order.

    Without enrichment: the 4 cells of {R_p, R_f} x {C_p, C_f}. With
    enrichment: those 4 plus the E_p and E_f blocks, 12 in total.
    """
    report_levels = [ReportLevel.PARTIAL, ReportLevel.FULL]
    code_levels = [CodeContextLevel.PARTIAL, CodeContextLevel.FULL]
    enrichments = [EnrichmentLevel.NONE]
    if include_enrichment:
        enrichments += [EnrichmentLevel.PARTIAL, EnrichmentLevel.FULL]
    return [
        ExperimentCondition(r, c, e)
        for e in enrichments
        for r in report_levels
        for c in code_levels
    ]
