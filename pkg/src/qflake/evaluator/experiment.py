"""The experiment driver: conversations -> verdicts -> per-cell metrics.

Per (model, condition) cell:
  * binary classification over the full balanced dataset is scored from
    code-free conversations at the cell's report/enrichment levels;
  * code-bearing classification (recall) and the chained root-cause question
    run over the flaky subset with present code context at the cell's level;
  * the totals column reflects every exclusion (missing context, unusable
    outputs), which is what produces the asymmetric per-cell totals.

Provider failures abort only the affected cell, which is recorded as
incomplete. Verdicts are keyed by (case, condition, model, run, stage) in an
append-only store, so re-running after an interruption resumes without
re-sampling anything.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from qflake.codectx import ContextLevel
from qflake.errors import (
    BudgetExceededError,
    EmptyDescriptionError,
    MissingCodeContextError,
    ProviderError,
)
from qflake.evaluator.metrics import (
    MetricsReport,
    binary_metrics,
    recall_only_metrics,
    root_cause_metrics,
)
from qflake.inference.providers import ProviderConfig, build_provider
from qflake.inference.runner import run_conversation
from qflake.inference.verdicts import Verdict, VerdictStore, conversation_hash
from qflake.promptkit.conditions import (
    CodeContextLevel,
    EnrichmentLevel,
    ExperimentCondition,
    ReportLevel,
)
from qflake.promptkit.conversation import (
    Conversation,
    build_conversation,
    extend_for_root_cause,
)
from qflake.promptkit.templates import PromptTemplates, load_templates
from qflake.simsearch.embedding import CachedEmbedder, MockEmbeddingProvider
from qflake.store.dataset import Dataset
from qflake.store.labels import LabeledCase
from qflake.taxonomy import RootCauseClass, parse_root_cause

logger = logging.getLogger(__name__)

DEFAULT_REQUEST_BUDGET = 50_000

_CODE_TO_CONTEXT = {
    CodeContextLevel.PARTIAL: ContextLevel.PARTIAL,
    CodeContextLevel.FULL: ContextLevel.FULL,
}


@dataclass(frozen=True)
class ExperimentCell:
    model_id: str
    condition: ExperimentCondition
    rq3: MetricsReport | None
    rq4: MetricsReport | None
    rq5: MetricsReport | None
    incomplete: bool = False
    note: str = ""


def scoreable_cases(dataset: Dataset) -> list[LabeledCase]:
    return [c for c in dataset.cases if c.case.description.strip()]


def eligible_flaky_cases(
    dataset: Dataset, condition: ExperimentCondition
) -> list[LabeledCase]:
    """Flaky cases a code-bearing cell can include: code context present at the
    cell's level, and a full-report entry available when the cell reads R_f.

    A comment-less case has no full-report entry beyond its partial one, which
    is how per-cell totals end up differing between the R_p and R_f groupings.
    """
    level = _CODE_TO_CONTEXT[condition.code_level]
    out = []
    for labeled in scoreable_cases(dataset):
        if not labeled.flaky:
            continue
        context = dataset.context(labeled.id, level)
        if context is None or not context.present:
            continue
        if condition.report_level is ReportLevel.FULL and not labeled.case.comments:
            continue
        out.append(labeled)
    return out


def _planned_requests(
    dataset: Dataset,
    conditions: Sequence[ExperimentCondition],
    model_id: str,
    run_id: str,
    store: VerdictStore,
) -> int:
    planned = 0
    cases = scoreable_cases(dataset)
    for report, enrichment in sorted(
        {(c.report_level, c.enrichment) for c in conditions},
        key=lambda pair: (pair[0].value, pair[1].value),
    ):
        rq3_key = ExperimentCondition(report, CodeContextLevel.NONE, enrichment).key
        planned += sum(
            1 for c in cases if not store.has(c.id, rq3_key, model_id, run_id, "rq3")
        )
    for condition in conditions:
        for labeled in eligible_flaky_cases(dataset, condition):
            for stage in ("rq4", "rq5"):
                if not store.has(labeled.id, condition.key, model_id, run_id, stage):
                    planned += 1
    return planned


class _CellRunner:
    """Executes one provider's cells against the store with bounded parallelism."""

    def __init__(
        self,
        dataset: Dataset,
        templates: PromptTemplates,
        provider,
        config: ProviderConfig,
        store: VerdictStore,
        run_id: str,
        embedder,
    ) -> None:
        self.dataset = dataset
        self.templates = templates
        self.provider = provider
        self.config = config
        self.store = store
        self.run_id = run_id
        self.embedder = embedder
        self.labeled = scoreable_cases(dataset)

    def _enrichment_kwargs(self, condition: ExperimentCondition) -> dict:
        if condition.enrichment is EnrichmentLevel.NONE:
            return {}
        return {
            "dataset": self.labeled,
            "embedder": self.embedder,
            "contexts": self.dataset.contexts,
        }

    def _execute(self, conversation: Conversation) -> Verdict:
        stored = self.store.get(
            conversation.case_id,
            conversation.condition.key,
            self.config.model_id,
            self.run_id,
            conversation.stage,
        )
        if stored is not None:
            return stored
        verdict = run_conversation(conversation, self.provider)
        self.store.append(
            case_id=conversation.case_id,
            condition=conversation.condition.key,
            model_id=self.config.model_id,
            run_id=self.run_id,
            verdict=verdict,
            conversation_digest=conversation_hash(conversation),
        )
        return verdict

    def run_rq3(self, report: ReportLevel, enrichment: EnrichmentLevel) -> MetricsReport:
        condition = ExperimentCondition(report, CodeContextLevel.NONE, enrichment)
        gold = {c.id: c.flaky for c in self.labeled}
        conversations = []
        for labeled in self.labeled:
            conversations.append(
                build_conversation(
                    labeled.case,
                    condition,
                    None,
                    self.templates,
                    **self._enrichment_kwargs(condition),
                )
            )
        preds = self._run_batch(conversations)
        return binary_metrics(
            preds,
            gold,
            model_id=self.config.model_id,
            condition_key=condition.key,
            stage="rq3",
        )

    def _run_batch(self, conversations: list[Conversation]) -> dict[str, Verdict]:
        # The store is single-writer: provider calls fan out, appends happen
        # sequentially inside _execute under the GIL per conversation future.
        results: dict[str, Verdict] = {}
        max_workers = max(1, self.config.max_parallel)
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            for conversation, verdict in zip(
                conversations, pool.map(self._run_chain_safe, conversations)
            ):
                results[conversation.case_id] = verdict
        return results

    def _run_chain_safe(self, conversation: Conversation) -> Verdict:
        return self._execute(conversation)

    def run_code_cell(
        self, condition: ExperimentCondition
    ) -> tuple[MetricsReport, MetricsReport]:
        eligible = eligible_flaky_cases(self.dataset, condition)
        level = _CODE_TO_CONTEXT[condition.code_level]
        gold_binary = {c.id: True for c in eligible}
        gold_causes: dict[str, tuple[RootCauseClass, ...]] = {}
        for labeled in eligible:
            causes = tuple(
                cls for name in labeled.known_causes() if (cls := parse_root_cause(name))
            )
            if causes:
                gold_causes[labeled.id] = causes

        def run_case(labeled: LabeledCase) -> tuple[Verdict, Verdict]:
            context = self.dataset.context(labeled.id, level)
            conversation = build_conversation(
                labeled.case,
                condition,
                context,
                self.templates,
                **self._enrichment_kwargs(condition),
            )
            binary_verdict = self._execute(conversation)
            follow_up = extend_for_root_cause(
                conversation, binary_verdict.raw_response, self.templates
            )
            cause_verdict = self._execute(follow_up)
            return binary_verdict, cause_verdict

        binary_preds: dict[str, Verdict] = {}
        cause_preds: dict[str, Verdict] = {}
        max_workers = max(1, self.config.max_parallel)
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            for labeled, (binary_verdict, cause_verdict) in zip(
                eligible, pool.map(run_case, eligible)
            ):
                binary_preds[labeled.id] = binary_verdict
                if labeled.id in gold_causes:
                    cause_preds[labeled.id] = cause_verdict

        rq4 = recall_only_metrics(
            binary_preds,
            gold_binary,
            model_id=self.config.model_id,
            condition_key=condition.key,
        )
        rq5 = root_cause_metrics(
            cause_preds,
            gold_causes,
            model_id=self.config.model_id,
            condition_key=condition.key,
        )
        return rq4, rq5


def run_experiment(
    dataset: Dataset,
    conditions: Sequence[ExperimentCondition],
    provider_configs: Sequence[ProviderConfig],
    *,
    store_path: str | Path,
    run_id: str = "run1",
    templates: PromptTemplates | None = None,
    embedder=None,
    request_budget: int = DEFAULT_REQUEST_BUDGET,
) -> list[ExperimentCell]:
    if templates is None:
        templates = load_templates()
    if embedder is None:
        embedder = CachedEmbedder(MockEmbeddingProvider())
    store = VerdictStore(store_path)

    for config in provider_configs:
        planned = _planned_requests(dataset, conditions, config.model_id, run_id, store)
        if planned > request_budget:
            raise BudgetExceededError(
                f"{config.model_id}: plan of {planned} requests exceeds the "
                f"budget of {request_budget}; refusing to start"
            )

    cells: list[ExperimentCell] = []
    for config in provider_configs:
        provider = build_provider(config)
        runner = _CellRunner(dataset, templates, provider, config, store, run_id, embedder)

        rq3_reports: dict[tuple[ReportLevel, EnrichmentLevel], MetricsReport | None] = {}
        rq3_errors: dict[tuple[ReportLevel, EnrichmentLevel], str] = {}
        for key in sorted(
            {(c.report_level, c.enrichment) for c in conditions},
            key=lambda pair: (pair[0].value, pair[1].value),
        ):
            try:
                rq3_reports[key] = runner.run_rq3(*key)
            except (ProviderError, EmptyDescriptionError, MissingCodeContextError) as exc:
                logger.warning("rq3 run %s failed for %s: %s", key, config.model_id, exc)
                rq3_reports[key] = None
                rq3_errors[key] = str(exc)

        for condition in conditions:
            rq3 = rq3_reports.get((condition.report_level, condition.enrichment))
            note = rq3_errors.get((condition.report_level, condition.enrichment), "")
            try:
                rq4, rq5 = runner.run_code_cell(condition)
            except (ProviderError, MissingCodeContextError) as exc:
                logger.warning(
                    "cell %s failed for %s: %s", condition.key, config.model_id, exc
                )
                cells.append(
                    ExperimentCell(
                        config.model_id, condition, rq3, None, None,
                        incomplete=True, note=str(exc),
                    )
                )
                continue
            cells.append(
                ExperimentCell(
                    config.model_id,
                    condition,
                    rq3,
                    rq4,
                    rq5,
                    incomplete=rq3 is None,
                    note=note,
                )
            )
    return cells


# --- results persistence ---------------------------------------------------------


def _report_record(report: MetricsReport | None) -> dict | None:
    if report is None:
        return None
    return {
        "stage": report.stage,
        "condition_key": report.condition_key,
        "attempted": report.attempted,
        "usable": report.usable,
        "unusable": report.unusable,
        "f1": report.f1,
        "weighted_f1": report.weighted_f1,
        "mcc": report.mcc,
        "recall": report.recall,
        "multi_label_credit": report.multi_label_credit,
    }


def write_results(
    cells: Sequence[ExperimentCell], path: str | Path, *, template_id: str = ""
) -> None:
    lines = []
    for cell in cells:
        lines.append(
            json.dumps(
                {
                    "model_id": cell.model_id,
                    "condition": cell.condition.key,
                    "context": cell.condition.display(),
                    "template_id": template_id,
                    "incomplete": cell.incomplete,
                    "note": cell.note,
                    "rq3": _report_record(cell.rq3),
                    "rq4": _report_record(cell.rq4),
                    "rq5": _report_record(cell.rq5),
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _report_from_record(rec: dict | None, model_id: str, condition_key: str) -> MetricsReport | None:
    if rec is None:
        return None
    return MetricsReport(
        model_id=model_id,
        condition_key=rec.get("condition_key", condition_key),
        stage=rec["stage"],
        attempted=rec["attempted"],
        usable=rec["usable"],
        unusable=rec["unusable"],
        f1=rec["f1"],
        weighted_f1=rec["weighted_f1"],
        mcc=rec["mcc"],
        recall=rec["recall"],
        multi_label_credit=rec.get("multi_label_credit", False),
    )


def read_results(path: str | Path) -> list[ExperimentCell]:
    cells = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        condition = ExperimentCondition.from_key(rec["condition"])
        cells.append(
            ExperimentCell(
                model_id=rec["model_id"],
                condition=condition,
                rq3=_report_from_record(rec["rq3"], rec["model_id"], rec["condition"]),
                rq4=_report_from_record(rec["rq4"], rec["model_id"], rec["condition"]),
                rq5=_report_from_record(rec["rq5"], rec["model_id"], rec["condition"]),
                incomplete=rec.get("incomplete", False),
                note=rec.get("note", ""),
            )
        )
    return cells
