"""Classification metrics.

Conventions, stated in every report: F1 = 2TP/(2TP+FP+FN); recall = TP/(TP+FN);
MCC is defined as 0 whenever a denominator factor is 0 (degenerate confusion
matrices do occur with scripted providers). Unusable verdicts are excluded from
the counts but tallied, so attempted == usable + unusable always holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from qflake.errors import KeyMismatchError, QflakeError
from qflake.inference.verdicts import OUTCOME_FLAKY, OUTCOME_ROOT_CAUSE, Verdict
from qflake.taxonomy import RootCauseClass


class UndefinedMetricError(QflakeError):
    """Scoring was requested over an empty usable set."""


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def f1(self) -> float:
        denominator = 2 * self.tp + self.fp + self.fn
        return 2 * self.tp / denominator if denominator else 0.0

    def precision(self) -> float:
        denominator = self.tp + self.fp
        return self.tp / denominator if denominator else 0.0

    def recall(self) -> float:
        denominator = self.tp + self.fn
        return self.tp / denominator if denominator else 0.0

    def mcc(self) -> float:
        factors = (
            (self.tp + self.fp),
            (self.tp + self.fn),
            (self.tn + self.fp),
            (self.tn + self.fn),
        )
        if any(f == 0 for f in factors):
            return 0.0
        numerator = self.tp * self.tn - self.fp * self.fn
        return numerator / math.sqrt(math.prod(factors))


@dataclass(frozen=True)
class MetricsReport:
    model_id: str
    condition_key: str
    stage: str
    attempted: int
    usable: int
    unusable: int
    f1: float | None = None
    weighted_f1: float | None = None
    mcc: float | None = None
    recall: float | None = None
    multi_label_credit: bool = False
    note: str = ""

    def __post_init__(self) -> None:
        if self.usable != self.attempted - self.unusable:
            raise ValueError("usable must equal attempted - unusable")
        for name in ("f1", "weighted_f1", "recall"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.mcc is not None and not -1.0 <= self.mcc <= 1.0:
            raise ValueError("mcc must lie in [-1, 1]")

    def totals_display(self) -> str:
        """Usable count, starred when unusable outputs reduced it."""
        return f"{self.usable}{'*' if self.unusable else ''}"


def _split_usable(
    preds: Mapping[str, Verdict], gold_keys: set[str]
) -> tuple[dict[str, Verdict], int]:
    for case_id in preds:
        if case_id not in gold_keys:
            raise KeyMismatchError(f"prediction for unknown case {case_id}")
    usable = {cid: v for cid, v in preds.items() if v.usable}
    return usable, len(preds) - len(usable)


def confusion_from_verdicts(
    preds: Mapping[str, Verdict], gold: Mapping[str, bool]
) -> ConfusionCounts:
    usable, _ = _split_usable(preds, set(gold))
    tp = fp = fn = tn = 0
    for case_id, verdict in usable.items():
        predicted_flaky = verdict.outcome == OUTCOME_FLAKY
        if gold[case_id]:
            tp, fn = (tp + 1, fn) if predicted_flaky else (tp, fn + 1)
        else:
            fp, tn = (fp + 1, tn) if predicted_flaky else (fp, tn + 1)
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def binary_metrics(
    preds: Mapping[str, Verdict],
    gold: Mapping[str, bool],
    *,
    model_id: str = "",
    condition_key: str = "",
    stage: str = "rq3",
) -> MetricsReport:
    counts = confusion_from_verdicts(preds, gold)
    _, unusable = _split_usable(preds, set(gold))
    return MetricsReport(
        model_id=model_id,
        condition_key=condition_key,
        stage=stage,
        attempted=len(preds),
        usable=counts.total,
        unusable=unusable,
        f1=counts.f1(),
        mcc=counts.mcc(),
        recall=counts.recall(),
    )


def recall_only_metrics(
    preds: Mapping[str, Verdict],
    gold: Mapping[str, bool],
    *,
    model_id: str = "",
    condition_key: str = "",
) -> MetricsReport:
    """Flaky-subset scoring (all gold positive): recall is the only defined
    binary metric, per the flaky-observations-only evaluation."""
    counts = confusion_from_verdicts(preds, gold)
    _, unusable = _split_usable(preds, set(gold))
    return MetricsReport(
        model_id=model_id,
        condition_key=condition_key,
        stage="rq4",
        attempted=len(preds),
        usable=counts.total,
        unusable=unusable,
        recall=counts.recall(),
    )


# --- root-cause (multi-class) ------------------------------------------------


def _effective_pairs(
    preds: Mapping[str, Verdict],
    gold: Mapping[str, Sequence[RootCauseClass]],
) -> list[tuple[RootCauseClass, RootCauseClass]]:
    """(gold, predicted) pairs after multi-label reduction: a prediction that
    matches any gold label of a case counts as correct for that label."""
    pairs = []
    for case_id, verdict in preds.items():
        if verdict.outcome != OUTCOME_ROOT_CAUSE:
            continue
        golds = list(gold[case_id])
        if not golds:
            raise KeyMismatchError(f"{case_id} has no gold root cause")
        predicted = verdict.root_cause
        effective_gold = predicted if predicted in golds else golds[0]
        pairs.append((effective_gold, predicted))
    return pairs


def weighted_f1(
    preds: Mapping[str, Verdict],
    gold: Mapping[str, Sequence[RootCauseClass]],
) -> float:
    """Per-class F1 weighted by gold support, under match-any multi-label credit."""
    usable, _ = _split_usable(preds, set(gold))
    pairs = _effective_pairs(usable, gold)
    if not pairs:
        raise UndefinedMetricError("weighted F1 is undefined over an empty usable set")
    total = 0.0
    support_sum = 0
    for cls in RootCauseClass:
        support = sum(1 for g, _ in pairs if g is cls)
        if support == 0:
            continue
        tp = sum(1 for g, p in pairs if g is cls and p is cls)
        fp = sum(1 for g, p in pairs if g is not cls and p is cls)
        fn = support - tp
        counts = ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=len(pairs) - tp - fp - fn)
        total += support * counts.f1()
        support_sum += support
    return total / support_sum


def multiclass_mcc(pairs: Sequence[tuple[RootCauseClass, RootCauseClass]]) -> float:
    """Multi-class Matthews correlation (the R_K statistic), 0 on degenerate sets."""
    if not pairs:
        return 0.0
    classes = list(RootCauseClass)
    s = len(pairs)
    c = sum(1 for g, p in pairs if g is p)
    t = {cls: sum(1 for g, _ in pairs if g is cls) for cls in classes}
    p = {cls: sum(1 for _, pr in pairs if pr is cls) for cls in classes}
    cov_tp = c * s - sum(t[k] * p[k] for k in classes)
    den_t = s * s - sum(t[k] * t[k] for k in classes)
    den_p = s * s - sum(p[k] * p[k] for k in classes)
    if den_t == 0 or den_p == 0:
        return 0.0
    return cov_tp / math.sqrt(den_t * den_p)


def root_cause_metrics(
    preds: Mapping[str, Verdict],
    gold: Mapping[str, Sequence[RootCauseClass]],
    *,
    model_id: str = "",
    condition_key: str = "",
) -> MetricsReport:
    usable, unusable = _split_usable(preds, set(gold))
    pairs = _effective_pairs(usable, gold)
    wf1 = weighted_f1(preds, gold) if pairs else None
    mcc = multiclass_mcc(pairs) if pairs else None
    return MetricsReport(
        model_id=model_id,
        condition_key=condition_key,
        stage="rq5",
        attempted=len(preds),
        usable=len(usable),
        unusable=unusable,
        weighted_f1=wf1,
        mcc=mcc,
        multi_label_credit=True,
    )
