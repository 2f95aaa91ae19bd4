"""Independent brute-force reference scorer.

Deliberately written from first principles with a different formulation than
the package implementation: exact Fraction arithmetic for every ratio, F1 via
the precision/recall harmonic mean, multi-class MCC via the contingency-matrix
covariance form. Used as the oracle the fast implementations must agree with
to 1e-12.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence


def ref_confusion(pairs: Sequence[tuple[bool, bool]]) -> tuple[int, int, int, int]:
    """(tp, fp, fn, tn) from (gold, predicted) booleans, counted one by one."""
    tp = fp = fn = tn = 0
    for gold, predicted in pairs:
        if gold and predicted:
            tp += 1
        elif not gold and predicted:
            fp += 1
        elif gold and not predicted:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def ref_precision(tp: int, fp: int) -> Fraction:
    return Fraction(tp, tp + fp) if tp + fp else Fraction(0)


def ref_recall(tp: int, fn: int) -> Fraction:
    return Fraction(tp, tp + fn) if tp + fn else Fraction(0)


def ref_f1(tp: int, fp: int, fn: int) -> Fraction:
    precision = ref_precision(tp, fp)
    recall = ref_recall(tp, fn)
    if precision + recall == 0:
        return Fraction(0)
    return 2 * precision * recall / (precision + recall)


def ref_mcc(tp: int, fp: int, fn: int, tn: int) -> float:
    factors = [tp + fp, tp + fn, tn + fp, tn + fn]
    if 0 in factors:
        return 0.0
    numerator = tp * tn - fp * fn
    denominator = math.sqrt(float(factors[0]) * factors[1] * factors[2] * factors[3])
    return numerator / denominator


def ref_binary_scores(pairs: Sequence[tuple[bool, bool]]) -> tuple[float, float, float]:
    """(f1, recall, mcc) over (gold, predicted) pairs."""
    tp, fp, fn, tn = ref_confusion(pairs)
    return float(ref_f1(tp, fp, fn)), float(ref_recall(tp, fn)), ref_mcc(tp, fp, fn, tn)


def ref_reduce_multilabel(
    gold: Mapping[str, Sequence[str]], preds: Mapping[str, str]
) -> list[tuple[str, str]]:
    """Match-any multi-label reduction: the effective gold label of a case is
    the prediction when it matches any gold label, else the first gold label."""
    pairs = []
    for case_id in preds:
        golds = list(gold[case_id])
        predicted = preds[case_id]
        effective = predicted if predicted in golds else golds[0]
        pairs.append((effective, predicted))
    return pairs


def ref_weighted_f1(pairs: Sequence[tuple[str, str]]) -> float:
    """Support-weighted one-vs-rest F1 over (gold, predicted) label pairs."""
    classes = sorted({g for g, _ in pairs})
    total = Fraction(0)
    support_total = 0
    for cls in classes:
        tp = sum(1 for g, p in pairs if g == cls and p == cls)
        fp = sum(1 for g, p in pairs if g != cls and p == cls)
        fn = sum(1 for g, p in pairs if g == cls and p != cls)
        support = tp + fn
        total += support * ref_f1(tp, fp, fn)
        support_total += support
    return float(total / support_total) if support_total else 0.0


def ref_multiclass_mcc(pairs: Sequence[tuple[str, str]]) -> float:
    """R_K statistic from the raw contingency counts."""
    classes = sorted({g for g, _ in pairs} | {p for _, p in pairs})
    n = len(pairs)
    if n == 0:
        return 0.0
    confusion = {(a, b): 0 for a in classes for b in classes}
    for g, p in pairs:
        confusion[(g, p)] += 1
    correct = sum(confusion[(c, c)] for c in classes)
    gold_count = {c: sum(confusion[(c, other)] for other in classes) for c in classes}
    pred_count = {c: sum(confusion[(other, c)] for other in classes) for c in classes}
    numerator = correct * n - sum(gold_count[c] * pred_count[c] for c in classes)
    den_gold = n * n - sum(gold_count[c] ** 2 for c in classes)
    den_pred = n * n - sum(pred_count[c] ** 2 for c in classes)
    if den_gold == 0 or den_pred == 0:
        return 0.0
    return numerator / math.sqrt(float(den_gold) * den_pred)
