"""Per-rule performance metrics as fixed-point integer percents.

A rule is scored as a one-vs-rest classifier on the training data: it
predicts its class on covered instances and not-that-class elsewhere, which
yields a full confusion matrix (TP/FP/FN/TN summing to n). Ratios are
computed in exact integer arithmetic and rounded half-up once, so the
integers feed the ASP fact encoding without drift.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import Dataset
from .errors import ZeroCoverage
from .extraction import AtomTable, CandidateRules, Rule, rule_mask


@dataclass(frozen=True)
class RuleMetrics:
    rule_id: int
    predicted_class: int
    support: int
    size: int
    accuracy: int
    error_rate: int
    precision: int
    recall: int
    f1: int


def _pct(num: int, den: int) -> int:
    """round-half-up of 100 * num / den, exactly."""
    return (200 * num + den) // (2 * den)


def compute_metrics(rule: Rule, train: Dataset, atoms: AtomTable) -> RuleMetrics:
    covered = rule_mask(rule, atoms, train.X)
    return metrics_from_mask(rule, covered, train)


def metrics_from_mask(rule: Rule, covered, train: Dataset) -> RuleMetrics:
    c = rule.predicted_class
    support = int(covered.sum())
    if support == 0:
        raise ZeroCoverage(f"rule {rule.rule_id} covers no training instance")
    n = train.n
    is_c = train.y == c
    tp = int((covered & is_c).sum())
    fp = support - tp
    fn = int(is_c.sum()) - tp
    tn = n - tp - fp - fn

    accuracy = _pct(tp + tn, n)
    precision = _pct(tp, tp + fp)
    recall = _pct(tp, tp + fn) if tp + fn else 0
    # f1 = 2pr/(p+r) simplifies to 2TP/(2TP+FP+FN); one rounding, no compounding
    f1 = _pct(2 * tp, 2 * tp + fp + fn) if tp else 0
    return RuleMetrics(rule_id=rule.rule_id, predicted_class=c,
                       support=support, size=rule.size,
                       accuracy=accuracy, error_rate=100 - accuracy,
                       precision=precision, recall=recall, f1=f1)


def compute_all_metrics(candidates: CandidateRules, train: Dataset) -> dict[int, RuleMetrics]:
    """Metrics for every candidate rule, keyed by rule_id."""
    out = {}
    for rule in candidates.rules:
        out[rule.rule_id] = compute_metrics(rule, train, candidates.atoms)
    return out
