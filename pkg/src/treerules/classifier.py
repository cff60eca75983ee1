"""Sequential first-match rule classifier and its evaluation report.

Selected rules are applied in order; the first rule whose body holds decides
the class, otherwise the training-set majority class is returned. Reported
metrics treat class 1 as positive, and each classifier metric is divided by
the source ensemble's metric on the same fold to give performance ratios.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, majority_class
from .errors import EmptySelection, FeatureMismatch
from .extraction import AtomTable, condition_mask
from .metrics import RuleMetrics
from .model import Ensemble, SplitCondition, predict, validate_instance

ORDER_POLICIES = ("precision", "support", "selection")


@dataclass(frozen=True)
class OrderedRule:
    rule_id: int
    conditions: tuple[SplitCondition, ...]
    predicted_class: int
    precision: int
    support: int


@dataclass(frozen=True)
class RuleSetClassifier:
    ordered_rules: tuple[OrderedRule, ...]
    default_class: int
    n_features: int


@dataclass(frozen=True)
class EvalReport:
    classifier: dict[str, float]
    ensemble: dict[str, float]
    ratios: dict[str, float | None]
    fired_rule_histogram: dict[int, int]
    fallback_count: int
    n: int


def _order_key(policy: str):
    if policy == "precision":
        return lambda r: (-r.precision, -r.support, r.rule_id)
    if policy == "support":
        return lambda r: (-r.support, -r.precision, r.rule_id)
    if policy == "selection":
        return lambda r: r.rule_id
    raise ValueError(f"unknown order policy {policy!r}; pick one of {ORDER_POLICIES}")


def build_classifier(selected_rules, metrics: dict[int, RuleMetrics],
                     atoms: AtomTable, train: Dataset,
                     order_policy: str = "precision",
                     allow_empty: bool = False) -> RuleSetClassifier:
    rules = list(selected_rules)
    if not rules and not allow_empty:
        raise EmptySelection("refusing to build a classifier from an empty selection")
    ordered = []
    for rule in rules:
        m = metrics[rule.rule_id]
        conds = tuple(sorted((atoms.condition(a) for a in rule.atoms),
                             key=lambda c: (c.feature_id, c.op)))
        ordered.append(OrderedRule(rule_id=rule.rule_id, conditions=conds,
                                   predicted_class=rule.predicted_class,
                                   precision=m.precision, support=m.support))
    ordered.sort(key=_order_key(order_policy))
    return RuleSetClassifier(ordered_rules=tuple(ordered),
                             default_class=majority_class(train),
                             n_features=train.m)


def classify(classifier: RuleSetClassifier, instance) -> int:
    values = list(instance)
    if len(values) != classifier.n_features:
        raise FeatureMismatch(
            f"instance has {len(values)} values, classifier expects {classifier.n_features}")
    for rule in classifier.ordered_rules:
        if all(c.holds(values[c.feature_id]) for c in rule.conditions):
            return rule.predicted_class
    return classifier.default_class


def classify_batch(classifier: RuleSetClassifier, X: np.ndarray):
    """Vectorized first-match classification; returns (labels, fired rule ids).

    fired id -1 marks the majority-class fallback.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != classifier.n_features:
        raise FeatureMismatch(
            f"expected shape (n, {classifier.n_features}), got {X.shape}")
    n = X.shape[0]
    labels = np.full(n, classifier.default_class, dtype=np.int64)
    fired = np.full(n, -1, dtype=np.int64)
    undecided = np.ones(n, dtype=bool)
    for rule in classifier.ordered_rules:
        if not undecided.any():
            break
        mask = undecided.copy()
        for cond in rule.conditions:
            mask &= condition_mask(cond, X)
        labels[mask] = rule.predicted_class
        fired[mask] = rule.rule_id
        undecided &= ~mask
    return labels, fired


def binary_scores(y_true: np.ndarray, y_pred: np.ndarray) -> dict[str, float]:
    """accuracy/precision/recall/f1 with class 1 positive; 0/0 ratios are 0."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    tp = int(((y_pred == 1) & (y_true == 1)).sum())
    fp = int(((y_pred == 1) & (y_true != 1)).sum())
    fn = int(((y_pred != 1) & (y_true == 1)).sum())
    n = y_true.shape[0]
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"accuracy": float((y_pred == y_true).sum() / n),
            "precision": precision, "recall": recall, "f1": f1}


def evaluate(classifier: RuleSetClassifier, ensemble: Ensemble,
             fold: Dataset) -> EvalReport:
    for row in fold.X:
        validate_instance(ensemble, row)
    pred_c, fired = classify_batch(classifier, fold.X)
    pred_e = np.array([predict(ensemble, row) for row in fold.X], dtype=np.int64)
    scores_c = binary_scores(fold.y, pred_c)
    scores_e = binary_scores(fold.y, pred_e)
    ratios = {}
    for key, value in scores_c.items():
        denom = scores_e[key]
        ratios[key] = (value / denom) if denom > 0 else None
    histogram: dict[int, int] = {}
    for rid in fired:
        if rid >= 0:
            histogram[int(rid)] = histogram.get(int(rid), 0) + 1
    return EvalReport(classifier=scores_c, ensemble=scores_e, ratios=ratios,
                      fired_rule_histogram=histogram,
                      fallback_count=int((fired == -1).sum()), n=fold.n)
