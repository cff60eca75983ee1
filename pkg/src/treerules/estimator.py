"""scikit-learn compatible facade over the distillation pipeline.

``RuleSetDistiller`` takes a pre-trained ensemble (parsed object, JSON text,
or a model file path), extracts and scores candidate rules on fit data,
solves the constrained selection, and exposes the resulting sequential rule
classifier through the usual fit/predict/score surface so it composes with
pipelines and model selection utilities.
"""

from __future__ import annotations

import os

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .classifier import classify_batch
from .crossval import distill
from .dataset import Dataset
from .gbdt_text import load_model_text
from .model import Ensemble, validate_instance
from .selection import ObjectiveConfig, SelectionConfig
from .serialize import render_rule_text


def _resolve_ensemble(ensemble) -> Ensemble:
    if isinstance(ensemble, Ensemble):
        return ensemble
    if isinstance(ensemble, (str, os.PathLike)):
        text = str(ensemble)
        if "\n" not in text and os.path.exists(text):
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
        return load_model_text(text)
    raise TypeError("ensemble must be an Ensemble, a model document, or a file path")


class RuleSetDistiller(BaseEstimator, ClassifierMixin):
    """Distill a tree ensemble into a small rule-set classifier.

    Parameters
    ----------
    ensemble : Ensemble | str | path
        The trained tree-ensemble to distill (canonical JSON, a GBDT text
        dump, a path to either, or an already parsed Ensemble).
    config : SelectionConfig, optional
        Constraint set (min support, per-class bounds, size cap, dominance).
    objectives : ObjectiveConfig, optional
        Optimization terms; defaults maximize accuracy and support while
        minimizing total size and rule overlap.
    order_policy : str
        Rule ordering for sequential classification: "precision" (default),
        "support" or "selection".
    backend : str
        "auto" (exact search, greedy beyond the cap), "exact" or "greedy".
    """

    def __init__(self, ensemble=None, config=None, objectives=None,
                 order_policy="precision", backend="auto"):
        self.ensemble = ensemble
        self.config = config
        self.objectives = objectives
        self.order_policy = order_policy
        self.backend = backend

    def fit(self, X, y):
        if self.ensemble is None:
            raise ValueError("RuleSetDistiller requires a pre-trained ensemble")
        ensemble = _resolve_ensemble(self.ensemble)
        X, y = check_X_y(X, y, dtype=np.float64)
        y = y.astype(np.int64)
        if y.min() < 0 or y.max() >= ensemble.n_classes:
            raise ValueError(f"labels must lie in [0, {ensemble.n_classes})")
        for row in X:
            validate_instance(ensemble, row)
        train = Dataset(X, y, ensemble.features, ensemble.n_classes)
        result = distill(ensemble, train,
                         config=self.config or SelectionConfig(),
                         objectives=self.objectives or ObjectiveConfig(),
                         order_policy=self.order_policy,
                         backend=self.backend)
        self.ensemble_ = ensemble
        self.candidates_ = result.candidates
        self.rule_metrics_ = result.metrics
        self.solution_ = result.solution
        self.classifier_ = result.classifier
        self.selected_ids_ = tuple(sorted(result.solution.selected))
        self.classes_ = np.arange(ensemble.n_classes)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "classifier_")
        X = check_array(X, dtype=np.float64)
        labels, _ = classify_batch(self.classifier_, X)
        return labels

    def rule_texts(self) -> list[str]:
        """Selected rules as IF-THEN explanations, in classifier order."""
        check_is_fitted(self, "classifier_")
        lines = []
        for rule in self.classifier_.ordered_rules:
            lines.append(render_rule_text(rule.conditions, self.ensemble_.features,
                                          rule.predicted_class, rule.support,
                                          rule.precision))
        lines.append(f"OTHERWISE class={self.classifier_.default_class}")
        return lines
