"""JSON serialization of candidate rules, selected rule sets, and the
human-readable IF-THEN rendering.
"""

from __future__ import annotations

import json

from .classifier import OrderedRule, RuleSetClassifier
from .errors import SchemaError
from .extraction import CandidateRules, Rule, render_condition
from .metrics import RuleMetrics
from .model import GT, LE, Feature, SplitCondition


def _atom_dict(cond: SplitCondition, features) -> dict:
    out = {"feature": features[cond.feature_id].name,
           "feature_id": cond.feature_id, "op": cond.op}
    if cond.op in (LE, GT):
        out["value"] = cond.threshold
    else:
        out["value"] = sorted(cond.category_set)
    return out


def rule_to_dict(rule: Rule, candidates: CandidateRules) -> dict:
    feats = candidates.ensemble.features
    return {"rule_id": rule.rule_id,
            "atoms": [_atom_dict(c, feats) for c in candidates.conditions(rule)],
            "class": rule.predicted_class,
            "origins": sorted([t, n] for t, n in rule.origins)}


def rules_to_jsonl(candidates: CandidateRules) -> str:
    lines = [json.dumps(rule_to_dict(r, candidates), sort_keys=True)
             for r in candidates.rules]
    return "\n".join(lines) + "\n"


def render_rule_text(conditions, features, predicted_class: int,
                     support: int, precision: int) -> str:
    body = " AND ".join(render_condition(c, features) for c in conditions)
    return (f"IF {body} THEN class={predicted_class} "
            f"(support={support}, precision={precision}%)")


def _metrics_dict(m: RuleMetrics) -> dict:
    return {"support": m.support, "size": m.size, "accuracy": m.accuracy,
            "error_rate": m.error_rate, "precision": m.precision,
            "recall": m.recall, "f1": m.f1}


def _feature_dict(feat: Feature) -> dict:
    out = {"name": feat.name, "kind": feat.kind}
    if feat.categories is not None:
        out["categories"] = list(feat.categories)
    return out


def ruleset_to_dict(solution, candidates: CandidateRules,
                    metrics: dict[int, RuleMetrics], default_class: int,
                    order_policy: str) -> dict:
    ens = candidates.ensemble
    rules = []
    for rule_id in sorted(solution.selected):
        rule = candidates.by_id(rule_id)
        entry = rule_to_dict(rule, candidates)
        entry["metrics"] = _metrics_dict(metrics[rule_id])
        rules.append(entry)
    return {"class_labels": list(range(ens.n_classes)),
            "default_class": default_class,
            "order_policy": order_policy,
            "proof": solution.proof,
            "objective_vector": list(solution.objective_vector),
            "priorities": list(solution.priorities),
            "features": [_feature_dict(f) for f in ens.features],
            "rules": rules}


def _condition_from_atom(atom: dict, features: tuple[Feature, ...]) -> SplitCondition:
    fid = atom.get("feature_id")
    if fid is None or not 0 <= fid < len(features):
        raise SchemaError(f"ruleset atom has bad feature_id {fid!r}")
    op = atom.get("op")
    value = atom.get("value")
    if op in (LE, GT):
        return SplitCondition(fid, op, threshold=float(value))
    return SplitCondition(fid, op, category_set=frozenset(int(v) for v in value))


def classifier_from_ruleset(doc: dict) -> tuple[RuleSetClassifier, tuple[Feature, ...]]:
    """Rebuild a ready-to-run classifier (and its feature schema) from
    a ruleset JSON document written by ruleset_to_dict."""
    try:
        features = tuple(Feature(f["name"], f["kind"],
                                 tuple(f["categories"]) if "categories" in f else None)
                         for f in doc["features"])
        ordered = []
        for entry in doc["rules"]:
            conds = tuple(_condition_from_atom(a, features) for a in entry["atoms"])
            ordered.append(OrderedRule(rule_id=entry["rule_id"], conditions=conds,
                                       predicted_class=entry["class"],
                                       precision=entry["metrics"]["precision"],
                                       support=entry["metrics"]["support"]))
        default_class = doc["default_class"]
        order_policy = doc.get("order_policy", "precision")
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed ruleset document: {exc}") from exc
    from .classifier import _order_key
    ordered.sort(key=_order_key(order_policy))
    clf = RuleSetClassifier(ordered_rules=tuple(ordered),
                            default_class=default_class,
                            n_features=len(features))
    return clf, features


def ruleset_texts(doc: dict) -> list[str]:
    """IF-THEN lines for a ruleset document, in classifier order."""
    clf, features = classifier_from_ruleset(doc)
    lines = []
    for rule in clf.ordered_rules:
        lines.append(render_rule_text(rule.conditions, features, rule.predicted_class,
                                      rule.support, rule.precision))
    lines.append(f"OTHERWISE class={clf.default_class}")
    return lines
