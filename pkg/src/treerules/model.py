"""Tree-ensemble model: canonical JSON parsing and ensemble prediction.

An ensemble is a list of binary decision trees plus an aggregation mode:
``majority_vote`` (each tree votes the argmax of its leaf class counts) or
``additive_logit`` (binary only; leaf values are summed with a base score
and pushed through a sigmoid).

Everything is immutable after parsing and safe for concurrent reads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import FeatureMismatch, RangeError, SchemaError, StructureError

LE = "le"
GT = "gt"
IN_SET = "in"
NOT_IN_SET = "not_in"

_NUMERIC_OPS = (LE, GT)
_SET_OPS = (IN_SET, NOT_IN_SET)
OPS = _NUMERIC_OPS + _SET_OPS

MAJORITY_VOTE = "majority_vote"
ADDITIVE_LOGIT = "additive_logit"

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class SplitCondition:
    """A test on one feature: ``x <= t``, ``x > t``, ``x in S`` or ``x not in S``."""

    feature_id: int
    op: str
    threshold: float | None = None
    category_set: frozenset[int] | None = None

    def __post_init__(self):
        if self.op not in OPS:
            raise SchemaError(f"unknown operator {self.op!r}")
        if self.op in _NUMERIC_OPS:
            if self.threshold is None or self.category_set is not None:
                raise SchemaError(f"operator {self.op!r} takes a threshold only")
        else:
            if self.category_set is None or self.threshold is not None:
                raise SchemaError(f"operator {self.op!r} takes a category set only")

    def negate(self) -> "SplitCondition":
        flip = {LE: GT, GT: LE, IN_SET: NOT_IN_SET, NOT_IN_SET: IN_SET}
        return SplitCondition(self.feature_id, flip[self.op],
                              self.threshold, self.category_set)

    def holds(self, value: float) -> bool:
        if self.op == LE:
            return value <= self.threshold
        if self.op == GT:
            return value > self.threshold
        if self.op == IN_SET:
            return int(value) in self.category_set
        return int(value) not in self.category_set


@dataclass(frozen=True)
class Node:
    node_id: int
    kind: str  # "internal" | "leaf"
    condition: SplitCondition | None = None
    left: int | None = None
    right: int | None = None
    class_counts: tuple[int, ...] | None = None
    leaf_value: float | None = None

    @property
    def is_leaf(self) -> bool:
        return self.kind == "leaf"


@dataclass(frozen=True)
class Tree:
    tree_id: int
    root_id: int
    nodes: dict[int, Node]
    depth: int = field(default=0)
    node_count: int = field(default=0)
    leaf_count: int = field(default=0)


@dataclass(frozen=True)
class Feature:
    name: str
    kind: str  # "continuous" | "categorical"
    categories: tuple[str, ...] | None = None

    def code(self, label: str) -> int | None:
        if self.categories is None:
            return None
        try:
            return self.categories.index(label)
        except ValueError:
            return None


@dataclass(frozen=True)
class Ensemble:
    trees: tuple[Tree, ...]
    aggregation: str
    n_classes: int
    features: tuple[Feature, ...]
    base_score: float = 0.0

    @property
    def n_features(self) -> int:
        return len(self.features)


def _require(obj: dict, keys: set[str], optional: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    missing = keys - obj.keys()
    if missing:
        raise SchemaError(f"{where}: missing fields {sorted(missing)}")
    extra = obj.keys() - keys - optional
    if extra:
        raise SchemaError(f"{where}: unknown fields {sorted(extra)}")


def _parse_condition(raw: dict, features: tuple[Feature, ...], where: str) -> SplitCondition:
    fid = raw["feature"]
    if not isinstance(fid, int) or isinstance(fid, bool):
        raise SchemaError(f"{where}: feature must be an integer index")
    if not 0 <= fid < len(features):
        raise RangeError(f"{where}: feature {fid} out of range (m={len(features)})")
    op = raw["op"]
    feat = features[fid]
    if op in _NUMERIC_OPS:
        if feat.kind != CONTINUOUS:
            raise SchemaError(f"{where}: numeric split on categorical feature {feat.name!r}")
        thr = raw.get("threshold")
        if not isinstance(thr, (int, float)) or isinstance(thr, bool) or math.isnan(thr):
            raise SchemaError(f"{where}: op {op!r} needs a numeric threshold")
        if "set" in raw:
            raise SchemaError(f"{where}: op {op!r} must not carry a category set")
        return SplitCondition(fid, op, threshold=float(thr))
    if op in _SET_OPS:
        if feat.kind != CATEGORICAL:
            raise SchemaError(f"{where}: set split on continuous feature {feat.name!r}")
        cats = raw.get("set")
        if not isinstance(cats, list) or not cats:
            raise SchemaError(f"{where}: op {op!r} needs a non-empty category list")
        if "threshold" in raw:
            raise SchemaError(f"{where}: op {op!r} must not carry a threshold")
        codes = []
        for c in cats:
            if not isinstance(c, int) or isinstance(c, bool):
                raise SchemaError(f"{where}: category codes must be integers")
            if not 0 <= c < len(feat.categories or ()):
                raise RangeError(f"{where}: category code {c} out of range for {feat.name!r}")
            codes.append(c)
        return SplitCondition(fid, op, category_set=frozenset(codes))
    raise SchemaError(f"{where}: unknown op {op!r}")


def _parse_tree(raw: dict, features: tuple[Feature, ...], aggregation: str,
                n_classes: int) -> Tree:
    _require(raw, {"tree_id", "root", "nodes"}, set(), "tree")
    tid = raw["tree_id"]
    where = f"tree {tid}"
    nodes: dict[int, Node] = {}
    for nraw in raw["nodes"]:
        _require(nraw, {"id", "kind"},
                 {"feature", "op", "threshold", "set", "left", "right",
                  "class_counts", "leaf_value"}, f"{where} node")
        nid = nraw["id"]
        if nid in nodes:
            raise StructureError(f"{where}: duplicate node id {nid}")
        kind = nraw["kind"]
        if kind == "internal":
            if "left" not in nraw or "right" not in nraw:
                raise SchemaError(f"{where} node {nid}: internal node needs two children")
            if "leaf_value" in nraw:
                raise SchemaError(f"{where} node {nid}: leaf_value on internal node")
            cond = _parse_condition(nraw, features, f"{where} node {nid}")
            counts = _parse_counts(nraw.get("class_counts"), n_classes, where, nid)
            nodes[nid] = Node(nid, "internal", condition=cond,
                              left=nraw["left"], right=nraw["right"],
                              class_counts=counts)
        elif kind == "leaf":
            for bad in ("feature", "op", "threshold", "set", "left", "right"):
                if bad in nraw:
                    raise SchemaError(f"{where} node {nid}: leaf must not carry {bad!r}")
            counts = _parse_counts(nraw.get("class_counts"), n_classes, where, nid)
            value = nraw.get("leaf_value")
            if aggregation == MAJORITY_VOTE and counts is None:
                raise SchemaError(f"{where} node {nid}: majority_vote leaf needs class_counts")
            if aggregation == ADDITIVE_LOGIT:
                if value is None:
                    raise SchemaError(f"{where} node {nid}: additive_logit leaf needs leaf_value")
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise SchemaError(f"{where} node {nid}: leaf_value must be numeric")
                value = float(value)
            nodes[nid] = Node(nid, "leaf", class_counts=counts, leaf_value=value)
        else:
            raise SchemaError(f"{where} node {nid}: kind must be 'internal' or 'leaf'")

    root_id = raw["root"]
    if root_id not in nodes:
        raise StructureError(f"{where}: root {root_id} not among nodes")

    # Walk from the root: every node must be reached exactly once (a tree).
    depth = 0
    seen: set[int] = set()
    stack = [(root_id, 0)]
    while stack:
        nid, d = stack.pop()
        if nid not in nodes:
            raise StructureError(f"{where}: child reference {nid} has no node")
        if nid in seen:
            raise StructureError(f"{where}: node {nid} reached twice (cycle or shared child)")
        seen.add(nid)
        depth = max(depth, d)
        node = nodes[nid]
        if not node.is_leaf:
            stack.append((node.left, d + 1))
            stack.append((node.right, d + 1))
    orphans = nodes.keys() - seen
    if orphans:
        raise StructureError(f"{where}: orphan nodes {sorted(orphans)} not reachable from root")

    leaf_count = sum(1 for n in nodes.values() if n.is_leaf)
    return Tree(tree_id=tid, root_id=root_id, nodes=nodes, depth=depth,
                node_count=len(nodes), leaf_count=leaf_count)


def _parse_counts(raw, n_classes: int, where: str, nid: int) -> tuple[int, ...] | None:
    if raw is None:
        return None
    if not isinstance(raw, list) or len(raw) != n_classes:
        raise SchemaError(f"{where} node {nid}: class_counts must list {n_classes} counts")
    for c in raw:
        if not isinstance(c, int) or isinstance(c, bool) or c < 0:
            raise SchemaError(f"{where} node {nid}: class_counts must be nonnegative integers")
    return tuple(raw)


def _parse_features(raw) -> tuple[Feature, ...]:
    if not isinstance(raw, list) or not raw:
        raise SchemaError("features: expected a non-empty list")
    feats = []
    names = set()
    for fraw in raw:
        _require(fraw, {"name", "kind"}, {"categories"}, "feature")
        name, kind = fraw["name"], fraw["kind"]
        if name in names:
            raise SchemaError(f"feature: duplicate name {name!r}")
        names.add(name)
        if kind == CONTINUOUS:
            if "categories" in fraw:
                raise SchemaError(f"feature {name!r}: continuous feature has categories")
            feats.append(Feature(name, CONTINUOUS))
        elif kind == CATEGORICAL:
            cats = fraw.get("categories")
            if not isinstance(cats, list) or not cats or len(set(cats)) != len(cats):
                raise SchemaError(f"feature {name!r}: categorical needs distinct categories")
            feats.append(Feature(name, CATEGORICAL, tuple(str(c) for c in cats)))
        else:
            raise SchemaError(f"feature {name!r}: kind must be continuous or categorical")
    return tuple(feats)


def parse_ensemble(document: str) -> Ensemble:
    """Parse and validate a canonical ensemble JSON document."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    _require(raw, {"n_classes", "aggregation", "features", "trees"},
             {"base_score"}, "ensemble")

    n_classes = raw["n_classes"]
    if not isinstance(n_classes, int) or isinstance(n_classes, bool) or n_classes < 2:
        raise SchemaError("n_classes must be an integer >= 2")
    aggregation = raw["aggregation"]
    if aggregation not in (MAJORITY_VOTE, ADDITIVE_LOGIT):
        raise SchemaError(f"aggregation must be one of {MAJORITY_VOTE!r}, {ADDITIVE_LOGIT!r}")
    if aggregation == ADDITIVE_LOGIT and n_classes != 2:
        raise SchemaError("additive_logit supports binary classification only")
    base_score = 0.0
    if aggregation == ADDITIVE_LOGIT:
        if "base_score" not in raw:
            raise SchemaError("additive_logit requires base_score")
        base_score = raw["base_score"]
        if not isinstance(base_score, (int, float)) or isinstance(base_score, bool):
            raise SchemaError("base_score must be numeric")
        base_score = float(base_score)
    elif "base_score" in raw:
        raise SchemaError("base_score is only valid for additive_logit")

    features = _parse_features(raw["features"])
    if not isinstance(raw["trees"], list) or not raw["trees"]:
        raise SchemaError("trees: expected a non-empty list")
    trees = []
    tree_ids = set()
    for traw in raw["trees"]:
        tree = _parse_tree(traw, features, aggregation, n_classes)
        if tree.tree_id in tree_ids:
            raise SchemaError(f"duplicate tree_id {tree.tree_id}")
        tree_ids.add(tree.tree_id)
        trees.append(tree)
    return Ensemble(trees=tuple(trees), aggregation=aggregation,
                    n_classes=n_classes, features=features, base_score=base_score)


def validate_instance(ensemble: Ensemble, instance) -> list[float]:
    """Check arity, category codes and missing values; return a plain list."""
    values = list(instance)
    if len(values) != ensemble.n_features:
        raise FeatureMismatch(
            f"instance has {len(values)} values, schema has {ensemble.n_features}")
    for i, (v, feat) in enumerate(zip(values, ensemble.features)):
        v = float(v)
        if math.isnan(v):
            raise FeatureMismatch(f"feature {feat.name!r} (index {i}) is missing")
        if feat.kind == CATEGORICAL:
            if v != int(v) or not 0 <= int(v) < len(feat.categories):
                raise FeatureMismatch(
                    f"feature {feat.name!r} (index {i}): unknown category code {v}")
        values[i] = v
    return values


def route(tree: Tree, values: list[float]) -> Node:
    """Follow split conditions from the root; return the reached leaf."""
    node = tree.nodes[tree.root_id]
    while not node.is_leaf:
        child = node.left if node.condition.holds(values[node.condition.feature_id]) else node.right
        node = tree.nodes[child]
    return node


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def predict(ensemble: Ensemble, instance) -> int:
    """Predict a class label for one instance."""
    values = validate_instance(ensemble, instance)
    if ensemble.aggregation == MAJORITY_VOTE:
        votes = [0] * ensemble.n_classes
        for tree in ensemble.trees:
            counts = route(tree, values).class_counts
            votes[max(range(ensemble.n_classes), key=lambda c: (counts[c], -c))] += 1
        return max(range(ensemble.n_classes), key=lambda c: (votes[c], -c))
    total = ensemble.base_score
    for tree in ensemble.trees:
        total += route(tree, values).leaf_value
    return 1 if _sigmoid(total) >= 0.5 else 0


def predict_batch(ensemble: Ensemble, rows) -> list[int]:
    return [predict(ensemble, row) for row in rows]


# -- serialization (used by fixtures and round-trip tests) --

def _condition_to_dict(cond: SplitCondition) -> dict:
    raw = {"feature": cond.feature_id, "op": cond.op}
    if cond.op in _NUMERIC_OPS:
        raw["threshold"] = cond.threshold
    else:
        raw["set"] = sorted(cond.category_set)
    return raw


def ensemble_to_dict(ensemble: Ensemble) -> dict:
    feats = []
    for f in ensemble.features:
        fr = {"name": f.name, "kind": f.kind}
        if f.kind == CATEGORICAL:
            fr["categories"] = list(f.categories)
        feats.append(fr)
    trees = []
    for t in ensemble.trees:
        nodes = []
        for nid in sorted(t.nodes):
            n = t.nodes[nid]
            nr: dict = {"id": n.node_id, "kind": n.kind}
            if not n.is_leaf:
                nr.update(_condition_to_dict(n.condition))
                nr["left"] = n.left
                nr["right"] = n.right
            if n.class_counts is not None:
                nr["class_counts"] = list(n.class_counts)
            if n.leaf_value is not None:
                nr["leaf_value"] = n.leaf_value
            nodes.append(nr)
        trees.append({"tree_id": t.tree_id, "root": t.root_id, "nodes": nodes})
    doc = {"n_classes": ensemble.n_classes, "aggregation": ensemble.aggregation,
           "features": feats, "trees": trees}
    if ensemble.aggregation == ADDITIVE_LOGIT:
        doc["base_score"] = ensemble.base_score
    return doc


def ensemble_to_json(ensemble: Ensemble) -> str:
    return json.dumps(ensemble_to_dict(ensemble), indent=1)
