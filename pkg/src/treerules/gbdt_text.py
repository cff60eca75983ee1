"""Reader for the LightGBM text model-dump format.

Parses the ``tree ... Tree=k ...`` key=value blocks produced by LightGBM's
``save_model`` into the same validated :class:`~treerules.model.Ensemble`
the canonical JSON parser returns (binary objective only; raw leaf values
already include shrinkage, so the base score is zero). Numerical splits are
``x <= t`` to the left; categorical splits decode the bitset into an in-set
condition. Default directions for missing values are ignored because scored
instances are not allowed to contain missing values.
"""

from __future__ import annotations

import json

from .errors import SchemaError
from .model import Ensemble, parse_ensemble


def _header_and_trees(text: str):
    lines = text.splitlines()
    if not lines or lines[0].strip() != "tree":
        raise SchemaError("not a GBDT text dump: first line must be 'tree'")
    header: dict[str, str] = {}
    blocks: list[dict[str, str]] = []
    current: dict[str, str] | None = None
    for line in lines[1:]:
        line = line.strip()
        if line == "end of trees":
            break
        if not line:
            continue
        if "=" not in line:
            continue
        key, value = line.split("=", 1)
        if key == "Tree":
            current = {"Tree": value}
            blocks.append(current)
        elif current is None:
            header[key] = value
        else:
            current[key] = value
    if not blocks:
        raise SchemaError("GBDT dump contains no trees")
    return header, blocks


def _ints(block: dict, key: str) -> list[int]:
    return [int(tok) for tok in block.get(key, "").split()]


def _floats(block: dict, key: str) -> list[float]:
    return [float(tok) for tok in block.get(key, "").split()]


def _feature_schema(header: dict) -> list[dict]:
    names = header.get("feature_names", "").split()
    infos = header.get("feature_infos", "").split()
    if not names or len(names) != len(infos):
        raise SchemaError("feature_names and feature_infos missing or inconsistent")
    feats = []
    for name, info in zip(names, infos):
        if info.startswith("[") or info == "none":
            feats.append({"name": name, "kind": "continuous"})
        else:
            feats.append({"name": name, "kind": "categorical",
                          "categories": info.split(":")})
    return feats


def _cat_codes(block: dict, cat_index: int, categories: list[str]) -> list[int]:
    bounds = _ints(block, "cat_boundaries")
    words = _ints(block, "cat_threshold")
    if len(bounds) < cat_index + 2:
        raise SchemaError("cat_boundaries shorter than the categorical split count")
    codes = []
    for word_pos in range(bounds[cat_index], bounds[cat_index + 1]):
        word = words[word_pos]
        base = (word_pos - bounds[cat_index]) * 32
        for bit in range(32):
            if word >> bit & 1:
                value = str(base + bit)
                if value in categories:
                    codes.append(categories.index(value))
    if not codes:
        raise SchemaError(f"categorical split {cat_index} selects no known category")
    return codes


def _tree_to_dict(block: dict, tree_index: int, features: list[dict]) -> dict:
    num_leaves = int(block.get("num_leaves", "0"))
    leaf_values = _floats(block, "leaf_value")
    if num_leaves <= 1:
        # leaf-only tree: LightGBM stores a single constant response
        value = leaf_values[0] if leaf_values else 0.0
        return {"tree_id": tree_index, "root": 0,
                "nodes": [{"id": 0, "kind": "leaf", "leaf_value": value}]}
    split_feature = _ints(block, "split_feature")
    thresholds = _floats(block, "threshold")
    decision_type = _ints(block, "decision_type")
    left = _ints(block, "left_child")
    right = _ints(block, "right_child")
    n_internal = num_leaves - 1
    if not (len(split_feature) == len(thresholds) == len(decision_type)
            == len(left) == len(right) == n_internal) or len(leaf_values) != num_leaves:
        raise SchemaError(f"tree {tree_index}: inconsistent array lengths")

    def child_id(c: int) -> int:
        return c if c >= 0 else n_internal + (-c - 1)

    nodes = []
    cat_seen = 0
    for i in range(n_internal):
        fid = split_feature[i]
        node = {"id": i, "kind": "internal",
                "left": child_id(left[i]), "right": child_id(right[i]),
                "feature": fid}
        if decision_type[i] & 1:
            feat = features[fid] if 0 <= fid < len(features) else {}
            if feat.get("kind") != "categorical":
                raise SchemaError(f"tree {tree_index}: categorical split on "
                                  f"non-categorical feature {fid}")
            node["op"] = "in"
            node["set"] = _cat_codes(block, int(thresholds[i]), feat["categories"])
            cat_seen += 1
        else:
            node["op"] = "le"
            node["threshold"] = thresholds[i]
        nodes.append(node)
    for j, value in enumerate(leaf_values):
        nodes.append({"id": n_internal + j, "kind": "leaf", "leaf_value": value})
    return {"tree_id": tree_index, "root": 0, "nodes": nodes}


def load_gbdt_text(text: str) -> Ensemble:
    """Parse a LightGBM text dump; same contract and errors as parse_ensemble."""
    header, blocks = _header_and_trees(text)
    objective = header.get("objective", "")
    if not objective.startswith("binary"):
        raise SchemaError(f"only binary objectives are supported, got {objective!r}")
    if header.get("num_class", "1") != "1":
        raise SchemaError("multiclass GBDT dumps are not supported")
    features = _feature_schema(header)
    trees = [_tree_to_dict(block, i, features) for i, block in enumerate(blocks)]
    doc = {"n_classes": 2, "aggregation": "additive_logit", "base_score": 0.0,
           "features": features, "trees": trees}
    return parse_ensemble(json.dumps(doc))


def load_model_text(text: str) -> Ensemble:
    """Dispatch on content: canonical JSON or a GBDT text dump."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_ensemble(text)
    return load_gbdt_text(text)
