import json

import numpy as np
import pytest

from treerules.dataset import Dataset
from treerules.model import Feature, parse_ensemble

# -- canonical-JSON building blocks --------------------------------------


def cont(name):
    return {"name": name, "kind": "continuous"}


def cat(name, categories):
    return {"name": name, "kind": "categorical", "categories": list(categories)}


def leaf(node_id, counts=None, value=None):
    node = {"id": node_id, "kind": "leaf"}
    if counts is not None:
        node["class_counts"] = list(counts)
    if value is not None:
        node["leaf_value"] = value
    return node


def internal(node_id, feature, op, value, left, right, counts=None):
    node = {"id": node_id, "kind": "internal", "feature": feature, "op": op,
            "left": left, "right": right}
    if op in ("le", "gt"):
        node["threshold"] = value
    else:
        node["set"] = list(value)
    if counts is not None:
        node["class_counts"] = list(counts)
    return node


def tree(tree_id, root, nodes):
    return {"tree_id": tree_id, "root": root, "nodes": nodes}


def ensemble_doc(trees, features, n_classes=2, aggregation="majority_vote",
                 base_score=None):
    doc = {"n_classes": n_classes, "aggregation": aggregation,
           "features": features, "trees": trees}
    if base_score is not None:
        doc["base_score"] = base_score
    return json.dumps(doc)


def make_dataset(rows, labels, features=None, n_classes=2):
    X = np.asarray(rows, dtype=np.float64)
    if features is None:
        features = tuple(Feature(f"x{i + 1}", "continuous") for i in range(X.shape[1]))
    return Dataset(X, np.asarray(labels, dtype=np.int64), tuple(features), n_classes)


# -- the two-tree walkthrough ensemble ------------------------------------
# Left tree: root [x1 <= 0.2]; its left subtree splits on [x2 <= 4.5] and
# then [x4 <= 2]; a fourth internal node [x3 <= 1] sits on the right.
# 4 internal nodes + 5 leaves. Second tree: a stump on [x2 <= 4.5].


@pytest.fixture
def walkthrough_model():
    features = [cont("x1"), cont("x2"), cont("x3"), cont("x4")]
    left_tree = tree(0, 0, [
        internal(0, 0, "le", 0.2, 1, 2),
        internal(1, 1, "le", 4.5, 3, 4),
        internal(2, 2, "le", 1.0, 5, 6),
        internal(3, 3, "le", 2.0, 7, 8),
        leaf(4, counts=[1, 3]),
        leaf(5, counts=[2, 1]),
        leaf(6, counts=[1, 0]),
        leaf(7, counts=[0, 3]),   # node "1" of the walkthrough: class 1
        leaf(8, counts=[2, 0]),   # node "2": class 0
    ])
    stump = tree(1, 0, [
        internal(0, 1, "le", 4.5, 1, 2),
        leaf(1, counts=[3, 4]),
        leaf(2, counts=[2, 1]),
    ])
    return parse_ensemble(ensemble_doc([left_tree, stump], features))


@pytest.fixture
def walkthrough_train(walkthrough_model):
    # rows chosen so the three walkthrough rules carry their stated classes:
    # within x1<=0.2, x2<=4.5 the majority is class 1; the x4>2 corner is
    # pure class 0; the x4<=2 corner is majority class 1.
    rows = [
        [0.1, 4.0, 0.5, 1.0],   # x1<=.2, x2<=4.5, x4<=2
        [0.1, 4.2, 1.5, 1.5],
        [0.2, 3.0, 0.2, 2.0],
        [0.15, 4.4, 2.0, 0.5],
        [0.1, 4.0, 0.5, 3.0],   # x1<=.2, x2<=4.5, x4>2
        [0.2, 4.1, 1.2, 4.0],
        [0.1, 5.0, 0.5, 1.0],   # x1<=.2, x2>4.5
        [0.1, 6.0, 1.5, 3.0],
        [0.5, 4.0, 0.5, 1.0],   # x1>.2, x3<=1
        [0.9, 5.0, 0.5, 3.0],
        [0.5, 4.0, 1.5, 1.0],   # x1>.2, x3>1
        [0.9, 2.0, 1.5, 2.5],
    ]
    labels = [1, 1, 1, 1, 0, 0, 0, 1, 0, 1, 0, 0]
    return make_dataset(rows, labels, walkthrough_model.features)
