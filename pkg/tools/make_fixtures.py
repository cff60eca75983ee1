#!/usr/bin/env python3
"""Generate the committed test fixtures.

Builds a ~300-row synthetic binary dataset plus a 10-tree majority-vote
model whose splits are grown greedily on that data (thresholds always chosen
inside the reachable region, leaf counts taken from the routed rows), the
walkthrough two-tree model with its 12-row dataset, and a leaf-only model
for the failure path. Deterministic; outputs land in tests/fixtures/.
"""

import json
import random
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

CAT_NAMES = ["a", "b", "c"]
FEATURES = [{"name": f"x{i}", "kind": "continuous"} for i in range(1, 6)] + [
    {"name": "grp", "kind": "categorical", "categories": CAT_NAMES}]


def make_desk_rows(rng, n=300):
    # exactly balanced classes split by a crisp boundary on x2, so both
    # classes keep rules on the (f1, size, support) frontier and the
    # class-blind dominance filter cannot empty either class
    rows, labels = [], []
    for i in range(n):
        label = i % 2
        x = [round(rng.random(), 6) for _ in range(5)]
        x[1] = round(0.5 + 0.5 * rng.random(), 6) if label else \
            round(0.5 * rng.random(), 6)
        g = rng.randrange(3)
        rows.append(x + [g])
        labels.append(label)
    return rows, labels


def grow_tree(rng, tree_id, rows, labels, max_depth=4, min_rows=12):
    nodes = []
    counter = [0]

    def counts(idx):
        c = [0, 0]
        for i in idx:
            c[labels[i]] += 1
        return c

    def build(idx, depth, bounds, cats):
        nid = counter[0]
        counter[0] += 1
        splittable = len(idx) >= min_rows and depth < max_depth
        if not splittable or rng.random() < 0.15:
            nodes.append({"id": nid, "kind": "leaf", "class_counts": counts(idx)})
            return nid
        for _ in range(8):   # try a few features before giving up
            # lean toward the informative feature like a trained model would
            f = 1 if rng.random() < 0.45 else rng.randrange(6)
            if f < 5:
                lo, hi = bounds[f]
                values = sorted(rows[i][f] for i in idx)
                pivot = values[rng.randrange(len(values) // 4,
                                             3 * len(values) // 4 + 1)]
                thr = round(min(max(pivot, lo + 1e-6), hi - 1e-6), 6)
                if not lo < thr < hi:
                    continue
                left_idx = [i for i in idx if rows[i][f] <= thr]
                right_idx = [i for i in idx if rows[i][f] > thr]
                if not left_idx or not right_idx:
                    continue
                node = {"id": nid, "kind": "internal", "feature": f, "op": "le",
                        "threshold": thr}
                nodes.append(node)
                lb, rb = list(bounds), list(bounds)
                lb[f] = (lo, thr)
                rb[f] = (thr, hi)
                node["left"] = build(left_idx, depth + 1, lb, cats)
                node["right"] = build(right_idx, depth + 1, rb, cats)
                return nid
            if len(cats) >= 2:
                subset = sorted(rng.sample(sorted(cats), rng.randrange(1, len(cats))))
                left_idx = [i for i in idx if rows[i][5] in subset]
                right_idx = [i for i in idx if rows[i][5] not in subset]
                if not left_idx or not right_idx:
                    continue
                node = {"id": nid, "kind": "internal", "feature": 5, "op": "in",
                        "set": subset}
                nodes.append(node)
                node["left"] = build(left_idx, depth + 1, bounds, set(subset))
                node["right"] = build(right_idx, depth + 1, bounds,
                                      cats - set(subset))
                return nid
        nodes.append({"id": nid, "kind": "leaf", "class_counts": counts(idx)})
        return nid

    sample = [rng.randrange(len(rows)) for _ in range(len(rows))]
    root = build(sample, 0, [(0.0, 1.0)] * 5, {0, 1, 2})
    return {"tree_id": tree_id, "root": root, "nodes": nodes}


def write_csv(path, rows, labels):
    lines = [",".join(f["name"] for f in FEATURES) + ",y"]
    for row, label in zip(rows, labels):
        cells = [repr(v) for v in row[:5]] + [CAT_NAMES[row[5]], str(label)]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def walkthrough_fixture():
    model = {
        "n_classes": 2, "aggregation": "majority_vote",
        "features": [{"name": n, "kind": "continuous"}
                     for n in ("x1", "x2", "x3", "x4")],
        "trees": [
            {"tree_id": 0, "root": 0, "nodes": [
                {"id": 0, "kind": "internal", "feature": 0, "op": "le",
                 "threshold": 0.2, "left": 1, "right": 2},
                {"id": 1, "kind": "internal", "feature": 1, "op": "le",
                 "threshold": 4.5, "left": 3, "right": 4},
                {"id": 2, "kind": "internal", "feature": 2, "op": "le",
                 "threshold": 1.0, "left": 5, "right": 6},
                {"id": 3, "kind": "internal", "feature": 3, "op": "le",
                 "threshold": 2.0, "left": 7, "right": 8},
                {"id": 4, "kind": "leaf", "class_counts": [1, 3]},
                {"id": 5, "kind": "leaf", "class_counts": [2, 1]},
                {"id": 6, "kind": "leaf", "class_counts": [1, 0]},
                {"id": 7, "kind": "leaf", "class_counts": [0, 3]},
                {"id": 8, "kind": "leaf", "class_counts": [2, 0]},
            ]},
            {"tree_id": 1, "root": 0, "nodes": [
                {"id": 0, "kind": "internal", "feature": 1, "op": "le",
                 "threshold": 4.5, "left": 1, "right": 2},
                {"id": 1, "kind": "leaf", "class_counts": [3, 4]},
                {"id": 2, "kind": "leaf", "class_counts": [2, 1]},
            ]},
        ]}
    rows = [
        [0.1, 4.0, 0.5, 1.0], [0.1, 4.2, 1.5, 1.5], [0.2, 3.0, 0.2, 2.0],
        [0.15, 4.4, 2.0, 0.5], [0.1, 4.0, 0.5, 3.0], [0.2, 4.1, 1.2, 4.0],
        [0.1, 5.0, 0.5, 1.0], [0.1, 6.0, 1.5, 3.0], [0.5, 4.0, 0.5, 1.0],
        [0.9, 5.0, 0.5, 3.0], [0.5, 4.0, 1.5, 1.0], [0.9, 2.0, 1.5, 2.5],
    ]
    labels = [1, 1, 1, 1, 0, 0, 0, 1, 0, 1, 0, 0]
    csv = ["x1,x2,x3,x4,y"]
    csv += [",".join(map(repr, row)) + f",{label}" for row, label in zip(rows, labels)]
    return model, "\n".join(csv) + "\n"


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240817)

    rows, labels = make_desk_rows(rng)
    trees = [grow_tree(rng, k, rows, labels) for k in range(10)]
    model = {"n_classes": 2, "aggregation": "majority_vote",
             "features": FEATURES, "trees": trees}
    (FIXTURES / "desk_model.json").write_text(json.dumps(model, indent=1),
                                              encoding="utf-8")
    write_csv(FIXTURES / "desk_train.csv", rows, labels)

    leaf_only = {"n_classes": 2, "aggregation": "majority_vote",
                 "features": FEATURES,
                 "trees": [{"tree_id": 0, "root": 0,
                            "nodes": [{"id": 0, "kind": "leaf",
                                       "class_counts": [170, 130]}]}]}
    (FIXTURES / "leaf_only_model.json").write_text(json.dumps(leaf_only, indent=1),
                                                   encoding="utf-8")

    fig_model, fig_csv = walkthrough_fixture()
    (FIXTURES / "fig2_model.json").write_text(json.dumps(fig_model, indent=1),
                                              encoding="utf-8")
    (FIXTURES / "fig2_train.csv").write_text(fig_csv, encoding="utf-8")

    (FIXTURES / "desk_config.cfg").write_text(
        "[constraints]\n"
        "min_support = 10\n"
        "per_class_min = 1\n"
        "per_class_max = 10\n"
        "total_size_cap = 30\n"
        "dominance_enabled = true\n"
        "allow_empty_class = false\n"
        "exact_cap = 40\n"
        "\n"
        "[objectives]\n"
        "accuracy = \"max\"\n"
        "support = \"max\"\n"
        "size = \"min\"\n"
        "overlap = \"min\"\n"
        "\n"
        "[classifier]\n"
        "order_policy = \"precision\"\n",
        encoding="utf-8")

    (FIXTURES / "desk_manifest.json").write_text(json.dumps({
        "name": "desk", "dataset": "desk_train.csv", "label": "y",
        "model": "desk_model.json", "k": 5, "seed": 2024,
        "config": "desk_config.cfg"}, indent=1), encoding="utf-8")

    (FIXTURES / "leaf_manifest.json").write_text(json.dumps({
        "name": "leaf-only", "dataset": "desk_train.csv", "label": "y",
        "model": "leaf_only_model.json", "k": 5, "seed": 2024,
        "config": "desk_config.cfg"}, indent=1), encoding="utf-8")

    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
