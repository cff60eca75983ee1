import math

import pytest

from treerules.errors import SchemaError
from treerules.gbdt_text import load_gbdt_text, load_model_text
from treerules.model import predict

DUMP = """\
tree
version=v3
num_class=1
num_tree_per_iteration=1
label_index=0
max_feature_idx=2
objective=binary sigmoid:1
feature_names=f0 f1 col
feature_infos=[0:1] [0:10] 0:1:2
tree_sizes=400 400

Tree=0
num_leaves=3
num_cat=0
split_feature=0 1
split_gain=1 1
threshold=0.5 2.5
decision_type=2 2
left_child=1 -2
right_child=-1 -3
leaf_value=0.4 -0.3 0.2
leaf_weight=1 1 1
leaf_count=5 4 3
internal_value=0 0
internal_weight=0 0
internal_count=12 8
shrinkage=0.1

Tree=1
num_leaves=2
num_cat=1
split_feature=2
split_gain=1
threshold=0
decision_type=1
left_child=-1
right_child=-2
leaf_value=0.1 -0.1
leaf_weight=1 1
leaf_count=6 6
internal_value=0
internal_weight=0
internal_count=12
cat_boundaries=0 1
cat_threshold=5
shrinkage=0.1

end of trees
"""


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def test_structure():
    ens = load_gbdt_text(DUMP)
    assert ens.aggregation == "additive_logit"
    assert ens.n_classes == 2
    assert ens.base_score == 0.0
    assert len(ens.trees) == 2
    t0, t1 = ens.trees
    assert t0.node_count == 5 and t0.leaf_count == 3 and t0.depth == 2
    assert t1.node_count == 3 and t1.leaf_count == 2
    assert ens.features[2].kind == "categorical"
    assert ens.features[2].categories == ("0", "1", "2")


def test_categorical_bitset_decoding():
    ens = load_gbdt_text(DUMP)
    cond = ens.trees[1].nodes[0].condition
    assert cond.op == "in"
    assert cond.category_set == {0, 2}   # bitset 5 = 0b101


def test_predictions_match_manual_raw_scores():
    ens = load_gbdt_text(DUMP)
    cases = [
        # (instance, raw score from adding leaf values by hand)
        ([0.3, 1.0, 0], -0.3 + 0.1),
        ([0.3, 7.0, 1], 0.2 - 0.1),
        ([0.7, 5.0, 1], 0.4 - 0.1),
        ([0.7, 5.0, 2], 0.4 + 0.1),
        ([0.3, 1.0, 1], -0.3 - 0.1),
    ]
    for instance, raw in cases:
        expected = 1 if sigmoid(raw) >= 0.5 else 0
        assert predict(ens, instance) == expected


def test_single_leaf_tree():
    dump = DUMP.replace("""Tree=1
num_leaves=2
num_cat=1
split_feature=2
split_gain=1
threshold=0
decision_type=1
left_child=-1
right_child=-2
leaf_value=0.1 -0.1
leaf_weight=1 1
leaf_count=6 6
internal_value=0
internal_weight=0
internal_count=12
cat_boundaries=0 1
cat_threshold=5
shrinkage=0.1""", """Tree=1
num_leaves=1
num_cat=0
leaf_value=0.25
shrinkage=0.1""")
    ens = load_gbdt_text(dump)
    assert ens.trees[1].leaf_count == 1
    assert ens.trees[1].nodes[0].leaf_value == 0.25


def test_rejects_multiclass_and_nonbinary():
    with pytest.raises(SchemaError):
        load_gbdt_text(DUMP.replace("objective=binary sigmoid:1",
                                    "objective=multiclass num_class:3"))
    with pytest.raises(SchemaError):
        load_gbdt_text(DUMP.replace("num_class=1", "num_class=3"))


def test_rejects_non_dump_text():
    with pytest.raises(SchemaError):
        load_gbdt_text("not a model\n")


def test_dispatch_json_vs_text():
    ens = load_model_text(DUMP)
    assert ens.aggregation == "additive_logit"
    from conftest import cont, ensemble_doc, leaf, tree
    doc = ensemble_doc([tree(0, 0, [leaf(0, counts=[1, 2])])], [cont("x1")])
    assert load_model_text(doc).aggregation == "majority_vote"
