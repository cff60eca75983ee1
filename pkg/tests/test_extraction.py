import random

import numpy as np
import pytest

from conftest import cont, ensemble_doc, internal, leaf, make_dataset, tree
from randtrees import nodes_on_route, random_ensemble, random_rows
from treerules.errors import ContradictoryPath, EmptyRuleSet
from treerules.extraction import (AtomTable, canonicalize,
                                  extract_candidate_rules, rule_mask,
                                  _tree_prefixes)
from treerules.model import SplitCondition, parse_ensemble


def LE(f, t):
    return SplitCondition(f, "le", threshold=t)


def GTc(f, t):
    return SplitCondition(f, "gt", threshold=t)


def body_set(candidates, rule):
    return frozenset((c.feature_id, c.op, c.threshold)
                     for c in candidates.conditions(rule))


# -- walkthrough ensemble: the three documented rules ----------------------

def test_walkthrough_rules_present(walkthrough_model, walkthrough_train):
    candidates = extract_candidate_rules(walkthrough_model, walkthrough_train)
    bodies = {body_set(candidates, r): r for r in candidates.rules}

    full = frozenset({(0, "le", 0.2), (1, "le", 4.5), (3, "le", 2.0)})
    sibling = frozenset({(0, "le", 0.2), (1, "le", 4.5), (3, "gt", 2.0)})
    prefix = frozenset({(0, "le", 0.2), (1, "le", 4.5)})

    assert full in bodies and bodies[full].predicted_class == 1
    assert sibling in bodies and bodies[sibling].predicted_class == 0
    assert prefix in bodies and bodies[prefix].predicted_class == 1


def test_walkthrough_shared_atom_across_trees(walkthrough_model, walkthrough_train):
    # x2 <= 4.5 appears in both trees and must intern to a single atom id
    candidates = extract_candidate_rules(walkthrough_model, walkthrough_train)
    table = candidates.atoms
    ids = [a for a in table
           if (table.condition(a).feature_id, table.condition(a).op,
               table.condition(a).threshold) == (1, "le", 4.5)]
    assert len(ids) == 1
    # and the stump's root-left prefix {x2<=4.5} was merged with nothing else
    stump_rule = [r for r in candidates.rules
                  if body_set(candidates, r) == frozenset({(1, "le", 4.5)})]
    assert len(stump_rule) == 1
    assert (1, 1) in stump_rule[0].origins


def test_leaf_only_ensemble_raises_empty_rule_set():
    doc = ensemble_doc([tree(0, 0, [leaf(0, counts=[3, 7])])], [cont("x1")])
    with pytest.raises(EmptyRuleSet):
        extract_candidate_rules(parse_ensemble(doc),
                                make_dataset([[0.5]], [1],
                                             [__import__("treerules").Feature("x1", "continuous")]))


def test_depth2_complete_tree_six_rules():
    doc = ensemble_doc([tree(0, 0, [
        internal(0, 0, "le", 0.5, 1, 2),
        internal(1, 1, "le", 0.5, 3, 4),
        internal(2, 2, "le", 0.5, 5, 6),
        leaf(3, counts=[1, 0]), leaf(4, counts=[0, 1]),
        leaf(5, counts=[1, 0]), leaf(6, counts=[0, 1]),
    ])], [cont("x1"), cont("x2"), cont("x3")])
    rows = [[a, b, c] for a in (0.2, 0.8) for b in (0.2, 0.8) for c in (0.2, 0.8)]
    train = make_dataset(rows, [0, 1] * 4,
                         features=[__import__("treerules").Feature(n, "continuous")
                                   for n in ("x1", "x2", "x3")])
    candidates = extract_candidate_rules(parse_ensemble(doc), train)
    assert len(candidates.rules) == 6   # 2 depth-1 prefixes + 4 full paths


def test_zero_coverage_rules_dropped(walkthrough_model):
    # training data that never enters the x1 > 0.2 half: those rules vanish
    rows = [[0.1, 4.0, 0.5, 1.0], [0.1, 5.0, 0.5, 3.0], [0.15, 4.0, 0.2, 3.0]]
    train = make_dataset(rows, [1, 0, 0], walkthrough_model.features)
    candidates = extract_candidate_rules(walkthrough_model, train)
    for rule in candidates.rules:
        assert rule.support >= 1
        conds = candidates.conditions(rule)
        assert not any(c.feature_id == 0 and c.op == "gt" for c in conds)


def test_rule_ids_deterministic(walkthrough_model, walkthrough_train):
    a = extract_candidate_rules(walkthrough_model, walkthrough_train)
    b = extract_candidate_rules(walkthrough_model, walkthrough_train)
    assert [(r.rule_id, r.atoms, r.predicted_class) for r in a.rules] == \
           [(r.rule_id, r.atoms, r.predicted_class) for r in b.rules]
    assert [r.rule_id for r in a.rules] == list(range(1, len(a.rules) + 1))


def test_predicted_class_is_argmax_of_coverage(walkthrough_model, walkthrough_train):
    candidates = extract_candidate_rules(walkthrough_model, walkthrough_train)
    for rule in candidates.rules:
        counts = rule.coverage_counts
        assert rule.predicted_class == max(range(len(counts)),
                                           key=lambda c: (counts[c], -c))
        assert sum(counts) == rule.support >= 1


# -- canonicalize ----------------------------------------------------------

def test_canonicalize_tighter_le_wins():
    out = canonicalize([LE(0, 0.2), LE(0, 0.1)])
    assert out == (LE(0, 0.1),)


def test_canonicalize_contradiction():
    with pytest.raises(ContradictoryPath):
        canonicalize([LE(0, 0.2), GTc(0, 0.5)])
    with pytest.raises(ContradictoryPath):
        canonicalize([LE(0, 0.2), GTc(0, 0.2)])   # x<=0.2 and x>0.2 is empty


def test_canonicalize_interval_intersection():
    out = canonicalize([GTc(1, 1.0), LE(2, 4.0), GTc(1, 2.0)])
    assert set(out) == {GTc(1, 2.0), LE(2, 4.0)}


def test_canonicalize_categorical():
    in_a = SplitCondition(0, "in", category_set=frozenset({0, 1, 2}))
    in_b = SplitCondition(0, "in", category_set=frozenset({1, 2, 3}))
    notin = SplitCondition(0, "not_in", category_set=frozenset({2}))
    out = canonicalize([in_a, in_b, notin])
    assert set(out) == {SplitCondition(0, "in", category_set=frozenset({1, 2})),
                        notin}
    with pytest.raises(ContradictoryPath):
        canonicalize([in_a, SplitCondition(0, "in", category_set=frozenset({5}))])
    with pytest.raises(ContradictoryPath):
        canonicalize([SplitCondition(0, "in", category_set=frozenset({1})),
                      SplitCondition(0, "not_in", category_set=frozenset({1}))])


def test_canonicalize_preserves_semantics_randomized():
    rng = random.Random(42)
    for _ in range(200):
        conds = []
        lo, hi = {}, {}
        ok = True
        for _ in range(rng.randint(1, 6)):
            f = rng.randrange(3)
            t = rng.random()
            if rng.random() < 0.5:
                conds.append(LE(f, t))
            else:
                conds.append(GTc(f, t))
        try:
            canon = canonicalize(conds)
        except ContradictoryPath:
            # oracle agrees the region is empty
            for c in conds:
                if c.op == "le":
                    hi[c.feature_id] = min(hi.get(c.feature_id, 1e9), c.threshold)
                else:
                    lo[c.feature_id] = max(lo.get(c.feature_id, -1e9), c.threshold)
            assert any(f in lo and f in hi and lo[f] >= hi[f]
                       for f in set(lo) | set(hi))
            continue
        for _ in range(20):
            point = [rng.uniform(-0.2, 1.2) for _ in range(3)]
            original = all(c.holds(point[c.feature_id]) for c in conds)
            canonical = all(c.holds(point[c.feature_id]) for c in canon)
            assert original == canonical


def test_atom_interning_bijective():
    table = AtomTable()
    a = table.intern(LE(0, 0.5))
    b = table.intern(LE(0, 0.5))
    c = table.intern(LE(0, 0.25))
    d = table.intern(GTc(0, 0.5))
    assert a == b and len({a, c, d}) == 3
    assert table.condition(a) == LE(0, 0.5)


def test_atom_interning_bit_identity():
    table = AtomTable()
    assert table.intern(LE(0, 0.0)) != table.intern(LE(0, -0.0))


# -- randomized faithfulness and cardinality -------------------------------

def test_prefix_count_matches_node_count():
    rng = random.Random(1)
    for _ in range(50):
        ens = random_ensemble(rng, n_trees=1, n_features=3,
                              max_depth=rng.randint(1, 5))
        t = ens.trees[0]
        prefixes = _tree_prefixes(t)
        assert len(prefixes) == t.node_count - 1
        assert len(prefixes) <= 2 ** (t.depth + 1) - 2


def test_faithfulness_random_trees():
    rng = random.Random(7)
    for _ in range(40):
        ens = random_ensemble(rng, n_trees=2, n_features=3, max_depth=4)
        rows = random_rows(rng, 40, 3)
        labels = [rng.randint(0, 1) for _ in range(40)]
        train = make_dataset(rows, labels, ens.features)
        try:
            candidates = extract_candidate_rules(ens, train)
        except EmptyRuleSet:
            continue
        # oracle: instances routed through an origin node == rule coverage
        routed = {}
        for t in ens.trees:
            for i, row in enumerate(rows):
                for nid in nodes_on_route(t, row):
                    routed.setdefault((t.tree_id, nid), set()).add(i)
        for rule in candidates.rules:
            covered = set(np.flatnonzero(rule_mask(rule, candidates.atoms, train.X)))
            for origin in rule.origins:
                assert routed.get(origin, set()) == covered
