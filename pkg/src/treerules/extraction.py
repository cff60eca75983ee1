"""Candidate-rule enumeration from tree paths.

Every root-to-node condition prefix of every tree becomes one candidate rule
(the root's empty prefix is excluded). Taking the right branch of a split
reverses its condition, so a rule body is exactly the conjunction that routes
an instance to that node. Bodies are canonicalized per feature (tightest
interval / set), interned into global condition atoms, deduplicated across
trees, and labeled with the majority class of the training instances they
cover. Bodies covering no training instance are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ContradictoryPath, EmptyRuleSet
from .model import (GT, IN_SET, LE, NOT_IN_SET, Ensemble, SplitCondition, Tree)

_OP_ORDER = {LE: 0, GT: 1, IN_SET: 2, NOT_IN_SET: 3}


def _condition_key(cond: SplitCondition):
    if cond.threshold is not None:
        # hex keeps bit-identity (0.0 vs -0.0 stay distinct)
        value = cond.threshold.hex()
    else:
        value = tuple(sorted(cond.category_set))
    return (cond.feature_id, cond.op, value)


class AtomTable:
    """Bijective interning of canonical split conditions to integer atom ids."""

    def __init__(self):
        self._by_key: dict[tuple, int] = {}
        self._conditions: list[SplitCondition] = []

    def intern(self, cond: SplitCondition) -> int:
        key = _condition_key(cond)
        atom_id = self._by_key.get(key)
        if atom_id is None:
            atom_id = len(self._conditions) + 1
            self._by_key[key] = atom_id
            self._conditions.append(cond)
        return atom_id

    def condition(self, atom_id: int) -> SplitCondition:
        return self._conditions[atom_id - 1]

    def __len__(self) -> int:
        return len(self._conditions)

    def __iter__(self):
        return iter(range(1, len(self._conditions) + 1))


@dataclass(frozen=True)
class Rule:
    rule_id: int
    atoms: frozenset[int]
    predicted_class: int
    origins: frozenset[tuple[int, int]]   # (tree_id, node_id)
    coverage_counts: tuple[int, ...]

    @property
    def support(self) -> int:
        return sum(self.coverage_counts)

    @property
    def size(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class CandidateRules:
    """The candidate set R plus the atom table its bodies are written in."""

    rules: tuple[Rule, ...]
    atoms: AtomTable
    ensemble: Ensemble

    def __len__(self) -> int:
        return len(self.rules)

    def by_id(self, rule_id: int) -> Rule:
        return self.rules[rule_id - 1]

    def conditions(self, rule: Rule) -> list[SplitCondition]:
        conds = [self.atoms.condition(a) for a in rule.atoms]
        conds.sort(key=lambda c: (c.feature_id, _OP_ORDER[c.op]))
        return conds


def canonicalize(conditions) -> tuple[SplitCondition, ...]:
    """Collapse a path's conditions to one tightest condition per (feature, kind).

    LE thresholds take the minimum, GT the maximum, IN_SET intersects,
    NOT_IN_SET unions. Raises ContradictoryPath when a feature's allowed
    set becomes empty (a malformed tree).
    """
    le: dict[int, float] = {}
    gt: dict[int, float] = {}
    inset: dict[int, frozenset[int]] = {}
    notin: dict[int, frozenset[int]] = {}

    for cond in conditions:
        fid = cond.feature_id
        if cond.op == LE:
            le[fid] = min(le.get(fid, cond.threshold), cond.threshold)
        elif cond.op == GT:
            gt[fid] = max(gt.get(fid, cond.threshold), cond.threshold)
        elif cond.op == IN_SET:
            inset[fid] = inset.get(fid, cond.category_set) & cond.category_set
        else:
            notin[fid] = notin.get(fid, frozenset()) | cond.category_set

    for fid in set(le) & set(gt):
        if gt[fid] >= le[fid]:
            raise ContradictoryPath(
                f"feature {fid}: x > {gt[fid]} and x <= {le[fid]} is empty")
    for fid, cats in inset.items():
        if not cats or not (cats - notin.get(fid, frozenset())):
            raise ContradictoryPath(f"feature {fid}: empty category set")

    out = [SplitCondition(fid, LE, threshold=v) for fid, v in le.items()]
    out += [SplitCondition(fid, GT, threshold=v) for fid, v in gt.items()]
    out += [SplitCondition(fid, IN_SET, category_set=s) for fid, s in inset.items()]
    out += [SplitCondition(fid, NOT_IN_SET, category_set=s) for fid, s in notin.items()]
    out.sort(key=lambda c: (c.feature_id, _OP_ORDER[c.op]))
    return tuple(out)


def condition_mask(cond: SplitCondition, X: np.ndarray) -> np.ndarray:
    col = X[:, cond.feature_id]
    if cond.op == LE:
        return col <= cond.threshold
    if cond.op == GT:
        return col > cond.threshold
    members = np.fromiter(cond.category_set, dtype=np.float64)
    mask = np.isin(col, members)
    return mask if cond.op == IN_SET else ~mask


def _tree_prefixes(tree: Tree):
    """Yield (node_id, conditions-from-root) in preorder, root excluded."""
    stack = [(tree.root_id, ())]
    out = []
    while stack:
        nid, conds = stack.pop()
        node = tree.nodes[nid]
        if conds:
            out.append((nid, conds))
        if not node.is_leaf:
            # push right first so the left branch pops first (preorder)
            stack.append((node.right, conds + (node.condition.negate(),)))
            stack.append((node.left, conds + (node.condition,)))
    return out


def rule_mask(rule: Rule, atoms: AtomTable, X: np.ndarray) -> np.ndarray:
    mask = np.ones(X.shape[0], dtype=bool)
    for atom_id in rule.atoms:
        mask &= condition_mask(atoms.condition(atom_id), X)
    return mask


def extract_candidate_rules(ensemble: Ensemble, train: Dataset) -> CandidateRules:
    """Build the candidate rule set R for an ensemble on its training data."""
    atoms = AtomTable()
    bodies: dict[frozenset[int], dict] = {}
    order: list[frozenset[int]] = []
    atom_masks: dict[int, np.ndarray] = {}

    for tree in ensemble.trees:
        for nid, conds in _tree_prefixes(tree):
            canon = canonicalize(conds)
            body = frozenset(atoms.intern(c) for c in canon)
            entry = bodies.get(body)
            if entry is None:
                bodies[body] = {"origins": {(tree.tree_id, nid)}}
                order.append(body)
            else:
                entry["origins"].add((tree.tree_id, nid))

    if not bodies:
        raise EmptyRuleSet("no split conditions in any tree (leaf-only trees)")

    def mask_for(atom_id: int) -> np.ndarray:
        m = atom_masks.get(atom_id)
        if m is None:
            m = condition_mask(atoms.condition(atom_id), train.X)
            atom_masks[atom_id] = m
        return m

    rules: list[Rule] = []
    for body in order:
        mask = np.ones(train.n, dtype=bool)
        for atom_id in body:
            mask &= mask_for(atom_id)
        covered = train.y[mask]
        if covered.size == 0:
            continue
        counts = np.bincount(covered, minlength=train.n_classes)
        rules.append(Rule(rule_id=len(rules) + 1,
                          atoms=body,
                          predicted_class=int(np.argmax(counts)),
                          origins=frozenset(bodies[body]["origins"]),
                          coverage_counts=tuple(int(c) for c in counts)))
    if not rules:
        raise EmptyRuleSet("every candidate body covers zero training instances")
    return CandidateRules(rules=tuple(rules), atoms=atoms, ensemble=ensemble)


def render_condition(cond: SplitCondition, features) -> str:
    feat = features[cond.feature_id]
    if cond.op == LE:
        return f"{feat.name} <= {cond.threshold:g}"
    if cond.op == GT:
        return f"{feat.name} > {cond.threshold:g}"
    labels = ", ".join(feat.categories[c] for c in sorted(cond.category_set))
    joiner = "in" if cond.op == IN_SET else "not in"
    return f"{feat.name} {joiner} {{{labels}}}"
