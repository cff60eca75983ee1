"""Rule subset selection: local validity, dominance, global constraints,
multi-objective optimization.

The optimization semantics mirror answer-set optimize statements: every
objective term contributes weighted tuples keyed by rule id, tuples at the
same priority level form a *set* (identical contributions merge), and the
per-level sums are compared lexicographically from the highest priority,
on a minimization scale (maximization terms enter negated). This keeps the
native solvers' costs identical to what the emitted ASP program assigns.

Two native backends: an exact branch-and-bound (admissible per-level bounds,
deterministic lexicographic tie-break on rule ids) and a greedy anytime
fallback for pools beyond the exact-search cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, Infeasible, SearchCapExceeded
from .extraction import Rule
from .metrics import RuleMetrics

MAX = "max"
MIN = "min"

OBJECTIVE_METRICS = ("accuracy", "support", "size", "overlap",
                     "precision", "recall", "f1", "error_rate")
DOMINANCE_METRICS = ("f1", "size", "support")

DEFAULT_DOMINANCE = (("f1", MAX), ("size", MIN), ("support", MAX))

TUPLE_SET = "tuple_set"
PAIRWISE_SUM = "pairwise_sum"


@dataclass(frozen=True)
class SelectionConfig:
    """The declarative constraint set: local validity plus global bounds."""

    min_support: int = 10
    per_class_min: int = 1
    per_class_max: int = 10
    total_size_cap: int = 30
    dominance_enabled: bool = True
    dominance_criteria: tuple = DEFAULT_DOMINANCE
    allow_empty_class: bool = False
    exact_cap: int = 40      # max candidates per class for the exact backend

    def __post_init__(self):
        if self.per_class_min > self.per_class_max:
            raise ConfigError("per_class_min must not exceed per_class_max")
        if self.per_class_max <= 0 or self.total_size_cap <= 0:
            raise ConfigError("cardinality and size caps must be positive")
        if self.min_support < 0 or self.per_class_min < 0:
            raise ConfigError("min_support and per_class_min must be nonnegative")
        crit = tuple((m, d) for m, d in self.dominance_criteria)
        if sorted(m for m, _ in crit) != sorted(DOMINANCE_METRICS) or \
                any(d not in (MAX, MIN) for _, d in crit):
            raise ConfigError(
                "dominance_criteria must order f1, size, support with max/min directions")
        object.__setattr__(self, "dominance_criteria", crit)

    @property
    def effective_min(self) -> int:
        return 0 if self.allow_empty_class else self.per_class_min


@dataclass(frozen=True)
class ObjectiveTerm:
    metric: str
    direction: str
    weight: int = 1
    priority: int = 0

    def __post_init__(self):
        if self.metric not in OBJECTIVE_METRICS:
            raise ConfigError(f"unknown objective metric {self.metric!r}")
        if self.direction not in (MAX, MIN):
            raise ConfigError(f"objective direction must be {MAX!r} or {MIN!r}")
        if self.weight < 1:
            raise ConfigError("objective weights must be >= 1")


@dataclass(frozen=True)
class ObjectiveConfig:
    terms: tuple[ObjectiveTerm, ...] = (
        ObjectiveTerm("accuracy", MAX),
        ObjectiveTerm("support", MAX),
        ObjectiveTerm("size", MIN),
        ObjectiveTerm("overlap", MIN),
    )
    overlap_semantics: str = TUPLE_SET

    def __post_init__(self):
        if not self.terms:
            raise ConfigError("at least one objective term is required")
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.overlap_semantics not in (TUPLE_SET, PAIRWISE_SUM):
            raise ConfigError(f"unknown overlap semantics {self.overlap_semantics!r}")

    @property
    def priorities(self) -> tuple[int, ...]:
        """Priority levels, most important first."""
        return tuple(sorted({t.priority for t in self.terms}, reverse=True))


@dataclass(frozen=True)
class SelectionProblem:
    rules: tuple[Rule, ...]
    metrics: dict[int, RuleMetrics]
    config: SelectionConfig
    objectives: ObjectiveConfig
    class_labels: tuple[int, ...]

    def __post_init__(self):
        for rule in self.rules:
            if rule.rule_id not in self.metrics:
                raise ConfigError(f"rule {rule.rule_id} has no metrics")

    def rule(self, rule_id: int) -> Rule:
        for r in self.rules:
            if r.rule_id == rule_id:
                return r
        raise KeyError(rule_id)


@dataclass(frozen=True)
class RuleSetSolution:
    selected: frozenset[int]
    objective_vector: tuple[int, ...]
    proof: str                      # "exact" | "greedy" | "external"
    priorities: tuple[int, ...] = (0,)


def metric_value(metrics: RuleMetrics, name: str) -> int:
    if name == "f1":
        return metrics.f1
    return getattr(metrics, name)


def apply_local_constraints(rules, config: SelectionConfig) -> set[int]:
    """Rule ids whose support meets the minimum-support threshold."""
    return {r.rule_id for r in rules if r.support >= config.min_support}


def dominance_filter(valid_metrics, criteria=DEFAULT_DOMINANCE) -> set[int]:
    """Pareto-maximal rule ids under the configured criteria.

    A rule is dropped iff some other valid rule is at least as good on all
    criteria and strictly better on at least one. Ties survive on both sides;
    the result does not depend on input order.
    """
    rows = list(valid_metrics)
    if not rows:
        return set()
    ids = np.array([m.rule_id for m in rows])
    cols = []
    for name, direction in criteria:
        v = np.array([metric_value(m, name) for m in rows], dtype=np.int64)
        cols.append(v if direction == MAX else -v)
    # geq[y, x]: y at least as good as x on every criterion
    geq = np.ones((len(rows), len(rows)), dtype=bool)
    eq = np.ones((len(rows), len(rows)), dtype=bool)
    for v in cols:
        geq &= v[:, None] >= v[None, :]
        eq &= v[:, None] == v[None, :]
    dominated = ((geq & ~eq).any(axis=0))
    return set(int(i) for i in ids[~dominated])


def _overlap_sizes(rule: Rule, others) -> list[int]:
    return [len(rule.atoms & o.atoms) for o in others if o.rule_id != rule.rule_id]


def overlap_penalty(selected_rules, semantics: str = TUPLE_SET, weight: int = 1) -> int:
    """Shared-condition penalty over a selected rule set.

    tuple_set: for each rule, the distinct nonzero overlap sizes it attains
    are summed once each (optimize-statement tuple semantics).
    pairwise_sum: plain sum over ordered pairs.
    """
    rules = list(selected_rules)
    total = 0
    for r in rules:
        sizes = [s for s in _overlap_sizes(r, rules) if s >= 1]
        if semantics == TUPLE_SET:
            total += sum({weight * s for s in sizes})
        else:
            total += sum(weight * s for s in sizes)
    return total


def _solo_tuples(rule_id: int, metrics: RuleMetrics,
                 objectives: ObjectiveConfig) -> dict[int, set[tuple[int, int]]]:
    """Non-overlap objective tuples contributed by one rule, per priority."""
    out: dict[int, set[tuple[int, int]]] = {}
    for term in objectives.terms:
        if term.metric == "overlap":
            continue
        v = term.weight * metric_value(metrics, term.metric)
        w = -v if term.direction == MAX else v
        out.setdefault(term.priority, set()).add((w, rule_id))
    return out


def objective_value(selected_rules, objectives: ObjectiveConfig,
                    metrics: dict[int, RuleMetrics]) -> tuple[int, ...]:
    """Per-priority cost vector of a selection, most important level first."""
    rules = list(selected_rules)
    levels: dict[int, set[tuple[int, int]]] = {p: set() for p in objectives.priorities}
    extra: dict[int, int] = {p: 0 for p in objectives.priorities}
    for r in rules:
        for p, tuples in _solo_tuples(r.rule_id, metrics[r.rule_id], objectives).items():
            levels[p] |= tuples
    for term in objectives.terms:
        if term.metric != "overlap":
            continue
        sign = -1 if term.direction == MAX else 1
        for r in rules:
            sizes = [s for s in _overlap_sizes(r, rules) if s >= 1]
            if objectives.overlap_semantics == TUPLE_SET:
                for s in set(sizes):
                    levels[term.priority].add((sign * term.weight * s, r.rule_id))
            else:
                extra[term.priority] += sign * term.weight * sum(sizes)
    return tuple(sum(w for w, _ in levels[p]) + extra[p] for p in objectives.priorities)


class _Incremental:
    """Objective state that supports add/undo of one rule at a time."""

    def __init__(self, problem: SelectionProblem):
        self.problem = problem
        self.objectives = problem.objectives
        self.priorities = problem.objectives.priorities
        self.level_index = {p: i for i, p in enumerate(self.priorities)}
        self.cost = [0] * len(self.priorities)
        self.tuples: list[set[tuple[int, int]]] = [set() for _ in self.priorities]
        self.selected: list[Rule] = []
        self.atom_sets = {r.rule_id: r.atoms for r in problem.rules}
        self.overlap_terms = [t for t in self.objectives.terms if t.metric == "overlap"]
        self.pairwise = self.objectives.overlap_semantics == PAIRWISE_SUM
        self.solo = {r.rule_id: _solo_tuples(r.rule_id, problem.metrics[r.rule_id],
                                             self.objectives)
                     for r in problem.rules}

    def _insert(self, level: int, entry: tuple[int, int], undo: list) -> None:
        if entry not in self.tuples[level]:
            self.tuples[level].add(entry)
            self.cost[level] += entry[0]
            undo.append((level, entry))

    def add(self, rule: Rule):
        undo: list = []
        pair_undo = [0] * len(self.priorities)
        for p, tuples in self.solo[rule.rule_id].items():
            li = self.level_index[p]
            for entry in tuples:
                self._insert(li, entry, undo)
        for term in self.overlap_terms:
            li = self.level_index[term.priority]
            sign = -1 if term.direction == MAX else 1
            for other in self.selected:
                cn = len(rule.atoms & other.atoms)
                if cn < 1:
                    continue
                if self.pairwise:
                    delta = sign * term.weight * cn * 2
                    self.cost[li] += delta
                    pair_undo[li] += delta
                else:
                    self._insert(li, (sign * term.weight * cn, rule.rule_id), undo)
                    self._insert(li, (sign * term.weight * cn, other.rule_id), undo)
        self.selected.append(rule)
        return (rule.rule_id, undo, pair_undo)

    def remove(self, token) -> None:
        rule_id, undo, pair_undo = token
        assert self.selected and self.selected[-1].rule_id == rule_id
        self.selected.pop()
        for level, entry in undo:
            self.tuples[level].discard(entry)
            self.cost[level] -= entry[0]
        for level, delta in enumerate(pair_undo):
            self.cost[level] -= delta

    def vector(self) -> tuple[int, ...]:
        return tuple(self.cost)


def _candidate_pool(problem: SelectionProblem):
    """valid ∩ non-dominated candidates, grouped by class, plus flat order."""
    config = problem.config
    valid = apply_local_constraints(problem.rules, config)
    if config.dominance_enabled:
        pool_ids = dominance_filter(
            (problem.metrics[i] for i in sorted(valid)), config.dominance_criteria)
    else:
        pool_ids = set(valid)
    by_class: dict[int, list[Rule]] = {c: [] for c in problem.class_labels}
    for rule in problem.rules:
        if rule.rule_id in pool_ids:
            by_class[rule.predicted_class].append(rule)
    if not config.allow_empty_class:
        for c in problem.class_labels:
            if config.per_class_min > 0 and not by_class[c]:
                raise Infeasible(f"class {c} has no valid candidate rule")
    flat = sorted((r for rs in by_class.values() for r in rs), key=lambda r: r.rule_id)
    return by_class, flat


def _solo_cost_rows(problem: SelectionProblem, flat):
    """solo_cost[i][level]: objective tuples a rule contributes on its own."""
    rows = []
    for rule in flat:
        solo = _solo_tuples(rule.rule_id, problem.metrics[rule.rule_id],
                            problem.objectives)
        row = []
        for p in problem.objectives.priorities:
            row.append(sum(w for w, _ in solo.get(p, ())))
        rows.append(row)
    return rows


def solve_exact(problem: SelectionProblem) -> RuleSetSolution:
    """Branch-and-bound search for the lexicographically optimal selection.

    Among equal-cost optima the lexicographically smallest rule-id set wins,
    so outputs are reproducible. Raises SearchCapExceeded when some class
    pool is larger than config.exact_cap.
    """
    config = problem.config
    by_class, flat = _candidate_pool(problem)
    for c, rules in by_class.items():
        if len(rules) > config.exact_cap:
            raise SearchCapExceeded(
                f"class {c} has {len(rules)} candidates, cap is {config.exact_cap}")

    n = len(flat)
    n_levels = len(problem.objectives.priorities)
    solo_cost = _solo_cost_rows(problem, flat)
    classes = [r.predicted_class for r in flat]
    # the size-cap constraint reads the metrics set, like the size/2 facts do
    sizes = [problem.metrics[r.rule_id].size for r in flat]
    class_list = list(problem.class_labels)
    remaining_class = [dict.fromkeys(class_list, 0) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        remaining_class[i] = dict(remaining_class[i + 1])
        remaining_class[i][classes[i]] += 1

    eff_min = config.effective_min
    state = _Incremental(problem)
    best: list = [None, None]       # [vector, sorted id tuple]

    def bound(i, counts) -> tuple[int, ...]:
        lb = list(state.cost)
        for level in range(n_levels):
            picks: dict[int, list[int]] = {c: [] for c in class_list}
            for j in range(i, n):
                s = solo_cost[j][level]
                if s < 0:
                    picks[classes[j]].append(s)
            for c, vals in picks.items():
                room = config.per_class_max - counts[c]
                if room <= 0 or not vals:
                    continue
                vals.sort()
                lb[level] += sum(vals[:room])
        return tuple(lb)

    def feasible_completion(i, counts) -> bool:
        return all(counts[c] + remaining_class[i][c] >= eff_min for c in class_list)

    def visit(i, counts, size_sum, chosen):
        if not feasible_completion(i, counts):
            return
        if best[0] is not None and bound(i, counts) > best[0]:
            return
        if i == n:
            if any(counts[c] < eff_min for c in class_list):
                return
            vec = state.vector()
            ids = tuple(sorted(chosen))
            if best[0] is None or vec < best[0] or (vec == best[0] and ids < best[1]):
                best[0], best[1] = vec, ids
            return
        rule = flat[i]
        c = rule.predicted_class
        if counts[c] < config.per_class_max and size_sum + sizes[i] <= config.total_size_cap:
            token = state.add(rule)
            counts[c] += 1
            chosen.append(rule.rule_id)
            visit(i + 1, counts, size_sum + sizes[i], chosen)
            chosen.pop()
            counts[c] -= 1
            state.remove(token)
        visit(i + 1, counts, size_sum, chosen)

    visit(0, dict.fromkeys(class_list, 0), 0, [])
    if best[0] is None:
        raise Infeasible("no selection satisfies the cardinality and size constraints")
    return RuleSetSolution(selected=frozenset(best[1]), objective_vector=best[0],
                           proof="exact", priorities=problem.objectives.priorities)


def solve_greedy(problem: SelectionProblem) -> RuleSetSolution:
    """Anytime fallback: satisfy per-class minima with the least-bad rules,
    then keep adding the best strictly improving rule. Always feasible."""
    config = problem.config
    by_class, flat = _candidate_pool(problem)
    state = _Incremental(problem)
    counts = dict.fromkeys(problem.class_labels, 0)
    size_sum = 0
    selected: set[int] = set()

    def rule_size(rule: Rule) -> int:
        return problem.metrics[rule.rule_id].size

    def feasible(rule: Rule) -> bool:
        return (rule.rule_id not in selected
                and counts[rule.predicted_class] < config.per_class_max
                and size_sum + rule_size(rule) <= config.total_size_cap)

    def try_costs(cands):
        scored = []
        for rule in cands:
            token = state.add(rule)
            scored.append((state.vector(), rule.rule_id, rule))
            state.remove(token)
        return scored

    def reserve_after(rule: Rule) -> int | None:
        """Smallest total size still needed for unmet per-class minima after
        hypothetically taking `rule`; None when some minimum is unsatisfiable."""
        total = 0
        for c in problem.class_labels:
            need = config.effective_min - counts[c]
            if rule.predicted_class == c:
                need -= 1
            if need <= 0:
                continue
            open_sizes = sorted(rule_size(r) for r in by_class[c]
                                if r.rule_id not in selected
                                and r.rule_id != rule.rule_id)
            if len(open_sizes) < need:
                return None
            total += sum(open_sizes[:need])
        return total

    # satisfy per-class minima first, never spending the size budget that
    # another still-unmet minimum requires
    for c in sorted(problem.class_labels):
        while counts[c] < config.effective_min:
            cands = []
            for r in by_class[c]:
                if not feasible(r):
                    continue
                reserve = reserve_after(r)
                if reserve is not None and \
                        size_sum + rule_size(r) + reserve <= config.total_size_cap:
                    cands.append(r)
            if not cands:
                raise Infeasible(f"class {c}: cannot reach {config.effective_min} "
                                 f"rules within the size cap")
            _, _, pick = min(try_costs(cands))
            state.add(pick)
            selected.add(pick.rule_id)
            counts[c] += 1
            size_sum += rule_size(pick)

    while True:
        cands = [r for r in flat if feasible(r)]
        improving = [(v, i, r) for v, i, r in try_costs(cands) if v < state.vector()]
        if not improving:
            break
        _, _, pick = min(improving)
        state.add(pick)
        selected.add(pick.rule_id)
        counts[pick.predicted_class] += 1
        size_sum += rule_size(pick)

    return RuleSetSolution(selected=frozenset(selected), objective_vector=state.vector(),
                           proof="greedy", priorities=problem.objectives.priorities)


def solve(problem: SelectionProblem, backend: str = "auto") -> RuleSetSolution:
    if backend == "exact":
        return solve_exact(problem)
    if backend == "greedy":
        return solve_greedy(problem)
    if backend != "auto":
        raise ConfigError(f"unknown backend {backend!r}")
    try:
        return solve_exact(problem)
    except SearchCapExceeded:
        return solve_greedy(problem)
