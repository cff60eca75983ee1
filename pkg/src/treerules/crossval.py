"""Experiment harness: per-fold extract -> metrics -> select -> classify,
aggregated over stratified folds.

Models are trained elsewhere and supplied per fold (or one model is reused
for every fold, which is reported as a caveat since its trees have seen the
validation rows). Folds that fail with an empty rule set or an infeasible
selection are rendered as hyphen rows and excluded from the means.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .classifier import build_classifier, evaluate
from .dataset import Dataset, stratified_kfold
from .errors import EmptyRuleSet, FoldCountMismatch, Infeasible
from .extraction import extract_candidate_rules
from .metrics import compute_all_metrics
from .model import Ensemble
from .selection import (ObjectiveConfig, SelectionConfig, SelectionProblem, solve)

RATIO_KEYS = ("accuracy", "precision", "recall", "f1")


@dataclass(frozen=True)
class FoldDistillation:
    candidates: object
    metrics: dict
    problem: SelectionProblem
    solution: object
    classifier: object


def distill(ensemble: Ensemble, train: Dataset,
            config: SelectionConfig | None = None,
            objectives: ObjectiveConfig | None = None,
            order_policy: str = "precision",
            backend: str = "auto") -> FoldDistillation:
    """One full pass from a trained ensemble to a rule-set classifier."""
    config = config or SelectionConfig()
    objectives = objectives or ObjectiveConfig()
    candidates = extract_candidate_rules(ensemble, train)
    metrics = compute_all_metrics(candidates, train)
    problem = SelectionProblem(rules=candidates.rules, metrics=metrics,
                               config=config, objectives=objectives,
                               class_labels=tuple(range(ensemble.n_classes)))
    solution = solve(problem, backend=backend)
    selected = [candidates.by_id(i) for i in sorted(solution.selected)]
    clf = build_classifier(selected, metrics, candidates.atoms, train,
                           order_policy=order_policy,
                           allow_empty=config.allow_empty_class)
    return FoldDistillation(candidates=candidates, metrics=metrics,
                            problem=problem, solution=solution, classifier=clf)


@dataclass(frozen=True)
class FoldOutcome:
    fold: int
    status: str                      # "ok" | "empty_rule_set" | "infeasible"
    detail: str = ""
    n_candidates: int | None = None
    n_selected: int | None = None
    ratios: dict | None = None
    report: object = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class CrossvalReport:
    k: int
    seed: int
    outcomes: tuple[FoldOutcome, ...]
    means: dict
    single_model_reused: bool

    def to_dict(self) -> dict:
        rows = []
        for o in self.outcomes:
            rows.append({"fold": o.fold, "status": o.status,
                         "candidates": o.n_candidates, "selected": o.n_selected,
                         "ratios": o.ratios})
        return {"k": self.k, "seed": self.seed,
                "single_model_reused": self.single_model_reused,
                "folds": rows, "means": self.means}


def _run_fold(fold_index, ensemble, train, val, config, objectives,
              order_policy, backend) -> FoldOutcome:
    try:
        dist = distill(ensemble, train, config, objectives, order_policy, backend)
    except EmptyRuleSet as exc:
        return FoldOutcome(fold=fold_index, status="empty_rule_set", detail=str(exc))
    except Infeasible as exc:
        return FoldOutcome(fold=fold_index, status="infeasible", detail=str(exc))
    report = evaluate(dist.classifier, ensemble, val)
    return FoldOutcome(fold=fold_index, status="ok",
                       n_candidates=len(dist.candidates.rules),
                       n_selected=len(dist.solution.selected),
                       ratios=dict(report.ratios), report=report)


def run_crossval(ensembles, dataset: Dataset, k: int, seed: int,
                 config: SelectionConfig | None = None,
                 objectives: ObjectiveConfig | None = None,
                 order_policy: str = "precision",
                 backend: str = "auto",
                 threads: int = 1) -> CrossvalReport:
    """Run the k-fold protocol; `ensembles` is one Ensemble per fold or a
    single Ensemble reused across folds."""
    single = isinstance(ensembles, Ensemble)
    models = [ensembles] * k if single else list(ensembles)
    if len(models) != k:
        raise FoldCountMismatch(f"{len(models)} models supplied for k={k} folds")
    plan = stratified_kfold(dataset, k, seed)
    jobs = []
    for i in range(k):
        train = dataset.subset(plan.train_indices(i))
        val = dataset.subset(plan.folds[i])
        jobs.append((i, models[i], train, val, config, objectives,
                     order_policy, backend))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda args: _run_fold(*args), jobs))
    else:
        outcomes = [_run_fold(*job) for job in jobs]

    ok = [o for o in outcomes if o.ok]
    means: dict = {"folds_ok": len(ok), "folds_failed": k - len(ok)}
    if ok:
        means["candidates"] = sum(o.n_candidates for o in ok) / len(ok)
        means["selected"] = sum(o.n_selected for o in ok) / len(ok)
        for key in RATIO_KEYS:
            vals = [o.ratios[key] for o in ok if o.ratios.get(key) is not None]
            means[f"ratio_{key}"] = sum(vals) / len(vals) if vals else None
    else:
        means["candidates"] = None
        means["selected"] = None
        for key in RATIO_KEYS:
            means[f"ratio_{key}"] = None
    return CrossvalReport(k=k, seed=seed, outcomes=tuple(outcomes), means=means,
                          single_model_reused=single)


def _cell(value, fmt="{:.2f}") -> str:
    return "-" if value is None else fmt.format(value)


def render_table(report: CrossvalReport, name: str = "dataset") -> str:
    """Aligned text table with one row per fold plus a mean row."""
    header = ["fold", "|R|", "# rule", "Acc.", "Prec.", "Rec.", "F1"]
    rows = [header]
    for o in report.outcomes:
        if o.ok:
            rows.append([str(o.fold + 1), str(o.n_candidates), str(o.n_selected)]
                        + [_cell(o.ratios.get(k)) for k in RATIO_KEYS])
        else:
            rows.append([str(o.fold + 1)] + ["-"] * 6)
    m = report.means
    rows.append(["mean", _cell(m["candidates"], "{:.1f}"), _cell(m["selected"], "{:.1f}")]
                + [_cell(m[f"ratio_{k}"]) for k in RATIO_KEYS])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = [f"# {name}: {report.k}-fold stratified cross-validation (seed {report.seed})"]
    if report.single_model_reused:
        lines.append("# caveat: one model reused across folds; its trees saw every row")
    for r in rows:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(r, widths)))
    return "\n".join(lines) + "\n"
