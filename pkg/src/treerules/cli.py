"""Batch pipeline front-end.

Subcommands: extract, select, emit-asp, classify, crossval, inspect.
Exit codes: 1 usage, 2 data error, 3 infeasible/empty rule set, 4 solver error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .classifier import binary_scores, classify_batch
from .config import PipelineConfig, parse_config
from .crossval import render_table, run_crossval
from .dataset import load_csv
from .errors import (ConfigError, ContradictoryPath, EmptyRuleSet,
                     EmptySelection, FeatureMismatch, FoldCountMismatch,
                     Infeasible, MissingLabel, ParseError, RangeError,
                     SchemaError, SearchCapExceeded, SolverError,
                     StructureError, TooFewInstances, UnknownCategory,
                     ZeroCoverage)
from .extraction import extract_candidate_rules
from .gbdt_text import load_model_text
from .metrics import compute_all_metrics
from .asp import emit_document, run_external_solver
from .dataset import majority_class
from .selection import RuleSetSolution, SelectionProblem, solve
from .serialize import (rules_to_jsonl, ruleset_texts, ruleset_to_dict,
                        classifier_from_ruleset)

_DATA_ERRORS = (SchemaError, StructureError, RangeError, ParseError,
                UnknownCategory, MissingLabel, TooFewInstances,
                FeatureMismatch, ConfigError, FoldCountMismatch,
                ZeroCoverage, ContradictoryPath)
_FAILURE_ERRORS = (Infeasible, EmptyRuleSet, EmptySelection)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_model(path: str):
    return load_model_text(_read(path))


def _load_data(path: str, ensemble, label: str):
    return load_csv(_read(path), ensemble.features, label, ensemble.n_classes)


def _pipeline_config(args) -> PipelineConfig:
    cfg = parse_config(_read(args.config)) if getattr(args, "config", None) \
        else parse_config("")
    constraints = cfg.constraints
    overrides = {}
    for flag, field in (("min_support", "min_support"),
                        ("per_class_min", "per_class_min"),
                        ("per_class_max", "per_class_max"),
                        ("size_cap", "total_size_cap"),
                        ("exact_cap", "exact_cap")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    if getattr(args, "no_dominance", False):
        overrides["dominance_enabled"] = False
    if getattr(args, "allow_empty_class", False):
        overrides["allow_empty_class"] = True
    if overrides:
        constraints = replace(constraints, **overrides)
    order_policy = getattr(args, "order_policy", None) or cfg.order_policy
    backend = getattr(args, "backend", None) or cfg.backend
    solver_path = getattr(args, "solver_path", None) or cfg.solver_path
    timeout = getattr(args, "timeout", None) or cfg.timeout
    return PipelineConfig(constraints=constraints, objectives=cfg.objectives,
                          order_policy=order_policy, backend=backend,
                          solver_path=solver_path, timeout=timeout)


def _json_dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def cmd_extract(args) -> int:
    ensemble = _load_model(args.model)
    train = _load_data(args.data, ensemble, args.label)
    candidates = extract_candidate_rules(ensemble, train)
    _write(args.out, rules_to_jsonl(candidates))
    return 0


def _solve_problem(candidates, metrics, cfg: PipelineConfig, ensemble):
    problem = SelectionProblem(rules=candidates.rules, metrics=metrics,
                               config=cfg.constraints, objectives=cfg.objectives,
                               class_labels=tuple(range(ensemble.n_classes)))
    if cfg.backend == "asp":
        if not cfg.solver_path:
            raise SolverError("backend 'asp' needs --solver-path")
        document = emit_document(candidates.rules, metrics,
                                 problem.class_labels, cfg.constraints,
                                 cfg.objectives)
        result = run_external_solver(document, cfg.solver_path, cfg.timeout)
        return problem, RuleSetSolution(selected=result.selected,
                                        objective_vector=result.cost,
                                        proof="external",
                                        priorities=cfg.objectives.priorities)
    return problem, solve(problem, backend=cfg.backend)


def cmd_select(args) -> int:
    ensemble = _load_model(args.model)
    train = _load_data(args.data, ensemble, args.label)
    cfg = _pipeline_config(args)
    candidates = extract_candidate_rules(ensemble, train)
    metrics = compute_all_metrics(candidates, train)
    problem, solution = _solve_problem(candidates, metrics, cfg, ensemble)
    doc = ruleset_to_dict(solution, candidates, metrics,
                          default_class=majority_class(train),
                          order_policy=cfg.order_policy)
    _write(args.out, _json_dumps(doc))
    lines = [f"candidates: {len(candidates.rules)}",
             f"selected:   {len(solution.selected)} "
             f"(ids {sorted(solution.selected)})",
             f"objective:  {list(solution.objective_vector)} "
             f"at priorities {list(solution.priorities)} ({solution.proof})"]
    lines.extend(ruleset_texts(doc))
    sys.stderr.write("\n".join(lines) + "\n")
    return 0


def cmd_emit_asp(args) -> int:
    ensemble = _load_model(args.model)
    train = _load_data(args.data, ensemble, args.label)
    cfg = _pipeline_config(args)
    candidates = extract_candidate_rules(ensemble, train)
    metrics = compute_all_metrics(candidates, train)
    document = emit_document(candidates.rules, metrics,
                             tuple(range(ensemble.n_classes)),
                             cfg.constraints, cfg.objectives)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "rules.lp").write_text(document.facts, encoding="utf-8")
    (out_dir / "select.lp").write_text(document.program, encoding="utf-8")
    sys.stderr.write(f"wrote {out_dir / 'rules.lp'} and {out_dir / 'select.lp'}\n")
    return 0


def cmd_classify(args) -> int:
    doc = json.loads(_read(args.ruleset))
    clf, features = classifier_from_ruleset(doc)
    n_classes = max(doc["class_labels"]) + 1
    have_label = args.label is not None
    if have_label:
        data = load_csv(_read(args.data), features, args.label, n_classes)
        X, y = data.X, data.y
    else:
        # no label column: parse with a placeholder, then drop it
        import csv as _csv
        import io as _io

        import numpy as _np
        rows = list(_csv.reader(_io.StringIO(_read(args.data))))
        header = [h.strip() for h in rows[0]]
        order = []
        for f in features:
            if f.name not in header:
                raise ParseError(f"feature column {f.name!r} not in header")
            order.append(header.index(f.name))
        X = []
        for rec in rows[1:]:
            if not rec:
                continue
            vals = []
            for f, pos in zip(features, order):
                cell = rec[pos].strip()
                if f.kind == "categorical":
                    code = f.code(cell)
                    if code is None:
                        raise UnknownCategory(f"{cell!r} not a category of {f.name!r}")
                    vals.append(float(code))
                else:
                    vals.append(float(cell))
            X.append(vals)
        X, y = _np.asarray(X, dtype=float), None
    labels, fired = classify_batch(clf, X)
    out_lines = ["prediction,fired_rule_id"]
    out_lines += [f"{int(p)},{int(r)}" for p, r in zip(labels, fired)]
    _write(args.out, "\n".join(out_lines) + "\n")
    if have_label:
        scores = binary_scores(y, labels)
        sys.stderr.write(" ".join(f"{k}={v:.4f}" for k, v in scores.items()) + "\n")
    return 0


def cmd_crossval(args) -> int:
    manifest_path = Path(args.manifest)
    manifest = json.loads(_read(args.manifest))
    base = manifest_path.parent

    def resolve(p: str) -> str:
        path = Path(p)
        return str(path if path.is_absolute() else base / path)

    cfg_text = _read(resolve(manifest["config"])) if manifest.get("config") else ""
    cfg = parse_config(cfg_text)
    if "folds" in manifest:
        models = [_load_model(resolve(f["model"])) for f in manifest["folds"]]
        k = manifest.get("k", len(models))
        ensembles = models
        schema_source = models[0]
    elif "model" in manifest:
        schema_source = _load_model(resolve(manifest["model"]))
        ensembles = schema_source
        k = manifest.get("k", 5)
    else:
        raise SchemaError("manifest needs a 'folds' list or a 'model' path")
    seed = args.seed if args.seed is not None else manifest.get("seed", 0)
    dataset = load_csv(_read(resolve(manifest["dataset"])),
                       schema_source.features, manifest["label"],
                       schema_source.n_classes)
    backend = args.backend or cfg.backend
    report = run_crossval(ensembles, dataset, k=k, seed=seed,
                          config=cfg.constraints, objectives=cfg.objectives,
                          order_policy=cfg.order_policy, backend=backend,
                          threads=args.threads)
    table = render_table(report, name=manifest.get("name", manifest["dataset"]))
    sys.stdout.write(table)
    if args.out:
        _write(args.out, _json_dumps(report.to_dict()))
    return 0


def cmd_inspect(args) -> int:
    doc = json.loads(_read(args.ruleset))
    _write(args.out, "\n".join(ruleset_texts(doc)) + "\n")
    return 0


def _add_constraint_flags(p) -> None:
    p.add_argument("--config", help="TOML-style config file")
    p.add_argument("--min-support", dest="min_support", type=int)
    p.add_argument("--per-class-min", dest="per_class_min", type=int)
    p.add_argument("--per-class-max", dest="per_class_max", type=int)
    p.add_argument("--size-cap", dest="size_cap", type=int)
    p.add_argument("--exact-cap", dest="exact_cap", type=int)
    p.add_argument("--no-dominance", dest="no_dominance", action="store_true")
    p.add_argument("--allow-empty-class", dest="allow_empty_class",
                   action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treerules",
                     description="Distill tree ensembles into explainable rule sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="dump the candidate rule set as JSON lines")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("select", help="select an optimal rule set")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--out", default="ruleset.json")
    _add_constraint_flags(p)
    p.add_argument("--backend", choices=("auto", "exact", "greedy", "asp"))
    p.add_argument("--order-policy", dest="order_policy",
                   choices=("precision", "support", "selection"))
    p.add_argument("--solver-path", dest="solver_path")
    p.add_argument("--timeout", type=int)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("emit-asp", help="write rules.lp and select.lp")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--out-dir", dest="out_dir", default=".")
    _add_constraint_flags(p)
    p.set_defaults(func=cmd_emit_asp)

    p = sub.add_parser("classify", help="score a CSV with a selected rule set")
    p.add_argument("--ruleset", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("crossval", help="run the cross-validation harness")
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--backend", choices=("auto", "exact", "greedy"), default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("inspect", help="pretty-print rules as IF-THEN text")
    p.add_argument("--ruleset", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except _FAILURE_ERRORS as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 3
    except (SolverError, SearchCapExceeded) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 4
    except _DATA_ERRORS as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 2
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"bad JSON input: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
