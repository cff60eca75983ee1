"""Answer-set-program emission and (optional) external solver invocation.

``emit_facts`` renders the candidate rules and their integer metrics as one
atom per line; ``emit_program`` renders validity, dominance, generator,
size-cap and optimize statements with the configured values substituted.
With default configuration the program matches the standard encoding this
pipeline is built around, modulo whitespace.

``run_external_solver`` shells out to a clingo-compatible solver and parses
the textual "Answer:/Optimization:" protocol back into a selection.
"""

from __future__ import annotations

import re
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import Infeasible, OutputParseError, SolverNotFound, SolverTimeout
from .metrics import RuleMetrics
from .selection import MAX, ObjectiveConfig, SelectionConfig

_METRIC_ATOMS = ("support", "size", "accuracy", "error_rate",
                 "precision", "recall", "f1_score", "predict_class")

_OBJECTIVE_VARS = {"accuracy": "A", "support": "S", "size": "L",
                   "precision": "P", "recall": "R", "f1": "F", "error_rate": "E"}
_OBJECTIVE_ATOMS = {"accuracy": "accuracy", "support": "support", "size": "size",
                    "precision": "precision", "recall": "recall",
                    "f1": "f1_score", "error_rate": "error_rate"}

# strict/non-strict comparator naming used by the dominance clause heads
_CMP_NAME = {(MAX, True): "ge", (MAX, False): "geq", ("min", True): "le", ("min", False): "leq"}
_CMP_OP = {(MAX, True): "<", (MAX, False): "<=", ("min", True): ">", ("min", False): ">="}
_DOM_ABBREV = {"f1": "f1", "size": "size", "support": "sup"}
_DOM_VARS = {"f1": ("Fx", "Fy"), "size": ("Sx", "Sy"), "support": ("Spx", "Spy")}
_DOM_ATOMS = {"f1": "f1_score", "size": "size", "support": "support"}


@dataclass(frozen=True)
class AspDocument:
    facts: str
    program: str


@dataclass(frozen=True)
class SolverResult:
    selected: frozenset[int]
    cost: tuple[int, ...]
    optimal: bool


def _metric_value(metrics: RuleMetrics, atom: str) -> int:
    if atom == "f1_score":
        return metrics.f1
    if atom == "predict_class":
        return metrics.predicted_class
    return getattr(metrics, atom)


def emit_facts(rules, metrics: dict[int, RuleMetrics], class_labels) -> str:
    """One fact per line: rule/1, condition/2, the metric atoms, class/1."""
    lines = []
    for rule in sorted(rules, key=lambda r: r.rule_id):
        m = metrics[rule.rule_id]
        lines.append(f"rule({rule.rule_id}).")
        for atom_id in sorted(rule.atoms):
            lines.append(f"condition({rule.rule_id},{atom_id}).")
        for atom in _METRIC_ATOMS:
            lines.append(f"{atom}({rule.rule_id},{_metric_value(m, atom)}).")
    for c in sorted(class_labels):
        lines.append(f"class({c}).")
    return "\n".join(lines) + "\n"


def _dominance_block(criteria) -> list[str]:
    lines = [":- dominated."]
    heads = []
    # metric atoms are listed size, f1, support; the strictness pattern and
    # the comparison order follow the configured criteria
    atom_order = ("size", "f1", "support")
    for strict_index in range(len(criteria)):
        parts = []
        for j, (metric, direction) in enumerate(criteria):
            parts.append(_CMP_NAME[(direction, j == strict_index)] + "_" + _DOM_ABBREV[metric])
        head = "_".join(parts)
        heads.append(head)
        body = ["selected(X)", "valid(Y)"]
        for metric in atom_order:
            vx, vy = _DOM_VARS[metric]
            atom = _DOM_ATOMS[metric]
            body.append(f"{atom}(X,{vx})")
            body.append(f"{atom}(Y,{vy})")
        comps = []
        for j, (metric, direction) in enumerate(criteria):
            vx, vy = _DOM_VARS[metric]
            comps.append(f"{vx} {_CMP_OP[(direction, j == strict_index)]} {vy}")
        lines.append(f"{head}(Y) :- " + ", ".join(body + comps) + ".")
    for head in heads:
        lines.append(f"dominated :- valid(Y), {head}(Y).")
    return lines


def _optimize_statements(objectives: ObjectiveConfig) -> list[str]:
    lines = []
    overlap_terms = []
    for term in objectives.terms:
        if term.metric == "overlap":
            overlap_terms.append(term)
            continue
        var = _OBJECTIVE_VARS[term.metric]
        atom = _OBJECTIVE_ATOMS[term.metric]
        weight = var if term.weight == 1 else f"{var}*{term.weight}"
        prio = "" if term.priority == 0 else f"@{term.priority}"
        stmt = "#maximize" if term.direction == MAX else "#minimize"
        lines.append(f"{stmt} {{ {weight}{prio},X : selected(X), {atom}(X,{var}) }}.")
    if overlap_terms:
        lines.append("rule_overlap(X,Y,Cn) :- selected(X), selected(Y), X!=Y,")
        lines.append("    Cn = #count { Cx : Cx=Cy, condition(X,Cx), condition(Y,Cy) }.")
        for term in overlap_terms:
            weight = "Cn" if term.weight == 1 else f"Cn*{term.weight}"
            prio = "" if term.priority == 0 else f"@{term.priority}"
            stmt = "#maximize" if term.direction == MAX else "#minimize"
            lines.append(f"{stmt} {{ {weight}{prio},X : selected(X), selected(Y), "
                         f"rule_overlap(X,Y,Cn) }}.")
    return lines


def emit_program(config: SelectionConfig, objectives: ObjectiveConfig) -> str:
    lines = ["valid(X) :- rule(X), not invalid(X).",
             f"invalid(X) :- rule(X), support(X,S), S < {config.min_support}."]
    if config.dominance_enabled:
        lines.extend(_dominance_block(config.dominance_criteria))
    lo = config.effective_min
    hi = config.per_class_max
    lines.append(f"{lo} {{ selected(X) : predict_class(X, K), valid(X) }} {hi} :- class(K).")
    lines.append(f":- #sum {{ S,X : size(X,S), selected(X) }} > {config.total_size_cap}.")
    lines.extend(_optimize_statements(objectives))
    lines.append("#show selected/1.")
    return "\n".join(lines) + "\n"


def emit_document(rules, metrics, class_labels, config, objectives) -> AspDocument:
    return AspDocument(facts=emit_facts(rules, metrics, class_labels),
                       program=emit_program(config, objectives))


def write_document(document: AspDocument, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    facts_path = out / "rules.lp"
    program_path = out / "select.lp"
    facts_path.write_text(document.facts, encoding="utf-8")
    program_path.write_text(document.program, encoding="utf-8")
    return facts_path, program_path


_ANSWER_RE = re.compile(r"^Answer: \d+")
_SELECTED_RE = re.compile(r"selected\((\d+)\)")
_COST_RE = re.compile(r"^Optimization: ([-\d ]+)$")


def parse_solver_output(text: str) -> SolverResult:
    """Parse the last answer set and cost line of a clingo-style transcript."""
    lines = text.splitlines()
    selected: frozenset[int] | None = None
    cost: tuple[int, ...] | None = None
    saw_unsat = False
    optimal = False
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if _ANSWER_RE.match(line):
            if i + 1 >= len(lines):
                raise OutputParseError("answer header without an atom line")
            selected = frozenset(int(x) for x in _SELECTED_RE.findall(lines[i + 1]))
            i += 2
            continue
        m = _COST_RE.match(line)
        if m:
            cost = tuple(int(tok) for tok in m.group(1).split())
        elif line == "UNSATISFIABLE":
            saw_unsat = True
        elif line == "OPTIMUM FOUND":
            optimal = True
        i += 1
    if saw_unsat:
        raise Infeasible("solver reported UNSATISFIABLE")
    if selected is None:
        raise SolverTimeout("solver produced no answer set")
    if cost is None:
        raise OutputParseError("answer set without an Optimization line")
    return SolverResult(selected=selected, cost=cost, optimal=optimal)


def run_external_solver(document: AspDocument, solver_path: str,
                        timeout_s: int = 600) -> SolverResult:
    """Invoke an external answer-set solver on the emitted file pair."""
    with tempfile.TemporaryDirectory(prefix="treerules-asp-") as tmp:
        facts_path, program_path = write_document(document, tmp)
        cmd = [solver_path, str(facts_path), str(program_path),
               "--quiet=1", f"--time-limit={timeout_s}"]
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True,
                                  timeout=timeout_s + 30)
        except FileNotFoundError as exc:
            raise SolverNotFound(f"cannot execute solver {solver_path!r}") from exc
        except subprocess.TimeoutExpired as exc:
            raise SolverTimeout(f"solver exceeded {timeout_s}s wall clock") from exc
    return parse_solver_output(proc.stdout)
