"""treerules: distill trained decision-tree ensembles into small,
explainable rule sets under declarative constraints and multi-objective
optimization, with a native solver and an answer-set-program emitter."""

from .asp import (AspDocument, emit_document, emit_facts, emit_program,
                  parse_solver_output, run_external_solver)
from .classifier import (EvalReport, RuleSetClassifier, build_classifier,
                         classify, classify_batch, evaluate)
from .config import PipelineConfig, default_config_text, parse_config
from .crossval import CrossvalReport, distill, render_table, run_crossval
from .dataset import (Dataset, FoldPlan, dataset_to_csv, load_csv,
                      load_csv_for_ensemble, majority_class, stratified_kfold)
from .errors import (ConfigError, ContradictoryPath, EmptyRuleSet,
                     EmptySelection, FeatureMismatch, FoldCountMismatch,
                     Infeasible, MissingLabel, OutputParseError, ParseError,
                     RangeError, SchemaError, SearchCapExceeded, SolverError,
                     SolverNotFound, SolverTimeout, StructureError,
                     TooFewInstances, TreeRulesError, UnknownCategory,
                     ZeroCoverage)
from .estimator import RuleSetDistiller
from .extraction import (AtomTable, CandidateRules, Rule, canonicalize,
                         extract_candidate_rules)
from .gbdt_text import load_gbdt_text, load_model_text
from .metrics import RuleMetrics, compute_all_metrics, compute_metrics
from .model import (Ensemble, Feature, Node, SplitCondition, Tree,
                    ensemble_to_json, parse_ensemble, predict)
from .selection import (ObjectiveConfig, ObjectiveTerm, RuleSetSolution,
                        SelectionConfig, SelectionProblem,
                        apply_local_constraints, dominance_filter,
                        objective_value, overlap_penalty, solve, solve_exact,
                        solve_greedy)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
