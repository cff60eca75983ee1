"""Exception taxonomy shared across the package.

CLI exit-code mapping: usage errors exit 1, data errors exit 2,
infeasible/empty-rule-set exit 3, solver errors exit 4.
"""


class TreeRulesError(Exception):
    """Base class for all errors raised by this package."""


# -- model / data ingestion (exit 2) --

class SchemaError(TreeRulesError):
    """Document does not match the canonical schema (missing/extra/bad fields)."""


class StructureError(TreeRulesError):
    """Tree graph is malformed: cycle, orphan node, or bad child reference."""


class RangeError(TreeRulesError):
    """Index out of range, e.g. feature_id beyond the feature schema."""


class FeatureMismatch(TreeRulesError):
    """Instance does not fit the feature schema (arity, unknown category, missing value)."""


class ParseError(TreeRulesError):
    """CSV document malformed: bad arity, bad number format, or no data rows."""


class UnknownCategory(TreeRulesError):
    """Categorical value absent from the schema dictionary."""


class MissingLabel(TreeRulesError):
    """Label column missing from the CSV header, or label cell empty/invalid."""


class TooFewInstances(TreeRulesError):
    """A class has fewer instances than the requested fold count."""


class ConfigError(TreeRulesError):
    """Invalid selection/objective configuration."""


# -- extraction / metrics (exit 3 for EmptyRuleSet) --

class EmptyRuleSet(TreeRulesError):
    """No candidate rules could be extracted (e.g. every tree is leaf-only)."""


class ContradictoryPath(TreeRulesError):
    """A root-to-node path constrains some feature to an empty set of values."""


class ZeroCoverage(TreeRulesError):
    """Metric computation was asked for a rule that covers no training instance."""


# -- selection (exit 3) --

class Infeasible(TreeRulesError):
    """No rule selection satisfies the constraints (e.g. a class has no valid rule)."""


class SearchCapExceeded(TreeRulesError):
    """Candidate pool too large for the exact solver; use the greedy backend."""


class EmptySelection(TreeRulesError):
    """Classifier construction got an empty rule selection."""


class FoldCountMismatch(TreeRulesError):
    """Number of per-fold models does not match the fold count."""


# -- external solver (exit 4) --

class SolverError(TreeRulesError):
    """Base class for external-solver failures."""


class SolverNotFound(SolverError):
    """External solver binary could not be executed."""


class SolverTimeout(SolverError):
    """External solver hit the time limit without producing any answer."""


class OutputParseError(SolverError):
    """External solver output did not follow the expected text protocol."""
