"""Flat TOML-style configuration files.

Sections [constraints], [objectives], [classifier], [solver] with key=value
pairs; string values may be quoted, booleans are true/false. CLI flags
override anything read from a file.

Example::

    [constraints]
    min_support = 10
    per_class_min = 1
    per_class_max = 10
    total_size_cap = 30
    dominance_enabled = true
    dominance_criteria = "f1:max,size:min,support:max"
    allow_empty_class = false
    exact_cap = 40

    [objectives]
    accuracy = "max"
    support = "max"
    size = "min"
    overlap = "min"
    overlap_semantics = "tuple_set"

    [classifier]
    order_policy = "precision"

    [solver]
    backend = "auto"
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .errors import ConfigError
from .selection import (DEFAULT_DOMINANCE, OBJECTIVE_METRICS, ObjectiveConfig,
                        ObjectiveTerm, SelectionConfig)

_CONSTRAINT_INTS = ("min_support", "per_class_min", "per_class_max",
                    "total_size_cap", "exact_cap")
_CONSTRAINT_BOOLS = ("dominance_enabled", "allow_empty_class")


@dataclass(frozen=True)
class PipelineConfig:
    constraints: SelectionConfig
    objectives: ObjectiveConfig
    order_policy: str = "precision"
    backend: str = "auto"
    solver_path: str | None = None
    timeout: int = 600


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        return value[1:-1]
    return value


def _to_bool(value: str, key: str) -> bool:
    v = _unquote(value).lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _to_int(value: str, key: str) -> int:
    try:
        return int(_unquote(value))
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def _parse_dominance(value: str):
    out = []
    for part in _unquote(value).split(","):
        part = part.strip()
        if ":" not in part:
            raise ConfigError(f"dominance_criteria: bad entry {part!r}")
        metric, direction = part.split(":", 1)
        out.append((metric.strip(), direction.strip()))
    return tuple(out)


def _constraints_from(section) -> SelectionConfig:
    kwargs = {}
    for key, raw in section.items():
        if key in _CONSTRAINT_INTS:
            kwargs[key] = _to_int(raw, key)
        elif key in _CONSTRAINT_BOOLS:
            kwargs[key] = _to_bool(raw, key)
        elif key == "dominance_criteria":
            kwargs[key] = _parse_dominance(raw)
        else:
            raise ConfigError(f"[constraints] unknown key {key!r}")
    return SelectionConfig(**kwargs)


def _objectives_from(section) -> ObjectiveConfig:
    terms = []
    extras = {}
    data = {k: _unquote(v) for k, v in section.items()}
    for metric in OBJECTIVE_METRICS:
        if metric not in data:
            continue
        direction = data.pop(metric)
        weight = _to_int(data.pop(f"{metric}_weight", "1"), f"{metric}_weight")
        priority = _to_int(data.pop(f"{metric}_priority", "0"), f"{metric}_priority")
        terms.append(ObjectiveTerm(metric, direction, weight=weight, priority=priority))
    if "overlap_semantics" in data:
        extras["overlap_semantics"] = data.pop("overlap_semantics")
    leftovers = set(data) - {f"{m}_weight" for m in OBJECTIVE_METRICS} \
        - {f"{m}_priority" for m in OBJECTIVE_METRICS}
    if leftovers:
        raise ConfigError(f"[objectives] unknown keys {sorted(leftovers)}")
    if terms:
        extras["terms"] = tuple(terms)
    return ObjectiveConfig(**extras)


def parse_config(text: str) -> PipelineConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config file: {exc}") from exc
    known = {"constraints", "objectives", "classifier", "solver"}
    unknown = set(parser.sections()) - known
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}")

    constraints = (_constraints_from(parser["constraints"])
                   if parser.has_section("constraints") else SelectionConfig())
    objectives = (_objectives_from(parser["objectives"])
                  if parser.has_section("objectives") else ObjectiveConfig())

    order_policy, backend, solver_path, timeout = "precision", "auto", None, 600
    if parser.has_section("classifier"):
        for key, raw in parser["classifier"].items():
            if key == "order_policy":
                order_policy = _unquote(raw)
            else:
                raise ConfigError(f"[classifier] unknown key {key!r}")
    if parser.has_section("solver"):
        for key, raw in parser["solver"].items():
            if key == "backend":
                backend = _unquote(raw)
            elif key == "solver_path":
                solver_path = _unquote(raw)
            elif key == "timeout":
                timeout = _to_int(raw, key)
            else:
                raise ConfigError(f"[solver] unknown key {key!r}")
    return PipelineConfig(constraints=constraints, objectives=objectives,
                          order_policy=order_policy, backend=backend,
                          solver_path=solver_path, timeout=timeout)


def default_config_text() -> str:
    crit = ",".join(f"{m}:{d}" for m, d in DEFAULT_DOMINANCE)
    return (
        "[constraints]\n"
        "min_support = 10\n"
        "per_class_min = 1\n"
        "per_class_max = 10\n"
        "total_size_cap = 30\n"
        "dominance_enabled = true\n"
        f"dominance_criteria = \"{crit}\"\n"
        "allow_empty_class = false\n"
        "exact_cap = 40\n"
        "\n"
        "[objectives]\n"
        "accuracy = \"max\"\n"
        "support = \"max\"\n"
        "size = \"min\"\n"
        "overlap = \"min\"\n"
        "overlap_semantics = \"tuple_set\"\n"
        "\n"
        "[classifier]\n"
        "order_policy = \"precision\"\n"
        "\n"
        "[solver]\n"
        "backend = \"auto\"\n"
        "timeout = 600\n"
    )
