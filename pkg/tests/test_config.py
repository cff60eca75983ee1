import pytest

from treerules.config import default_config_text, parse_config
from treerules.errors import ConfigError
from treerules.selection import ObjectiveConfig, SelectionConfig


def test_defaults_from_empty_text():
    cfg = parse_config("")
    assert cfg.constraints == SelectionConfig()
    assert cfg.objectives == ObjectiveConfig()
    assert cfg.order_policy == "precision"
    assert cfg.backend == "auto"


def test_default_config_text_round_trips_to_defaults():
    cfg = parse_config(default_config_text())
    assert cfg.constraints == SelectionConfig()
    assert [(t.metric, t.direction) for t in cfg.objectives.terms] == \
        [("accuracy", "max"), ("support", "max"), ("size", "min"), ("overlap", "min")]


def test_constraint_section_parsing():
    cfg = parse_config("""
[constraints]
min_support = 25
per_class_max = 4
total_size_cap = 12
dominance_enabled = false
allow_empty_class = true
""")
    c = cfg.constraints
    assert c.min_support == 25 and c.per_class_max == 4
    assert c.total_size_cap == 12
    assert not c.dominance_enabled and c.allow_empty_class


def test_dominance_criteria_string():
    cfg = parse_config("""
[constraints]
dominance_criteria = "support:max,size:min,f1:max"
""")
    assert cfg.constraints.dominance_criteria == (
        ("support", "max"), ("size", "min"), ("f1", "max"))


def test_objectives_with_weights_and_priorities():
    cfg = parse_config("""
[objectives]
precision = "max"
precision_weight = 3
precision_priority = 1
size = "min"
""")
    terms = cfg.objectives.terms
    assert [(t.metric, t.direction, t.weight, t.priority) for t in terms] == \
        [("size", "min", 1, 0), ("precision", "max", 3, 1)]


def test_overlap_semantics_switch():
    cfg = parse_config("""
[objectives]
overlap = "min"
overlap_semantics = "pairwise_sum"
""")
    assert cfg.objectives.overlap_semantics == "pairwise_sum"


def test_classifier_and_solver_sections():
    cfg = parse_config("""
[classifier]
order_policy = "support"

[solver]
backend = "greedy"
solver_path = "/usr/bin/clingo"
timeout = 60
""")
    assert cfg.order_policy == "support"
    assert cfg.backend == "greedy"
    assert cfg.solver_path == "/usr/bin/clingo"
    assert cfg.timeout == 60


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        parse_config("[constraints]\nmin_supprot = 10\n")
    with pytest.raises(ConfigError):
        parse_config("[objectives]\nshiny = \"max\"\n")
    with pytest.raises(ConfigError):
        parse_config("[wat]\nx = 1\n")


def test_invalid_values_rejected():
    with pytest.raises(ConfigError):
        parse_config("[constraints]\nmin_support = lots\n")
    with pytest.raises(ConfigError):
        parse_config("[constraints]\ndominance_enabled = maybe\n")
    with pytest.raises(ConfigError):
        parse_config("[constraints]\nper_class_min = 5\nper_class_max = 2\n")
