from pathlib import Path

import pytest

from treerules import (load_csv_for_ensemble, parse_ensemble, run_crossval)
from treerules.crossval import render_table
from treerules.errors import FoldCountMismatch
from treerules.selection import SelectionConfig

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="module")
def desk():
    ens = parse_ensemble((FIXTURES / "desk_model.json").read_text())
    data = load_csv_for_ensemble((FIXTURES / "desk_train.csv").read_text(), ens, "y")
    return ens, data


def test_all_folds_succeed(desk):
    ens, data = desk
    report = run_crossval(ens, data, k=5, seed=2024)
    assert report.k == 5 and len(report.outcomes) == 5
    assert all(o.ok for o in report.outcomes)
    assert report.means["folds_ok"] == 5
    assert report.single_model_reused
    assert report.means["candidates"] > 50
    assert report.means["selected"] <= 20


def test_single_fold_failure_renders_hyphen(desk):
    ens, data = desk
    leaf_only = parse_ensemble((FIXTURES / "leaf_only_model.json").read_text())
    models = [ens] * 4 + [leaf_only]
    report = run_crossval(models, data, k=5, seed=2024)
    assert [o.ok for o in report.outcomes].count(True) == 4
    failed = [o for o in report.outcomes if not o.ok][0]
    assert failed.status == "empty_rule_set"
    table = render_table(report)
    row = [line for line in table.splitlines()
           if line.strip().startswith(str(failed.fold + 1))][0]
    assert row.split()[1:] == ["-"] * 6
    # means computed over successful folds only
    ok_candidates = [o.n_candidates for o in report.outcomes if o.ok]
    assert report.means["candidates"] == pytest.approx(sum(ok_candidates) / 4)


def test_all_folds_fail(desk):
    _, data = desk
    leaf_only = parse_ensemble((FIXTURES / "leaf_only_model.json").read_text())
    report = run_crossval(leaf_only, data, k=5, seed=2024)
    assert report.means["folds_ok"] == 0
    assert report.means["candidates"] is None
    assert "-" in render_table(report)


def test_fold_count_mismatch(desk):
    ens, data = desk
    with pytest.raises(FoldCountMismatch):
        run_crossval([ens] * 3, data, k=5, seed=2024)


def test_whole_pipeline_deterministic(desk):
    ens, data = desk
    a = run_crossval(ens, data, k=5, seed=2024)
    b = run_crossval(ens, data, k=5, seed=2024)
    assert render_table(a) == render_table(b)
    assert a.to_dict() == b.to_dict()


def test_threads_do_not_change_results(desk):
    ens, data = desk
    seq = run_crossval(ens, data, k=5, seed=7)
    par = run_crossval(ens, data, k=5, seed=7, threads=4)
    assert seq.to_dict() == par.to_dict()


def test_infeasible_fold_recorded(desk):
    ens, data = desk
    config = SelectionConfig(min_support=500)   # nothing can be valid
    report = run_crossval(ens, data, k=5, seed=2024, config=config)
    assert all(o.status == "infeasible" for o in report.outcomes)
