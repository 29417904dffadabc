"""Tests for the factorial experiment harness and its output files."""

from __future__ import annotations

import csv
import json

import pytest

from atopolicy import (
    CostReport,
    ExperimentGrid,
    ParameterError,
    cost_report,
    results_to_json,
    run_grid,
    summarize,
    write_instances_csv,
    write_results_json,
    write_summary_csv,
)
from atopolicy.experiments import INSTANCE_FIELDS, SUMMARY_FIELDS


def make_report(model, instance, fixed, state_dep):
    saving = 0.0 if fixed <= 0 else 100 * (fixed - state_dep) / fixed
    return CostReport(model=model, instance=instance, fixed_target=3,
                      cost_fixed=fixed, cost_state_dependent=state_dep,
                      savings_pct=saving)


class TestGrids:
    def test_default_sizes(self):
        assert len(ExperimentGrid.continuous()) == 54
        assert len(ExperimentGrid.discrete()) == 54

    def test_continuous_instance_order(self):
        labels = [label for label, _ in ExperimentGrid.continuous().instances()]
        assert labels[0] == {"lambda": 0.8, "mu": 1.0, "L": 2, "h1": 1.0, "h2": 1.0, "b": 1.0}
        assert labels[1]["b"] == 5.0
        assert labels[-1] == {"lambda": 0.9, "mu": 1.0, "L": 4, "h1": 4.0, "h2": 1.0, "b": 10.0}

    def test_discrete_instances_carry_case(self):
        labels = [label for label, _ in ExperimentGrid.discrete().instances()]
        assert {label["case"] for label in labels} == {1, 2}

    def test_bad_model_rejected(self):
        with pytest.raises(ParameterError):
            ExperimentGrid(model="hybrid")

    def test_singleton_grid_equals_cost_report(self):
        grid = ExperimentGrid(model="continuous", lambdas=(0.8,), lead_times=(2,),
                              h1_values=(1.0,), b_values=(1.0,))
        report, = run_grid(grid)
        _, params = next(iter(grid.instances()))
        direct = cost_report(params)
        assert report.cost_fixed == direct.cost_fixed
        assert report.cost_state_dependent == direct.cost_state_dependent
        assert report.savings_pct == direct.savings_pct

    def test_run_grid_deterministic(self):
        grid = ExperimentGrid(model="discrete", cases=(1,), lead_times=(2,),
                              h1_values=(1.0,), b_values=(1.0, 5.0))
        assert run_grid(grid) == run_grid(grid)


class TestSummarize:
    def test_group_math_on_synthetic_reports(self):
        reports = [
            make_report("continuous", {"lambda": 0.8, "L": 2, "h1": 1, "b": 1}, 2.0, 1.0),
            make_report("continuous", {"lambda": 0.8, "L": 3, "h1": 1, "b": 1}, 4.0, 3.0),
            make_report("continuous", {"lambda": 0.9, "L": 2, "h1": 1, "b": 1}, 1.0, 1.0),
        ]
        rows = {r.group_key: r for r in summarize(reports)}
        assert rows["lambda=0.8"].avg_cost_fixed == pytest.approx(3.0)
        assert rows["lambda=0.8"].avg_cost_state_dep == pytest.approx(2.0)
        assert rows["lambda=0.8"].avg_saving_pct == pytest.approx((50 + 25) / 2)
        assert rows["lambda=0.8"].max_saving_pct == pytest.approx(50)
        assert rows["lambda=0.9"].avg_saving_pct == pytest.approx(0.0)
        assert rows["All"].avg_cost_fixed == pytest.approx(7 / 3)
        assert rows["All"].min_saving_pct == pytest.approx(0.0)

    def test_single_report_all_row(self):
        report = make_report("continuous", {"lambda": 0.8, "L": 2, "h1": 1, "b": 1}, 2.0, 1.5)
        rows = {r.group_key: r for r in summarize([report])}
        assert rows["All"].avg_cost_fixed == report.cost_fixed
        assert rows["All"].avg_saving_pct == pytest.approx(report.savings_pct)

    def test_empty_rejected(self):
        with pytest.raises(ParameterError):
            summarize([])


class TestOutputFiles:
    @pytest.fixture
    def small_reports(self):
        grid = ExperimentGrid(model="continuous", lambdas=(0.8,), lead_times=(2,),
                              h1_values=(1.0,), b_values=(1.0, 5.0))
        return run_grid(grid)

    def test_instance_csv_layout(self, small_reports, tmp_path):
        path = tmp_path / "instances.csv"
        write_instances_csv(small_reports, path)
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == list(INSTANCE_FIELDS)
        assert rows[0][0] == "model"
        body = rows[1:]
        assert len(body) == 2
        # continuous rows leave `case` empty and carry full-precision floats
        header = rows[0]
        case_idx = header.index("case")
        cf_idx = header.index("cost_fixed")
        assert body[0][case_idx] == ""
        assert float(body[0][cf_idx]) == small_reports[0].cost_fixed

    def test_discrete_rows_leave_rates_empty(self, tmp_path):
        grid = ExperimentGrid(model="discrete", cases=(1,), lead_times=(2,),
                              h1_values=(1.0,), b_values=(1.0,))
        path = tmp_path / "instances.csv"
        write_instances_csv(run_grid(grid), path)
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert rows[0]["lambda"] == "" and rows[0]["mu"] == ""
        assert rows[0]["case"] == "1"

    def test_summary_csv_two_decimals(self, small_reports, tmp_path):
        path = tmp_path / "summary.csv"
        write_summary_csv(summarize(small_reports), path)
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == list(SUMMARY_FIELDS)
        for row in rows[1:]:
            for cell in row[1:]:
                whole, frac = cell.split(".")
                assert len(frac) == 2

    def test_json_mirrors_csv_content(self, small_reports, tmp_path):
        rows = summarize(small_reports)
        doc = results_to_json(small_reports, rows)
        assert len(doc["instances"]) == len(small_reports)
        assert doc["instances"][0]["cost_fixed"] == small_reports[0].cost_fixed
        assert doc["summary"][-1]["group_key"] == "All"
        path = tmp_path / "results.json"
        write_results_json(small_reports, rows, path)
        assert json.loads(path.read_text()) == json.loads(json.dumps(doc))
