"""Full-factorial experiment harness with CSV/JSON output.

Runs the policy cost comparison over the standard 54-instance grids (two
arrival rates or two demand/capacity cases, three lead times, three holding
cost levels, three waiting cost levels) and summarizes results per parameter
value and overall.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterator, Sequence

from .discrete import DiscreteParams, IntPmf, expected_costs_discrete
from .errors import (
    ConvergenceError,
    InstabilityError,
    ParameterError,
    ResourceLimitError,
)
from .policy import CostReport, cost_report
from .transient import ContinuousParams

INSTANCE_FIELDS = ("model", "case", "lambda", "mu", "L", "h1", "h2", "b",
                   "fixed_target", "cost_fixed", "cost_state_dep", "savings_pct")

SUMMARY_FIELDS = ("group", "avg_cost_fixed", "avg_cost_state_dep",
                  "avg_saving_pct", "max_saving_pct", "min_saving_pct")

# Demand / capacity scenarios for the periodic-review experiments: case 2
# keeps a comparable load but much wider spread on both sides.
DEMAND_CASES = {
    1: IntPmf((1, 2, 3), (0.4, 0.4, 0.2)),
    2: IntPmf((0, 1, 2, 3, 4, 5), (0.1, 0.2, 0.2, 0.25, 0.15, 0.1)),
}
CAPACITY_CASES = {
    1: IntPmf((2, 3), (0.7, 0.3)),
    2: IntPmf((2, 3, 4), (0.2, 0.45, 0.35)),
}


@dataclass(frozen=True)
class ExperimentGrid:
    """Cartesian parameter grid for one model variant."""

    model: str
    lambdas: tuple[float, ...] = ()
    mu: float = 1.0
    cases: tuple[int, ...] = ()
    lead_times: tuple[float, ...] = (2, 3, 4)
    h1_values: tuple[float, ...] = (1.0, 2.0, 4.0)
    h2: float = 1.0
    b_values: tuple[float, ...] = (1.0, 5.0, 10.0)
    epsilon: float = 1e-8
    stationary_backlog_cap: int | None = None

    def __post_init__(self) -> None:
        if self.model not in ("continuous", "discrete"):
            raise ParameterError(f"unknown model {self.model!r}")
        if self.model == "continuous" and not self.lambdas:
            raise ParameterError("continuous grid needs arrival rates")
        if self.model == "discrete" and not self.cases:
            raise ParameterError("discrete grid needs case ids")

    @classmethod
    def continuous(cls) -> "ExperimentGrid":
        # The reference tables average the stationary backlog over 0..20
        # open orders; keep that convention so results stay comparable.
        return cls(model="continuous", lambdas=(0.8, 0.9), stationary_backlog_cap=20)

    @classmethod
    def discrete(cls) -> "ExperimentGrid":
        return cls(model="discrete", cases=(1, 2))

    def __len__(self) -> int:
        outer = len(self.lambdas) if self.model == "continuous" else len(self.cases)
        return outer * len(self.lead_times) * len(self.h1_values) * len(self.b_values)

    def instances(self) -> Iterator[tuple[dict, ContinuousParams | DiscreteParams]]:
        """Yield (label, params) pairs in lexicographic grid order."""
        if self.model == "continuous":
            for lam, lead, h1, b in product(self.lambdas, self.lead_times,
                                            self.h1_values, self.b_values):
                label = {"lambda": lam, "mu": self.mu, "L": lead,
                         "h1": h1, "h2": self.h2, "b": b}
                yield label, ContinuousParams(
                    lam=lam, mu=self.mu, lead_time=lead,
                    h1=h1, h2=self.h2, b=b, epsilon=self.epsilon,
                    stationary_backlog_cap=self.stationary_backlog_cap,
                )
        else:
            for case, lead, h1, b in product(self.cases, self.lead_times,
                                             self.h1_values, self.b_values):
                label = {"case": case, "L": int(lead),
                         "h1": h1, "h2": self.h2, "b": b}
                yield label, DiscreteParams(
                    demand=DEMAND_CASES[case], capacity=CAPACITY_CASES[case],
                    lead_periods=int(lead), h1=h1, h2=self.h2, b=b,
                )


def run_grid(grid: ExperimentGrid) -> list[CostReport]:
    """Evaluate every grid instance; deterministic, in grid order."""
    reports = []
    for label, params in grid.instances():
        try:
            if grid.model == "continuous":
                report = cost_report(params)
            else:
                report = expected_costs_discrete(params)
        except (ParameterError, InstabilityError, ConvergenceError,
                ResourceLimitError) as exc:
            raise type(exc)(f"instance {label}: {exc}") from exc
        reports.append(dataclasses.replace(report, instance={**report.instance, **label}))
    return reports


@dataclass(frozen=True)
class SummaryRow:
    """Averages over the instances matching one parameter value (or all)."""

    group_key: str
    avg_cost_fixed: float
    avg_cost_state_dep: float
    avg_saving_pct: float
    max_saving_pct: float
    min_saving_pct: float


def _aggregate(group_key: str, reports: Sequence[CostReport]) -> SummaryRow:
    savings = [r.savings_pct for r in reports]
    return SummaryRow(
        group_key=group_key,
        avg_cost_fixed=sum(r.cost_fixed for r in reports) / len(reports),
        avg_cost_state_dep=sum(r.cost_state_dependent for r in reports) / len(reports),
        avg_saving_pct=sum(savings) / len(savings),
        max_saving_pct=max(savings),
        min_saving_pct=min(savings),
    )


def summarize(reports: Sequence[CostReport],
              group_fields: Sequence[str] | None = None) -> list[SummaryRow]:
    """One row per parameter value for each grouping field, plus an All row.

    Saving statistics aggregate the per-instance saving percentages, not the
    ratio of aggregated costs.
    """
    if not reports:
        raise ParameterError("cannot summarize an empty report list")
    if group_fields is None:
        group_fields = (("lambda", "L", "h1", "b") if reports[0].model == "continuous"
                        else ("case", "L", "h1", "b"))
    rows = []
    for field_name in group_fields:
        values = sorted({r.instance[field_name] for r in reports})
        for value in values:
            matching = [r for r in reports if r.instance[field_name] == value]
            rows.append(_aggregate(f"{field_name}={value:g}", matching))
    rows.append(_aggregate("All", reports))
    return rows


def _instance_row(report: CostReport) -> dict[str, object]:
    row = {name: "" for name in INSTANCE_FIELDS}
    row["model"] = report.model
    for key, value in report.instance.items():
        if key in INSTANCE_FIELDS:
            row[key] = value
    row["fixed_target"] = report.fixed_target
    row["cost_fixed"] = repr(report.cost_fixed)
    row["cost_state_dep"] = repr(report.cost_state_dependent)
    row["savings_pct"] = repr(report.savings_pct)
    return row


def write_instances_csv(reports: Sequence[CostReport], path: str | Path) -> None:
    """Per-instance results at full precision, one row per instance."""
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=INSTANCE_FIELDS)
        writer.writeheader()
        for report in reports:
            writer.writerow(_instance_row(report))


def write_summary_csv(rows: Sequence[SummaryRow], path: str | Path) -> None:
    """Grouped summary at the two-decimal precision used for reporting."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SUMMARY_FIELDS)
        for row in rows:
            writer.writerow([
                row.group_key,
                f"{row.avg_cost_fixed:.2f}",
                f"{row.avg_cost_state_dep:.2f}",
                f"{row.avg_saving_pct:.2f}",
                f"{row.max_saving_pct:.2f}",
                f"{row.min_saving_pct:.2f}",
            ])


def results_to_json(reports: Sequence[CostReport],
                    rows: Sequence[SummaryRow]) -> dict:
    """Same content as the two CSV files, as one JSON-serializable document."""
    return {
        "instances": [
            {
                **{k: v for k, v in _instance_row(r).items() if v != ""},
                "cost_fixed": r.cost_fixed,
                "cost_state_dep": r.cost_state_dependent,
                "savings_pct": r.savings_pct,
            }
            for r in reports
        ],
        "summary": [dataclasses.asdict(row) for row in rows],
    }


def write_results_json(reports: Sequence[CostReport], rows: Sequence[SummaryRow],
                       path: str | Path) -> None:
    with open(path, "w") as handle:
        json.dump(results_to_json(reports, rows), handle, indent=2)
        handle.write("\n")
