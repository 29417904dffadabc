"""Randomized structural properties of tables, costs, and distributions.

The full-size randomized sweeps (200+ parameter sets per model) run in the
acceptance suite; this module keeps a quicker randomized regression of the
same properties.
"""

from __future__ import annotations

import numpy as np
import pytest

from conftest import random_continuous_params, random_discrete_params

from atopolicy import (
    cost_report,
    expected_costs_discrete,
    policy_table,
    policy_table_discrete,
    production_pmf,
    production_pmf_discrete,
    saturation_backlog,
)

QUICK_COUNT = 40


def check_table_shape(table):
    steps = np.diff(table.targets)
    assert np.all(steps >= 0), f"targets decrease: {table.targets}"
    assert np.all(steps <= 1), f"target jumps by more than 1: {table.targets}"


def check_dominance(cdfs, tol=1e-10):
    for lo, hi in zip(cdfs, cdfs[1:]):
        assert np.all(hi <= lo + tol)
        assert np.all(hi[1:] >= lo[:-1] - tol)


@pytest.mark.parametrize("seed", range(QUICK_COUNT))
def test_continuous_instance_properties(seed):
    rng = np.random.default_rng(10_000 + seed)
    params = random_continuous_params(rng)
    table = policy_table(params)
    check_table_shape(table)
    report = cost_report(params)
    assert report.cost_state_dependent <= report.cost_fixed + 1e-12
    assert 0.0 <= report.savings_pct <= 100.0


@pytest.mark.parametrize("seed", range(QUICK_COUNT))
def test_discrete_instance_properties(seed):
    rng = np.random.default_rng(20_000 + seed)
    params = random_discrete_params(rng)
    table = policy_table_discrete(params)
    check_table_shape(table)
    report = expected_costs_discrete(params)
    assert report.cost_state_dependent <= report.cost_fixed + 1e-12
    assert 0.0 <= report.savings_pct <= 100.0


@pytest.mark.parametrize("seed", range(8))
def test_continuous_conditional_dominance(seed):
    rng = np.random.default_rng(30_000 + seed)
    params = random_continuous_params(rng)
    top = min(saturation_backlog(params), 20) + 1
    check_dominance([production_pmf(i, params).cdf() for i in range(top + 1)])


@pytest.mark.parametrize("seed", range(8))
def test_discrete_conditional_dominance(seed):
    rng = np.random.default_rng(40_000 + seed)
    params = random_discrete_params(rng)
    top = params.lead_periods * params.capacity.max_value + 1
    check_dominance([production_pmf_discrete(i, params).cdf() for i in range(top + 1)])
