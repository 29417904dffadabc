"""Simulation runs validate the analytic cost formulas and vice versa."""

from __future__ import annotations

import pytest

from atopolicy import (
    CAPACITY_CASES,
    DEMAND_CASES,
    ContinuousParams,
    DiscreteParams,
    InstabilityError,
    IntPmf,
    ParameterError,
    PolicyTable,
    expected_cost_fixed,
    expected_cost_state_dependent,
    expected_costs_discrete,
    policy_table,
    policy_table_discrete,
    simulate_continuous,
    simulate_discrete,
)
from atopolicy.simulate import _simulate_continuous_detailed

HORIZON = 200_000.0
PERIODS = 400_000


class TestContinuousSimulation:
    def test_state_dependent_matches_analytic(self, base_instance):
        table = policy_table(base_instance)
        analytic = expected_cost_state_dependent(base_instance, table)
        est = simulate_continuous(base_instance, table, horizon=HORIZON, seed=11)
        assert abs(est.mean - analytic) <= 3 * est.stderr

    def test_fixed_policy_matches_analytic(self, base_instance):
        target, analytic = expected_cost_fixed(base_instance)
        assert target == 6
        table = PolicyTable.constant(target, "continuous")
        est = simulate_continuous(base_instance, table, horizon=HORIZON, seed=12)
        assert abs(est.mean - analytic) <= 3 * est.stderr

    def test_backlog_mean_sanity(self, base_instance):
        table = policy_table(base_instance)
        _, diag = _simulate_continuous_detailed(base_instance, table,
                                                horizon=HORIZON, seed=13)
        rho = base_instance.rho
        expected = rho / (1 - rho)
        assert abs(diag["avg_backlog"] - expected) <= 3 * diag["avg_backlog_stderr"]

    def test_zero_lead_time_costs_nothing(self):
        params = ContinuousParams(lam=1e-6, mu=1.0, lead_time=0.0, h1=4, h2=1, b=5)
        table = policy_table(params)
        est = simulate_continuous(params, table, horizon=500.0, warmup=0.0, seed=1)
        assert est.mean == 0.0

    def test_deterministic_for_fixed_seed(self, base_instance):
        table = policy_table(base_instance)
        one = simulate_continuous(base_instance, table, horizon=5_000.0, seed=7)
        two = simulate_continuous(base_instance, table, horizon=5_000.0, seed=7)
        assert one == two

    def test_unstable_parameters_rejected(self):
        params = ContinuousParams(lam=1.2, mu=1.0, lead_time=2, h1=1, h2=1, b=1)
        with pytest.raises(InstabilityError):
            simulate_continuous(params, PolicyTable.constant(3, "continuous"),
                                horizon=100.0)

    def test_bad_horizon_rejected(self, base_instance):
        table = policy_table(base_instance)
        with pytest.raises(ParameterError):
            simulate_continuous(base_instance, table, horizon=10.0, warmup=10.0)


class TestDiscreteSimulation:
    @pytest.fixture
    def case1(self) -> DiscreteParams:
        return DiscreteParams(demand=DEMAND_CASES[1], capacity=CAPACITY_CASES[1],
                              lead_periods=2, h1=4, h2=1, b=5)

    def test_state_dependent_matches_analytic(self, case1):
        table = policy_table_discrete(case1)
        report = expected_costs_discrete(case1)
        est = simulate_discrete(case1, table, horizon_periods=PERIODS, seed=21)
        assert abs(est.mean - report.cost_state_dependent) <= 3 * est.stderr

    def test_fixed_policy_matches_analytic(self):
        params = DiscreteParams(demand=DEMAND_CASES[2], capacity=CAPACITY_CASES[2],
                                lead_periods=3, h1=1, h2=1, b=1)
        report = expected_costs_discrete(params)
        table = PolicyTable.constant(report.fixed_target, "discrete")
        est = simulate_discrete(params, table, horizon_periods=PERIODS, seed=22)
        assert abs(est.mean - report.cost_fixed) <= 3 * est.stderr

    def test_deterministic_demand_and_capacity(self):
        params = DiscreteParams(demand=IntPmf((2,), (1.0,)),
                                capacity=IntPmf((2,), (1.0,)),
                                lead_periods=0, h1=1, h2=1, b=1)
        table = policy_table_discrete(params)
        est = simulate_discrete(params, table, horizon_periods=500,
                                warmup_periods=0, seed=1)
        assert est.mean == 0.0

    def test_deterministic_for_fixed_seed(self, case1):
        table = policy_table_discrete(case1)
        one = simulate_discrete(case1, table, horizon_periods=20_000, seed=3)
        two = simulate_discrete(case1, table, horizon_periods=20_000, seed=3)
        assert one == two

    def test_bad_horizon_rejected(self, case1):
        table = policy_table_discrete(case1)
        with pytest.raises(ParameterError):
            simulate_discrete(case1, table, horizon_periods=10, warmup_periods=10)
