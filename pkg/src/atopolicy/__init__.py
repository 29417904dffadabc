"""State-dependent base-stock policies for two-module assemble-to-order systems.

One module of the end product is made to order in a capacitated facility,
the other is bought with a fixed lead time.  The library computes the
order-up-to table for the bought module as a function of the in-house
backlog, evaluates expected costs against a fixed base-stock policy, and
validates everything with a discrete-event simulator.
"""

from .discrete import (
    DiscreteParams,
    IntPmf,
    backlog_distribution,
    expected_costs_discrete,
    lead_time_demand_pmf_discrete,
    period_transition,
    pmf_saturation_backlog,
    policy_table_discrete,
    production_pmf_discrete,
    unconditional_production_pmf_discrete,
)
from .errors import (
    ConvergenceError,
    InstabilityError,
    ParameterError,
    ResourceLimitError,
)
from .experiments import (
    CAPACITY_CASES,
    DEMAND_CASES,
    ExperimentGrid,
    SummaryRow,
    results_to_json,
    run_grid,
    summarize,
    write_instances_csv,
    write_results_json,
    write_summary_csv,
)
from .policy import (
    CostReport,
    PolicyTable,
    cost_report,
    expected_cost_fixed,
    expected_cost_state_dependent,
    lead_time_demand_pmf,
    fractile_targets,
    newsvendor_cost,
    newsvendor_target,
    policy_table,
)
from .simulate import (
    CostEstimate,
    SystemState,
    default_warmup_continuous,
    default_warmup_discrete,
    simulate_continuous,
    simulate_discrete,
)
from .transient import (
    ContinuousParams,
    ProductionPmf,
    critical_fractile,
    poisson_pmf,
    production_pmf,
    production_pmf_given_transitions,
    saturation_backlog,
    transition_upper_bound,
    unconditional_production_pmf,
    uniformized_rates,
)

__version__ = "0.1.0"

__all__ = [
    "CAPACITY_CASES",
    "ContinuousParams",
    "ConvergenceError",
    "CostEstimate",
    "CostReport",
    "DEMAND_CASES",
    "DiscreteParams",
    "ExperimentGrid",
    "InstabilityError",
    "IntPmf",
    "ParameterError",
    "PolicyTable",
    "ProductionPmf",
    "ResourceLimitError",
    "SummaryRow",
    "SystemState",
    "backlog_distribution",
    "cost_report",
    "critical_fractile",
    "default_warmup_continuous",
    "default_warmup_discrete",
    "expected_cost_fixed",
    "expected_cost_state_dependent",
    "expected_costs_discrete",
    "lead_time_demand_pmf",
    "lead_time_demand_pmf_discrete",
    "fractile_targets",
    "newsvendor_cost",
    "newsvendor_target",
    "period_transition",
    "pmf_saturation_backlog",
    "policy_table",
    "policy_table_discrete",
    "poisson_pmf",
    "production_pmf",
    "production_pmf_discrete",
    "unconditional_production_pmf_discrete",
    "production_pmf_given_transitions",
    "results_to_json",
    "run_grid",
    "saturation_backlog",
    "simulate_continuous",
    "simulate_discrete",
    "summarize",
    "transition_upper_bound",
    "unconditional_production_pmf",
    "uniformized_rates",
    "write_instances_csv",
    "write_results_json",
    "write_summary_csv",
]
