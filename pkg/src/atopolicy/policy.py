"""Order-up-to policies and expected costs for the bought module.

The order target for the bought module is a newsvendor quantile of the
lead-time production distribution of the in-house module, so the target is a
function of the backlog observed when ordering.  This module builds that
target table for the continuous-time model and evaluates the expected cost
of the state-dependent policy against a fixed order-up-to level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ParameterError
from .transient import (
    ContinuousParams,
    ProductionPmf,
    _conditional_production_matrix,
    _geometric_cut,
    _poisson_numeric_cap,
    _poisson_weights,
    production_pmf,
    saturation_backlog,
    stationary_backlog_split,
)

_COST_SLACK = 1e-12  # tolerated float noise when comparing policy costs


@dataclass(frozen=True)
class PolicyTable:
    """Order-up-to targets for the bought module, indexed by backlog.

    ``targets[i]`` applies to backlog i; beyond the last explicit entry the
    target stays at ``saturation_value``.  Targets are non-decreasing and
    grow by at most one per extra waiting order, which is exactly what makes
    the policy implementable without negative orders.
    """

    targets: tuple[int, ...]
    saturation_value: int
    model_tag: str

    def __post_init__(self) -> None:
        if self.model_tag not in ("continuous", "discrete"):
            raise ParameterError(f"unknown model tag {self.model_tag!r}")
        if not self.targets:
            raise ParameterError("policy table needs at least one target")
        if any(t < 0 for t in self.targets):
            raise ParameterError("targets must be non-negative")
        steps = np.diff(self.targets)
        if np.any(steps < 0):
            raise ParameterError("targets must be non-decreasing in the backlog")
        if np.any(steps > 1):
            raise ParameterError("targets may grow by at most 1 per extra order")
        if self.targets[-1] != self.saturation_value:
            raise ParameterError("last explicit target must equal the saturation value")

    @property
    def i_sat(self) -> int:
        """Backlog at and beyond which the target equals the saturation value."""
        return len(self.targets) - 1

    def target(self, backlog: int) -> int:
        if backlog < 0:
            raise ParameterError("backlog must be non-negative")
        if backlog < len(self.targets):
            return self.targets[backlog]
        return self.saturation_value

    @classmethod
    def constant(cls, value: int, model_tag: str) -> "PolicyTable":
        """Fixed base-stock policy: one target for every backlog."""
        return cls((value,), value, model_tag)


@dataclass(frozen=True)
class CostReport:
    """Expected costs of the fixed and state-dependent policies for one instance."""

    model: str
    instance: dict[str, Any]
    fixed_target: int
    cost_fixed: float
    cost_state_dependent: float
    savings_pct: float

    def __post_init__(self) -> None:
        if self.cost_state_dependent > self.cost_fixed + _COST_SLACK:
            raise ParameterError(
                "state-dependent policy must not cost more than the fixed policy "
                f"({self.cost_state_dependent!r} > {self.cost_fixed!r})"
            )
        if not 0.0 <= self.savings_pct <= 100.0:
            raise ParameterError("savings percentage must lie in [0, 100]")


def _savings_pct(cost_fixed: float, cost_state_dependent: float) -> float:
    if cost_fixed <= 0:
        return 0.0
    return max(0.0, 100.0 * (cost_fixed - cost_state_dependent) / cost_fixed)


def _expected_cost_curve(probs: np.ndarray, underage: float,
                         overage: float) -> np.ndarray:
    """Expected newsvendor cost for every candidate target 0..len(probs)-1."""
    j = np.arange(len(probs))
    diff = j[np.newaxis, :] - j[:, np.newaxis]  # diff[s, j] = j - s
    return (underage * np.clip(diff, 0, None) @ probs
            + overage * np.clip(-diff, 0, None) @ probs)


def newsvendor_cost(pmf: ProductionPmf, target: int, underage: float,
                    overage: float) -> float:
    """Expected cost of covering the pmf with ``target`` units on order."""
    if target < 0:
        raise ParameterError("target must be non-negative")
    j = np.arange(len(pmf.probs))
    return float((underage * np.clip(j - target, 0, None)
                  + overage * np.clip(target - j, 0, None)) @ pmf.probs)


def newsvendor_target(pmf: ProductionPmf, underage: float,
                      overage: float) -> int:
    """Smallest expected-cost-minimizing order-up-to level for the pmf.

    Scans every candidate level on the pmf support; ties break toward the
    smaller level.
    """
    if underage < 0 or overage < 0 or underage + overage <= 0:
        raise ParameterError("underage + overage must be positive")
    curve = _expected_cost_curve(pmf.probs, underage, overage)
    return int(np.argmin(curve))


def fractile_targets(pmf: ProductionPmf, fractile: float) -> tuple[int, int]:
    """The two quantile readings of the critical-fractile rule (diagnostic).

    Returns ``(weak, strict)`` where ``weak`` is the smallest S with
    P(J <= S) >= fractile and ``strict`` the smallest S with
    P(J < S) >= fractile.  ``weak`` coincides with the cost-minimizing
    target; ``strict`` can exceed it by one.
    """
    if not 0 <= fractile <= 1:
        raise ParameterError("fractile must lie in [0, 1]")
    cdf = pmf.cdf()
    n = len(cdf)
    first_covering = int(np.searchsorted(cdf, fractile))
    weak = min(first_covering, n - 1)
    strict = 0 if fractile == 0 else min(first_covering + 1, n - 1)
    return weak, strict


def policy_table(params: ContinuousParams) -> PolicyTable:
    """State-dependent order-up-to table for the continuous-time model.

    Explicit targets are listed until they reach the saturated value, the
    target under a backlog so large that the queue cannot idle during the
    lead time; monotonicity makes every later target identical.
    """
    underage, overage = params.underage, params.overage
    i_sat = saturation_backlog(params)
    sat_target = newsvendor_target(production_pmf(i_sat, params),
                                   underage, overage)
    targets: list[int] = []
    for i in range(i_sat + 1):
        t = newsvendor_target(production_pmf(i, params), underage, overage)
        targets.append(t)
        if t == sat_target:
            return PolicyTable(tuple(targets), sat_target, "continuous")
    raise AssertionError("targets did not reach the saturated value")


def expected_cost_state_dependent(params: ContinuousParams,
                                  table: PolicyTable) -> float:
    """Long-run expected cost rate of a state-dependent order-up-to table.

    Averages the per-backlog newsvendor cost over the geometric stationary
    backlog law.  By default the geometric tail closes exactly at the
    saturation backlog, where the conditional distributions stop changing;
    with ``params.stationary_backlog_cap`` set, only backlogs up to the cap
    are summed and the remaining tail mass is dropped, reproducing the
    convention of the bundled reference tables.
    """
    params.require_stable()
    i_sat = saturation_backlog(params)
    underage, overage = params.underage, params.overage
    cap = params.stationary_backlog_cap

    i_top = min(i_sat, _geometric_cut(params.rho, params.queue_tail_mass)
                if cap is None else cap)
    matrix = _conditional_production_matrix(params, i_top)
    j = np.arange(matrix.shape[1])

    def state_cost(i: int) -> float:
        t = table.target(i)
        loss = underage * np.clip(j - t, 0, None) + overage * np.clip(t - j, 0, None)
        return float(matrix[min(i, i_top)] @ loss)

    rho = params.rho
    if cap is None:
        weights, tail = stationary_backlog_split(params, i_top)
        total = sum(w * state_cost(i) for i, w in enumerate(weights))
        return float(total + tail * state_cost(i_top))
    return float(sum((1.0 - rho) * rho ** i * state_cost(i) for i in range(cap + 1)))


def lead_time_demand_pmf(params: ContinuousParams) -> ProductionPmf:
    """Distribution of demand (and, in steady state, of production) over one
    lead time, ignoring the queue state.

    The stationary output of the queue over a window of length L is Poisson
    with mean lam * L, identical to the demand over the window; truncated
    where the tail is numerically negligible (always within
    ``params.epsilon``) and renormalized.
    """
    rate = params.lam * params.lead_time
    if rate == 0:
        return ProductionPmf(np.array([1.0]), conditioning_backlog=None)
    k_top = _poisson_numeric_cap(rate)
    w = _poisson_weights(rate, k_top)
    return ProductionPmf(w / w.sum(), conditioning_backlog=None)


def expected_cost_fixed(params: ContinuousParams) -> tuple[int, float]:
    """Best fixed order-up-to level and its expected cost rate."""
    pmf = lead_time_demand_pmf(params)
    target = newsvendor_target(pmf, params.underage, params.overage)
    cost = newsvendor_cost(pmf, target, params.underage, params.overage)
    return target, cost


def cost_report(params: ContinuousParams) -> CostReport:
    """Compare the state-dependent policy against the best fixed policy."""
    table = policy_table(params)
    cost_sd = expected_cost_state_dependent(params, table)
    fixed_target, cost_fx = expected_cost_fixed(params)
    instance = {
        "lambda": params.lam,
        "mu": params.mu,
        "L": params.lead_time,
        "h1": params.h1,
        "h2": params.h2,
        "b": params.b,
    }
    return CostReport(
        model="continuous",
        instance=instance,
        fixed_target=fixed_target,
        cost_fixed=cost_fx,
        cost_state_dependent=cost_sd,
        savings_pct=_savings_pct(cost_fx, cost_sd),
    )
