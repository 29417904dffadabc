"""Periodic-review variant with random per-period demand and capacity.

Each period the in-house facility produces min(backlog + demand, capacity);
leftover orders carry over as backlog.  The lead-time production
distribution, the stationary backlog law, the state-dependent order-up-to
table, and the policy cost comparison all follow from that one transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    ConvergenceError,
    InstabilityError,
    ParameterError,
    ResourceLimitError,
)
from .policy import CostReport, PolicyTable, _savings_pct, newsvendor_cost, newsvendor_target
from .transient import ProductionPmf

# Safety cap on the (backlog x produced) grid used for lead-time propagation.
_MAX_GRID_CELLS = 4_000_000

# Mass this small is dropped from the tail of the iterated backlog law;
# renormalization keeps the pmf exact to well below every reported digit.
_TRIM_MASS = 1e-30


@dataclass(frozen=True)
class IntPmf:
    """Probability mass function on a finite set of non-negative integers."""

    values: tuple[int, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.probs) or not self.values:
            raise ParameterError("pmf needs matching, non-empty values and probabilities")
        if any(v < 0 or v != int(v) for v in self.values):
            raise ParameterError("pmf values must be non-negative integers")
        if len(set(self.values)) != len(self.values):
            raise ParameterError("pmf values must be distinct")
        if any(p < 0 for p in self.probs):
            raise ParameterError("probabilities must be non-negative")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > 1e-9:
            raise ParameterError(f"probabilities sum to {total!r}, expected 1")
        order = sorted(range(len(self.values)), key=lambda idx: self.values[idx])
        object.__setattr__(self, "values",
                           tuple(int(self.values[idx]) for idx in order))
        object.__setattr__(self, "probs",
                           tuple(self.probs[idx] / total for idx in order))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "IntPmf":
        pairs = list(pairs)
        if not pairs:
            raise ParameterError("pmf needs at least one (value, probability) pair")
        return cls(tuple(v for v, _ in pairs), tuple(p for _, p in pairs))

    def items(self) -> Iterator[tuple[int, float]]:
        return zip(self.values, self.probs)

    def mean(self) -> float:
        return math.fsum(v * p for v, p in self.items())

    @property
    def max_value(self) -> int:
        return self.values[-1]

    def as_dense(self) -> np.ndarray:
        dense = np.zeros(self.max_value + 1)
        for v, p in self.items():
            dense[v] = p
        return dense


@dataclass(frozen=True)
class DiscreteParams:
    """Instance of the periodic-review assembly model."""

    demand: IntPmf
    capacity: IntPmf
    lead_periods: int
    h1: float
    h2: float
    b: float
    stabilization_tol: float = 1e-10
    max_periods: int = 10 ** 6

    def __post_init__(self) -> None:
        if self.lead_periods < 0 or self.lead_periods != int(self.lead_periods):
            raise ParameterError("lead_periods must be a non-negative integer")
        if self.h1 < 0 or self.h2 < 0 or self.b < 0:
            raise ParameterError("cost rates must be non-negative")
        if self.h1 + self.h2 + self.b <= 0:
            raise ParameterError("at least one cost rate must be positive")
        if not 0 < self.stabilization_tol < 1:
            raise ParameterError("stabilization_tol must lie in (0, 1)")
        if self.max_periods < 1:
            raise ParameterError("max_periods must be positive")

    @property
    def underage(self) -> float:
        return self.b + self.h1

    @property
    def overage(self) -> float:
        return self.h2

    def require_stable(self) -> None:
        # Deterministic, exactly balanced demand and capacity keep the backlog
        # frozen, so only the non-degenerate boundary case is unstable.
        d_mean, c_mean = self.demand.mean(), self.capacity.mean()
        degenerate = len(self.demand.values) == 1 and len(self.capacity.values) == 1
        if d_mean > c_mean or (d_mean == c_mean and not degenerate):
            raise InstabilityError(
                "mean demand must stay below mean capacity for a stationary backlog "
                f"(E[D]={d_mean:.6g}, E[C]={c_mean:.6g})"
            )


def period_transition(i: int, d: int, c: int) -> tuple[int, int]:
    """Backlog carried into the next period and units produced this period.

    Production is min(i + d, c); whatever capacity cannot cover stays in the
    backlog, so i + d = carried + produced always holds.
    """
    if i < 0 or d < 0 or c < 0:
        raise ParameterError("backlog, demand, and capacity must be non-negative")
    produced = min(i + d, c)
    return i + d - produced, produced


def production_pmf_discrete(i0: int, params: DiscreteParams) -> ProductionPmf:
    """Distribution of units produced over the lead time, given backlog ``i0``.

    Exact propagation of (backlog, produced) weights over ``lead_periods``
    periods with demand and capacity drawn independently each period.
    """
    if i0 < 0 or i0 != int(i0):
        raise ParameterError("initial backlog must be a non-negative integer")
    i0 = int(i0)
    lead = params.lead_periods
    if lead == 0:
        return ProductionPmf(np.array([1.0]), conditioning_backlog=i0)
    d_max = params.demand.max_value
    c_max = params.capacity.max_value
    # Once the backlog cannot drain within the lead time, production equals
    # the capacity draws and the start level stops mattering.
    start = min(i0, lead * c_max)
    n_rows = start + lead * d_max + 1
    n_cols = lead * c_max + 1
    if n_rows * n_cols > _MAX_GRID_CELLS:
        raise ResourceLimitError(
            f"lead-time propagation grid of {n_rows}x{n_cols} cells exceeds the safety cap"
        )
    dist = np.zeros((n_rows, n_cols))
    dist[start, 0] = 1.0
    for _ in range(lead):
        nxt = np.zeros_like(dist)
        for d, pd in params.demand.items():
            for c, pc in params.capacity.items():
                w = pd * pc
                lo = max(c - d, 0)  # rows below produce everything they hold
                for i in range(min(lo, n_rows)):
                    made = i + d
                    nxt[0, made:] += w * dist[i, :n_cols - made]
                if lo < n_rows:
                    dest_lo = max(d - c, 0)
                    # Rows that would shift past the grid carry no mass yet.
                    src = dist[lo:lo + n_rows - dest_lo, :n_cols - c]
                    nxt[dest_lo:dest_lo + src.shape[0], c:] += w * src
        dist = nxt
    return ProductionPmf(dist.sum(axis=0), conditioning_backlog=i0)


def _lindley_step(pi: np.ndarray, params: DiscreteParams) -> np.ndarray:
    """One period of the backlog recursion i -> max(i + D - C, 0)."""
    d_max = params.demand.max_value
    n = len(pi)
    out = np.zeros(n + d_max)
    for d, pd in params.demand.items():
        for c, pc in params.capacity.items():
            w = pd * pc
            shift = d - c
            if shift >= 0:
                out[shift:shift + n] += w * pi
            else:
                cut = min(-shift, n)
                out[0] += w * pi[:cut].sum()
                if cut < n:
                    out[:n - cut] += w * pi[cut:]
    last = len(out)
    while last > 1 and out[last - 1] < _TRIM_MASS:
        last -= 1
    out = out[:last]
    return out / out.sum()


def backlog_distribution(params: DiscreteParams) -> IntPmf:
    """Stationary distribution of the end-of-period backlog.

    Iterates the backlog recursion from an empty system until successive
    distributions agree within ``stabilization_tol`` in total variation.
    """
    params.require_stable()
    pi = np.array([1.0])
    for _ in range(params.max_periods):
        nxt = _lindley_step(pi, params)
        width = max(len(pi), len(nxt))
        a = np.zeros(width)
        a[:len(pi)] = pi
        b = np.zeros(width)
        b[:len(nxt)] = nxt
        tv = 0.5 * np.abs(a - b).sum()
        pi = nxt
        if tv < params.stabilization_tol:
            return IntPmf(tuple(range(len(pi))), tuple(pi))
    raise ConvergenceError(
        f"backlog distribution did not stabilize within {params.max_periods} periods"
    )


def pmf_saturation_backlog(params: DiscreteParams) -> int:
    """Smallest backlog from which the lead-time production distribution is
    backlog-invariant (within 1e-12)."""
    if params.lead_periods == 0:
        return 0
    cap = params.lead_periods * params.capacity.max_value
    sat = production_pmf_discrete(cap, params).probs
    for i in range(cap + 1):
        if np.max(np.abs(production_pmf_discrete(i, params).probs - sat)) <= 1e-12:
            return i
    return cap


def policy_table_discrete(params: DiscreteParams) -> PolicyTable:
    """State-dependent order-up-to table for the periodic-review model."""
    underage, overage = params.underage, params.overage
    i_top = params.lead_periods * params.capacity.max_value
    sat_target = newsvendor_target(production_pmf_discrete(i_top, params),
                                   underage, overage)
    targets: list[int] = []
    for i in range(i_top + 1):
        t = newsvendor_target(production_pmf_discrete(i, params),
                              underage, overage)
        targets.append(t)
        if t == sat_target:
            return PolicyTable(tuple(targets), sat_target, "discrete")
    raise AssertionError("targets did not reach the saturated value")


def lead_time_demand_pmf_discrete(params: DiscreteParams) -> ProductionPmf:
    """Distribution of total demand over the lead time."""
    dense = params.demand.as_dense()
    out = np.array([1.0])
    for _ in range(params.lead_periods):
        out = np.convolve(out, dense)
    return ProductionPmf(out, conditioning_backlog=None)


def unconditional_production_pmf_discrete(params: DiscreteParams) -> ProductionPmf:
    """Lead-time production distribution with the backlog in steady state."""
    pi = backlog_distribution(params)
    i_pm = pmf_saturation_backlog(params)
    rows = [production_pmf_discrete(i, params).probs for i in range(i_pm + 1)]
    mixture = np.zeros(len(rows[0]))
    for i, w in pi.items():
        mixture += w * rows[min(i, i_pm)]
    return ProductionPmf(mixture / mixture.sum(), conditioning_backlog=None)


def expected_costs_discrete(params: DiscreteParams) -> CostReport:
    """Expected per-period costs of the state-dependent and fixed policies.

    The backlog is weighted by its stationary law.  The fixed policy orders
    up to the newsvendor solution against lead-time demand (all that is
    known without watching the queue); its cost, like the state-dependent
    one, is evaluated under the true lead-time production distribution.  In
    the continuous-time model the two distributions coincide, so this is
    the same construction carried over.
    """
    pi = backlog_distribution(params)
    table = policy_table_discrete(params)
    i_pm = pmf_saturation_backlog(params)
    underage, overage = params.underage, params.overage

    rows = [production_pmf_discrete(i, params) for i in range(i_pm + 1)]
    width = len(rows[0])
    mixture = np.zeros(width)
    cost_sd = 0.0
    for i, w in pi.items():
        pmf_i = rows[min(i, i_pm)]
        mixture += w * pmf_i.probs
        cost_sd += w * newsvendor_cost(pmf_i, table.target(i), underage, overage)

    mixture_pmf = ProductionPmf(mixture / mixture.sum(), conditioning_backlog=None)
    fixed_target = newsvendor_target(lead_time_demand_pmf_discrete(params), underage, overage)
    cost_fx = newsvendor_cost(mixture_pmf, fixed_target, underage, overage)

    instance = {
        "L": params.lead_periods,
        "h1": params.h1,
        "h2": params.h2,
        "b": params.b,
    }
    return CostReport(
        model="discrete",
        instance=instance,
        fixed_target=fixed_target,
        cost_fixed=cost_fx,
        cost_state_dependent=cost_sd,
        savings_pct=_savings_pct(cost_fx, cost_sd),
    )
