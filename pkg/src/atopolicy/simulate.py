"""Simulation of the assembly system under an order-up-to policy.

Both simulators track the physical system directly: orders queue for the
in-house facility, finished units wait for their bought counterpart,
assembly happens the moment both modules are present, and the bought module
is re-ordered up to the policy target after every state change.  The
resulting long-run average of holding and waiting costs validates the
analytic cost formulas, which never see any of this machinery.
"""

from __future__ import annotations

import bisect
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .discrete import DiscreteParams, IntPmf
from .errors import ParameterError
from .policy import PolicyTable
from .transient import ContinuousParams


@dataclass
class SystemState:
    """Physical state of the assembly system.

    ``in_transit_m2`` holds the delivery times of ordered-but-undelivered
    bought modules, oldest first.
    """

    backlog: int = 0
    finished_m1: int = 0
    on_hand_m2: int = 0
    in_transit_m2: deque = field(default_factory=deque)
    clock: float = 0.0

    @property
    def inventory_position(self) -> int:
        return self.on_hand_m2 + len(self.in_transit_m2) - self.finished_m1


@dataclass(frozen=True)
class CostEstimate:
    """Batch-means estimate of the long-run average cost rate."""

    mean: float
    stderr: float
    horizon: float
    warmup: float
    seed: int
    batches: int

    def __post_init__(self) -> None:
        if self.mean < 0 or self.stderr < 0:
            raise ParameterError("cost estimates cannot be negative")


def default_warmup_continuous(params: ContinuousParams) -> float:
    return max(10.0 * params.lead_time, 10.0 / (params.mu - params.lam))


def default_warmup_discrete(params: DiscreteParams) -> int:
    return 50 * params.lead_periods


def _exp_draw(rng: np.random.Generator, rate: float) -> float:
    # Inverse transform; log1p keeps u == 0 safe.
    return -math.log1p(-rng.random()) / rate


class _BatchAccumulator:
    """Integrates a piecewise-constant cost rate into equal-width batch bins."""

    def __init__(self, warmup: float, horizon: float, batches: int):
        self.warmup = warmup
        self.horizon = horizon
        self.batches = batches
        self.width = (horizon - warmup) / batches
        self.bins = np.zeros(batches)

    def add(self, t0: float, t1: float, rate: float) -> None:
        if rate == 0.0:
            return
        t0 = max(t0, self.warmup)
        t1 = min(t1, self.horizon)
        while t0 < t1:
            idx = min(int((t0 - self.warmup) / self.width), self.batches - 1)
            edge = min(self.warmup + (idx + 1) * self.width, t1)
            self.bins[idx] += rate * (edge - t0)
            t0 = edge

    def estimate(self, seed: int) -> CostEstimate:
        means = self.bins / self.width
        stderr = float(np.std(means, ddof=1) / math.sqrt(self.batches))
        return CostEstimate(
            mean=float(self.bins.sum() / (self.horizon - self.warmup)),
            stderr=stderr,
            horizon=self.horizon,
            warmup=self.warmup,
            seed=seed,
            batches=self.batches,
        )


def _simulate_continuous_detailed(
    params: ContinuousParams,
    table: PolicyTable,
    horizon: float,
    warmup: float | None = None,
    seed: int = 0,
    batches: int = 20,
) -> tuple[CostEstimate, dict]:
    params.require_stable()
    if warmup is None:
        warmup = default_warmup_continuous(params)
    if not 0 <= warmup < horizon:
        raise ParameterError("need horizon > warmup >= 0")
    rng = np.random.default_rng(seed)
    lam, mu, lead = params.lam, params.mu, params.lead_time
    cost_m1, cost_m2 = params.underage, params.overage

    state = SystemState(on_hand_m2=table.target(0))
    cost_bins = _BatchAccumulator(warmup, horizon, batches)
    backlog_bins = _BatchAccumulator(warmup, horizon, batches)

    backlog = state.backlog
    i1 = state.finished_m1
    i2 = state.on_hand_m2
    deliveries = state.in_transit_m2
    t = 0.0
    next_arrival = _exp_draw(rng, lam)
    next_service = math.inf
    cost_rate = cost_m1 * i1 + cost_m2 * i2

    while True:
        t_delivery = deliveries[0] if deliveries else math.inf
        t_next = min(next_arrival, next_service, t_delivery)
        if t_next >= horizon:
            cost_bins.add(t, horizon, cost_rate)
            backlog_bins.add(t, horizon, backlog)
            break
        cost_bins.add(t, t_next, cost_rate)
        backlog_bins.add(t, t_next, backlog)
        t = t_next

        if t_delivery <= next_arrival and t_delivery <= next_service:
            deliveries.popleft()
            i2 += 1
        elif next_service <= next_arrival:
            backlog -= 1
            i1 += 1
            next_service = t + _exp_draw(rng, mu) if backlog > 0 else math.inf
        else:
            if backlog == 0:
                next_service = t + _exp_draw(rng, mu)
            backlog += 1
            next_arrival = t + _exp_draw(rng, lam)

        assembled = i1 if i1 < i2 else i2
        i1 -= assembled
        i2 -= assembled
        order = table.target(backlog) - (i2 + len(deliveries) - i1)
        if order < 0 or order > 1:
            raise AssertionError(
                f"policy requested an order of size {order}; unit orders expected"
            )
        if order:
            deliveries.append(t + lead)
        cost_rate = cost_m1 * i1 + cost_m2 * i2

    state.backlog, state.finished_m1, state.on_hand_m2 = backlog, i1, i2
    state.clock = horizon
    backlog_est = backlog_bins.estimate(seed)
    diagnostics = {
        "avg_backlog": backlog_est.mean,
        "avg_backlog_stderr": backlog_est.stderr,
        "final_state": state,
    }
    return cost_bins.estimate(seed), diagnostics


def simulate_continuous(
    params: ContinuousParams,
    table: PolicyTable,
    horizon: float,
    warmup: float | None = None,
    seed: int = 0,
    batches: int = 20,
) -> CostEstimate:
    """Discrete-event simulation of the continuous-time model.

    Events are order arrivals, production completions, and deliveries of the
    bought module; costs integrate piecewise-constant between events and are
    averaged over ``batches`` equal time slices of [warmup, horizon].
    Reproducible for a fixed seed.
    """
    estimate, _ = _simulate_continuous_detailed(
        params, table, horizon, warmup=warmup, seed=seed, batches=batches
    )
    return estimate


def _pmf_sampler(pmf: IntPmf):
    values = list(pmf.values)
    cdf = np.cumsum(pmf.probs).tolist()
    cdf[-1] = 1.0

    def draw(u: float) -> int:
        return values[bisect.bisect_left(cdf, u)]

    return draw


def simulate_discrete(
    params: DiscreteParams,
    table: PolicyTable,
    horizon_periods: int,
    warmup_periods: int | None = None,
    seed: int = 0,
    batches: int = 20,
) -> CostEstimate:
    """Period-driven simulation of the periodic-review model.

    Per period: receive due deliveries, observe demand, produce up to the
    capacity draw, assemble, order up to the policy target (a zero lead time
    delivers immediately), then accrue end-of-period holding and waiting
    costs.
    """
    params.require_stable()
    if warmup_periods is None:
        warmup_periods = default_warmup_discrete(params)
    if not 0 <= warmup_periods < horizon_periods:
        raise ParameterError("need horizon_periods > warmup_periods >= 0")
    rng = np.random.default_rng(seed)
    draw_demand = _pmf_sampler(params.demand)
    draw_capacity = _pmf_sampler(params.capacity)
    lead = params.lead_periods
    cost_m1, cost_m2 = params.underage, params.overage

    backlog = 0
    i1 = 0
    i2 = table.target(0)
    pipeline = deque([0] * lead)
    bins = _BatchAccumulator(float(warmup_periods), float(horizon_periods), batches)

    for period in range(horizon_periods):
        if lead:
            i2 += pipeline.popleft()
        backlog += draw_demand(rng.random())
        produced = min(backlog, draw_capacity(rng.random()))
        backlog -= produced
        i1 += produced
        assembled = i1 if i1 < i2 else i2
        i1 -= assembled
        i2 -= assembled
        order = table.target(backlog) - (i2 + (sum(pipeline) if lead else 0) - i1)
        if order < 0:
            raise AssertionError(f"policy requested a negative order ({order})")
        if lead:
            pipeline.append(order)
        else:
            i2 += order
            assembled = i1 if i1 < i2 else i2
            i1 -= assembled
            i2 -= assembled
        bins.add(float(period), float(period + 1), cost_m1 * i1 + cost_m2 * i2)

    return bins.estimate(seed)
