"""Transient analysis of the make-to-order production queue.

The in-house module is built in a single-server queue with Poisson order
arrivals (rate ``lam``) and exponential service (rate ``mu``).  Everything in
this module answers one question: how many units does that queue finish
during a supplier lead time, given the number of orders currently waiting or
in process?

The continuous-time dynamics are analyzed through the embedded jump chain:
the number of transitions in a window of length L is Poisson((lam+mu)*L),
and conditional on k transitions the state performs a simple walk on
(backlog, produced) pairs with a self-loop while the server is idle.  Mixing
the walk over the Poisson transition count gives the lead-time production
distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError, ParameterError

# Poisson mass with a relative tail below this threshold is lost to float64
# rounding anyway; transition counts beyond it contribute exact zeros to any
# mixture, so propagation stops there even when the Cantelli bound is looser.
_NUMERIC_TAIL = 1e-16


@dataclass(frozen=True)
class ContinuousParams:
    """Instance of the continuous-time assembly model.

    lam, mu        -- order arrival rate and production service rate
    lead_time      -- supplier lead time for the bought module
    h1, h2         -- holding cost rates for the produced / bought module
    b              -- waiting cost rate per open customer order
    epsilon        -- tolerated Poisson tail mass when truncating the
                      transition count
    queue_tail_mass -- tolerated geometric tail mass when enumerating the
                      stationary backlog explicitly
    stationary_backlog_cap -- if set, stationary cost averages keep only
                      backlogs 0..cap and drop the remaining geometric tail
                      (the convention behind the bundled reference tables);
                      None averages the full distribution exactly
    """

    lam: float
    mu: float
    lead_time: float
    h1: float
    h2: float
    b: float
    epsilon: float = 1e-8
    queue_tail_mass: float = 1e-12
    stationary_backlog_cap: int | None = None

    def __post_init__(self) -> None:
        if self.lam <= 0 or self.mu <= 0:
            raise ParameterError("arrival and service rates must be positive")
        if self.lead_time < 0:
            raise ParameterError("lead_time must be non-negative")
        if self.h1 < 0 or self.h2 < 0 or self.b < 0:
            raise ParameterError("cost rates must be non-negative")
        if self.h1 + self.h2 + self.b <= 0:
            raise ParameterError("at least one cost rate must be positive")
        if not 0 < self.epsilon < 1:
            raise ParameterError("epsilon must lie in (0, 1)")
        if not 0 < self.queue_tail_mass < 1:
            raise ParameterError("queue_tail_mass must lie in (0, 1)")
        if self.stationary_backlog_cap is not None and (
                self.stationary_backlog_cap < 0
                or self.stationary_backlog_cap != int(self.stationary_backlog_cap)):
            raise ParameterError("stationary_backlog_cap must be None or a non-negative integer")

    @property
    def rho(self) -> float:
        return self.lam / self.mu

    @property
    def underage(self) -> float:
        """Cost per unit of production not covered by the bought module."""
        return self.b + self.h1

    @property
    def overage(self) -> float:
        """Cost per bought unit waiting for its produced counterpart."""
        return self.h2

    def require_stable(self) -> None:
        if self.rho >= 1:
            raise InstabilityError(
                f"queue is unstable: lam={self.lam} >= mu={self.mu}"
            )


@dataclass(frozen=True, eq=False)
class ProductionPmf:
    """Distribution of units finished during one lead time.

    ``probs[j]`` is the probability of completing exactly j units.  When the
    distribution is conditional on the backlog observed at the start of the
    window, ``conditioning_backlog`` records that backlog; ``None`` marks an
    unconditional distribution.
    """

    probs: np.ndarray
    conditioning_backlog: int | None = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.probs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ParameterError("pmf must be a non-empty 1-D probability vector")
        if np.any(arr < 0):
            raise ParameterError("pmf entries must be non-negative")
        if abs(arr.sum() - 1.0) > 1e-9:
            raise ParameterError(f"pmf must sum to 1, got {arr.sum()!r}")
        if self.conditioning_backlog is not None and self.conditioning_backlog < 0:
            raise ParameterError("conditioning backlog must be non-negative")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    def __len__(self) -> int:
        return len(self.probs)

    def mean(self) -> float:
        return float(np.arange(len(self.probs)) @ self.probs)

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probs)


def critical_fractile(h1: float, h2: float, b: float) -> float:
    """Newsvendor fractile (b + h1) / (b + h1 + h2) for the bought module."""
    if h1 < 0 or h2 < 0 or b < 0:
        raise ParameterError("cost rates must be non-negative")
    total = b + h1 + h2
    if total <= 0:
        raise ParameterError("at least one cost rate must be positive")
    return (b + h1) / total


def uniformized_rates(lam: float, mu: float) -> tuple[float, float]:
    """Jump-chain probabilities of an arrival vs. a service completion.

    The pair sums to 1.0 exactly.
    """
    if lam <= 0 or mu <= 0:
        raise ParameterError("rates must be positive")
    mu_t = mu / (lam + mu)
    return 1.0 - mu_t, mu_t


def poisson_pmf(k: int, rate: float) -> float:
    """Poisson probability mass, evaluated in log space for stability."""
    if rate < 0:
        raise ParameterError("rate must be non-negative")
    if k < 0 or k != int(k):
        raise ParameterError("k must be a non-negative integer")
    k = int(k)
    if rate == 0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(rate) - rate - math.lgamma(k + 1))


def transition_upper_bound(lam: float, mu: float, lead_time: float,
                           epsilon: float) -> int:
    """Transition count X_U with P(X >= X_U) <= epsilon for the jump chain.

    Uses the one-sided Chebyshev (Cantelli) bound for a Poisson count with
    mean (lam+mu)*lead_time.  The bound guarantees coverage but can be very
    loose for small epsilon.
    """
    if lam <= 0 or mu <= 0:
        raise ParameterError("rates must be positive")
    if lead_time < 0:
        raise ParameterError("lead_time must be non-negative")
    if not 0 < epsilon < 1:
        raise ParameterError("epsilon must lie in (0, 1)")
    rate = (lam + mu) * lead_time
    bound = rate + math.sqrt((1.0 / epsilon - 1.0) * rate)
    return max(1, math.ceil(bound))


def _poisson_numeric_cap(rate: float) -> int:
    # Chernoff-style over-cover: the Poisson tail beyond mean + 12*sqrt(mean)
    # + 30 is far below _NUMERIC_TAIL for every rate.
    return math.ceil(rate + 12.0 * math.sqrt(rate)) + 30


def _transition_count_cap(lam: float, mu: float, lead_time: float,
                          epsilon: float) -> int:
    rate = (lam + mu) * lead_time
    return min(transition_upper_bound(lam, mu, lead_time, epsilon),
               _poisson_numeric_cap(rate))


def _poisson_weights(rate: float, k_top: int) -> np.ndarray:
    """Poisson masses for k = 0..k_top (log-space evaluation)."""
    if rate == 0:
        w = np.zeros(k_top + 1)
        w[0] = 1.0
        return w
    k = np.arange(k_top + 1)
    log_fact = np.array([math.lgamma(i + 1) for i in range(k_top + 1)])
    return np.exp(k * math.log(rate) - rate - log_fact)


def _jump_chain_step(dist: np.ndarray, lam_t: float, mu_t: float) -> np.ndarray:
    """One embedded-chain transition on a (backlog, produced) weight array.

    Works on 2-D arrays (backlog x produced) and on 3-D arrays carrying a
    leading batch axis.
    """
    out = np.zeros_like(dist)
    out[..., 1:, :] = lam_t * dist[..., :-1, :]        # order arrival
    out[..., :-1, 1:] += mu_t * dist[..., 1:, :-1]     # completion drains backlog
    out[..., 0, :] += mu_t * dist[..., 0, :]           # idle server: no-op event
    return out


def production_pmf_given_transitions(i0: int, k: int, lam_t: float,
                                     mu_t: float) -> np.ndarray:
    """Distribution of units produced after exactly k jump-chain transitions.

    Starts from backlog ``i0`` with nothing produced; returns a vector over
    j = 0..k.
    """
    if i0 < 0 or i0 != int(i0):
        raise ParameterError("initial backlog must be a non-negative integer")
    if k < 0 or k != int(k):
        raise ParameterError("transition count must be a non-negative integer")
    if lam_t < 0 or mu_t < 0 or abs(lam_t + mu_t - 1.0) > 1e-12:
        raise ParameterError("jump probabilities must be non-negative and sum to 1")
    i0, k = int(i0), int(k)
    # The idle boundary is unreachable within k steps once i0 >= k, so larger
    # backlogs produce the identical distribution; cap to keep the grid small.
    start = min(i0, k)
    dist = np.zeros((start + k + 1, k + 1))
    dist[start, 0] = 1.0
    for _ in range(k):
        dist = _jump_chain_step(dist, lam_t, mu_t)
    return dist.sum(axis=0)


def saturation_backlog(params: ContinuousParams) -> int:
    """Smallest backlog beyond which the lead-time production distribution
    no longer depends on the backlog."""
    return _transition_count_cap(params.lam, params.mu, params.lead_time,
                                 params.epsilon)


def _conditional_production_matrix(params: ContinuousParams,
                                   i_top: int) -> np.ndarray:
    """Row i holds the production pmf conditional on starting backlog i.

    Rows cover i = 0..i_top; every row has length k_top + 1 where k_top is
    the propagated transition-count cap.  All starting backlogs propagate in
    one batched pass.
    """
    lam_t, mu_t = uniformized_rates(params.lam, params.mu)
    rate = (params.lam + params.mu) * params.lead_time
    k_top = _transition_count_cap(params.lam, params.mu, params.lead_time,
                                  params.epsilon)
    weights = _poisson_weights(rate, k_top)
    starts = np.minimum(np.arange(i_top + 1), k_top)
    dist = np.zeros((i_top + 1, int(starts.max()) + k_top + 1, k_top + 1))
    dist[np.arange(i_top + 1), starts, 0] = 1.0
    mix = weights[0] * dist.sum(axis=1)
    for k in range(1, k_top + 1):
        dist = _jump_chain_step(dist, lam_t, mu_t)
        mix += weights[k] * dist.sum(axis=1)
    mix /= weights.sum()
    return mix


def production_pmf(i0: int, params: ContinuousParams) -> ProductionPmf:
    """Lead-time production distribution given ``i0`` orders in the queue.

    Poisson-weighted mixture of the conditional jump-chain distributions;
    the truncated Poisson tail (at most ``params.epsilon``) is redistributed
    proportionally so the result is a proper pmf.
    """
    if i0 < 0 or i0 != int(i0):
        raise ParameterError("initial backlog must be a non-negative integer")
    i0 = int(i0)
    k_top = _transition_count_cap(params.lam, params.mu, params.lead_time,
                                  params.epsilon)
    row = _conditional_production_matrix(params, min(i0, k_top))[-1]
    return ProductionPmf(row, conditioning_backlog=i0)


def _geometric_cut(rho: float, tail_mass: float) -> int:
    """Smallest n with rho**n <= tail_mass."""
    if rho <= 0:
        return 1
    return max(1, math.ceil(math.log(tail_mass) / math.log(rho)))


def stationary_backlog_split(params: ContinuousParams,
                             i_cut: int) -> tuple[np.ndarray, float]:
    """Geometric stationary backlog weights, split into explicit terms and tail.

    Returns weights (1-rho)*rho**i for i = 0..i_cut-1 and the exact lumped
    tail mass rho**i_cut.
    """
    params.require_stable()
    rho = params.rho
    weights = (1.0 - rho) * rho ** np.arange(i_cut)
    return weights, rho ** i_cut


def unconditional_production_pmf(params: ContinuousParams) -> ProductionPmf:
    """Lead-time production distribution with the backlog in steady state.

    Mixes the conditional distributions over the geometric stationary backlog
    law.  Explicit terms stop at the saturation backlog (where conditionals
    become identical and the geometric tail closes exactly) or earlier once
    the remaining tail mass drops below ``params.queue_tail_mass``.
    """
    params.require_stable()
    i_sat = saturation_backlog(params)
    i_cut = min(i_sat, _geometric_cut(params.rho, params.queue_tail_mass))
    matrix = _conditional_production_matrix(params, i_cut)
    weights, tail = stationary_backlog_split(params, i_cut)
    mix = weights @ matrix[:i_cut] + tail * matrix[i_cut]
    return ProductionPmf(mix, conditioning_backlog=None)
