"""Shared fixtures and randomized instance generators."""

from __future__ import annotations

import numpy as np
import pytest

from atopolicy import ContinuousParams, DiscreteParams, IntPmf


@pytest.fixture
def base_instance() -> ContinuousParams:
    """The worked example used throughout the docs: busy queue, cheap m2."""
    return ContinuousParams(lam=0.8, mu=1.0, lead_time=4, h1=4, h2=1, b=5)


def random_continuous_params(rng: np.random.Generator) -> ContinuousParams:
    rho = rng.uniform(0.05, 0.95)
    mu = rng.uniform(0.5, 2.0)
    h2 = rng.uniform(0.05, 3.0)
    return ContinuousParams(
        lam=rho * mu,
        mu=mu,
        lead_time=rng.uniform(0.2, 5.0),
        h1=rng.uniform(0.0, 5.0),
        h2=h2,
        b=rng.uniform(0.0, 10.0),
    )


def random_int_pmf(rng: np.random.Generator, values: list[int]) -> IntPmf:
    probs = rng.dirichlet(np.ones(len(values)))
    # round away denormal-ish entries but keep a proper pmf
    probs = np.maximum(probs, 1e-4)
    probs = probs / probs.sum()
    return IntPmf(tuple(values), tuple(probs))


def random_discrete_params(rng: np.random.Generator) -> DiscreteParams:
    while True:
        d_hi = int(rng.integers(1, 5))
        c_hi = int(rng.integers(1, 6))
        demand = random_int_pmf(rng, list(range(0, d_hi + 1)))
        capacity = random_int_pmf(rng, list(range(1, c_hi + 1)))
        if demand.mean() < capacity.mean() - 0.1:
            return DiscreteParams(
                demand=demand,
                capacity=capacity,
                lead_periods=int(rng.integers(1, 4)),
                h1=rng.uniform(0.0, 5.0),
                h2=rng.uniform(0.05, 3.0),
                b=rng.uniform(0.0, 10.0),
            )
