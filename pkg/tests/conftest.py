"""Shared fixtures and data generators for the test suite."""

from __future__ import annotations

import datetime as dt

import numpy as np
import pytest

from coinform import Panel, TimeSeries, panel_from_array
from coinform.barro import PriceRegressionSpec, simulate_economy


def make_dates(t: int, start: dt.date = dt.date(2013, 1, 1)) -> tuple[dt.date, ...]:
    return tuple(start + dt.timedelta(days=i) for i in range(t))


def make_series(values, name: str = "x", start: dt.date = dt.date(2013, 1, 1)) -> TimeSeries:
    values = np.asarray(values, dtype=float)
    return TimeSeries(name=name, dates=make_dates(len(values), start), values=values)


def random_walk_panel(
    t: int, n: int, seed: int, drift: float = 0.0, scale: float = 1.0
) -> Panel:
    """Independent driftless (or drifting) random walks."""
    rng = np.random.default_rng(seed)
    z = np.cumsum(rng.normal(drift, scale, size=(t, n)), axis=0)
    return panel_from_array(z, [f"v{i}" for i in range(n)])


def bivariate_vecm_data(
    t: int,
    seed: int,
    alpha: tuple[float, float] = (-0.5, 0.1),
    beta: tuple[float, float] = (1.0, -2.0),
    const: float = 0.0,
) -> np.ndarray:
    """Simulate the workhorse bivariate error-correction process.

    dz_t = alpha * (beta' z_{t-1} - const) + u_t with unit-variance Gaussian
    innovations; beta'alpha = -0.7 keeps the equilibrium error a stationary
    AR(1) with coefficient 0.3.
    """
    rng = np.random.default_rng(seed)
    a = np.asarray(alpha)
    b = np.asarray(beta)
    u = rng.normal(size=(t, 2))
    z = np.zeros((t, 2))
    for i in range(1, t):
        ec = b @ z[i - 1] - const
        z[i] = z[i - 1] + a * ec + u[i]
    return z


def trivariate_coint_panel(t: int, seed: int, mean_shift: float = 2.0) -> Panel:
    """Three series sharing one common trend pair: cointegration rank 1.

    The equilibrium error has a nonzero mean so the restricted-constant case
    is the natural deterministic specification.
    """
    rng = np.random.default_rng(seed)
    w1 = np.cumsum(rng.normal(size=t))
    w2 = np.cumsum(rng.normal(size=t))
    y1 = w1 + rng.normal(scale=0.4, size=t)
    y2 = 0.5 * w1 + mean_shift + rng.normal(scale=0.4, size=t)
    y3 = w2 + rng.normal(scale=0.4, size=t)
    return panel_from_array(np.column_stack([y1, y2, y3]), ["a", "b", "c"])


@pytest.fixture(scope="session")
def fundamentals_panel() -> Panel:
    """Noisy fundamentals-only synthetic economy, reused across modules."""
    spec = PriceRegressionSpec.theory_consistent({"fundamentals"}, noise_sd=0.01)
    return simulate_economy(spec, t=700, seed=0)


@pytest.fixture(scope="session")
def full_economy_panel() -> Panel:
    """All-blocks synthetic economy (11 variables)."""
    spec = PriceRegressionSpec.theory_consistent(noise_sd=0.02)
    return simulate_economy(spec, t=600, seed=3)
