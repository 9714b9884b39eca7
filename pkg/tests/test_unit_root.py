"""Unit-root tests checked against statsmodels and against each other."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from statsmodels.tsa.stattools import adfuller

from coinform.errors import DataError
from coinform.unit_root import (
    Deterministic,
    IntegrationOrder,
    UnitRootTest,
    adf_test,
    classify_integration,
    default_bandwidth,
    long_run_variance,
    pp_test,
    schwert_max_lags,
    select_lags_aic,
)

from conftest import make_series

_REGRESSION = {
    Deterministic.NONE: "n",
    Deterministic.CONSTANT: "c",
    Deterministic.CONSTANT_TREND: "ct",
}


def _walk(t, seed, drift=0.0):
    rng = np.random.default_rng(seed)
    return np.cumsum(drift + rng.normal(size=t))


def _ar1(t, seed, phi=0.5):
    rng = np.random.default_rng(seed)
    y = np.empty(t)
    y[0] = rng.normal()
    for i in range(1, t):
        y[i] = phi * y[i - 1] + rng.normal()
    return y


# ---------------------------------------------------------------- ADF oracle


@pytest.mark.parametrize("deterministic", list(Deterministic))
@pytest.mark.parametrize("lags", [0, 1, 4])
def test_adf_statistic_matches_statsmodels(deterministic, lags):
    y = _walk(300, seed=42)
    ours = adf_test(y, deterministic, lags=lags)
    ref_stat = adfuller(
        y, maxlag=lags, regression=_REGRESSION[deterministic], autolag=None
    )[0]
    assert ours.statistic == pytest.approx(ref_stat, abs=1e-10)
    assert ours.lags_or_bandwidth == lags
    assert ours.effective_nobs == 300 - 1 - lags


def test_adf_critical_values_match_statsmodels():
    y = _ar1(250, seed=7)
    ours = adf_test(y, Deterministic.CONSTANT, lags=2)
    ref = adfuller(y, maxlag=2, regression="c", autolag=None)
    for label in ("1%", "5%", "10%"):
        assert ours.critical_values[label] == pytest.approx(ref[4][label], abs=1e-8)


def test_adf_decision_directions():
    stationary = adf_test(_ar1(600, seed=1, phi=0.3), lags=0)
    assert stationary.rejects_at(0.05)
    walk = adf_test(_walk(600, seed=1), lags=0)
    assert not walk.rejects_at(0.05)
    # rejection is nested across levels: 1% rejection implies 5% and 10%
    if stationary.reject_unit_root["1%"]:
        assert stationary.reject_unit_root["5%"]
        assert stationary.reject_unit_root["10%"]


def test_adf_accepts_timeseries_and_reports_name():
    s = make_series(np.abs(_walk(120, seed=9)) + 50.0, name="mkpru")
    res = adf_test(s, lags=1)
    assert res.series_name == "mkpru"
    assert res.test is UnitRootTest.ADF
    d = res.to_dict()
    assert d["series"] == "mkpru"
    assert d["deterministic"] == "constant"


def test_adf_rejects_negative_lags_and_matrix_input():
    with pytest.raises(DataError):
        adf_test(_walk(100, seed=0), lags=-1)
    with pytest.raises(DataError):
        adf_test(np.ones((10, 2)))


# ---------------------------------------------------------------- lag selection


def test_schwert_rule_values():
    assert schwert_max_lags(100) == 12
    assert schwert_max_lags(1000) == 21
    assert schwert_max_lags(50) == 10


def test_select_lags_aic_matches_statsmodels_choice():
    # statsmodels' autolag="aic" minimises the same criterion on the same
    # common sample, so the selected order must coincide.
    for seed in range(5):
        y = _walk(400, seed=seed)
        max_lags = schwert_max_lags(400)
        ref = adfuller(y, maxlag=max_lags, regression="c", autolag="aic")
        ours = select_lags_aic(y, max_lags=max_lags)
        assert ours == ref[2], seed


def test_select_lags_aic_finds_true_order():
    # Delta y has a strong AR(1) component => one lagged difference needed.
    rng = np.random.default_rng(3)
    e = rng.normal(size=2000)
    dy = np.empty(2000)
    dy[0] = e[0]
    for i in range(1, 2000):
        dy[i] = 0.8 * dy[i - 1] + e[i]
    y = np.cumsum(dy)
    chosen = select_lags_aic(y, max_lags=6)
    assert chosen >= 1


def test_select_lags_negative_max_is_error():
    with pytest.raises(DataError):
        select_lags_aic(_walk(100, seed=0), max_lags=-2)


# ---------------------------------------------------------------- Phillips-Perron


def test_pp_zero_bandwidth_equals_unaugmented_adf():
    for seed in range(10):
        y = _walk(200, seed=seed)
        for det in Deterministic:
            pp = pp_test(y, det, bandwidth=0)
            adf = adf_test(y, det, lags=0)
            assert pp.statistic == pytest.approx(adf.statistic, abs=1e-10)


def test_pp_default_bandwidth_rule():
    assert default_bandwidth(100) == 4
    assert default_bandwidth(729) == 6
    y = _walk(300, seed=2)
    res = pp_test(y)
    assert res.lags_or_bandwidth == default_bandwidth(res.effective_nobs)


def test_pp_decision_directions():
    assert pp_test(_ar1(600, seed=4, phi=0.2)).rejects_at(0.05)
    assert not pp_test(_walk(600, seed=4)).rejects_at(0.05)


def test_pp_statistic_close_to_statsmodels_on_ar_noise():
    # statsmodels has no PP, but on white-noise innovations the correction is
    # small: PP and ADF(0) should agree loosely while remaining distinct.
    y = _walk(500, seed=11)
    pp = pp_test(y, bandwidth=4)
    adf0 = adf_test(y, lags=0)
    assert abs(pp.statistic - adf0.statistic) < 0.5


def test_long_run_variance_white_noise_close_to_gamma0():
    rng = np.random.default_rng(0)
    u = rng.normal(size=5000)
    gamma0 = float(u @ u) / u.shape[0]
    lam2 = long_run_variance(u, bandwidth=5)
    assert lam2 == pytest.approx(gamma0, rel=0.05)


def test_long_run_variance_bartlett_weights_exact():
    u = np.array([1.0, -1.0, 2.0, 0.5, -0.5, 1.5])
    n = u.shape[0]
    q = 2
    gamma = [float(u[j:] @ u[: n - j]) / n for j in range(q + 1)]
    expected = gamma[0] + 2 * sum((1 - j / (q + 1)) * gamma[j] for j in (1, 2))
    assert long_run_variance(u, q) == pytest.approx(expected, abs=1e-14)


def test_pp_negative_bandwidth_is_error():
    with pytest.raises(DataError):
        pp_test(_walk(100, seed=0), bandwidth=-1)


# ---------------------------------------------------------------- classification


def test_classify_integration_orders():
    t = 800
    stationary = make_series(_ar1(t, seed=5, phi=0.4), name="s")
    walk = make_series(_walk(t, seed=5), name="w")
    doubly = make_series(np.cumsum(_walk(t, seed=5)), name="ww")
    assert classify_integration(stationary) is IntegrationOrder.I0
    assert classify_integration(walk) is IntegrationOrder.I1
    assert classify_integration(doubly) is IntegrationOrder.I2_OR_HIGHER


# ---------------------------------------------------------------- invariances


@settings(max_examples=20, deadline=None)
@given(
    st.integers(min_value=0, max_value=10_000),
    st.floats(min_value=-50.0, max_value=50.0, allow_nan=False),
    st.floats(min_value=0.1, max_value=20.0, allow_nan=False),
)
def test_adf_constant_case_shift_scale_invariant(seed, shift, scale):
    """With an intercept the ADF t-ratio ignores location and scale."""
    y = _walk(150, seed=seed)
    base = adf_test(y, Deterministic.CONSTANT, lags=1).statistic
    moved = adf_test(scale * y + shift, Deterministic.CONSTANT, lags=1).statistic
    assert moved == pytest.approx(base, abs=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_pp_trend_case_invariant_to_linear_trend(seed):
    y = _walk(200, seed=seed)
    trend = 0.3 * np.arange(200.0) - 4.0
    base = pp_test(y, Deterministic.CONSTANT_TREND, bandwidth=3).statistic
    tilted = pp_test(y + trend, Deterministic.CONSTANT_TREND, bandwidth=3).statistic
    assert tilted == pytest.approx(base, abs=1e-8)
