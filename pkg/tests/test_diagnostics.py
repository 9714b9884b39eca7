"""Residual diagnostics: exact oracles, size checks, stability geometry."""

import numpy as np
import pytest
from scipy import stats
from statsmodels.stats.stattools import jarque_bera as sm_jarque_bera

from coinform.diagnostics import (
    companion_matrix,
    diagnostic_report,
    jarque_bera,
    jarque_bera_series,
    lm_autocorrelation,
    lm_autocorrelation_stat,
    stability,
)
from coinform.errors import EstimationError
from coinform.johansen import JohansenCase
from coinform.vecm import estimate_vecm, reduce_to_var

from conftest import bivariate_vecm_data, random_walk_panel


# ---------------------------------------------------------------- Jarque-Bera


def test_jarque_bera_matches_statsmodels():
    rng = np.random.default_rng(0)
    for _ in range(5):
        u = rng.standard_t(df=7, size=400)
        ours = jarque_bera_series(u)
        stat, p, skew, kurt = sm_jarque_bera(u)
        assert ours.statistic == pytest.approx(float(stat), abs=1e-10)
        assert ours.p_value == pytest.approx(float(p), abs=1e-12)
        assert ours.skewness == pytest.approx(float(skew), abs=1e-12)
        assert ours.kurtosis == pytest.approx(float(kurt), abs=1e-12)


def test_jarque_bera_two_point_sample():
    # A symmetric two-point sample has skewness 0 and kurtosis 1, so the
    # statistic collapses to T/6 * (0 + 4/4) = T/6.
    u = np.array([1.0, -1.0] * 10)
    entry = jarque_bera_series(u)
    assert entry.statistic == pytest.approx(len(u) / 6.0, abs=1e-12)
    assert entry.skewness == pytest.approx(0.0, abs=1e-12)
    assert entry.kurtosis == pytest.approx(1.0, abs=1e-12)


def test_jarque_bera_validation():
    with pytest.raises(EstimationError, match="4 observations"):
        jarque_bera_series(np.ones(3))
    with pytest.raises(EstimationError, match="zero variance"):
        jarque_bera_series(np.ones(10))


def test_jarque_bera_per_equation_names():
    fit = estimate_vecm(bivariate_vecm_data(300, seed=5), 2, rank=1)
    entries = jarque_bera(fit)
    assert tuple(e.variable for e in entries) == fit.variables
    for e in entries:
        assert e.df == 2


# ---------------------------------------------------------------- LM test


def test_lm_statistic_size_on_white_noise():
    # under the null the statistic is chi2(n^2); the inputs must be genuine
    # regression residuals (orthogonal to the regressors), hence the demeaning
    rng = np.random.default_rng(7)
    n = 2
    rejections = 0
    reps = 200
    for _ in range(reps):
        u = rng.normal(size=(150, n))
        u = u - u.mean(axis=0)
        entry = lm_autocorrelation_stat(u, np.ones((150, 1)), lag=1)
        rejections += entry.p_value < 0.05
    assert 0.01 <= rejections / reps <= 0.10


def test_lm_detects_autocorrelated_residuals():
    rng = np.random.default_rng(3)
    t = 400
    e = rng.normal(size=(t, 2))
    u = np.empty_like(e)
    u[0] = e[0]
    for i in range(1, t):
        u[i] = 0.6 * u[i - 1] + e[i]
    entry = lm_autocorrelation_stat(u, np.ones((t, 1)), lag=1)
    assert entry.p_value < 1e-6
    assert entry.df == 4


def test_lm_validation():
    u = np.random.default_rng(0).normal(size=(50, 2))
    with pytest.raises(EstimationError, match="lag"):
        lm_autocorrelation_stat(u, np.ones((50, 1)), lag=0)
    with pytest.raises(EstimationError, match="lag"):
        lm_autocorrelation_stat(u, np.ones((50, 1)), lag=50)
    with pytest.raises(EstimationError):
        lm_autocorrelation_stat(u.ravel(), np.ones((50, 1)), lag=1)


def test_lm_on_fit_returns_requested_lags():
    fit = estimate_vecm(bivariate_vecm_data(300, seed=2), 2, rank=1)
    entries = lm_autocorrelation(fit, max_lag=3)
    assert [e.lag for e in entries] == [1, 2, 3]
    assert lm_autocorrelation(fit, max_lag=0) == ()
    with pytest.raises(EstimationError):
        lm_autocorrelation(fit, max_lag=-1)


def test_lm_statistic_nonnegative_and_chi2_pvalue():
    rng = np.random.default_rng(11)
    u = rng.normal(size=(120, 3))
    entry = lm_autocorrelation_stat(u, np.zeros((120, 0)), lag=2)
    assert entry.statistic >= 0.0
    assert entry.p_value == pytest.approx(
        float(stats.chi2.sf(entry.statistic, 9)), abs=1e-15
    )


# ---------------------------------------------------------------- stability


def test_companion_matrix_shape_and_identity_block():
    fit = estimate_vecm(bivariate_vecm_data(300, seed=8), 3, rank=1)
    comp = companion_matrix(fit)
    n, k = 2, 3
    assert comp.shape == (n * k, n * k)
    np.testing.assert_allclose(comp[n:, :-n], np.eye(n * (k - 1)), atol=0)


def test_companion_eigenvalues_match_var_polynomial_lag1():
    # at k=1 the companion matrix is I + Pi itself
    fit = estimate_vecm(bivariate_vecm_data(400, seed=9), 1, rank=1)
    comp = companion_matrix(fit)
    np.testing.assert_allclose(comp, np.eye(2) + fit.pi, atol=1e-14)


def test_stability_counts_common_trends():
    # rank 1 on a bivariate cointegrated system => exactly one unit modulus
    fit = estimate_vecm(bivariate_vecm_data(800, seed=1), 2, rank=1)
    res = stability(fit)
    assert res.unit_moduli_expected == 1
    assert res.unit_moduli_found == 1
    assert res.is_stable
    assert res.moduli == tuple(sorted(res.moduli, reverse=True))


def test_stability_rank_zero_has_all_unit_roots():
    fit = reduce_to_var(
        random_walk_panel(500, 2, seed=4), 2, "rank_zero",
        JohansenCase.UNRESTRICTED_CONSTANT,
    )
    res = stability(fit)
    assert res.unit_moduli_expected == 2
    assert res.unit_moduli_found == 2
    assert res.is_stable


def test_stability_flags_explosive_system():
    # an explosive AR root pushes a companion eigenvalue outside the circle
    rng = np.random.default_rng(6)
    t = 400
    y = np.zeros((t, 2))
    for i in range(1, t):
        y[i, 0] = 1.05 * y[i - 1, 0] + rng.normal()
        y[i, 1] = 0.5 * y[i - 1, 1] + rng.normal()
    fit = reduce_to_var(y, 2, "full_rank", JohansenCase.UNRESTRICTED_CONSTANT)
    res = stability(fit)
    assert res.max_modulus > 1.0 + 1e-3
    assert not res.is_stable


def test_stability_passes_stationary_full_rank():
    rng = np.random.default_rng(13)
    t = 600
    y = np.zeros((t, 2))
    for i in range(1, t):
        y[i] = 0.5 * y[i - 1] + rng.normal(size=2)
    fit = reduce_to_var(y, 2, "full_rank", JohansenCase.UNRESTRICTED_CONSTANT)
    res = stability(fit)
    assert res.unit_moduli_expected == 0
    assert res.is_stable


# ---------------------------------------------------------------- report


def test_diagnostic_report_verdicts_wellbehaved_fit():
    fit = estimate_vecm(bivariate_vecm_data(900, seed=10), 2, rank=1)
    report = diagnostic_report(fit, max_lag=2, level=0.01)
    assert report.stability_pass
    assert report.level == 0.01
    d = report.to_dict()
    assert set(d["verdicts"]) == {"autocorrelation", "normality", "stability"}
    assert len(d["autocorrelation"]) == 2
    assert len(d["normality"]) == 2


def test_diagnostic_report_fails_on_bad_residuals():
    # fit a deliberately under-specified model: strongly autocorrelated
    # differences with zero lagged-difference terms
    rng = np.random.default_rng(21)
    t = 600
    dz = np.empty((t, 2))
    dz[0] = rng.normal(size=2)
    for i in range(1, t):
        dz[i] = 0.7 * dz[i - 1] + rng.normal(size=2)
    z = np.cumsum(dz, axis=0)
    fit = reduce_to_var(z, 1, "rank_zero", JohansenCase.UNRESTRICTED_CONSTANT)
    report = diagnostic_report(fit, max_lag=2)
    assert not report.autocorrelation_pass


def test_diagnostic_report_level_validation():
    fit = estimate_vecm(bivariate_vecm_data(300, seed=0), 2, rank=1)
    with pytest.raises(EstimationError):
        diagnostic_report(fit, level=0.0)
    with pytest.raises(EstimationError):
        diagnostic_report(fit, level=1.5)
