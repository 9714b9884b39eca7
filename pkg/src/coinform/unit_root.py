"""Unit-root testing: augmented Dickey-Fuller and Phillips-Perron.

Both tests estimate the Dickey-Fuller regression

    dy_t = d_t' phi + rho * y_{t-1} + sum_{i=1..p} delta_i dy_{t-i} + e_t

and examine the t-ratio on ``rho``.  The ADF variant handles serial
correlation parametrically through the lagged differences; Phillips-Perron
runs the unaugmented regression (p = 0) and corrects the t-ratio
nonparametrically with a Bartlett-kernel long-run variance (Newey-West).
Critical values come from the MacKinnon (2010) response surface and depend on
the deterministic case and the effective sample size, so the rejection rule
``statistic < critical value`` is self-contained in the returned result.

Lag selection follows the common AIC recipe: candidate lag orders are fitted
on the *same* trimmed sample (trimmed as if the maximum order were used) so
their likelihoods are comparable, and ties break toward the smaller order.
The default ceiling is Schwert's rule, ``floor(12 * (T/100)^{1/4})``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import critical_values as cv
from ._ols import ols
from .errors import DataError, EstimationError
from .series_store import TimeSeries, difference

__all__ = [
    "Deterministic",
    "UnitRootTest",
    "UnitRootResult",
    "IntegrationOrder",
    "adf_test",
    "pp_test",
    "select_lags_aic",
    "schwert_max_lags",
    "default_bandwidth",
    "long_run_variance",
    "classify_integration",
]


class Deterministic(enum.Enum):
    NONE = "none"
    CONSTANT = "constant"
    CONSTANT_TREND = "constant_trend"


class UnitRootTest(enum.Enum):
    ADF = "adf"
    PP = "pp"


class IntegrationOrder(enum.Enum):
    I0 = "I(0)"
    I1 = "I(1)"
    I2_OR_HIGHER = "I(>=2)"


@dataclass(frozen=True)
class UnitRootResult:
    """Outcome of a single unit-root test."""

    test: UnitRootTest
    series_name: str
    statistic: float
    deterministic: Deterministic
    lags_or_bandwidth: int
    effective_nobs: int
    critical_values: dict[str, float]
    reject_unit_root: dict[str, bool]

    def rejects_at(self, level: float | str) -> bool:
        return self.reject_unit_root[cv.level_label(level)]

    def to_dict(self) -> dict:
        return {
            "test": self.test.value,
            "series": self.series_name,
            "statistic": self.statistic,
            "deterministic": self.deterministic.value,
            "lags_or_bandwidth": self.lags_or_bandwidth,
            "effective_nobs": self.effective_nobs,
            "critical_values": dict(self.critical_values),
            "reject_unit_root": dict(self.reject_unit_root),
        }


def _values(series: TimeSeries | np.ndarray) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return np.asarray(series.values, dtype=float)
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 1:
        raise DataError("unit-root tests expect a single series")
    return arr


def _series_name(series: TimeSeries | np.ndarray) -> str:
    return series.name if isinstance(series, TimeSeries) else "series"


def _df_design(
    y: np.ndarray, lags: int, deterministic: Deterministic, trim: int | None = None
) -> tuple[np.ndarray, np.ndarray, int]:
    """Build (target, design, rho_column_index) for the DF regression.

    ``trim`` pins the first usable difference so that competing lag orders
    share an identical estimation sample; it defaults to ``lags``.
    """
    t_total = y.shape[0]
    start = lags if trim is None else trim
    if start < lags:
        raise EstimationError("trim must be at least the lag order")
    n_eff = t_total - 1 - start
    if n_eff < 10:
        raise DataError(
            f"sample too short for unit-root regression "
            f"({n_eff} usable observations)"
        )
    dy = np.diff(y)
    target = dy[start:]
    cols: list[np.ndarray] = []
    if deterministic in (Deterministic.CONSTANT, Deterministic.CONSTANT_TREND):
        cols.append(np.ones(n_eff))
    if deterministic is Deterministic.CONSTANT_TREND:
        cols.append(np.arange(1, n_eff + 1, dtype=float))
    rho_index = len(cols)
    cols.append(y[start : t_total - 1])
    for i in range(1, lags + 1):
        cols.append(dy[start - i : start - i + n_eff])
    design = np.column_stack(cols)
    return target, design, rho_index


def _df_case_name(deterministic: Deterministic) -> str:
    return deterministic.value


def _t_ratio(target: np.ndarray, design: np.ndarray, index: int) -> tuple[float, float, float, np.ndarray]:
    """t-ratio of one coefficient plus pieces reused by Phillips-Perron.

    Returns (t_stat, coef, se, residuals) with the variance estimated under
    the usual degrees-of-freedom correction.
    """
    coef, resid = ols(target, design, "Dickey-Fuller regression")
    n, k = design.shape
    ssr = float(resid @ resid)
    sigma2 = ssr / (n - k)
    xtx_inv = np.linalg.inv(design.T @ design)
    se = math.sqrt(sigma2 * xtx_inv[index, index])
    if se == 0.0:
        raise EstimationError("degenerate Dickey-Fuller regression (zero variance)")
    return float(coef[index]) / se, float(coef[index]), se, resid


def _attach_decision(
    test: UnitRootTest,
    name: str,
    stat: float,
    deterministic: Deterministic,
    order: int,
    n_eff: int,
) -> UnitRootResult:
    crit = cv.dickey_fuller_cv(_df_case_name(deterministic), n_eff)
    reject = {level: bool(stat < crit[level]) for level in cv.LEVELS}
    return UnitRootResult(
        test=test,
        series_name=name,
        statistic=stat,
        deterministic=deterministic,
        lags_or_bandwidth=order,
        effective_nobs=n_eff,
        critical_values=crit,
        reject_unit_root=reject,
    )


def adf_test(
    series: TimeSeries | np.ndarray,
    deterministic: Deterministic = Deterministic.CONSTANT,
    lags: int | None = None,
) -> UnitRootResult:
    """Augmented Dickey-Fuller test.

    ``lags=None`` selects the augmentation order by AIC up to the Schwert
    ceiling.  Rejection (at any tabulated level) means the statistic fell
    below the MacKinnon critical value, i.e. evidence *against* a unit root.
    """
    y = _values(series)
    if lags is None:
        lags = select_lags_aic(y, deterministic=deterministic)
    if lags < 0:
        raise DataError("lag order must be nonnegative")
    target, design, rho_index = _df_design(y, lags, deterministic)
    stat, *_ = _t_ratio(target, design, rho_index)
    return _attach_decision(
        UnitRootTest.ADF, _series_name(series), stat, deterministic, lags, target.shape[0]
    )


def schwert_max_lags(nobs: int) -> int:
    """Schwert's rule of thumb for the maximum ADF augmentation order."""
    return int(math.floor(12.0 * (nobs / 100.0) ** 0.25))


def select_lags_aic(
    series: TimeSeries | np.ndarray,
    max_lags: int | None = None,
    deterministic: Deterministic = Deterministic.CONSTANT,
) -> int:
    """AIC-minimising ADF lag order over 0..max_lags on a common sample."""
    y = _values(series)
    if max_lags is None:
        max_lags = schwert_max_lags(y.shape[0])
    if max_lags < 0:
        raise DataError("max_lags must be nonnegative")
    # Keep the comparison sample feasible on short series.
    while y.shape[0] - 1 - max_lags < 10 + max_lags + 3 and max_lags > 0:
        max_lags -= 1
    best_order: int | None = None
    best_aic = math.inf
    for p in range(max_lags + 1):
        target, design, _ = _df_design(y, p, deterministic, trim=max_lags)
        try:
            _, resid = ols(target, design, "ADF lag selection")
        except EstimationError:
            # Near-deterministic series (a smooth issuance schedule, say)
            # yield numerically collinear lagged differences at higher orders;
            # such candidates simply drop out of the comparison.
            continue
        n = target.shape[0]
        ssr = float(resid @ resid)
        if ssr <= 0.0:
            ssr = 1e-300
        aic = math.log(ssr / n) + 2.0 * design.shape[1] / n
        if aic < best_aic - 1e-12:
            best_aic = aic
            best_order = p
    if best_order is None:
        raise EstimationError(
            "ADF lag selection: every candidate design was rank-deficient"
        )
    return best_order


def long_run_variance(u: np.ndarray, bandwidth: int) -> float:
    """Bartlett-kernel (Newey-West) long-run variance of a residual series.

    ``lambda^2 = gamma_0 + 2 * sum_{j=1..q} (1 - j/(q+1)) gamma_j`` with
    ``gamma_j = (1/T) sum_t u_t u_{t-j}``.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    if n == 0:
        raise EstimationError("cannot estimate long-run variance of empty series")
    if bandwidth < 0:
        raise EstimationError("bandwidth must be nonnegative")
    if bandwidth >= n:
        raise EstimationError("bandwidth must be smaller than the sample")
    gamma0 = float(u @ u) / n
    total = gamma0
    for j in range(1, bandwidth + 1):
        gamma_j = float(u[j:] @ u[:-j]) / n
        total += 2.0 * (1.0 - j / (bandwidth + 1.0)) * gamma_j
    return total


def default_bandwidth(nobs: int) -> int:
    """Newey-West automatic truncation lag, floor(4 * (T/100)^{2/9})."""
    return int(math.floor(4.0 * (nobs / 100.0) ** (2.0 / 9.0)))


def pp_test(
    series: TimeSeries | np.ndarray,
    deterministic: Deterministic = Deterministic.CONSTANT,
    bandwidth: int | None = None,
) -> UnitRootResult:
    """Phillips-Perron Z-tau test.

    With ``bandwidth=0`` the correction vanishes and the statistic equals the
    unaugmented Dickey-Fuller t-ratio exactly.  ``bandwidth=None`` applies
    the Newey-West automatic rule.
    """
    y = _values(series)
    target, design, rho_index = _df_design(y, 0, deterministic)
    t_rho, _, se_rho, resid = _t_ratio(target, design, rho_index)
    n = target.shape[0]
    if bandwidth is None:
        bandwidth = default_bandwidth(n)
    if bandwidth < 0:
        raise DataError("bandwidth must be nonnegative")

    gamma0 = float(resid @ resid) / n
    lam2 = long_run_variance(resid, bandwidth)
    if lam2 <= 0.0:
        raise EstimationError("long-run variance estimate is not positive")
    k = design.shape[1]
    s2 = float(resid @ resid) / (n - k)
    stat = math.sqrt(gamma0 / lam2) * t_rho - (lam2 - gamma0) * n * se_rho / (
        2.0 * math.sqrt(lam2) * math.sqrt(s2)
    )
    return _attach_decision(
        UnitRootTest.PP, _series_name(series), stat, deterministic, bandwidth, n
    )


def classify_integration(
    series: TimeSeries,
    deterministic: Deterministic = Deterministic.CONSTANT,
    level: float | str = "5%",
    max_lags: int | None = None,
) -> IntegrationOrder:
    """Classify a series as I(0), I(1) or I(>=2) from ADF tests.

    The level test uses the requested deterministic case; the test on first
    differences always uses a constant (differencing removes any linear
    trend).  Rejection on the level means I(0); otherwise rejection on the
    difference means I(1); otherwise the series is at least I(2).
    """
    label = cv.level_label(level)
    level_result = adf_test(series, deterministic, lags=_maybe_aic(series, deterministic, max_lags))
    if level_result.reject_unit_root[label]:
        return IntegrationOrder.I0
    diff = difference(series)
    diff_result = adf_test(
        diff, Deterministic.CONSTANT, lags=_maybe_aic(diff, Deterministic.CONSTANT, max_lags)
    )
    if diff_result.reject_unit_root[label]:
        return IntegrationOrder.I1
    return IntegrationOrder.I2_OR_HIGHER


def _maybe_aic(
    series: TimeSeries | np.ndarray, deterministic: Deterministic, max_lags: int | None
) -> int:
    return select_lags_aic(series, max_lags=max_lags, deterministic=deterministic)
