"""Residual diagnostics for fitted error-correction models.

Three checks mirror standard post-estimation practice:

* a multivariate Breusch-Godfrey LM test for residual autocorrelation at
  each lag h = 1..H, using the auxiliary regression of the residuals on the
  original regressors plus the h-lagged residuals (zero-padded at the start),
  with statistic T * (n - tr(Sigma_u^{-1} Sigma_e)) ~ chi2(n^2);
* Jarque-Bera normality per equation, JB = T/6 * (S^2 + (K-3)^2 / 4);
* eigenvalue stability of the companion matrix of the implied level VAR.

A VECM of rank r imposes n - r unit roots on the level representation, so
the stability verdict asks for *exactly* that many moduli within tolerance
of one and nothing outside the unit circle beyond tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from ._ols import residualize
from .errors import EstimationError
from .vecm import VecmFit

__all__ = [
    "LmTestEntry",
    "NormalityEntry",
    "StabilityResult",
    "DiagnosticReport",
    "lm_autocorrelation_stat",
    "lm_autocorrelation",
    "jarque_bera_series",
    "jarque_bera",
    "companion_matrix",
    "stability",
    "diagnostic_report",
]

_UNIT_ROOT_TOL = 1e-6


@dataclass(frozen=True)
class LmTestEntry:
    lag: int
    statistic: float
    df: int
    p_value: float

    def to_dict(self) -> dict:
        return {"lag": self.lag, "statistic": self.statistic, "df": self.df, "p_value": self.p_value}


@dataclass(frozen=True)
class NormalityEntry:
    variable: str
    skewness: float
    kurtosis: float
    statistic: float
    df: int
    p_value: float

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
        }


@dataclass(frozen=True)
class StabilityResult:
    moduli: tuple[float, ...]  # descending
    unit_moduli_expected: int
    unit_moduli_found: int
    max_modulus: float
    is_stable: bool

    def to_dict(self) -> dict:
        return {
            "moduli": list(self.moduli),
            "unit_moduli_expected": self.unit_moduli_expected,
            "unit_moduli_found": self.unit_moduli_found,
            "max_modulus": self.max_modulus,
            "is_stable": self.is_stable,
        }


@dataclass(frozen=True)
class DiagnosticReport:
    autocorrelation: tuple[LmTestEntry, ...]
    normality: tuple[NormalityEntry, ...]
    stability: StabilityResult
    level: float
    autocorrelation_pass: bool
    normality_pass: bool
    stability_pass: bool

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "autocorrelation": [e.to_dict() for e in self.autocorrelation],
            "normality": [e.to_dict() for e in self.normality],
            "stability": self.stability.to_dict(),
            "verdicts": {
                "autocorrelation": self.autocorrelation_pass,
                "normality": self.normality_pass,
                "stability": self.stability_pass,
            },
        }


def lm_autocorrelation_stat(
    residuals: np.ndarray, regressors: np.ndarray, lag: int
) -> LmTestEntry:
    """LM statistic for residual autocorrelation at one lag.

    ``regressors`` must be the design matrix of the original fit (it is
    included in the auxiliary regression so the statistic is conditional on
    the estimated model).  Pre-sample lagged residuals are set to zero.
    """
    u = np.asarray(residuals, dtype=float)
    if u.ndim != 2:
        raise EstimationError("residuals must be a (T, n) array")
    t_eff, n = u.shape
    if lag < 1:
        raise EstimationError("lag must be at least 1")
    if lag >= t_eff:
        raise EstimationError("lag exceeds the residual sample")
    lagged = np.zeros_like(u)
    lagged[lag:] = u[:-lag]
    aux = np.hstack([regressors, lagged]) if regressors.size else lagged
    # Only the auxiliary residuals matter, so an ill-conditioned design is
    # acceptable here; the projection stays unique.
    e = residualize(u, aux, "LM auxiliary regression")
    sigma_u = u.T @ u / t_eff
    sigma_e = e.T @ e / t_eff
    try:
        ratio = np.linalg.solve(sigma_u, sigma_e)
    except np.linalg.LinAlgError:
        raise EstimationError("residual covariance is singular") from None
    stat = float(t_eff * (n - np.trace(ratio)))
    stat = max(stat, 0.0)
    df = n * n
    return LmTestEntry(lag=lag, statistic=stat, df=df, p_value=float(stats.chi2.sf(stat, df)))


def lm_autocorrelation(fit: VecmFit, max_lag: int = 4) -> tuple[LmTestEntry, ...]:
    """LM autocorrelation tests at lags 1..max_lag for a fitted VECM."""
    if max_lag < 0:
        raise EstimationError("max_lag must be nonnegative")
    return tuple(
        lm_autocorrelation_stat(fit.residuals, fit.design, h)
        for h in range(1, max_lag + 1)
    )


def jarque_bera_series(u: np.ndarray, name: str = "residual") -> NormalityEntry:
    """Jarque-Bera test on one residual series (population moments)."""
    u = np.asarray(u, dtype=float).ravel()
    t_eff = u.shape[0]
    if t_eff < 4:
        raise EstimationError("Jarque-Bera needs at least 4 observations")
    centred = u - u.mean()
    m2 = float(np.mean(centred**2))
    if m2 <= 0.0:
        raise EstimationError(f"residual series {name!r} has zero variance")
    skew = float(np.mean(centred**3) / m2**1.5)
    kurt = float(np.mean(centred**4) / m2**2)
    stat = t_eff / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
    return NormalityEntry(
        variable=name,
        skewness=skew,
        kurtosis=kurt,
        statistic=stat,
        df=2,
        p_value=float(stats.chi2.sf(stat, 2)),
    )


def jarque_bera(fit: VecmFit) -> tuple[NormalityEntry, ...]:
    return tuple(
        jarque_bera_series(fit.residuals[:, j], fit.variables[j])
        for j in range(fit.n)
    )


def companion_matrix(fit: VecmFit) -> np.ndarray:
    """Companion matrix of the level VAR implied by the VECM.

    With Pi = alpha beta' and short-run matrices Gamma_i, the level VAR
    coefficients are A_1 = I + Pi + Gamma_1, A_i = Gamma_i - Gamma_{i-1} and
    A_k = -Gamma_{k-1} (for k = 1 simply A_1 = I + Pi).
    """
    n = fit.n
    k = fit.lag_order
    pi = fit.pi
    eye = np.eye(n)
    a_mats: list[np.ndarray] = []
    if k == 1:
        a_mats.append(eye + pi)
    else:
        a_mats.append(eye + pi + fit.gamma[0])
        for i in range(2, k):
            a_mats.append(fit.gamma[i - 1] - fit.gamma[i - 2])
        a_mats.append(-fit.gamma[k - 2])
    top = np.hstack(a_mats)
    if k == 1:
        return top
    comp = np.zeros((n * k, n * k))
    comp[:n, :] = top
    comp[n:, :-n] = np.eye(n * (k - 1))
    return comp


def stability(fit: VecmFit) -> StabilityResult:
    """Eigenvalue stability check of the implied level VAR.

    A rank-r model on an n-dimensional system should place exactly n - r
    companion eigenvalues on the unit circle (the common trends) and all
    remaining ones strictly inside.
    """
    moduli = np.abs(np.linalg.eigvals(companion_matrix(fit)))
    moduli = np.sort(moduli)[::-1]
    expected = fit.n - fit.rank
    found = int(np.sum(np.abs(moduli - 1.0) <= _UNIT_ROOT_TOL))
    max_mod = float(moduli[0]) if moduli.size else 0.0
    stable = (max_mod <= 1.0 + _UNIT_ROOT_TOL) and (found == expected)
    return StabilityResult(
        moduli=tuple(float(m) for m in moduli),
        unit_moduli_expected=expected,
        unit_moduli_found=found,
        max_modulus=max_mod,
        is_stable=stable,
    )


def diagnostic_report(
    fit: VecmFit, max_lag: int = 4, level: float = 0.05
) -> DiagnosticReport:
    """Run all three diagnostics and aggregate pass/fail verdicts.

    The autocorrelation verdict fails if any tested lag rejects at ``level``;
    the normality verdict fails if any equation rejects.
    """
    if not 0.0 < level < 1.0:
        raise EstimationError("level must lie in (0, 1)")
    lm = lm_autocorrelation(fit, max_lag=max_lag)
    jb = jarque_bera(fit)
    stab = stability(fit)
    return DiagnosticReport(
        autocorrelation=lm,
        normality=jb,
        stability=stab,
        level=level,
        autocorrelation_pass=all(e.p_value >= level for e in lm),
        normality_pass=all(e.p_value >= level for e in jb),
        stability_pass=stab.is_stable,
    )
