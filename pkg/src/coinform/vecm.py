"""Vector error-correction estimation and coefficient inference.

Estimation is the classical two-step profile: :func:`coinform.johansen.concentrate`
delivers the eigen-decomposition, the cointegration space beta is read off
the leading eigenvectors, and the remaining coefficients (loadings alpha,
short-run matrices Gamma_i, unrestricted deterministic terms) come from the
multivariate least-squares regression of dZ_t on [beta' Z*_{t-1}, W_t].  By
Frisch-Waugh this reproduces the ML loadings exactly, and the residual
covariance is the ML estimate Sigma = E'E / T.

The log-likelihood is reported in two algebraically equal forms — the
regression form based on Sigma and the eigenvalue form based on
det(S00) and the first r eigenvalues — which gives downstream code a cheap
internal consistency check.

Normalisation follows the applied convention: each cointegration vector is
scaled so the coefficient on a chosen variable (the price, in the
replication) equals one, and reported long-run *effects* of the remaining
variables are the negated beta entries, i.e. the right-hand side of

    price = sum_j effect_j * x_j + const + (stationary error).

Standard errors for the normalised beta use the standard asymptotics of the
reduced-rank estimator (see Lütkepohl 2005, ch. 7): with R12 the rows of the
concentrated level residuals belonging to the free (non-pivot) coefficients,

    Var(beta_free) = kron( (R12' R12)^{-1}, (alpha' Sigma^{-1} alpha)^{-1} ).

For rank one this is exact for the pivot normalisation; for higher rank the
pivot-scaled columns are not a full Phillips normal form and the formula is
applied column by column as an approximation (only the first relation is
tabulated by the replication layer).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from ._ols import ols
from .errors import DataError, EstimationError
from .johansen import EigenAnalysis, JohansenCase, concentrate
from .series_store import Panel

__all__ = [
    "VecmFit",
    "CoefficientCell",
    "EffectTables",
    "estimate_vecm",
    "reduce_to_var",
    "normalize_long_run",
    "inference",
    "select_var_lags_aic",
    "stars_from_t",
]

#: Two-sided normal thresholds for 10, 5 and 1 percent significance stars.
SIGNIFICANCE_THRESHOLDS = ((2.576, "***"), (1.960, "**"), (1.645, "*"))


def stars_from_t(t_stat: float) -> str:
    if math.isnan(t_stat):
        return ""
    a = abs(t_stat)
    for threshold, marker in SIGNIFICANCE_THRESHOLDS:
        if a >= threshold:
            return marker
    return ""


@dataclass(frozen=True)
class VecmFit:
    """A fitted vector error-correction model.

    ``beta`` has ``n_aug`` rows (the n variables followed by any restricted
    deterministic terms) and ``rank`` columns; ``alpha`` is n x rank.
    ``gamma`` holds the k-1 short-run matrices, each n x n with
    ``gamma[i][eq, var]`` the coefficient of the (i+1)-lagged difference of
    ``var`` in the equation for ``eq``.
    """

    variables: tuple[str, ...]
    case: JohansenCase
    lag_order: int
    rank: int
    effective_t: int
    alpha: np.ndarray
    beta: np.ndarray
    gamma: tuple[np.ndarray, ...]
    det_coefficients: np.ndarray  # n x d, order follows det_labels
    det_labels: tuple[str, ...]
    residuals: np.ndarray  # effective_t x n
    sigma: np.ndarray  # ML residual covariance
    log_likelihood: float
    log_likelihood_eigen: float
    eigenvalues: tuple[float, ...]
    normalized_on: str | None
    beta_labels: tuple[str, ...]
    design: np.ndarray = field(repr=False)  # [EC, short-run] regressors
    design_labels: tuple[str, ...] = field(repr=False)
    level_residuals: np.ndarray = field(repr=False)  # concentrated R1

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def pi(self) -> np.ndarray:
        """Long-run impact matrix alpha @ beta' restricted to the variables."""
        return self.alpha @ self.beta[: self.n, :].T

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "case": self.case.value,
            "lag_order": self.lag_order,
            "rank": self.rank,
            "effective_t": self.effective_t,
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "beta_labels": list(self.beta_labels),
            "gamma": [g.tolist() for g in self.gamma],
            "det_labels": list(self.det_labels),
            "det_coefficients": self.det_coefficients.tolist(),
            "sigma": self.sigma.tolist(),
            "log_likelihood": self.log_likelihood,
            "log_likelihood_eigen": self.log_likelihood_eigen,
            "eigenvalues": list(self.eigenvalues),
            "normalized_on": self.normalized_on,
        }


def _loglik_regression(sigma: np.ndarray, t_eff: int) -> float:
    n = sigma.shape[0]
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise EstimationError(
            "residual covariance is singular; the system contains an exact "
            "linear dependency"
        )
    return -0.5 * t_eff * (n * math.log(2.0 * math.pi) + n + logdet)


def _loglik_eigen(analysis: EigenAnalysis, rank: int) -> float:
    n = analysis.n
    t_eff = analysis.effective_t
    sign, logdet_s00 = np.linalg.slogdet(analysis.s00)
    if sign <= 0:
        raise EstimationError("S00 is singular")
    tail = float(np.sum(np.log1p(-analysis.eigenvalues[:rank])))
    return -0.5 * t_eff * (n * math.log(2.0 * math.pi) + n + logdet_s00 + tail)


def _pivot_index(variables: tuple[str, ...], on: int | str) -> int:
    if isinstance(on, str):
        if on not in variables:
            raise DataError(f"cannot normalise on unknown variable {on!r}")
        return variables.index(on)
    if not 0 <= on < len(variables):
        raise DataError(f"normalisation index {on} out of range")
    return int(on)


def _beta_labels(analysis: EigenAnalysis) -> tuple[str, ...]:
    return analysis.variables + analysis.case.restricted_terms


def _assemble_fit(
    analysis: EigenAnalysis,
    beta: np.ndarray,
    rank: int,
    normalized_on: str | None,
) -> VecmFit:
    t_eff = analysis.effective_t
    n = analysis.n
    k = analysis.lag_order
    ec = analysis.levels @ beta  # t_eff x rank
    design = np.hstack([ec, analysis.short_run])
    ec_labels = tuple(f"ec{j + 1}" for j in range(rank))
    design_labels = ec_labels + analysis.short_run_labels

    coef, resid = ols(analysis.delta, design, "VECM second stage")
    if rank == 0:
        coef = coef.reshape(design.shape[1], n)
    alpha = coef[:rank, :].T
    short = coef[rank:, :]

    gamma = tuple(
        short[(i - 1) * n : i * n, :].T for i in range(1, k)
    )
    n_det = len(analysis.case.unrestricted_terms)
    det_block = short[(k - 1) * n :, :]
    det_coefficients = det_block.T if n_det else np.zeros((n, 0))
    det_labels = analysis.case.unrestricted_terms

    sigma = resid.T @ resid / t_eff
    return VecmFit(
        variables=analysis.variables,
        case=analysis.case,
        lag_order=k,
        rank=rank,
        effective_t=t_eff,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        det_coefficients=det_coefficients,
        det_labels=det_labels,
        residuals=resid,
        sigma=sigma,
        log_likelihood=_loglik_regression(sigma, t_eff),
        log_likelihood_eigen=_loglik_eigen(analysis, rank),
        eigenvalues=tuple(float(v) for v in analysis.eigenvalues),
        normalized_on=normalized_on,
        beta_labels=_beta_labels(analysis),
        design=design,
        design_labels=design_labels,
        level_residuals=analysis.r1,
    )


def estimate_vecm(
    panel: Panel | np.ndarray,
    lag_order: int,
    rank: int,
    case: JohansenCase = JohansenCase.RESTRICTED_CONSTANT,
    normalize_on: int | str | None = 0,
) -> VecmFit:
    """Fit a VECM with cointegration rank strictly between 0 and n.

    For the boundary ranks use :func:`reduce_to_var`, which estimates the
    corresponding plain VAR (in differences, or in levels via full rank).
    ``normalize_on`` scales each cointegration vector so that variable's
    coefficient is one; pass ``None`` to keep the raw eigenvector scale.
    """
    analysis = concentrate(panel, lag_order, case)
    n = analysis.n
    if not 1 <= rank <= n - 1:
        raise DataError(
            f"rank {rank} out of range for estimate_vecm; rank 0 and rank {n} "
            "are boundary cases handled by reduce_to_var"
        )
    beta = analysis.eigenvectors[:, :rank].copy()
    pivot_name: str | None = None
    if normalize_on is not None:
        pivot = _pivot_index(analysis.variables, normalize_on)
        pivot_name = analysis.variables[pivot]
        for j in range(rank):
            c = beta[pivot, j]
            scale = np.max(np.abs(beta[:, j]))
            if abs(c) <= 1e-10 * max(scale, 1.0):
                raise EstimationError(
                    f"cannot normalise relation {j + 1} on {pivot_name!r}: "
                    "pivot coefficient is zero"
                )
            beta[:, j] = beta[:, j] / c
    return _assemble_fit(analysis, beta, rank, pivot_name)


def reduce_to_var(
    panel: Panel | np.ndarray,
    lag_order: int,
    boundary: str,
    case: JohansenCase = JohansenCase.RESTRICTED_CONSTANT,
) -> VecmFit:
    """Boundary-rank models: ``rank_zero`` or ``full_rank``.

    ``rank_zero`` drops the level term entirely, leaving a VAR in first
    differences (alpha and beta are empty).  ``full_rank`` keeps all n
    eigenvectors, which reproduces the unrestricted least-squares estimate
    of the level VAR written in error-correction form.
    """
    analysis = concentrate(panel, lag_order, case)
    n = analysis.n
    if boundary == "rank_zero":
        beta = np.zeros((analysis.n_aug, 0))
        return _assemble_fit(analysis, beta, 0, None)
    if boundary == "full_rank":
        beta = analysis.eigenvectors[:, :n].copy()
        return _assemble_fit(analysis, beta, n, None)
    raise DataError(f"unknown boundary {boundary!r}; use 'rank_zero' or 'full_rank'")


def normalize_long_run(fit: VecmFit, on: int | str) -> VecmFit:
    """Rescale each cointegration vector so ``on`` carries coefficient one.

    The loadings are rescaled inversely, so alpha @ beta', the fitted values
    and the residuals are unchanged (this is checked cheaply downstream via
    the stored log-likelihood, which is scale-invariant).
    """
    if fit.rank == 0:
        raise EstimationError("cannot normalise a rank-zero model")
    pivot = _pivot_index(fit.variables, on)
    beta = fit.beta.copy()
    alpha = fit.alpha.copy()
    design = fit.design.copy()
    for j in range(fit.rank):
        c = beta[pivot, j]
        scale = np.max(np.abs(beta[:, j]))
        if abs(c) <= 1e-10 * max(scale, 1.0):
            raise EstimationError(
                f"cannot normalise relation {j + 1} on "
                f"{fit.variables[pivot]!r}: pivot coefficient is zero"
            )
        beta[:, j] /= c
        alpha[:, j] *= c
        design[:, j] *= c
    return dataclasses.replace(
        fit,
        beta=beta,
        alpha=alpha,
        design=design,
        normalized_on=fit.variables[pivot],
    )


@dataclass(frozen=True)
class CoefficientCell:
    """One reported coefficient: value, dispersion, significance markup."""

    value: float
    std_error: float
    t_stat: float
    stars: str

    @classmethod
    def from_value_se(cls, value: float, se: float) -> "CoefficientCell":
        if se == 0.0:
            t = math.inf if value != 0.0 else 0.0
        elif math.isnan(se):
            t = math.nan
        else:
            t = value / se
        return cls(value=value, std_error=se, t_stat=t, stars=stars_from_t(t))

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "t_stat": self.t_stat,
            "stars": self.stars,
        }


@dataclass(frozen=True)
class EffectTables:
    """Coefficient tables derived from one fit.

    ``short_run`` maps equation name -> regressor label -> cell, covering
    the error-correction terms, lagged differences and unrestricted
    deterministic terms.  ``long_run`` holds the first cointegration
    relation rewritten as effects on the normalised variable, i.e. negated
    beta coefficients keyed by variable (plus ``const`` for a restricted
    constant/trend term).
    """

    short_run: dict[str, dict[str, CoefficientCell]]
    long_run: dict[str, CoefficientCell]
    normalized_on: str | None
    rank: int
    lag_order: int
    case: JohansenCase

    def to_dict(self) -> dict:
        return {
            "short_run": {
                eq: {label: cell.to_dict() for label, cell in row.items()}
                for eq, row in self.short_run.items()
            },
            "long_run": {v: c.to_dict() for v, c in self.long_run.items()},
            "normalized_on": self.normalized_on,
            "rank": self.rank,
            "lag_order": self.lag_order,
            "case": self.case.value,
        }


def inference(fit: VecmFit) -> EffectTables:
    """Standard errors, t-ratios and significance stars for a fitted VECM.

    Short-run coefficients use the seemingly-unrelated-regression covariance
    Sigma (x) (X'X)^{-1} built from the ML residual covariance.  Long-run
    coefficients use the reduced-rank asymptotics described in the module
    docstring and require a normalised fit; the pivot row has zero variance
    by construction.
    """
    t_eff, n = fit.residuals.shape
    x = fit.design
    short_run: dict[str, dict[str, CoefficientCell]] = {}
    if x.shape[1]:
        xtx = x.T @ x
        try:
            xtx_inv = np.linalg.inv(xtx)
        except np.linalg.LinAlgError:
            raise EstimationError("VECM design matrix is singular") from None
        # Re-derive the stacked coefficient matrix from the stored blocks so
        # the table always matches the fit it describes.
        coef_rows: list[np.ndarray] = [fit.alpha.T[j] for j in range(fit.rank)]
        for g in fit.gamma:
            coef_rows.extend(g.T[i] for i in range(n))
        for d in range(len(fit.det_labels)):
            coef_rows.append(fit.det_coefficients[:, d])
        coef = np.vstack(coef_rows) if coef_rows else np.zeros((0, n))
        for eq_idx, eq in enumerate(fit.variables):
            row: dict[str, CoefficientCell] = {}
            for j, label in enumerate(fit.design_labels):
                se = math.sqrt(max(fit.sigma[eq_idx, eq_idx] * xtx_inv[j, j], 0.0))
                row[label] = CoefficientCell.from_value_se(float(coef[j, eq_idx]), se)
            short_run[eq] = row
    else:
        short_run = {eq: {} for eq in fit.variables}

    long_run: dict[str, CoefficientCell] = {}
    if fit.rank >= 1 and fit.normalized_on is not None:
        pivot = fit.variables.index(fit.normalized_on)
        free = [i for i in range(fit.beta.shape[0]) if i != pivot]
        r12 = fit.level_residuals[:, free]
        try:
            m1 = np.linalg.inv(r12.T @ r12)
            omega = np.linalg.inv(fit.alpha.T @ np.linalg.solve(fit.sigma, fit.alpha))
        except np.linalg.LinAlgError:
            raise EstimationError("long-run covariance is singular") from None
        for row_pos, i in enumerate(free):
            label = fit.beta_labels[i]
            beta_val = float(fit.beta[i, 0])
            se = math.sqrt(max(m1[row_pos, row_pos] * omega[0, 0], 0.0))
            # Reported as an effect on the normalised variable.
            key = "const" if label in ("const", "trend") else label
            long_run[key] = CoefficientCell.from_value_se(-beta_val, se)

    return EffectTables(
        short_run=short_run,
        long_run=long_run,
        normalized_on=fit.normalized_on,
        rank=fit.rank,
        lag_order=fit.lag_order,
        case=fit.case,
    )


def select_var_lags_aic(
    panel: Panel | np.ndarray, max_lags: int = 8, include_constant: bool = True
) -> int:
    """AIC-minimising lag order for the VAR in levels, on a common sample.

    All candidate orders 1..max_lags are fitted on the sample implied by the
    largest order so the criteria are comparable; ties break toward the
    smaller order.  The ceiling is reduced automatically when the sample
    cannot support it.
    """
    z, _ = _panel_matrix(panel)
    t_total, n = z.shape
    if max_lags < 1:
        raise DataError("max_lags must be at least 1")
    while max_lags > 1 and t_total - max_lags <= n * max_lags + 10:
        max_lags -= 1
    t_c = t_total - max_lags
    if t_c <= n + 10:
        raise DataError("sample too short for VAR lag selection")

    target = z[max_lags:]
    best_order: int | None = None
    best_aic = math.inf
    for k in range(1, max_lags + 1):
        cols = [np.ones((t_c, 1))] if include_constant else []
        for i in range(1, k + 1):
            cols.append(z[max_lags - i : t_total - i])
        design = np.hstack(cols)
        try:
            _, resid = ols(target, design, "VAR lag selection")
        except EstimationError:
            # High orders of a smooth deterministic component can be
            # numerically collinear; drop those candidates rather than abort.
            continue
        sigma = resid.T @ resid / t_c
        sign, logdet = np.linalg.slogdet(sigma)
        if sign <= 0:
            raise EstimationError(
                "VAR lag selection: singular residual covariance (collinear levels)"
            )
        n_params = n * design.shape[1]
        aic = logdet + 2.0 * n_params / t_c
        if aic < best_aic - 1e-12:
            best_aic = aic
            best_order = k
    if best_order is None:
        raise EstimationError(
            "VAR lag selection: every candidate design was rank-deficient"
        )
    return best_order


def _panel_matrix(panel: Panel | np.ndarray) -> tuple[np.ndarray, tuple[str, ...]]:
    if isinstance(panel, Panel):
        return np.asarray(panel.data, dtype=float), panel.variables
    z = np.asarray(panel, dtype=float)
    if z.ndim != 2:
        raise DataError("expected a Panel or a (T, n) array")
    return z, tuple(f"v{j}" for j in range(z.shape[1]))
