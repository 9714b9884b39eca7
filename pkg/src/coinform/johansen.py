"""Johansen reduced-rank cointegration analysis.

The workhorse is :func:`concentrate`, which turns a level panel into the
eigenvalue problem at the heart of Johansen's method.  Writing the VECM as

    dZ_t = Pi Z*_{t-1} + Gamma_1 dZ_{t-1} + ... + Gamma_{k-1} dZ_{t-k+1}
           + (unrestricted deterministics) + eps_t

the short-run block (lagged differences plus unrestricted deterministic
terms) is concentrated out of both dZ_t and the augmented lagged level
Z*_{t-1}, leaving residuals R0 and R1 and product-moment matrices
S_ij = R_i' R_j / T.  Solving det(lambda S11 - S10 S00^{-1} S01) = 0 under a
Cholesky factor of S11 gives eigenvalues in [0, 1) and eigenvectors
normalised so V' S11 V = I.

Five deterministic cases are supported; "restricted" terms live inside the
cointegration relation (appended to Z*), "unrestricted" ones outside it:

    case                     inside relation   outside relation
    none                     -                 -
    restricted_constant      1                 -
    unrestricted_constant    -                 1
    restricted_trend         t                 1
    unrestricted_trend       -                 1, t

Rank is selected by stepping the trace test up from r = 0; the joint
case-and-rank search (:func:`pantula_select`) also steps through the three
middle cases from most to least restrictive at each rank, accepting the
first combination whose trace test fails to reject.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import critical_values as cv
from ._ols import residualize
from .errors import DataError, EstimationError
from .series_store import Panel

__all__ = [
    "JohansenCase",
    "PANTULA_CASES",
    "EigenAnalysis",
    "CointRankResult",
    "PantulaResult",
    "concentrate",
    "trace_statistic",
    "max_eigen_statistic",
    "rank_decision",
    "pantula_select",
]

#: Tolerance used when clamping eigenvalues into [0, 1).
_EIGEN_CLAMP_WARN = 1e-10


class JohansenCase(enum.Enum):
    NONE = "none"
    RESTRICTED_CONSTANT = "restricted_constant"
    UNRESTRICTED_CONSTANT = "unrestricted_constant"
    RESTRICTED_TREND = "restricted_trend"
    UNRESTRICTED_TREND = "unrestricted_trend"

    @property
    def restricted_terms(self) -> tuple[str, ...]:
        return {
            JohansenCase.RESTRICTED_CONSTANT: ("const",),
            JohansenCase.RESTRICTED_TREND: ("trend",),
        }.get(self, ())

    @property
    def unrestricted_terms(self) -> tuple[str, ...]:
        return {
            JohansenCase.UNRESTRICTED_CONSTANT: ("const",),
            JohansenCase.RESTRICTED_TREND: ("const",),
            JohansenCase.UNRESTRICTED_TREND: ("const", "trend"),
        }.get(self, ())


#: Sweep order for the joint case/rank search: most to least restrictive
#: among the three cases that are plausible for economic level data.
PANTULA_CASES = (
    JohansenCase.RESTRICTED_CONSTANT,
    JohansenCase.UNRESTRICTED_CONSTANT,
    JohansenCase.RESTRICTED_TREND,
)


@dataclass(frozen=True)
class EigenAnalysis:
    """Concentrated eigen-decomposition of one panel under one case.

    ``eigenvectors`` has one row per component of the augmented lagged level
    vector (the n variables plus any restricted deterministic terms) and one
    column per retained eigenvalue, normalised so that V' S11 V = I.
    The design blocks used to build the problem are kept so that downstream
    estimation (VECM coefficients, diagnostics) can reuse them without
    recomputation.
    """

    case: JohansenCase
    lag_order: int
    variables: tuple[str, ...]
    effective_t: int
    eigenvalues: np.ndarray  # (n,), descending, in [0, 1)
    eigenvectors: np.ndarray  # (n_aug, n)
    s00: np.ndarray
    s01: np.ndarray  # (n, n_aug)
    s11: np.ndarray  # (n_aug, n_aug)
    # Design blocks, all with effective_t rows:
    delta: np.ndarray = field(repr=False)  # dZ_t
    levels: np.ndarray = field(repr=False)  # Z*_{t-1} (augmented)
    short_run: np.ndarray = field(repr=False)  # lagged diffs + unrestricted det
    short_run_labels: tuple[str, ...] = field(repr=False)
    r0: np.ndarray = field(repr=False)
    r1: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def n_aug(self) -> int:
        return self.levels.shape[1]


def _as_matrix(panel: Panel | np.ndarray) -> tuple[np.ndarray, tuple[str, ...]]:
    if isinstance(panel, Panel):
        return np.asarray(panel.data, dtype=float), panel.variables
    z = np.asarray(panel, dtype=float)
    if z.ndim != 2:
        raise DataError("expected a Panel or a (T, n) array")
    return z, tuple(f"v{j}" for j in range(z.shape[1]))


def concentrate(
    panel: Panel | np.ndarray, lag_order: int, case: JohansenCase
) -> EigenAnalysis:
    """Concentrate the VECM and solve the Johansen eigenvalue problem.

    ``lag_order`` is the lag length k of the underlying VAR in levels, so the
    VECM carries k-1 lagged differences; it must be at least 1.
    """
    z, names = _as_matrix(panel)
    t_total, n = z.shape
    if n < 2:
        raise DataError("cointegration analysis needs at least two variables")
    if lag_order < 1:
        raise DataError("lag order must be at least 1")
    t_eff = t_total - lag_order
    dz_full = np.diff(z, axis=0)  # (t_total-1, n), row i is dZ_{i+1}

    delta = dz_full[lag_order - 1 :]
    levels_cols = [z[lag_order - 1 : t_total - 1]]
    # Global observation index of the current row (1-based), used for trends.
    time_index = np.arange(lag_order + 1, t_total + 1, dtype=float)

    for term in case.restricted_terms:
        levels_cols.append(
            np.ones((t_eff, 1)) if term == "const" else time_index.reshape(-1, 1)
        )
    levels = np.hstack(levels_cols)

    short_cols: list[np.ndarray] = []
    short_labels: list[str] = []
    for i in range(1, lag_order):
        short_cols.append(dz_full[lag_order - 1 - i : t_total - 1 - i])
        short_labels.extend(f"L{i}D.{name}" for name in names)
    for term in case.unrestricted_terms:
        short_cols.append(
            np.ones((t_eff, 1)) if term == "const" else time_index.reshape(-1, 1)
        )
        short_labels.append(term)
    short_run = np.hstack(short_cols) if short_cols else np.empty((t_eff, 0))

    n_aug = levels.shape[1]
    if t_eff <= n_aug + short_run.shape[1] + 2:
        raise DataError(
            f"effective sample ({t_eff}) too small for {n_aug} levels plus "
            f"{short_run.shape[1]} short-run regressors"
        )

    r0 = residualize(delta, short_run, "short-run concentration")
    r1 = residualize(levels, short_run, "short-run concentration")

    s00 = r0.T @ r0 / t_eff
    s01 = r0.T @ r1 / t_eff
    s11 = r1.T @ r1 / t_eff

    try:
        l11 = np.linalg.cholesky(s11)
    except np.linalg.LinAlgError:
        raise EstimationError(
            "S11 is not positive definite (levels are collinear)"
        ) from None
    try:
        s00_chol = scipy.linalg.cho_factor(s00, lower=True)
    except scipy.linalg.LinAlgError:
        raise EstimationError(
            "S00 is not positive definite (differences are collinear)"
        ) from None

    # M = L^{-1} S10 S00^{-1} S01 L^{-T}, same spectrum as the pencil
    # (S10 S00^{-1} S01, S11); solved symmetrically for stability.
    s10 = s01.T
    inner = scipy.linalg.cho_solve(s00_chol, s01)  # S00^{-1} S01
    m_mat = s10 @ inner
    half = scipy.linalg.solve_triangular(l11, m_mat, lower=True)
    m_sym = scipy.linalg.solve_triangular(l11, half.T, lower=True).T
    m_sym = (m_sym + m_sym.T) / 2.0

    eigvals, eigvecs = np.linalg.eigh(m_sym)  # ascending
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    clamp = max(0.0, float(-eigvals.min(initial=0.0)), float(eigvals.max(initial=0.0) - 1.0))
    if clamp > _EIGEN_CLAMP_WARN:
        warnings.warn(
            f"Johansen eigenvalues clamped into [0, 1) by {clamp:.3e}",
            RuntimeWarning,
            stacklevel=2,
        )
    eigvals = np.clip(eigvals, 0.0, 1.0 - 1e-12)

    # Back-transform so that V' S11 V = I, then keep the leading n columns.
    vecs = scipy.linalg.solve_triangular(l11.T, eigvecs, lower=False)
    eigvals = eigvals[:n]
    vecs = vecs[:, :n]

    return EigenAnalysis(
        case=case,
        lag_order=lag_order,
        variables=names,
        effective_t=t_eff,
        eigenvalues=eigvals,
        eigenvectors=vecs,
        s00=s00,
        s01=s01,
        s11=s11,
        delta=delta,
        levels=levels,
        short_run=short_run,
        short_run_labels=tuple(short_labels),
        r0=r0,
        r1=r1,
    )


def trace_statistic(analysis: EigenAnalysis, rank: int) -> float:
    """-T * sum_{i>r} log(1 - lambda_i), the trace statistic for H0: rank <= r."""
    n = analysis.n
    if not 0 <= rank < n:
        raise ValueError(f"rank must lie in [0, {n - 1}], got {rank}")
    lam = analysis.eigenvalues[rank:]
    return float(-analysis.effective_t * np.sum(np.log1p(-lam)))


def max_eigen_statistic(analysis: EigenAnalysis, rank: int) -> float:
    """-T * log(1 - lambda_{r+1}), the maximum-eigenvalue statistic."""
    n = analysis.n
    if not 0 <= rank < n:
        raise ValueError(f"rank must lie in [0, {n - 1}], got {rank}")
    lam = float(analysis.eigenvalues[rank])
    return float(-analysis.effective_t * math.log1p(-lam))


@dataclass(frozen=True)
class CointRankResult:
    """Full rank-decision record for one eigen-analysis at one level."""

    case: JohansenCase
    level: str
    n: int
    effective_t: int
    eigenvalues: tuple[float, ...]
    trace_statistics: tuple[float, ...]
    max_eigen_statistics: tuple[float, ...]
    trace_critical_values: tuple[float, ...]
    max_eigen_critical_values: tuple[float, ...]
    selected_rank: int
    selected_rank_max_eigen: int

    def decision_trail(self) -> list[dict]:
        rows = []
        for r in range(self.n):
            rows.append(
                {
                    "rank": r,
                    "trace": self.trace_statistics[r],
                    "trace_cv": self.trace_critical_values[r],
                    "trace_rejects": self.trace_statistics[r] > self.trace_critical_values[r],
                    "max_eigen": self.max_eigen_statistics[r],
                    "max_eigen_cv": self.max_eigen_critical_values[r],
                    "max_eigen_rejects": self.max_eigen_statistics[r]
                    > self.max_eigen_critical_values[r],
                }
            )
        return rows

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "level": self.level,
            "n": self.n,
            "effective_t": self.effective_t,
            "eigenvalues": list(self.eigenvalues),
            "selected_rank": self.selected_rank,
            "selected_rank_max_eigen": self.selected_rank_max_eigen,
            "decision_trail": self.decision_trail(),
        }


def rank_decision(
    analysis: EigenAnalysis, level: float | str = "5%"
) -> CointRankResult:
    """Step the trace (and max-eigen) tests up from r = 0.

    The selected rank is the first r whose null is not rejected; if every
    r < n is rejected the system is treated as full rank (stationary).
    """
    label = cv.level_label(level)
    n = analysis.n
    trace_stats, trace_cvs = [], []
    max_stats, max_cvs = [], []
    for r in range(n):
        m = n - r
        trace_stats.append(trace_statistic(analysis, r))
        max_stats.append(max_eigen_statistic(analysis, r))
        trace_cvs.append(cv.johansen_cv(analysis.case.value, "trace", m)[label])
        max_cvs.append(cv.johansen_cv(analysis.case.value, "max_eigen", m)[label])

    def first_accept(stats: list[float], cvs: list[float]) -> int:
        for r, (stat, crit) in enumerate(zip(stats, cvs)):
            if stat <= crit:
                return r
        return n

    return CointRankResult(
        case=analysis.case,
        level=label,
        n=n,
        effective_t=analysis.effective_t,
        eigenvalues=tuple(float(v) for v in analysis.eigenvalues),
        trace_statistics=tuple(trace_stats),
        max_eigen_statistics=tuple(max_stats),
        trace_critical_values=tuple(trace_cvs),
        max_eigen_critical_values=tuple(max_cvs),
        selected_rank=first_accept(trace_stats, trace_cvs),
        selected_rank_max_eigen=first_accept(max_stats, max_cvs),
    )


@dataclass(frozen=True)
class PantulaResult:
    case: JohansenCase
    rank: int
    rank_result: CointRankResult
    sweep_trail: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "rank": self.rank,
            "sweep_trail": [dict(row) for row in self.sweep_trail],
            "rank_result": self.rank_result.to_dict(),
        }


def pantula_select(
    panel: Panel | np.ndarray, lag_order: int, level: float | str = "5%"
) -> PantulaResult:
    """Joint deterministic-case and rank selection (Pantula principle).

    For each rank r = 0..n-1, the three candidate cases are tried from most
    to least restrictive; the first (case, r) whose trace test fails to
    reject wins.  If everything rejects, the least restrictive case with
    full rank is returned.
    """
    label = cv.level_label(level)
    analyses = {case: concentrate(panel, lag_order, case) for case in PANTULA_CASES}
    results = {case: rank_decision(analyses[case], label) for case in PANTULA_CASES}
    n = analyses[PANTULA_CASES[0]].n

    trail: list[dict] = []
    for r in range(n):
        for case in PANTULA_CASES:
            res = results[case]
            stat = res.trace_statistics[r]
            crit = res.trace_critical_values[r]
            rejected = stat > crit
            trail.append(
                {
                    "rank": r,
                    "case": case.value,
                    "trace": stat,
                    "trace_cv": crit,
                    "rejected": rejected,
                }
            )
            if not rejected:
                return PantulaResult(
                    case=case, rank=r, rank_result=res, sweep_trail=tuple(trail)
                )
    last = PANTULA_CASES[-1]
    return PantulaResult(
        case=last, rank=n, rank_result=results[last], sweep_trail=tuple(trail)
    )
