"""Small shared least-squares helpers.

Thin wrappers over :func:`numpy.linalg.lstsq`.  :func:`ols` rank-checks the
design so estimators fail loudly rather than silently returning a
minimum-norm solution; :func:`residualize` deliberately does not, because a
projection is unique even when the design is collinear.
"""

from __future__ import annotations

import numpy as np

from .errors import EstimationError

# A design counts as rank-deficient when its smallest singular value is this
# far below its largest.  The threshold is a hard ratio rather than numpy's
# size-scaled matrix_rank default: severely ill-conditioned designs (smooth
# deterministic regressors, near-duplicate proxies) are legitimate in this
# domain and must still be solvable, while exact dependencies must fail.
RANK_TOL = 1e-12


def ols(y: np.ndarray, x: np.ndarray, context: str = "regression") -> tuple[np.ndarray, np.ndarray]:
    """Least squares of ``y`` (T or T x k) on ``x`` (T x p).

    Returns ``(coef, resid)``.  With an empty design (p = 0) the coefficient
    block is empty and the residuals are ``y`` itself.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise EstimationError(f"{context}: design matrix must be 2-d")
    if x.shape[1] == 0:
        coef = np.zeros((0,) if y.ndim == 1 else (0, y.shape[1]))
        return coef, y.copy()
    if x.shape[0] <= x.shape[1]:
        raise EstimationError(
            f"{context}: {x.shape[0]} observations cannot support "
            f"{x.shape[1]} regressors"
        )
    singular = np.linalg.svd(x, compute_uv=False)
    if singular[-1] <= singular[0] * RANK_TOL:
        raise EstimationError(f"{context}: rank-deficient regressor matrix")
    # rcond=-1 cuts at machine precision only, keeping small-but-real
    # directions that the default size-scaled cutoff would discard.
    coef, *_ = np.linalg.lstsq(x, y, rcond=-1)
    resid = y - x @ coef
    return coef, resid


def residualize(y: np.ndarray, x: np.ndarray, context: str = "projection") -> np.ndarray:
    """Residuals of ``y`` after projecting out the columns of ``x``.

    Unlike :func:`ols` this tolerates a rank-deficient ``x``: the projection
    onto the column space is unique even when the coefficients are not, and
    near-deterministic regressors (for example a smooth supply schedule whose
    lagged differences are numerically collinear) are legitimate here.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise EstimationError(f"{context}: design matrix must be 2-d")
    if x.shape[1] == 0:
        return y.copy()
    if x.shape[0] <= x.shape[1]:
        raise EstimationError(
            f"{context}: {x.shape[0]} observations cannot support "
            f"{x.shape[1]} regressors"
        )
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    return y - x @ coef


def xtx_inverse(x: np.ndarray, context: str = "regression") -> np.ndarray:
    """Inverse of X'X, raising :class:`EstimationError` when singular."""
    xtx = x.T @ x
    try:
        return np.linalg.inv(xtx)
    except np.linalg.LinAlgError:
        raise EstimationError(f"{context}: X'X is singular") from None
