"""Critical-value tables and lookups.

Two tables ship with the package under ``coinform/data``:

* ``dickey_fuller.tsv`` — MacKinnon (2010) response-surface coefficients for
  the Dickey-Fuller tau distribution.  Critical values are a smooth function
  of the effective sample size, ``cv = b0 + b1/T + b2/T^2 + b3/T^3``.
* ``johansen.tsv`` — 90/95/99 percent quantiles of the Johansen trace and
  maximum-eigenvalue statistics, keyed by deterministic case and by the
  number of common trends ``m`` under the null.  Cases without restricted
  deterministic terms carry the MacKinnon-Haug-Michelis (1996) values; the
  restricted-constant and restricted-trend cases were simulated from the
  Brownian-functional limits by ``tools/gen_johansen_cv.py`` and validated
  against Osterwald-Lenum (1992).

Both files are integrity-checked against ``MANIFEST.json`` on first use.
"""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources

from .errors import CriticalValueError

LEVELS = ("1%", "5%", "10%")
JOHANSEN_LEVELS = ("10%", "5%", "1%")  # columns q90, q95, q99 in the table

_LEVEL_TO_FLOAT = {"1%": 0.01, "5%": 0.05, "10%": 0.10}
_FLOAT_TO_LEVEL = {0.01: "1%", 0.05: "5%", 0.10: "10%"}


def level_label(level: float | str) -> str:
    """Normalise a significance level to its table label ('1%', '5%', '10%')."""
    if isinstance(level, str):
        if level in _LEVEL_TO_FLOAT:
            return level
        raise CriticalValueError(f"unsupported significance level {level!r}")
    for key, label in _FLOAT_TO_LEVEL.items():
        if abs(level - key) < 1e-12:
            return label
    raise CriticalValueError(
        f"unsupported significance level {level!r}; tables cover 0.01, 0.05, 0.10"
    )


def _read_data_text(name: str) -> str:
    ref = resources.files("coinform.data").joinpath(name)
    try:
        raw = ref.read_bytes()
    except FileNotFoundError:
        raise CriticalValueError(f"missing bundled data file {name!r}") from None
    try:
        manifest = json.loads(
            resources.files("coinform.data").joinpath("MANIFEST.json").read_text()
        )
    except FileNotFoundError:
        raise CriticalValueError(
            "missing data manifest MANIFEST.json; regenerate with "
            "tools/gen_johansen_cv.py"
        ) from None
    if name not in manifest:
        raise CriticalValueError(f"data file {name!r} has no manifest entry")
    digest = hashlib.sha256(raw).hexdigest()
    if digest != manifest[name]:
        raise CriticalValueError(
            f"data file {name!r} failed its checksum; reinstall the package "
            f"or regenerate with tools/gen_johansen_cv.py"
        )
    return raw.decode("utf-8")


@lru_cache(maxsize=1)
def _dickey_fuller_table() -> dict[tuple[str, str], tuple[float, float, float, float]]:
    table: dict[tuple[str, str], tuple[float, float, float, float]] = {}
    for line in _read_data_text("dickey_fuller.tsv").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("case\t"):
            continue
        case, level, *coefs = line.split("\t")
        table[(case, level)] = tuple(float(c) for c in coefs)  # type: ignore[assignment]
    return table


@lru_cache(maxsize=1)
def _johansen_table() -> dict[tuple[str, str, int], dict[str, float]]:
    table: dict[tuple[str, str, int], dict[str, float]] = {}
    for line in _read_data_text("johansen.tsv").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("case\t"):
            continue
        case, stat, m, q90, q95, q99 = line.split("\t")
        table[(case, stat, int(m))] = {
            "10%": float(q90),
            "5%": float(q95),
            "1%": float(q99),
        }
    return table


def verify_checksums() -> dict[str, str]:
    """Re-hash every bundled data file against MANIFEST.json.

    Returns the manifest mapping on success and raises
    :class:`CriticalValueError` on any mismatch or missing file.
    """
    manifest = json.loads(
        resources.files("coinform.data").joinpath("MANIFEST.json").read_text()
    )
    for name in manifest:
        _read_data_text(name)
    return dict(manifest)


def dickey_fuller_cv(case: str, nobs: int) -> dict[str, float]:
    """Critical values for the DF/ADF tau statistic at effective size ``nobs``.

    ``case`` is one of ``none``, ``constant``, ``constant_trend``.
    """
    if nobs <= 0:
        raise CriticalValueError("effective sample size must be positive")
    table = _dickey_fuller_table()
    out: dict[str, float] = {}
    for level in LEVELS:
        try:
            b0, b1, b2, b3 = table[(case, level)]
        except KeyError:
            raise CriticalValueError(
                f"no Dickey-Fuller critical values for case {case!r}"
            ) from None
        t = float(nobs)
        out[level] = b0 + b1 / t + b2 / t**2 + b3 / t**3
    return out


def johansen_cv(case: str, statistic: str, m: int) -> dict[str, float]:
    """Asymptotic Johansen critical values.

    ``statistic`` is ``trace`` or ``max_eigen``; ``m`` is the number of
    common trends under the null (system dimension minus hypothesised rank).
    Raises :class:`CriticalValueError` when the table has no entry — the
    shipped table covers m = 1..12 for all five deterministic cases.
    """
    if statistic not in ("trace", "max_eigen"):
        raise CriticalValueError(f"unknown statistic {statistic!r}")
    try:
        return dict(_johansen_table()[(case, statistic, m)])
    except KeyError:
        raise CriticalValueError(
            f"no Johansen critical values for case={case!r}, "
            f"statistic={statistic!r}, m={m}"
        ) from None
