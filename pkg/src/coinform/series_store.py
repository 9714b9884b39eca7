"""Typed storage for daily time series and aligned panels.

Everything downstream (unit-root tests, cointegration, the replication
pipeline) consumes the two containers defined here.  ``TimeSeries`` is a
single named series on a strictly increasing daily date index; ``Panel`` is a
date-aligned matrix of several series.  Both are frozen: transforms return new
objects and never mutate in place, which keeps provenance honest.

CSV ingestion is deliberately forgiving about cell-level garbage (a scraped
price file always has a few holes) but strict about structural problems:
duplicate dates and missing date columns are hard errors, while unparseable
cells are dropped per series and counted in a :class:`LoadReport`.
"""

from __future__ import annotations

import datetime as _dt
import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DataError

__all__ = [
    "Frequency",
    "TransformTag",
    "AlignmentPolicy",
    "TimeSeries",
    "Panel",
    "LoadReport",
    "CorrelationMatrix",
    "load_csv",
    "align",
    "log_transform",
    "difference",
    "correlation_matrix",
    "high_correlation_pairs",
    "panel_from_array",
    "export_csv",
]

#: Default names treated as macro-financial series by ``forward_fill_macro``.
#: These trade on exchange calendars (weekday gaps), unlike the 7-day series.
MACRO_SERIES = ("dj", "oil_price")


class Frequency(enum.Enum):
    DAILY = "daily"


class TransformTag(enum.Enum):
    LEVEL = "level"
    LOG = "log"
    FIRST_DIFFERENCE = "first_difference"


class AlignmentPolicy(enum.Enum):
    #: Keep only dates on which every series has an observation.
    INTERSECT_DROP = "intersect_drop"
    #: Intersect the non-macro series, then carry macro series forward onto
    #: that index (last prior observation); macro values are never invented
    #: before a series' first observation.
    FORWARD_FILL_MACRO = "forward_fill_macro"


def _freeze(values: np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=float).copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TimeSeries:
    """A named daily series on a strictly increasing date index."""

    name: str
    dates: tuple[_dt.date, ...]
    values: np.ndarray
    frequency: Frequency = Frequency.DAILY
    transform_tag: TransformTag = TransformTag.LEVEL

    def __post_init__(self) -> None:
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.ndim != 1:
            raise DataError(f"series {self.name!r}: values must be 1-dimensional")
        if len(self.dates) != self.values.shape[0]:
            raise DataError(
                f"series {self.name!r}: {len(self.dates)} dates but "
                f"{self.values.shape[0]} values"
            )
        if len(self.dates) == 0:
            raise DataError(f"series {self.name!r}: empty series")
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise DataError(
                    f"series {self.name!r}: dates not strictly increasing at {b}"
                )
        if not np.all(np.isfinite(self.values)):
            bad = int(np.flatnonzero(~np.isfinite(self.values))[0])
            raise DataError(
                f"series {self.name!r}: non-finite value at {self.dates[bad]}"
            )

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class Panel:
    """Several series aligned on a common strictly increasing date index."""

    variables: tuple[str, ...]
    index: tuple[_dt.date, ...]
    data: np.ndarray  # shape (T, n), column j is variables[j]
    alignment_policy: AlignmentPolicy = AlignmentPolicy.INTERSECT_DROP

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "index", tuple(self.index))
        object.__setattr__(self, "data", _freeze(self.data))
        if self.data.ndim != 2:
            raise DataError("panel data must be 2-dimensional")
        t, n = self.data.shape
        if n != len(self.variables):
            raise DataError(f"panel has {n} columns but {len(self.variables)} names")
        if t != len(self.index):
            raise DataError(f"panel has {t} rows but {len(self.index)} dates")
        if len(set(self.variables)) != n:
            raise DataError("duplicate variable names in panel")
        for a, b in zip(self.index, self.index[1:]):
            if not a < b:
                raise DataError(f"panel index not strictly increasing at {b}")
        if not np.all(np.isfinite(self.data)):
            raise DataError("panel contains non-finite values")

    @property
    def nobs(self) -> int:
        return self.data.shape[0]

    @property
    def nvar(self) -> int:
        return self.data.shape[1]

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.variables.index(name)
        except ValueError:
            raise DataError(f"panel has no variable {name!r}") from None
        return self.data[:, j]

    def series(self, name: str) -> TimeSeries:
        return TimeSeries(name=name, dates=self.index, values=self.column(name))

    def subset(self, names: tuple[str, ...] | list[str]) -> "Panel":
        cols = []
        for name in names:
            if name not in self.variables:
                raise DataError(f"panel has no variable {name!r}")
            cols.append(self.variables.index(name))
        return Panel(
            variables=tuple(names),
            index=self.index,
            data=self.data[:, cols],
            alignment_policy=self.alignment_policy,
        )


@dataclass
class SeriesLoadSummary:
    name: str
    n: int
    first_date: _dt.date
    last_date: _dt.date
    dropped_cells: int


@dataclass
class LoadReport:
    """Accounting for one ingestion pass: what was read, what was dropped."""

    path: str
    rows_read: int
    rows_dropped: int
    series: list[SeriesLoadSummary] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "rows_read": self.rows_read,
            "rows_dropped": self.rows_dropped,
            "series": [
                {
                    "name": s.name,
                    "n": s.n,
                    "first_date": s.first_date.isoformat(),
                    "last_date": s.last_date.isoformat(),
                    "dropped_cells": s.dropped_cells,
                }
                for s in self.series
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _parse_date(raw: object) -> _dt.date | None:
    if raw is None:
        return None
    text = str(raw).strip()
    if not text:
        return None
    try:
        return _dt.date.fromisoformat(text[:10]) if "T" in text else _dt.date.fromisoformat(text)
    except ValueError:
        return None


def _parse_value(raw: object) -> float | None:
    if raw is None:
        return None
    text = str(raw).strip()
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


def load_csv(
    path: str,
    schema: dict[str, str] | None = None,
    date_column: str = "date",
) -> tuple[list[TimeSeries], LoadReport]:
    """Read one CSV file into per-column series.

    ``schema`` maps CSV column names to series names; when omitted, every
    non-date column becomes a series under its own name.  Rows whose date cell
    does not parse are dropped entirely; a cell that does not parse as a finite
    number drops that (date, series) pair only.  Both kinds of drop are counted
    in the returned :class:`LoadReport`.
    """
    try:
        frame = pd.read_csv(path, dtype=str, skip_blank_lines=True)
    except FileNotFoundError:
        raise DataError(f"input file not found: {path}") from None
    except Exception as exc:  # malformed CSV structure
        raise DataError(f"cannot parse CSV {path}: {exc}") from None

    frame.columns = [str(c).strip() for c in frame.columns]
    if date_column not in frame.columns:
        raise DataError(f"{path}: no {date_column!r} column")

    if schema is None:
        schema = {c: c for c in frame.columns if c != date_column}
    else:
        for col in schema:
            if col not in frame.columns:
                raise DataError(f"{path}: schema references missing column {col!r}")
    if not schema:
        raise DataError(f"{path}: no value columns")

    rows_read = len(frame)
    rows_dropped = 0

    dates: list[_dt.date | None] = [_parse_date(v) for v in frame[date_column]]
    bad_date_rows = sum(1 for d in dates if d is None)
    rows_dropped += bad_date_rows

    seen: dict[_dt.date, int] = {}
    for i, d in enumerate(dates):
        if d is None:
            continue
        if d in seen:
            raise DataError(f"{path}: duplicate date {d} (rows {seen[d] + 2} and {i + 2})")
        seen[d] = i

    series_out: list[TimeSeries] = []
    summaries: list[SeriesLoadSummary] = []
    for col, name in schema.items():
        pairs: list[tuple[_dt.date, float]] = []
        dropped_cells = 0
        for d, raw in zip(dates, frame[col]):
            if d is None:
                continue
            value = _parse_value(raw)
            if value is None:
                dropped_cells += 1
                continue
            pairs.append((d, value))
        if not pairs:
            raise DataError(f"{path}: column {col!r} has no parseable values")
        pairs.sort(key=lambda p: p[0])
        ts = TimeSeries(
            name=name,
            dates=tuple(p[0] for p in pairs),
            values=np.array([p[1] for p in pairs]),
        )
        series_out.append(ts)
        summaries.append(
            SeriesLoadSummary(
                name=name,
                n=len(ts),
                first_date=ts.dates[0],
                last_date=ts.dates[-1],
                dropped_cells=dropped_cells,
            )
        )
        rows_dropped += dropped_cells

    report = LoadReport(
        path=path, rows_read=rows_read, rows_dropped=rows_dropped, series=summaries
    )
    return series_out, report


def align(
    series: list[TimeSeries],
    policy: AlignmentPolicy = AlignmentPolicy.INTERSECT_DROP,
    macro_names: tuple[str, ...] = MACRO_SERIES,
) -> Panel:
    """Combine series into a :class:`Panel` under an explicit alignment policy.

    ``intersect_drop`` keeps only dates present in every series.

    ``forward_fill_macro`` first intersects the non-macro series, then fills
    each macro series forward onto that index.  A date is kept only if every
    macro series has at least one observation on or before it; values are
    never fabricated ahead of a series' first observation.
    """
    if len(series) < 2:
        raise DataError("alignment needs at least two series")
    names = [s.name for s in series]
    if len(set(names)) != len(names):
        raise DataError("duplicate series names passed to align()")
    for s in series:
        if s.frequency is not Frequency.DAILY:
            raise DataError(f"series {s.name!r}: unsupported frequency")

    date_maps = {s.name: dict(zip(s.dates, s.values)) for s in series}

    if policy is AlignmentPolicy.INTERSECT_DROP:
        common: set[_dt.date] | None = None
        for s in series:
            ds = set(s.dates)
            common = ds if common is None else (common & ds)
        index = sorted(common or ())
        if not index:
            raise DataError("alignment produced an empty date index")
        data = np.column_stack(
            [np.array([date_maps[n][d] for d in index]) for n in names]
        )
        return Panel(tuple(names), tuple(index), data, policy)

    if policy is not AlignmentPolicy.FORWARD_FILL_MACRO:
        raise DataError(f"unknown alignment policy: {policy!r}")

    macro = [s for s in series if s.name in macro_names]
    base = [s for s in series if s.name not in macro_names]
    if not base:
        # All-macro panel degenerates to plain intersection.
        return align(series, AlignmentPolicy.INTERSECT_DROP)

    common = None
    for s in base:
        ds = set(s.dates)
        common = ds if common is None else (common & ds)
    candidate = sorted(common or ())
    if not candidate:
        raise DataError("alignment produced an empty date index")

    filled: dict[str, dict[_dt.date, float]] = {}
    for s in macro:
        fill_map: dict[_dt.date, float] = {}
        pos = 0
        last: float | None = None
        for d in candidate:
            while pos < len(s.dates) and s.dates[pos] <= d:
                last = float(s.values[pos])
                pos += 1
            if last is not None:
                fill_map[d] = last
        filled[s.name] = fill_map

    index = [d for d in candidate if all(d in filled[m.name] for m in macro)]
    if not index:
        raise DataError("alignment produced an empty date index")

    columns = []
    for n in names:
        if n in filled:
            columns.append(np.array([filled[n][d] for d in index]))
        else:
            columns.append(np.array([date_maps[n][d] for d in index]))
    return Panel(tuple(names), tuple(index), np.column_stack(columns), policy)


def log_transform(s: TimeSeries) -> TimeSeries:
    """Natural log of a strictly positive series."""
    bad = np.flatnonzero(s.values <= 0.0)
    if bad.size:
        raise DataError(
            f"series {s.name!r}: cannot take log of nonpositive value "
            f"{s.values[bad[0]]!r} at {s.dates[int(bad[0])]}"
        )
    return TimeSeries(
        name=s.name,
        dates=s.dates,
        values=np.log(s.values),
        frequency=s.frequency,
        transform_tag=TransformTag.LOG,
    )


def log_panel(p: Panel) -> Panel:
    """Column-wise natural log of a panel of strictly positive levels."""
    if np.any(p.data <= 0.0):
        t, j = np.argwhere(p.data <= 0.0)[0]
        raise DataError(
            f"variable {p.variables[j]!r}: cannot take log of nonpositive value "
            f"at {p.index[int(t)]}"
        )
    return Panel(p.variables, p.index, np.log(p.data), p.alignment_policy)


def difference(s: TimeSeries, order: int = 1) -> TimeSeries:
    """Difference a series ``order`` times, shrinking the index from the left."""
    if order < 1:
        raise DataError("difference order must be >= 1")
    if len(s) <= order:
        raise DataError(
            f"series {s.name!r}: too short to difference {order} time(s)"
        )
    return TimeSeries(
        name=s.name,
        dates=s.dates[order:],
        values=np.diff(s.values, n=order),
        frequency=s.frequency,
        transform_tag=TransformTag.FIRST_DIFFERENCE,
    )


@dataclass(frozen=True)
class CorrelationMatrix:
    variables: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "values", _freeze(self.values))
        n = len(self.variables)
        if self.values.shape != (n, n):
            raise DataError("correlation matrix shape does not match variables")

    def lookup(self, a: str, b: str) -> float:
        i = self.variables.index(a)
        j = self.variables.index(b)
        return float(self.values[i, j])

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "values": [[float(v) for v in row] for row in self.values],
        }


def correlation_matrix(p: Panel) -> CorrelationMatrix:
    """Pearson correlation matrix of the panel columns.

    Exactly symmetric with a unit diagonal and entries clipped to [-1, 1];
    a zero-variance column is an error (its correlations are undefined).
    """
    if p.nobs < 3:
        raise DataError("correlation matrix needs at least 3 observations")
    sd = p.data.std(axis=0)
    flat = np.flatnonzero(sd == 0.0)
    if flat.size:
        raise DataError(
            f"variable {p.variables[int(flat[0])]!r} has zero variance; "
            "correlation undefined"
        )
    c = np.corrcoef(p.data, rowvar=False)
    c = np.clip((c + c.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(c, 1.0)
    return CorrelationMatrix(p.variables, c)


def high_correlation_pairs(
    c: CorrelationMatrix, threshold: float = 0.8
) -> list[tuple[str, str, float]]:
    """Unordered variable pairs with |corr| above ``threshold``, strongest first."""
    if not 0.0 <= threshold <= 1.0:
        raise DataError("threshold must lie in [0, 1]")
    out: list[tuple[str, str, float]] = []
    n = len(c.variables)
    for i in range(n):
        for j in range(i + 1, n):
            v = float(c.values[i, j])
            if abs(v) > threshold:
                out.append((c.variables[i], c.variables[j], v))
    out.sort(key=lambda t: -abs(t[2]))
    return out


def panel_from_array(
    data: np.ndarray,
    variables: tuple[str, ...] | list[str] | None = None,
    start: _dt.date = _dt.date(2013, 1, 1),
    policy: AlignmentPolicy = AlignmentPolicy.INTERSECT_DROP,
) -> Panel:
    """Wrap a (T, n) array in a Panel on a synthetic daily index."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise DataError("panel_from_array expects a 2-d array")
    t, n = data.shape
    if variables is None:
        variables = tuple(f"v{j}" for j in range(n))
    index = tuple(start + _dt.timedelta(days=i) for i in range(t))
    return Panel(tuple(variables), index, data, policy)


def export_csv(p: Panel, path: str, date_column: str = "date") -> None:
    """Write a panel in the same CSV schema :func:`load_csv` consumes."""
    frame = pd.DataFrame(p.data, columns=list(p.variables))
    frame.insert(0, date_column, [d.isoformat() for d in p.index])
    frame.to_csv(path, index=False)
