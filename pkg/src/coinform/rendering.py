"""Plain-text table rendering for pipeline output.

All functions are pure string builders: fixed column widths, fixed float
formats, no timestamps, no locale dependence — two runs over equal inputs
yield byte-identical documents.

The presentation convention for coefficient grids mirrors the usual journal
layout: one column per model, significance stars ``*``/``**``/``***`` at the
10/5/1 percent levels, and a dash for cells that are either not part of a
model or not significant at the 10 percent level.  ``full=True`` switches to
an audit layout that prints every coefficient with its standard error.
"""

from __future__ import annotations

from .catalog import PRICE, REGISTRY, PipelineResult
from .diagnostics import DiagnosticReport
from .johansen import CointRankResult, PantulaResult
from .series_store import CorrelationMatrix
from .unit_root import UnitRootResult
from .vecm import CoefficientCell

__all__ = [
    "render_correlation",
    "render_effect_grid",
    "render_diagnostics",
    "render_unit_roots",
    "render_rank_decision",
    "render_pantula",
]

_DASH = "-"


def _fmt_cell(cell: CoefficientCell | None, full: bool, width: int) -> str:
    if cell is None:
        return _DASH.rjust(width)
    if full:
        if cell.std_error == 0.0:
            body = f"{cell.value:.3f}(exact){cell.stars}"
        else:
            body = f"{cell.value:.3f}({cell.std_error:.3f}){cell.stars}"
        return body.rjust(width)
    if not cell.stars:
        return _DASH.rjust(width)
    return f"{cell.value:.3f}{cell.stars}".rjust(width)


def _grid(
    title: str,
    row_labels: list[str],
    col_labels: list[str],
    cells: dict[tuple[str, str], CoefficientCell | None],
    footers: list[str],
    full: bool,
) -> str:
    label_w = max([len(r) for r in row_labels] + [12]) + 2
    col_w = max([len(c) for c in col_labels] + [18 if full else 12]) + 2
    lines = [title, "=" * len(title), ""]
    header = " " * label_w + "".join(c.rjust(col_w) for c in col_labels)
    lines.append(header)
    lines.append("-" * len(header))
    for row in row_labels:
        cells_txt = "".join(
            _fmt_cell(cells.get((row, col)), full, col_w) for col in col_labels
        )
        lines.append(row.ljust(label_w) + cells_txt)
    if footers:
        lines.append("")
        lines.extend(footers)
    lines.append("")
    lines.append(
        "Significance: * 10%, ** 5%, *** 1%."
        + ("" if full else "  '-' = not in model or not significant.")
    )
    return "\n".join(lines) + "\n"


def _ordered_variables(results: list[PipelineResult]) -> list[str]:
    present: set[str] = set()
    for r in results:
        present.update(r.spec.variables)
    extras = sorted(v for v in present if v not in REGISTRY)
    return [v for v in REGISTRY if v in present] + extras


def render_correlation(c: CorrelationMatrix, title: str = "Correlation matrix") -> str:
    width = max(max(len(v) for v in c.variables) + 2, 8)
    lines = [title, "=" * len(title), ""]
    header = " " * width + "".join(v.rjust(width) for v in c.variables)
    lines.append(header)
    for i, row_var in enumerate(c.variables):
        row = row_var.ljust(width)
        for j in range(i + 1):
            row += f"{c.values[i, j]:.2f}".rjust(width)
        lines.append(row)
    lines.append("")
    return "\n".join(lines) + "\n"


def render_effect_grid(
    results: list[PipelineResult],
    which: str,
    title: str,
    full: bool = False,
) -> str:
    """Model-by-coefficient grid for ``which`` in {'short_run', 'long_run'}."""
    if which not in ("short_run", "long_run"):
        raise ValueError(f"unknown table kind {which!r}")
    col_labels = [f"M{r.spec.model_id}" for r in results]
    by_col = {f"M{r.spec.model_id}": r for r in results}
    cells: dict[tuple[str, str], CoefficientCell | None] = {}
    row_labels: list[str] = []

    if which == "long_run":
        variables = [v for v in _ordered_variables(results) if v != PRICE]
        for v in variables:
            row_has_value = False
            for col, r in by_col.items():
                cell = r.tables.long_run.get(v) if r.tables else None
                cells[(v, col)] = cell
                row_has_value = row_has_value or cell is not None
            if row_has_value:
                row_labels.append(v)
        for col, r in by_col.items():
            cells[("const", col)] = r.tables.long_run.get("const") if r.tables else None
        if any(cells.get(("const", col)) for col in col_labels):
            row_labels.append("const")
    else:
        max_sr_lag = max((r.fit.lag_order - 1 for r in results if r.fit), default=0)
        ec_row = "L.ec1"
        row_has_value = False
        for col, r in by_col.items():
            cell = None
            if r.tables and r.tables.short_run:
                cell = r.tables.short_run.get(PRICE, {}).get("ec1")
            cells[(ec_row, col)] = cell
            row_has_value = row_has_value or cell is not None
        if row_has_value:
            row_labels.append(ec_row)
        variables = _ordered_variables(results)
        for v in variables:
            for lag in range(1, max_sr_lag + 1):
                label = f"L{lag}D.{v}"
                any_cell = False
                for col, r in by_col.items():
                    cell = None
                    if r.tables and r.tables.short_run:
                        cell = r.tables.short_run.get(PRICE, {}).get(label)
                    cells[(label, col)] = cell
                    any_cell = any_cell or cell is not None
                if any_cell:
                    row_labels.append(label)
        for col, r in by_col.items():
            cell = None
            if r.tables and r.tables.short_run:
                cell = r.tables.short_run.get(PRICE, {}).get("const")
            cells[("const", col)] = cell
        if any(cells.get(("const", col)) for col in col_labels):
            row_labels.append("const")

    footers = []
    for r in results:
        bits = [f"M{r.spec.model_id}:"]
        if r.exact_relation is not None:
            bits.append("exact linear dependency (coefficients reported without error)")
        else:
            if r.case is not None:
                bits.append(f"case={r.case.value}")
            if r.rank is not None:
                bits.append(f"rank={r.rank}")
            if r.lag_order is not None:
                bits.append(f"k={r.lag_order}")
        for marker in r.stage_markers.values():
            bits.append(f"note: {marker}")
        footers.append("  ".join(bits))
    return _grid(title, row_labels, col_labels, cells, footers, full)


def render_diagnostics(results: list[PipelineResult], title: str = "Residual diagnostics") -> str:
    lines = [title, "=" * len(title), ""]
    header = (
        f"{'model':<8}{'case':<24}{'rank':>5}{'k':>4}"
        f"{'LM min p':>10}{'JB min p':>10}{'stable':>8}{'unit roots':>12}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for r in results:
        model = f"M{r.spec.model_id}"
        if r.diagnostics is None:
            note = r.stage_markers.get("diagnostics") or r.stage_markers.get(
                "rank_search", "not run"
            )
            lines.append(f"{model:<8}{note}")
            continue
        d: DiagnosticReport = r.diagnostics
        lm_min = min((e.p_value for e in d.autocorrelation), default=float("nan"))
        jb_min = min((e.p_value for e in d.normality), default=float("nan"))
        case = r.case.value if r.case else "-"
        rank = str(r.rank) if r.rank is not None else "-"
        k = str(r.lag_order) if r.lag_order is not None else "-"
        unit = f"{d.stability.unit_moduli_found}/{d.stability.unit_moduli_expected}"
        lines.append(
            f"{model:<8}{case:<24}{rank:>5}{k:>4}"
            f"{lm_min:>10.3f}{jb_min:>10.3f}"
            f"{('yes' if d.stability.is_stable else 'NO'):>8}{unit:>12}"
        )
    lines.append("")
    lines.append(
        "LM: multivariate residual autocorrelation (smallest p across lags); "
        "JB: Jarque-Bera normality (smallest p across equations);"
    )
    lines.append(
        "stable: companion roots match the cointegration rank (n-r unit "
        "moduli, none outside the unit circle)."
    )
    return "\n".join(lines) + "\n"


def render_unit_roots(results: list[UnitRootResult], title: str = "Unit-root tests") -> str:
    lines = [title, "=" * len(title), ""]
    header = (
        f"{'series':<14}{'test':<6}{'det.':<16}{'lags/bw':>8}"
        f"{'stat':>10}{'cv 1%':>9}{'cv 5%':>9}{'cv 10%':>9}  decision"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for r in results:
        decision = "reject unit root" if r.reject_unit_root["5%"] else "unit root"
        lines.append(
            f"{r.series_name:<14}{r.test.value:<6}{r.deterministic.value:<16}"
            f"{r.lags_or_bandwidth:>8}{r.statistic:>10.3f}"
            f"{r.critical_values['1%']:>9.3f}{r.critical_values['5%']:>9.3f}"
            f"{r.critical_values['10%']:>9.3f}  {decision}"
        )
    lines.append("")
    lines.append("Decision column uses the 5% level; reject = evidence of stationarity.")
    return "\n".join(lines) + "\n"


def render_rank_decision(res: CointRankResult, title: str = "Cointegration rank") -> str:
    lines = [title, "=" * len(title), ""]
    lines.append(f"case: {res.case.value}   level: {res.level}   T_eff: {res.effective_t}")
    lines.append("")
    header = (
        f"{'H0: r<=':>8}{'eigenvalue':>12}{'trace':>10}{'cv':>9}"
        f"{'max-eigen':>11}{'cv':>9}  decision"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for row in res.decision_trail():
        r = row["rank"]
        decision = "reject" if row["trace_rejects"] else "accept"
        lines.append(
            f"{r:>8}{res.eigenvalues[r]:>12.4f}{row['trace']:>10.2f}{row['trace_cv']:>9.2f}"
            f"{row['max_eigen']:>11.2f}{row['max_eigen_cv']:>9.2f}  {decision}"
        )
    lines.append("")
    lines.append(
        f"selected rank (trace): {res.selected_rank}   "
        f"(max-eigen: {res.selected_rank_max_eigen})"
    )
    return "\n".join(lines) + "\n"


def render_pantula(res: PantulaResult, title: str = "Joint case/rank search") -> str:
    lines = [title, "=" * len(title), ""]
    header = f"{'rank':>5}  {'case':<24}{'trace':>10}{'cv':>9}  decision"
    lines.append(header)
    lines.append("-" * len(header))
    for row in res.sweep_trail:
        decision = "reject" if row["rejected"] else "ACCEPT"
        lines.append(
            f"{row['rank']:>5}  {row['case']:<24}"
            f"{row['trace']:>10.2f}{row['trace_cv']:>9.2f}  {decision}"
        )
    lines.append("")
    lines.append(f"selected: case={res.case.value}, rank={res.rank}")
    return "\n".join(lines) + "\n"
