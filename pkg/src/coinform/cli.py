"""Command-line interface.

Seven subcommands cover the workflow end to end::

    coinform ingest      data/*.csv          # load, align, cache, report
    coinform corr                            # correlation matrix + high pairs
    coinform unitroot                        # ADF / PP screening per variable
    coinform johansen    --model 1.1         # rank decision (+ case search)
    coinform vecm        --model 1.1         # one fitted model, tables
    coinform replicate                       # the full catalog + documents
    coinform simulate    --t 1500 --seed 7   # synthetic economy CSV

Shared options live on the group: ``--config`` (flat key=value file),
``--level``, ``--alignment``, ``--out`` and ``--format``.  Precedence is
command line over config file over defaults.  Every command writes a
``provenance.json`` describing exactly what it consumed (resolved options,
package version, input checksums) so that equal provenance implies equal
output bytes.

Exit codes: 0 on success, 1 for input problems, 2 for numerical failures.
"""

from __future__ import annotations

import hashlib
import json
import pathlib
import sys
from dataclasses import dataclass

import click

from . import __version__, barro, rendering
from .catalog import (
    PRICE,
    ModelSpec,
    PipelineOptions,
    PipelineResult,
    model_by_id,
    run_many,
)
from .errors import CoinformError, DataError, EstimationError
from .johansen import JohansenCase, concentrate, pantula_select, rank_decision
from .series_store import (
    AlignmentPolicy,
    Panel,
    TimeSeries,
    align,
    correlation_matrix,
    difference,
    export_csv,
    high_correlation_pairs,
    load_csv,
    log_panel,
)
from .unit_root import Deterministic, adf_test, pp_test
from .vecm import estimate_vecm, inference, reduce_to_var, select_var_lags_aic

_LEVELS = {"0.01": 0.01, "0.05": 0.05, "0.1": 0.10, "0.10": 0.10}
_CASES = {
    "none": JohansenCase.NONE,
    "rc": JohansenCase.RESTRICTED_CONSTANT,
    "uc": JohansenCase.UNRESTRICTED_CONSTANT,
    "rt": JohansenCase.RESTRICTED_TREND,
    "ut": JohansenCase.UNRESTRICTED_TREND,
}
_DETS = {
    "none": Deterministic.NONE,
    "constant": Deterministic.CONSTANT,
    "trend": Deterministic.CONSTANT_TREND,
}


@dataclass
class RunConfig:
    data_paths: tuple[str, ...] = ()
    alignment: AlignmentPolicy = AlignmentPolicy.INTERSECT_DROP
    level: float = 0.05
    out: str = "out"
    formats: tuple[str, ...] = ("text", "json")

    def to_dict(self) -> dict:
        return {
            "data_paths": list(self.data_paths),
            "alignment": self.alignment.value,
            "level": self.level,
            "out": self.out,
            "formats": list(self.formats),
        }


def _parse_config_file(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    try:
        text = pathlib.Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        cfg[key.strip()] = value.strip()
    return cfg


def _resolve_config(ctx: click.Context) -> RunConfig:
    params = ctx.obj
    file_cfg: dict[str, str] = {}
    if params.get("config"):
        file_cfg = _parse_config_file(params["config"])

    def pick(cli_value, key: str, default):
        if cli_value is not None:
            return cli_value
        if key in file_cfg:
            return file_cfg[key]
        return default

    level_raw = pick(params.get("level"), "level", "0.05")
    level_key = str(level_raw).strip()
    if level_key not in _LEVELS:
        raise DataError(
            f"unsupported significance level {level_raw!r} (use 0.01, 0.05 or 0.10)"
        )
    align_raw = str(pick(params.get("alignment"), "alignment", "intersect_drop"))
    try:
        alignment = AlignmentPolicy(align_raw)
    except ValueError:
        raise DataError(f"unknown alignment policy {align_raw!r}") from None

    fmt_raw = params.get("format") or ()
    if not fmt_raw and "format" in file_cfg:
        fmt_raw = tuple(s.strip() for s in file_cfg["format"].split(",") if s.strip())
    formats = tuple(fmt_raw) if fmt_raw else ("text", "json")
    for f in formats:
        if f not in ("text", "json"):
            raise DataError(f"unknown output format {f!r}")

    data_cfg: tuple[str, ...] = ()
    if "data" in file_cfg:
        data_cfg = tuple(s.strip() for s in file_cfg["data"].split(",") if s.strip())

    return RunConfig(
        data_paths=data_cfg,
        alignment=alignment,
        level=_LEVELS[level_key],
        out=str(pick(params.get("out"), "out", "out")),
        formats=formats,
    )


def _sha256(path: str) -> str:
    return hashlib.sha256(pathlib.Path(path).read_bytes()).hexdigest()


def _out_dir(cfg: RunConfig) -> pathlib.Path:
    out = pathlib.Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_provenance(
    cfg: RunConfig, command: str, inputs: tuple[str, ...], extra: dict | None = None
) -> None:
    doc = {
        "command": command,
        "package_version": __version__,
        "config": cfg.to_dict(),
        "inputs": {p: _sha256(p) for p in inputs},
    }
    if extra:
        doc.update(extra)
    path = _out_dir(cfg) / "provenance.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _gather_paths(cfg: RunConfig, cli_paths: tuple[str, ...]) -> tuple[str, ...]:
    paths = tuple(cli_paths) or cfg.data_paths
    if not paths:
        raise DataError(
            "usage error: no input data files given (pass CSV paths or set "
            "`data=` in the config file)"
        )
    return paths


def _load_series(paths: tuple[str, ...]) -> tuple[list[TimeSeries], list[dict]]:
    all_series: list[TimeSeries] = []
    seen: dict[str, str] = {}
    reports = []
    for p in paths:
        series, report = load_csv(p)
        for s in series:
            if s.name in seen:
                raise DataError(
                    f"series {s.name!r} appears in both {seen[s.name]} and {p}"
                )
            seen[s.name] = p
            all_series.append(s)
        reports.append(report.to_dict())
    return all_series, reports


def _load_panel(cfg: RunConfig, paths: tuple[str, ...]) -> tuple[Panel, list[dict]]:
    series, reports = _load_series(paths)
    if len(series) == 1:
        raise DataError("need at least two series to build a panel")
    return align(series, cfg.alignment), reports


def _maybe_write(cfg: RunConfig, name: str, text: str | None, doc: dict | None) -> None:
    out = _out_dir(cfg)
    if text is not None and "text" in cfg.formats:
        (out / f"{name}.txt").write_text(text)
    if doc is not None and "json" in cfg.formats:
        (out / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


@click.group()
@click.option("--config", type=click.Path(), default=None, help="Flat key=value config file.")
@click.option("--level", default=None, help="Significance level: 0.01, 0.05 or 0.10.")
@click.option(
    "--alignment",
    default=None,
    type=click.Choice([p.value for p in AlignmentPolicy]),
    help="Panel alignment policy.",
)
@click.option("--out", default=None, type=click.Path(), help="Output directory (default ./out).")
@click.option(
    "--format",
    "format",
    multiple=True,
    type=click.Choice(["text", "json"]),
    help="Output formats (repeatable; default both).",
)
@click.version_option(__version__)
@click.pass_context
def cli(ctx: click.Context, **params) -> None:
    """Price-formation econometrics: ingestion, tests, estimation, replication."""
    ctx.obj = params


@cli.command()
@click.argument("data", nargs=-1, type=click.Path())
@click.pass_context
def ingest(ctx: click.Context, data: tuple[str, ...]) -> None:
    """Load CSV files, align to a panel, write cache and load report."""
    cfg = _resolve_config(ctx)
    paths = _gather_paths(cfg, data)
    panel, reports = _load_panel(cfg, paths)
    out = _out_dir(cfg)
    export_csv(panel, str(out / "panel_cache.csv"))
    (out / "load_report.json").write_text(
        json.dumps(
            {
                "files": reports,
                "aligned": {
                    "variables": list(panel.variables),
                    "nobs": panel.nobs,
                    "first_date": panel.index[0].isoformat(),
                    "last_date": panel.index[-1].isoformat(),
                    "alignment": panel.alignment_policy.value,
                },
            },
            indent=2,
        )
        + "\n"
    )
    _write_provenance(cfg, "ingest", paths)
    click.echo(
        f"aligned {panel.nvar} variables on {panel.nobs} dates "
        f"({panel.index[0]} .. {panel.index[-1]}) -> {out / 'panel_cache.csv'}"
    )


@cli.command()
@click.argument("data", nargs=-1, type=click.Path())
@click.option("--threshold", default=0.8, show_default=True, help="|corr| cut for the pair list.")
@click.option(
    "--levels/--logs",
    "use_levels",
    default=False,
    show_default=True,
    help="Correlate raw levels instead of log levels.",
)
@click.pass_context
def corr(ctx: click.Context, data: tuple[str, ...], threshold: float, use_levels: bool) -> None:
    """Correlation matrix of the aligned panel plus high-correlation pairs."""
    cfg = _resolve_config(ctx)
    paths = _gather_paths(cfg, data)
    panel, _ = _load_panel(cfg, paths)
    target = panel if use_levels else log_panel(panel)
    cm = correlation_matrix(target)
    pairs = high_correlation_pairs(cm, threshold)
    text = rendering.render_correlation(
        cm, title=f"Correlation matrix ({'levels' if use_levels else 'log levels'})"
    )
    pair_lines = [f"pairs with |corr| > {threshold:.2f}:"]
    pair_lines += [f"  {a} ~ {b}: {v:.3f}" for a, b, v in pairs] or ["  (none)"]
    text += "\n" + "\n".join(pair_lines) + "\n"
    doc = {
        "correlation": cm.to_dict(),
        "threshold": threshold,
        "high_pairs": [{"a": a, "b": b, "corr": v} for a, b, v in pairs],
        "scale": "levels" if use_levels else "log",
    }
    _maybe_write(cfg, "correlation", text, doc)
    _write_provenance(cfg, "corr", paths, {"threshold": threshold})
    click.echo(text)


@cli.command()
@click.argument("data", nargs=-1, type=click.Path())
@click.option(
    "--deterministic",
    default="constant",
    type=click.Choice(sorted(_DETS)),
    show_default=True,
)
@click.option("--test", default="both", type=click.Choice(["adf", "pp", "both"]), show_default=True)
@click.option("--lags", default=None, type=int, help="ADF lag order (default: AIC).")
@click.option("--bandwidth", default=None, type=int, help="PP bandwidth (default: automatic).")
@click.pass_context
def unitroot(
    ctx: click.Context,
    data: tuple[str, ...],
    deterministic: str,
    test: str,
    lags: int | None,
    bandwidth: int | None,
) -> None:
    """ADF and Phillips-Perron tests on log levels and log differences."""
    cfg = _resolve_config(ctx)
    paths = _gather_paths(cfg, data)
    panel, _ = _load_panel(cfg, paths)
    logs = log_panel(panel)
    det = _DETS[deterministic]
    results = []
    for name in logs.variables:
        series = logs.series(name)
        for target, label in ((series, name), (difference(series), f"D.{name}")):
            renamed = TimeSeries(name=label, dates=target.dates, values=target.values)
            if test in ("adf", "both"):
                results.append(adf_test(renamed, det, lags=lags))
            if test in ("pp", "both"):
                results.append(pp_test(renamed, det, bandwidth=bandwidth))
    text = rendering.render_unit_roots(results, title="Unit-root tests (log scale)")
    doc = {"results": [r.to_dict() for r in results]}
    _maybe_write(cfg, "unit_roots", text, doc)
    _write_provenance(cfg, "unitroot", paths, {"deterministic": deterministic, "test": test})
    click.echo(text)


def _model_panel(
    cfg: RunConfig,
    data: tuple[str, ...],
    model: str | None,
    variables: str | None,
) -> tuple[Panel, tuple[str, ...], str]:
    paths = _gather_paths(cfg, data)
    panel, _ = _load_panel(cfg, paths)
    if model and variables:
        raise DataError("give either --model or --variables, not both")
    if model:
        spec = model_by_id(model)
        names = spec.variables
        label = f"M{model}"
    elif variables:
        names = tuple(v.strip() for v in variables.split(",") if v.strip())
        if len(names) < 2:
            raise DataError("--variables needs at least two comma-separated names")
        label = ",".join(names)
    else:
        names = panel.variables
        label = "all variables"
    missing = [v for v in names if v not in panel.variables]
    if missing:
        raise DataError(f"panel missing variable(s): {', '.join(missing)}")
    return log_panel(panel.subset(names)), paths, label


@cli.command()
@click.argument("data", nargs=-1, type=click.Path())
@click.option("--model", default=None, help="Catalog model id, e.g. 1.1.")
@click.option("--variables", default=None, help="Comma-separated variable names.")
@click.option("--lags", default=None, type=int, help="VAR lag order (default: AIC, max 8).")
@click.option(
    "--case",
    default="auto",
    type=click.Choice(["auto", *sorted(_CASES)]),
    show_default=True,
    help="Deterministic case; auto = joint case/rank search.",
)
@click.pass_context
def johansen(
    ctx: click.Context,
    data: tuple[str, ...],
    model: str | None,
    variables: str | None,
    lags: int | None,
    case: str,
) -> None:
    """Cointegration-rank decision for one variable set."""
    cfg = _resolve_config(ctx)
    logs, paths, label = _model_panel(cfg, data, model, variables)
    k = lags if lags is not None else select_var_lags_aic(logs)
    if case == "auto":
        pres = pantula_select(logs, k, cfg.level)
        text = rendering.render_pantula(pres, title=f"Joint case/rank search: {label} (k={k})")
        text += "\n" + rendering.render_rank_decision(
            pres.rank_result, title=f"Rank decision under {pres.case.value}"
        )
        doc = pres.to_dict()
    else:
        analysis = concentrate(logs, k, _CASES[case])
        res = rank_decision(analysis, cfg.level)
        text = rendering.render_rank_decision(
            res, title=f"Cointegration rank: {label} (k={k})"
        )
        doc = res.to_dict()
    doc["lag_order"] = k
    _maybe_write(cfg, "johansen", text, doc)
    _write_provenance(cfg, "johansen", paths, {"model": model, "variables": variables, "lags": k})
    click.echo(text)


@cli.command()
@click.argument("data", nargs=-1, type=click.Path())
@click.option("--model", default=None, help="Catalog model id, e.g. 1.1.")
@click.option("--variables", default=None, help="Comma-separated variable names.")
@click.option("--lags", default=None, type=int, help="VAR lag order (default: AIC, max 8).")
@click.option("--rank", default=None, type=int, help="Cointegration rank (default: from search).")
@click.option(
    "--case",
    default="auto",
    type=click.Choice(["auto", *sorted(_CASES)]),
    show_default=True,
)
@click.option("--full", is_flag=True, help="Print every coefficient with its standard error.")
@click.pass_context
def vecm(
    ctx: click.Context,
    data: tuple[str, ...],
    model: str | None,
    variables: str | None,
    lags: int | None,
    rank: int | None,
    case: str,
    full: bool,
) -> None:
    """Estimate one error-correction model and print its tables."""
    cfg = _resolve_config(ctx)
    logs, paths, label = _model_panel(cfg, data, model, variables)
    k = lags if lags is not None else select_var_lags_aic(logs)
    if case == "auto" or rank is None:
        pres = pantula_select(logs, k, cfg.level)
        chosen_case = pres.case if case == "auto" else _CASES[case]
        chosen_rank = rank if rank is not None else pres.rank
    else:
        chosen_case, chosen_rank = _CASES[case], rank
    n = logs.nvar
    if chosen_rank == 0:
        fit = reduce_to_var(logs, k, "rank_zero", chosen_case)
    elif chosen_rank == n:
        fit = reduce_to_var(logs, k, "full_rank", chosen_case)
    else:
        fit = estimate_vecm(logs, k, chosen_rank, chosen_case, normalize_on=0)
    tables = inference(fit)

    from .diagnostics import diagnostic_report

    diag = diagnostic_report(fit, level=cfg.level)
    fake_spec = ModelSpec(
        model_id=model or "adhoc", variables=logs.variables, block_tags=frozenset()
    )
    pres_result = PipelineResult(
        spec=fake_spec, lag_order=k, fit=fit, tables=tables, diagnostics=diag
    )
    text = rendering.render_effect_grid(
        [pres_result], "long_run", f"Long-run relation: {label}", full=full
    )
    text += "\n" + rendering.render_effect_grid(
        [pres_result], "short_run", f"Short-run dynamics (price equation): {label}", full=full
    )
    text += "\n" + rendering.render_diagnostics([pres_result])
    doc = {
        "fit": fit.to_dict(),
        "tables": tables.to_dict(),
        "diagnostics": diag.to_dict(),
        "case": chosen_case.value,
        "rank": chosen_rank,
        "lag_order": k,
    }
    _maybe_write(cfg, "vecm", text, doc)
    _write_provenance(
        cfg, "vecm", paths, {"model": model, "variables": variables, "rank": chosen_rank}
    )
    click.echo(text)


@cli.command()
@click.argument("data", nargs=-1, type=click.Path())
@click.option("--models", default=None, help="Comma-separated model ids (default: all 16).")
@click.option("--full", is_flag=True, help="Audit tables: every coefficient with its SE.")
@click.option(
    "--plot-data",
    is_flag=True,
    help="Also write price_series.csv (date, price) for external plotting.",
)
@click.pass_context
def replicate(
    ctx: click.Context,
    data: tuple[str, ...],
    models: str | None,
    full: bool,
    plot_data: bool,
) -> None:
    """Run the model catalog and write the replication documents."""
    cfg = _resolve_config(ctx)
    paths = _gather_paths(cfg, data)
    panel, _ = _load_panel(cfg, paths)
    model_ids = None
    if models:
        model_ids = [m.strip() for m in models.split(",") if m.strip()]

    options = PipelineOptions(level=cfg.level)
    results, skipped = run_many(panel, options, model_ids)

    logs = log_panel(panel)
    cm = correlation_matrix(logs)
    corr_text = rendering.render_correlation(cm, title="Correlation matrix (log levels)")

    def split(rs: list) -> tuple[list, list]:
        early = [r for r in rs if r.spec.model_set in ("1", "2", "3")]
        late = [r for r in rs if r.spec.model_set == "4"]
        return early, late

    early, late = split(results)
    out = _out_dir(cfg)
    docs = {
        "correlation": corr_text,
        "short_run_sets_1_2_3": rendering.render_effect_grid(
            early, "short_run", "Short-run dynamics, price equation (model sets 1-3)", full
        ),
        "short_run_set_4": rendering.render_effect_grid(
            late, "short_run", "Short-run dynamics, price equation (model set 4)", full
        ),
        "long_run_sets_1_2_3": rendering.render_effect_grid(
            early, "long_run", "Long-run price relations (model sets 1-3)", full
        ),
        "long_run_set_4": rendering.render_effect_grid(
            late, "long_run", "Long-run price relations (model set 4)", full
        ),
        "diagnostics": rendering.render_diagnostics(results),
    }
    if "text" in cfg.formats:
        for name, text in docs.items():
            (out / f"{name}.txt").write_text(text)
    bundle = {
        "correlation": cm.to_dict(),
        "results": [r.to_dict() for r in results],
        "skipped": [{"model_id": m, "notice": n} for m, n in skipped],
    }
    (out / "bundle.json").write_text(json.dumps(bundle, indent=2) + "\n")
    if plot_data:
        price = panel.column(PRICE)
        lines = ["date,price"]
        lines += [f"{d.isoformat()},{v!r}" for d, v in zip(panel.index, price)]
        (out / "price_series.csv").write_text("\n".join(lines) + "\n")
    _write_provenance(cfg, "replicate", paths, {"models": model_ids, "full": full})

    for model_id, notice in skipped:
        click.echo(f"skipped M{model_id}: {notice}")
    click.echo(f"ran {len(results)} models; documents in {out}/")


@cli.command()
@click.option("--t", "t", default=1500, show_default=True, help="Sample length (days).")
@click.option("--seed", default=0, show_default=True)
@click.option("--noise-sd", default=0.02, show_default=True, help="Price-equation noise sd.")
@click.option(
    "--blocks",
    default="fundamentals,attractiveness,macro",
    show_default=True,
    help="Comma-separated blocks to include.",
)
@click.option(
    "--supply-rule",
    default="fixed_schedule",
    type=click.Choice(["fixed_schedule", "constant"]),
    show_default=True,
)
@click.option(
    "--coefficients",
    default=None,
    help="Seven comma-separated structural coefficients b0..b6 "
    "(default: theory-consistent unit values).",
)
@click.pass_context
def simulate(
    ctx: click.Context,
    t: int,
    seed: int,
    noise_sd: float,
    blocks: str,
    supply_rule: str,
    coefficients: str | None,
) -> None:
    """Simulate a synthetic economy and write it in the ingestion schema."""
    cfg = _resolve_config(ctx)
    block_set = frozenset(b.strip() for b in blocks.split(",") if b.strip())
    if coefficients is not None:
        parts = [p.strip() for p in coefficients.split(",")]
        if len(parts) != 7:
            raise DataError("--coefficients needs exactly 7 comma-separated values")
        try:
            coefs = tuple(float(p) for p in parts)
        except ValueError as exc:
            raise DataError(f"bad coefficient: {exc}") from None
        spec = barro.PriceRegressionSpec(
            coefficients=coefs, included_blocks=block_set, noise_sd=noise_sd
        )
    else:
        spec = barro.PriceRegressionSpec.theory_consistent(
            included_blocks=block_set, noise_sd=noise_sd
        )
    panel = barro.simulate_economy(spec, t, seed=seed, supply_rule=supply_rule)
    out = _out_dir(cfg)
    csv_path = out / "synthetic_economy.csv"
    export_csv(panel, str(csv_path))
    manifest = {
        "t": t,
        "seed": seed,
        "supply_rule": supply_rule,
        "spec": {
            "coefficients": list(spec.coefficients),
            "included_blocks": sorted(spec.included_blocks),
            "noise_sd": spec.noise_sd,
        },
        "variables": list(panel.variables),
    }
    (out / "simulation_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    _write_provenance(cfg, "simulate", (), {"simulation": manifest})
    click.echo(f"wrote {csv_path} ({t} rows, {panel.nvar} variables)")


def main() -> None:
    try:
        cli(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except EstimationError as exc:
        click.echo(f"estimation error: {exc}", err=True)
        sys.exit(2)
    except CoinformError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
