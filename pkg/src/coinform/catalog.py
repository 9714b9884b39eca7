"""The estimated-model catalog and the per-model pipeline.

Sixteen model specifications organise the replication: set 1 varies the
fundamental proxies, set 2 isolates the attractiveness proxies, set 3 the
macro-financial ones, and set 4 mixes blocks (with 4.4-4.9 nested reductions
of the grand specification 4.2).  The price ``mkpru`` always comes first;
remaining variables follow the registry order used throughout the package.

:func:`run_model` drives one specification through the full chain —
log transform, integration screening, lag selection, joint case/rank search,
estimation, inference, diagnostics — and returns a :class:`PipelineResult`
that either carries every stage or an explicit marker explaining why a stage
was skipped.  The result depends only on the input panel and options (there
is no hidden randomness), so reruns are reproducible byte for byte.

One non-textbook wrinkle: a *noiseless* structural simulation makes the log
price an exact linear combination of the other columns, which is invisible
to sample-based rank tests (the moment matrices become singular).  The
pipeline therefore screens for an exact dependency first and, when found,
reports the relation directly instead of estimating.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .barro import SignReport, sign_expectation_check
from .diagnostics import DiagnosticReport, diagnostic_report
from .errors import CoinformError, DataError
from .johansen import JohansenCase, PantulaResult, pantula_select
from .series_store import Panel, log_panel
from .unit_root import Deterministic, IntegrationOrder, classify_integration
from .vecm import (
    CoefficientCell,
    EffectTables,
    VecmFit,
    estimate_vecm,
    inference,
    reduce_to_var,
    select_var_lags_aic,
)

__all__ = [
    "REGISTRY",
    "PRICE",
    "MODEL_GRID",
    "ModelSpec",
    "catalog",
    "model_by_id",
    "PipelineOptions",
    "PipelineResult",
    "run_model",
    "run_many",
]

PRICE = "mkpru"

#: All variables the pipeline knows about, in presentation order.
REGISTRY = (
    "mkpru",
    "totbc",
    "ntran",
    "naddu",
    "bcdde",
    "exrate",
    "wiki_views",
    "new_members",
    "new_posts",
    "dj",
    "oil_price",
)

MODEL_GRID: dict[str, tuple[str, ...]] = {
    "1.1": ("mkpru", "totbc", "ntran", "bcdde", "exrate"),
    "1.2": ("mkpru", "totbc", "naddu", "bcdde", "exrate"),
    "1.3": ("mkpru", "totbc", "bcdde", "exrate"),
    "1.4": ("mkpru", "naddu", "bcdde", "exrate"),
    "1.5": ("mkpru", "ntran", "bcdde", "exrate"),
    "2.1": ("mkpru", "wiki_views", "new_members", "new_posts"),
    "3.1": ("mkpru", "exrate", "dj", "oil_price"),
    "4.1": ("mkpru", "exrate", "wiki_views", "dj", "oil_price"),
    "4.2": (
        "mkpru",
        "totbc",
        "naddu",
        "bcdde",
        "exrate",
        "wiki_views",
        "new_members",
        "new_posts",
        "dj",
        "oil_price",
    ),
    "4.3": (
        "mkpru",
        "totbc",
        "naddu",
        "bcdde",
        "wiki_views",
        "new_members",
        "new_posts",
        "dj",
    ),
    "4.4": ("mkpru", "naddu", "bcdde", "wiki_views", "new_members", "new_posts"),
    "4.5": ("mkpru", "totbc", "bcdde", "new_members", "new_posts"),
    "4.6": ("mkpru", "bcdde", "wiki_views", "new_members", "new_posts"),
    "4.7": ("mkpru", "naddu", "bcdde", "new_posts"),
    "4.8": ("mkpru", "ntran", "bcdde", "wiki_views", "new_members", "new_posts"),
    "4.9": ("mkpru", "ntran", "bcdde", "new_members", "new_posts"),
}

_BLOCK_MEMBERS = {
    "fundamentals": {"totbc", "ntran", "naddu", "bcdde", "exrate"},
    "attractiveness": {"wiki_views", "new_members", "new_posts"},
    "macro": {"dj", "oil_price"},
}


@dataclass(frozen=True)
class ModelSpec:
    model_id: str
    variables: tuple[str, ...]
    block_tags: frozenset[str]

    @property
    def model_set(self) -> str:
        return self.model_id.split(".")[0]

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "variables": list(self.variables),
            "block_tags": sorted(self.block_tags),
        }


def _make_spec(model_id: str, variables: tuple[str, ...]) -> ModelSpec:
    tags = {
        block
        for block, members in _BLOCK_MEMBERS.items()
        if members & set(variables)
    }
    return ModelSpec(model_id=model_id, variables=variables, block_tags=frozenset(tags))


def catalog() -> tuple[ModelSpec, ...]:
    """All sixteen model specifications in catalog order."""
    return tuple(_make_spec(mid, vs) for mid, vs in MODEL_GRID.items())


def model_by_id(model_id: str) -> ModelSpec:
    if model_id not in MODEL_GRID:
        raise DataError(
            f"unknown model id {model_id!r}; valid ids: {', '.join(MODEL_GRID)}"
        )
    return _make_spec(model_id, MODEL_GRID[model_id])


@dataclass(frozen=True)
class PipelineOptions:
    level: float = 0.05
    max_var_lags: int = 8
    lm_max_lag: int = 4
    unit_root_deterministic: Deterministic = Deterministic.CONSTANT
    exact_dependency_tol: float = 1e-10
    #: Lag depths above this are flagged in provenance (the presentation
    #: layer prints at most four short-run lag rows per variable).
    lag_flag_threshold: int = 5


@dataclass
class PipelineResult:
    """Everything one model run produced, stage by stage.

    ``stage_markers`` documents skipped or degenerate stages; a stage field
    of ``None`` always has a corresponding marker explaining it.
    """

    spec: ModelSpec
    stage_markers: dict[str, str] = field(default_factory=dict)
    integration: dict[str, IntegrationOrder] = field(default_factory=dict)
    lag_order: int | None = None
    pantula: PantulaResult | None = None
    fit: VecmFit | None = None
    tables: EffectTables | None = None
    sign_report: SignReport | None = None
    diagnostics: DiagnosticReport | None = None
    exact_relation: dict | None = None
    provenance: dict = field(default_factory=dict)

    @property
    def case(self) -> JohansenCase | None:
        if self.pantula is not None:
            return self.pantula.case
        return None

    @property
    def rank(self) -> int | None:
        if self.exact_relation is not None:
            return None
        if self.pantula is not None:
            return self.pantula.rank
        return None

    def to_dict(self) -> dict:
        return {
            "model": self.spec.to_dict(),
            "stage_markers": dict(self.stage_markers),
            "integration": {k: v.value for k, v in self.integration.items()},
            "lag_order": self.lag_order,
            "pantula": self.pantula.to_dict() if self.pantula else None,
            "fit": self.fit.to_dict() if self.fit else None,
            "tables": self.tables.to_dict() if self.tables else None,
            "sign_report": self.sign_report.to_dict() if self.sign_report else None,
            "diagnostics": self.diagnostics.to_dict() if self.diagnostics else None,
            "exact_relation": self.exact_relation,
            "provenance": dict(self.provenance),
        }


def _tag_stage(stage: str, exc: CoinformError) -> CoinformError:
    return type(exc)(f"[{stage}] {exc}")


def _find_exact_dependency(
    logs: np.ndarray, variables: tuple[str, ...], tol: float
) -> dict | None:
    centred = logs - logs.mean(axis=0)
    svals = np.linalg.svd(centred, compute_uv=False)
    if svals[0] <= 0.0:
        return None
    if svals[-1] / svals[0] > tol:
        return None
    # Null-space direction of the centred columns = the exact relation.
    _, _, vt = np.linalg.svd(centred, full_matrices=False)
    cvec = vt[-1]
    pivot = cvec[0]
    if abs(pivot) < 1e-8 * np.max(np.abs(cvec)):
        return {
            "involves_price": False,
            "coefficients": {v: float(c) for v, c in zip(variables, cvec)},
        }
    cvec = cvec / pivot
    const = float(np.mean(logs @ cvec))
    residual = float(np.max(np.abs(logs @ cvec - const)))
    return {
        "involves_price": True,
        "coefficients": {v: float(c) for v, c in zip(variables, cvec)},
        "const": const,
        "max_residual": residual,
    }


def _tables_from_exact(relation: dict, variables: tuple[str, ...]) -> EffectTables:
    long_run: dict[str, CoefficientCell] = {}
    for v in variables[1:]:
        long_run[v] = CoefficientCell.from_value_se(-relation["coefficients"][v], 0.0)
    long_run["const"] = CoefficientCell.from_value_se(relation["const"], 0.0)
    return EffectTables(
        short_run={},
        long_run=long_run,
        normalized_on=variables[0],
        rank=1,
        lag_order=0,
        case=JohansenCase.RESTRICTED_CONSTANT,
    )


def run_model(
    spec: ModelSpec, panel: Panel, options: PipelineOptions = PipelineOptions()
) -> PipelineResult:
    """Run one model specification against a level panel.

    The panel must contain every variable of the specification (a missing
    variable is a :class:`DataError`; catalog-level skipping lives in
    :func:`run_many`).  Values must be positive levels — the pipeline takes
    logs itself.
    """
    missing = [v for v in spec.variables if v not in panel.variables]
    if missing:
        raise DataError(
            f"panel missing variable(s) {', '.join(missing)} for model {spec.model_id}"
        )
    result = PipelineResult(spec=spec)
    result.provenance = {
        "model_id": spec.model_id,
        "variables": list(spec.variables),
        "alignment_policy": panel.alignment_policy.value,
        "nobs": panel.nobs,
        "level": options.level,
    }

    try:
        sub = log_panel(panel.subset(spec.variables))
    except CoinformError as exc:
        raise _tag_stage("log_transform", exc) from exc

    relation = _find_exact_dependency(
        np.asarray(sub.data), spec.variables, options.exact_dependency_tol
    )
    if relation is not None:
        result.exact_relation = relation
        if relation.get("involves_price"):
            result.stage_markers["estimation"] = (
                "exact linear dependency among the log levels; the relation is "
                "reported directly and no VECM is estimated"
            )
            result.tables = _tables_from_exact(relation, spec.variables)
            result.sign_report = sign_expectation_check(result.tables)
        else:
            result.stage_markers["estimation"] = (
                "exact linear dependency among the log levels not involving "
                "the price; estimation is not identified"
            )
        result.stage_markers["diagnostics"] = "skipped: no stochastic model estimated"
        return result

    try:
        for name in spec.variables:
            result.integration[name] = classify_integration(
                sub.series(name),
                deterministic=options.unit_root_deterministic,
                level=options.level,
            )
    except CoinformError as exc:
        raise _tag_stage("integration", exc) from exc

    i1 = [v for v, order in result.integration.items() if order is IntegrationOrder.I1]
    if len(i1) == 0:
        result.stage_markers["rank_search"] = "no unit roots; cointegration not applicable"
        return result
    if len(i1) < 2:
        result.stage_markers["rank_search"] = (
            "fewer than two I(1) variables; cointegration not applicable"
        )
        return result

    try:
        result.lag_order = select_var_lags_aic(sub, max_lags=options.max_var_lags)
    except CoinformError as exc:
        raise _tag_stage("lag_selection", exc) from exc
    if result.lag_order > options.lag_flag_threshold:
        result.provenance["lag_flag"] = (
            f"selected lag order {result.lag_order} exceeds the presentation "
            f"region ({options.lag_flag_threshold})"
        )

    try:
        result.pantula = pantula_select(sub, result.lag_order, options.level)
    except CoinformError as exc:
        raise _tag_stage("rank_search", exc) from exc
    case, rank = result.pantula.case, result.pantula.rank
    n = len(spec.variables)

    try:
        if rank == 0:
            result.fit = reduce_to_var(sub, result.lag_order, "rank_zero", case)
            result.stage_markers["long_run"] = (
                "selected rank 0: no long-run relation; VAR in first "
                "differences reported"
            )
        elif rank == n:
            result.fit = reduce_to_var(sub, result.lag_order, "full_rank", case)
            result.stage_markers["long_run"] = (
                "selected full rank: system stationary in levels; level VAR "
                "reported in error-correction form"
            )
        else:
            result.fit = estimate_vecm(
                sub, result.lag_order, rank, case, normalize_on=PRICE
            )
        result.tables = inference(result.fit)
    except CoinformError as exc:
        raise _tag_stage("estimation", exc) from exc

    if result.tables.long_run:
        result.sign_report = sign_expectation_check(result.tables)

    try:
        result.diagnostics = diagnostic_report(
            result.fit, max_lag=options.lm_max_lag, level=options.level
        )
    except CoinformError as exc:
        raise _tag_stage("diagnostics", exc) from exc

    result.provenance.update(
        {
            "lag_order": result.lag_order,
            "case": case.value,
            "rank": rank,
        }
    )
    return result


def run_many(
    panel: Panel,
    options: PipelineOptions = PipelineOptions(),
    model_ids: list[str] | None = None,
) -> tuple[list[PipelineResult], list[tuple[str, str]]]:
    """Run every requested catalog model that the panel can support.

    Models referencing variables absent from the panel are skipped, not
    failed, as are models whose pipeline aborts with a tagged stage error;
    the second return value lists (model_id, notice) pairs.
    """
    specs = (
        catalog()
        if model_ids is None
        else tuple(model_by_id(mid) for mid in model_ids)
    )
    results: list[PipelineResult] = []
    skipped: list[tuple[str, str]] = []
    for spec in specs:
        missing = [v for v in spec.variables if v not in panel.variables]
        if missing:
            skipped.append(
                (spec.model_id, f"missing variable(s): {', '.join(missing)}")
            )
            continue
        try:
            results.append(run_model(spec, panel, options))
        except CoinformError as exc:
            skipped.append((spec.model_id, str(exc)))
    return results, skipped
