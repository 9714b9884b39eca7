"""Acceptance gate: eight end-to-end criteria, one verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
``[PASS]``/``[FAIL]`` lines alongside pytest's own verdicts.  Criterion 8
needs the original-source daily dataset and is skipped (never failed) when
the COINFORM_ORIGINAL_DATA environment variable is unset.
"""

from __future__ import annotations

import json
import os
import pathlib
import time
from collections import Counter

import numpy as np
import pytest
from click.testing import CliRunner

from conftest import bivariate_vecm_data, random_walk_panel, trivariate_coint_panel
from coinform.barro import PriceRegressionSpec, simulate_economy
from coinform.catalog import catalog, model_by_id, run_many, run_model
from coinform.cli import cli
from coinform.diagnostics import (
    jarque_bera_series,
    lm_autocorrelation_stat,
    stability,
)
from coinform.johansen import JohansenCase, concentrate, rank_decision
from coinform.rendering import render_effect_grid
from coinform.series_store import (
    AlignmentPolicy,
    align,
    correlation_matrix,
    load_csv,
)
from coinform.unit_root import Deterministic, adf_test, pp_test
from coinform.vecm import estimate_vecm, reduce_to_var, stars_from_t


def _verdict(name: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# -------------------------------------------------------------- criterion 1


def test_criterion_1_unit_root_size_power():
    """ADF/PP non-rejection rate on random walks, rejection rate on noise."""
    t0 = time.perf_counter()
    keep_adf = keep_pp = 0
    for seed in range(500):
        rng = np.random.default_rng(seed)
        walk = np.cumsum(rng.standard_normal(1000))
        keep_adf += not adf_test(walk, Deterministic.CONSTANT, lags=0).rejects_at(0.05)
        keep_pp += not pp_test(walk, Deterministic.CONSTANT).rejects_at(0.05)
    rej_adf = rej_pp = 0
    for seed in range(500):
        rng = np.random.default_rng(10_000 + seed)
        noise = rng.standard_normal(1000)
        rej_adf += adf_test(noise, Deterministic.CONSTANT, lags=0).rejects_at(0.05)
        rej_pp += pp_test(noise, Deterministic.CONSTANT).rejects_at(0.05)
    elapsed = time.perf_counter() - t0

    size_adf, size_pp = keep_adf / 500, keep_pp / 500
    pow_adf, pow_pp = rej_adf / 500, rej_pp / 500
    ok = (
        0.92 <= size_adf <= 0.98
        and 0.92 <= size_pp <= 0.98
        and pow_adf > 0.99
        and pow_pp > 0.99
        and elapsed < 60.0
    )
    _verdict(
        "criterion 1 (unit-root size/power)",
        ok,
        f"non-rejection ADF {size_adf:.3f} / PP {size_pp:.3f} in [0.92, 0.98]; "
        f"power ADF {pow_adf:.3f} / PP {pow_pp:.3f} > 0.99; {elapsed:.1f}s < 60s",
    )


# -------------------------------------------------------------- criterion 2


def test_criterion_2_johansen_rank_recovery():
    """Trace-test rank selection on a cointegrated DGP and on pure walks."""
    t0 = time.perf_counter()
    case = JohansenCase.RESTRICTED_CONSTANT
    hit_rank1 = 0
    for seed in range(200):
        z = bivariate_vecm_data(500, seed)
        decision = rank_decision(concentrate(z, 1, case), 0.05)
        hit_rank1 += decision.selected_rank == 1
    hit_rank0 = 0
    for seed in range(200):
        panel = random_walk_panel(500, 2, 20_000 + seed)
        decision = rank_decision(concentrate(panel, 1, case), 0.05)
        hit_rank0 += decision.selected_rank == 0
    elapsed = time.perf_counter() - t0

    share1, share0 = hit_rank1 / 200, hit_rank0 / 200
    ok = share1 >= 0.85 and share0 >= 0.90 and elapsed < 120.0
    _verdict(
        "criterion 2 (Johansen rank recovery)",
        ok,
        f"rank 1 selected {share1:.3f} >= 0.85 on the cointegrated DGP; "
        f"rank 0 selected {share0:.3f} >= 0.90 on independent walks; "
        f"{elapsed:.1f}s < 120s",
    )


# -------------------------------------------------------------- criterion 3


def test_criterion_3_vecm_parameter_recovery():
    """Median beta/alpha on the known DGP plus the likelihood cross-check."""
    case = JohansenCase.RESTRICTED_CONSTANT
    beta2, alpha1, alpha2 = [], [], []
    llf_gap = 0.0
    for seed in range(200):
        z = bivariate_vecm_data(500, seed)
        fit = estimate_vecm(z, 1, 1, case, normalize_on=0)
        beta2.append(fit.beta[1, 0])
        alpha1.append(fit.alpha[0, 0])
        alpha2.append(fit.alpha[1, 0])
        llf_gap = max(llf_gap, abs(fit.log_likelihood - fit.log_likelihood_eigen))

    med_b2 = float(np.median(beta2))
    med_a1 = float(np.median(alpha1))
    med_a2 = float(np.median(alpha2))
    ok = (
        -2.1 <= med_b2 <= -1.9
        and abs(med_a1 - (-0.5)) <= 0.1
        and abs(med_a2 - 0.1) <= 0.1
        and llf_gap < 1e-6
    )
    _verdict(
        "criterion 3 (VECM parameter recovery)",
        ok,
        f"median beta2 {med_b2:.4f} in [-2.1, -1.9]; median alpha "
        f"({med_a1:.4f}, {med_a2:.4f}) within +/-0.1 of (-0.5, 0.1); "
        f"max |loglik regression - eigen| {llf_gap:.2e} < 1e-6",
    )


# -------------------------------------------------------------- criterion 4


def test_criterion_4_statistic_identities():
    """Trace/max-eigen additivity, exact Pi factorisation, PP(0) = ADF(0)."""
    cases = list(JohansenCase)
    dets = list(Deterministic)
    worst_trace = worst_pi = worst_pp = 0.0
    for i in range(50):
        rng = np.random.default_rng(77_000 + i)
        n = 2 + i % 3
        case = cases[i % len(cases)]
        lag = 1 + i % 3
        if n == 2 and i % 2:
            panel = bivariate_vecm_data(320, 61_000 + i)
        elif n == 3 and i % 2:
            panel = trivariate_coint_panel(320, 62_000 + i)
        else:
            panel = random_walk_panel(320, n, 60_000 + i)

        analysis = concentrate(panel, lag, case)
        decision = rank_decision(analysis)
        for r in range(decision.n):
            tail = sum(decision.max_eigen_statistics[r:])
            worst_trace = max(worst_trace, abs(decision.trace_statistics[r] - tail))

        rank = (1 + i % (decision.n - 1)) if decision.n > 2 else 1
        fit = estimate_vecm(panel, lag, rank, case, normalize_on=None)
        pi_gap = np.max(np.abs(fit.pi - fit.alpha @ fit.beta[: fit.n].T))
        worst_pi = max(worst_pi, float(pi_gap))
        svals = np.linalg.svd(fit.pi, compute_uv=False)
        assert int(np.sum(svals > 1e-8 * svals[0])) == fit.rank

        series = np.cumsum(rng.standard_normal(240))
        det = dets[i % len(dets)]
        gap = abs(pp_test(series, det, bandwidth=0).statistic - adf_test(series, det, lags=0).statistic)
        worst_pp = max(worst_pp, gap)

    ok = worst_trace < 1e-10 and worst_pi < 1e-10 and worst_pp < 1e-10
    _verdict(
        "criterion 4 (statistic identities)",
        ok,
        f"50 fixtures: max |trace(r) - sum max_eigen| {worst_trace:.2e}; "
        f"max |Pi - alpha beta'| {worst_pi:.2e}; "
        f"max |PP(bw 0) - ADF(lag 0)| {worst_pp:.2e}; all < 1e-10",
    )


# -------------------------------------------------------------- criterion 5


def test_criterion_5_end_to_end_oracle(tmp_path):
    """simulate -> replicate recovers the synthetic economy's long-run law."""
    runner = CliRunner()
    sim_dir, rep_dir = tmp_path / "sim", tmp_path / "rep"
    res = runner.invoke(
        cli,
        [
            "--out", str(sim_dir),
            "simulate", "--t", "400", "--seed", "4",
            "--noise-sd", "0", "--blocks", "fundamentals",
        ],
    )
    assert res.exit_code == 0, res.output
    res = runner.invoke(
        cli,
        [
            "--out", str(rep_dir),
            "replicate", str(sim_dir / "synthetic_economy.csv"), "--models", "1.1",
        ],
    )
    assert res.exit_code == 0, res.output
    bundle = json.loads((rep_dir / "bundle.json").read_text())
    result = bundle["results"][0]
    effects = {v: c["value"] for v, c in result["tables"]["long_run"].items()}
    signs_ok = (
        effects["ntran"] > 0
        and effects["exrate"] > 0
        and effects["totbc"] < 0
        and effects["bcdde"] < 0
    )
    residual = result["exact_relation"]["max_residual"]
    noiseless_ok = signs_ok and residual < 1e-12 and result["sign_report"]["all_consistent"]

    # Noisy leg: the modal (case, rank) configuration across seeds must be
    # cointegrated and recover the coefficients within 10% on every seed
    # that lands in that configuration.
    target = {"ntran": 1.0, "exrate": 1.0, "totbc": -1.0, "bcdde": -1.0}
    configs, runs = [], []
    for seed in range(9):
        spec = PriceRegressionSpec.theory_consistent({"fundamentals"}, noise_sd=0.01)
        panel = simulate_economy(spec, t=1500, seed=seed)
        run = run_model(model_by_id("1.1"), panel)
        configs.append((run.case.value if run.case else None, run.rank))
        runs.append(run)
    modal, modal_count = Counter(configs).most_common(1)[0]
    worst_dev = 0.0
    for cfg, run in zip(configs, runs):
        if cfg != modal:
            continue
        vals = {v: c.value for v, c in run.tables.long_run.items()}
        worst_dev = max(
            worst_dev, max(abs(vals[v] - tv) / abs(tv) for v, tv in target.items())
        )
    noisy_ok = modal[1] is not None and modal[1] >= 1 and worst_dev <= 0.10

    _verdict(
        "criterion 5 (end-to-end oracle)",
        noiseless_ok and noisy_ok,
        f"noiseless: signs (+ntran, +exrate, -totbc, -bcdde) {signs_ok}, "
        f"max residual {residual:.1e} < 1e-12; noisy: modal config {modal} "
        f"on {modal_count}/9 seeds, worst coefficient deviation "
        f"{worst_dev:.3f} <= 0.10",
    )


# -------------------------------------------------------------- criterion 6


def test_criterion_6_diagnostics_calibration():
    """Empirical LM/JB sizes at 5% plus the stability verdicts."""
    lm_rej = jb_rej = 0
    reps = 500
    for seed in range(reps):
        rng = np.random.default_rng(40_000 + seed)
        u = rng.normal(size=(200, 2))
        u = u - u.mean(axis=0)  # regression residuals are orthogonal to the intercept
        lm_rej += lm_autocorrelation_stat(u, np.ones((200, 1)), lag=1).p_value < 0.05
        jb_rej += jarque_bera_series(rng.normal(size=500)).p_value < 0.05
    lm_size, jb_size = lm_rej / reps, jb_rej / reps

    rng = np.random.default_rng(99)
    t = 300
    explosive = np.zeros((t, 2))
    stable = np.zeros((t, 2))
    for i in range(1, t):
        explosive[i] = 1.05 * explosive[i - 1] + rng.normal(size=2)
        stable[i] = 0.5 * stable[i - 1] + rng.normal(size=2)
    verdict_explosive = stability(
        reduce_to_var(explosive, 1, "full_rank", JohansenCase.UNRESTRICTED_CONSTANT)
    )
    verdict_stable = stability(
        reduce_to_var(stable, 1, "full_rank", JohansenCase.UNRESTRICTED_CONSTANT)
    )

    ok = (
        0.02 <= lm_size <= 0.08
        and 0.02 <= jb_size <= 0.08
        and not verdict_explosive.is_stable
        and verdict_stable.is_stable
    )
    _verdict(
        "criterion 6 (diagnostics calibration)",
        ok,
        f"LM size {lm_size:.3f} and JB size {jb_size:.3f} in [0.02, 0.08]; "
        f"explosive DGP flagged (max modulus {verdict_explosive.max_modulus:.3f}), "
        f"stable DGP passed (max modulus {verdict_stable.max_modulus:.3f})",
    )


# -------------------------------------------------------------- criterion 7

#: Golden model grid: sixteen specifications with the price variable first.
GOLDEN_GRID = {
    "1.1": ("mkpru", "totbc", "ntran", "bcdde", "exrate"),
    "1.2": ("mkpru", "totbc", "naddu", "bcdde", "exrate"),
    "1.3": ("mkpru", "totbc", "bcdde", "exrate"),
    "1.4": ("mkpru", "naddu", "bcdde", "exrate"),
    "1.5": ("mkpru", "ntran", "bcdde", "exrate"),
    "2.1": ("mkpru", "wiki_views", "new_members", "new_posts"),
    "3.1": ("mkpru", "exrate", "dj", "oil_price"),
    "4.1": ("mkpru", "exrate", "wiki_views", "dj", "oil_price"),
    "4.2": ("mkpru", "totbc", "naddu", "bcdde", "exrate", "wiki_views",
            "new_members", "new_posts", "dj", "oil_price"),
    "4.3": ("mkpru", "totbc", "naddu", "bcdde", "wiki_views", "new_members",
            "new_posts", "dj"),
    "4.4": ("mkpru", "naddu", "bcdde", "wiki_views", "new_members", "new_posts"),
    "4.5": ("mkpru", "totbc", "bcdde", "new_members", "new_posts"),
    "4.6": ("mkpru", "bcdde", "wiki_views", "new_members", "new_posts"),
    "4.7": ("mkpru", "naddu", "bcdde", "new_posts"),
    "4.8": ("mkpru", "ntran", "bcdde", "wiki_views", "new_members", "new_posts"),
    "4.9": ("mkpru", "ntran", "bcdde", "new_members", "new_posts"),
}


def test_criterion_7_structural_golden_targets():
    """Catalog matches the golden grid; renderer conventions are stable."""
    specs = catalog()
    grid_ok = len(specs) == 16 and {
        s.model_id: s.variables for s in specs
    } == GOLDEN_GRID

    stars_ok = (
        stars_from_t(4.9) == "***"
        and stars_from_t(2.576) == "***"
        and stars_from_t(-2.0) == "**"
        and stars_from_t(1.7) == "*"
        and stars_from_t(1.645) == "*"
        and stars_from_t(1.0) == ""
    )

    spec = PriceRegressionSpec.theory_consistent({"fundamentals"}, noise_sd=0.01)
    panel = simulate_economy(spec, t=700, seed=0)
    ids = ["1.1", "1.2", "1.3", "1.4", "1.5"]
    first, _ = run_many(panel, model_ids=ids)
    second, _ = run_many(panel, model_ids=ids)
    table_a = render_effect_grid(first, "long_run", "Long-run effects")
    table_b = render_effect_grid(second, "long_run", "Long-run effects")
    byte_stable = table_a == table_b

    lines = table_a.splitlines()
    naddu_row = next(line for line in lines if line.startswith("naddu"))
    naddu_cells = naddu_row.split()[1:]
    # naddu is not a regressor of models 1.1, 1.3, 1.5 -> dashes in columns
    # 1, 3 and 5 of its row (the dash rule also covers insignificant cells).
    dash_rule_ok = (
        naddu_cells[0] == "-" and naddu_cells[2] == "-" and naddu_cells[4] == "-"
    )
    legend_ok = (
        "Significance: * 10%, ** 5%, *** 1%." in table_a
        and "'-' = not in model or not significant." in table_a
        and any("*" in c for c in table_a.splitlines())
    )

    ok = grid_ok and stars_ok and byte_stable and dash_rule_ok and legend_ok
    _verdict(
        "criterion 7 (structural golden targets)",
        ok,
        f"catalog matches the 16-model golden grid: {grid_ok}; star "
        f"thresholds: {stars_ok}; dash rule on absent variables: "
        f"{dash_rule_ok}; legend present: {legend_ok}; renderer byte-stable "
        f"across runs: {byte_stable}",
    )


# -------------------------------------------------------------- criterion 8


def test_criterion_8_original_data_goldens():
    """Optional golden checks against the original-source daily dataset."""
    root = os.environ.get("COINFORM_ORIGINAL_DATA")
    if not root:
        print(
            "\n[SKIP] criterion 8 (original-data goldens): "
            "COINFORM_ORIGINAL_DATA is not set"
        )
        pytest.skip("original-source data not supplied")
    path = pathlib.Path(root)
    files = [path] if path.is_file() else sorted(path.glob("*.csv"))
    if not files:
        print(f"\n[SKIP] criterion 8 (original-data goldens): no CSVs under {root}")
        pytest.skip("original-source data directory holds no CSV files")

    series = []
    for f in files:
        loaded, _ = load_csv(str(f))
        series.extend(loaded)
    panel = align(series, AlignmentPolicy.FORWARD_FILL_MACRO)
    corr = correlation_matrix(panel)

    def corr_of(a: str, b: str) -> float:
        i, j = panel.variables.index(a), panel.variables.index(b)
        return float(corr.values[i, j])

    c_nt = corr_of("ntran", "totbc")
    c_tn = corr_of("totbc", "naddu")
    corr_ok = abs(c_nt - 0.92) <= 0.02 and abs(c_tn - 0.95) <= 0.02

    sign_ok = True
    details = []
    for model_id in ("1.2", "1.3"):
        run = run_model(model_by_id(model_id), panel)
        if run.tables is None:
            sign_ok = False
            why = "; ".join(run.stage_markers.values()) or "no long-run table"
            details.append(f"M{model_id} produced no long-run table ({why})")
            continue
        effects = {v: c.value for v, c in run.tables.long_run.items()}
        checks = [effects["totbc"] < 0, effects["bcdde"] > 0]
        if "naddu" in effects:
            checks.append(effects["naddu"] > 0)
        sign_ok = sign_ok and all(checks)
        details.append(f"M{model_id} signs {'ok' if all(checks) else 'WRONG'}")

    _verdict(
        "criterion 8 (original-data goldens)",
        corr_ok and sign_ok,
        f"corr(ntran, totbc) {c_nt:.3f} vs 0.92 +/-0.02; corr(totbc, naddu) "
        f"{c_tn:.3f} vs 0.95 +/-0.02; " + "; ".join(details),
    )
