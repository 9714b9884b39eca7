"""coinform: econometrics of digital-currency price formation.

Ingestion and alignment of daily series, unit-root screening (ADF and
Phillips-Perron), Johansen cointegration-rank analysis, vector
error-correction estimation with inference and residual diagnostics, a
structural simulator for synthetic data, and a sixteen-model replication
catalog, all exposed both as a library and through the ``coinform`` CLI.
"""

from .errors import CoinformError, CriticalValueError, DataError, EstimationError
from .critical_values import dickey_fuller_cv, johansen_cv, verify_checksums
from .series_store import (
    AlignmentPolicy,
    CorrelationMatrix,
    Frequency,
    LoadReport,
    Panel,
    TimeSeries,
    TransformTag,
    align,
    correlation_matrix,
    difference,
    export_csv,
    high_correlation_pairs,
    load_csv,
    log_transform,
    panel_from_array,
)
from .unit_root import (
    Deterministic,
    IntegrationOrder,
    UnitRootResult,
    UnitRootTest,
    adf_test,
    classify_integration,
    pp_test,
    select_lags_aic,
)
from .johansen import (
    CointRankResult,
    EigenAnalysis,
    JohansenCase,
    PantulaResult,
    concentrate,
    max_eigen_statistic,
    pantula_select,
    rank_decision,
    trace_statistic,
)
from .vecm import (
    CoefficientCell,
    EffectTables,
    VecmFit,
    estimate_vecm,
    inference,
    normalize_long_run,
    reduce_to_var,
    select_var_lags_aic,
)
from .diagnostics import (
    DiagnosticReport,
    diagnostic_report,
    jarque_bera,
    lm_autocorrelation,
    stability,
)
from .barro import (
    EconomyState,
    PriceRegressionSpec,
    SignReport,
    equilibrium_price,
    sign_expectation_check,
    simulate_economy,
)
from .catalog import (
    MODEL_GRID,
    REGISTRY,
    ModelSpec,
    PipelineOptions,
    PipelineResult,
    catalog,
    model_by_id,
    run_many,
    run_model,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
