"""Position-dependent optimal hedge ratios.

Estimates the classical minimum-variance hedge ratio alongside a pair of
ratios that depend on the direction of the spot move, fits the bivariate
volatility system the pair lives in, and tests whether the two ratios are
equal.  See the README for the command-line interface.
"""

from .errors import (
    AsymHedgeError,
    ConfigError,
    ConstraintViolationError,
    ConvergenceError,
    DegenerateCovarianceError,
    DegenerateHedgeError,
    InsufficientDataError,
    InvalidInputError,
    InvalidStartError,
    NoHedgeNeeded,
    NonInvertibleInformationError,
    RankDeficiencyError,
)
from .series import (
    ComponentSeries,
    PriceSeries,
    ReturnSeries,
    first_difference,
    log_difference,
    sample_moments,
    split_components,
)
from .ratios import (
    HedgedPortfolio,
    HedgeStrategy,
    OhrEstimate,
    asymmetric_ohr_moment,
    ols_regression,
    portfolio_variance,
    strategy_for,
    symmetric_ohr_moment,
)
from .garch import (
    EstimationResult,
    FilteredVolatility,
    GarchSystemParams,
    LagOrders,
    filter_volatility,
    fit_system,
    residuals,
)
from .optimize import OptimizerConfig, maximize
from .inference import (
    ArchTestResult,
    IcSelection,
    PipelineOutcome,
    WaldResult,
    analyze_components,
    individual_significance,
    multivariate_arch_test,
    select_lags,
    sure_estimate,
    wald_symmetry_test,
)
from .sim import (
    DgpSpec,
    FuturesDgp,
    SimStudyResult,
    SizePowerResult,
    run_study,
    simulate,
    size_power_study,
)
from .report import ReportDocument, build_estimate_report, render_text
from .cli import RunConfig, ingest_csv, main, run_pipeline
from .sample_data import snapshot_path

__version__ = "0.1.0"

__all__ = [
    "AsymHedgeError",
    "ConfigError",
    "ConstraintViolationError",
    "ConvergenceError",
    "DegenerateCovarianceError",
    "DegenerateHedgeError",
    "InsufficientDataError",
    "InvalidInputError",
    "InvalidStartError",
    "NoHedgeNeeded",
    "NonInvertibleInformationError",
    "RankDeficiencyError",
    "ComponentSeries",
    "PriceSeries",
    "ReturnSeries",
    "first_difference",
    "log_difference",
    "sample_moments",
    "split_components",
    "HedgedPortfolio",
    "HedgeStrategy",
    "OhrEstimate",
    "asymmetric_ohr_moment",
    "ols_regression",
    "portfolio_variance",
    "strategy_for",
    "symmetric_ohr_moment",
    "EstimationResult",
    "FilteredVolatility",
    "GarchSystemParams",
    "LagOrders",
    "filter_volatility",
    "fit_system",
    "residuals",
    "OptimizerConfig",
    "maximize",
    "ArchTestResult",
    "IcSelection",
    "PipelineOutcome",
    "WaldResult",
    "analyze_components",
    "individual_significance",
    "multivariate_arch_test",
    "select_lags",
    "sure_estimate",
    "wald_symmetry_test",
    "DgpSpec",
    "FuturesDgp",
    "SimStudyResult",
    "SizePowerResult",
    "run_study",
    "simulate",
    "size_power_study",
    "ReportDocument",
    "build_estimate_report",
    "render_text",
    "RunConfig",
    "ingest_csv",
    "main",
    "run_pipeline",
    "snapshot_path",
    "__version__",
]
