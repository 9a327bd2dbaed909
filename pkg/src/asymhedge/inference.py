"""Hypothesis tests, SURE fallback estimation, and lag-order selection.

The symmetry question is whether the hedge ratio on the positive
components equals the one on the negative components; it is answered with
a Wald statistic built from the joint covariance of the two estimates.
Before the volatility system is fitted, a multivariate ARCH pre-test on
the per-equation least-squares residuals decides whether time-varying
volatility is even present; without it the system collapses to seemingly
unrelated regressions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateCovarianceError,
    InsufficientDataError,
    InvalidInputError,
    RankDeficiencyError,
)
from .garch import EstimationResult, LagOrders, ParamLayout, fit_system
from .optimize import OptimizerConfig
from .ratios import OhrEstimate, ols_regression
from .series import ComponentSeries

__all__ = [
    "WaldResult",
    "ArchTestResult",
    "IcCandidate",
    "IcSelection",
    "PipelineOutcome",
    "wald_symmetry_test",
    "individual_significance",
    "multivariate_arch_test",
    "sure_estimate",
    "aic",
    "bic",
    "hqc",
    "select_lags",
    "analyze_components",
    "TIED_LAG_GRID",
]

# Candidate (ARCH order, GARCH order) pairs shared by all three recursions
# in the default lag search; the exhaustive flag crosses them instead.
TIED_LAG_GRID: tuple[tuple[int, int], ...] = (
    (0, 0),
    (1, 0),
    (0, 1),
    (1, 1),
    (2, 1),
    (1, 2),
    (2, 2),
)


@dataclass(frozen=True)
class WaldResult:
    """Chi-square test of a single linear restriction on two estimates."""

    statistic: float
    dof: int
    p_value: float
    restriction: str
    estimate_diff: float
    se_diff: float

    def __post_init__(self):
        if self.statistic < 0:
            raise InvalidInputError("Wald statistic cannot be negative")
        if not 0.0 <= self.p_value <= 1.0:
            raise InvalidInputError(f"p-value {self.p_value} outside [0, 1]")


@dataclass(frozen=True)
class ArchTestResult:
    """Multivariate ARCH LM test outcome."""

    statistic: float
    dof: int
    p_value: float
    lags_used: int

    def __post_init__(self):
        if self.statistic < 0:
            raise InvalidInputError("LM statistic cannot be negative")
        if not 0.0 <= self.p_value <= 1.0:
            raise InvalidInputError(f"p-value {self.p_value} outside [0, 1]")


@dataclass(frozen=True)
class IcCandidate:
    """One row of the lag-selection table."""

    orders: LagOrders
    loglik: float | None
    n_params: int
    value: float | None
    converged: bool
    error: str | None = None


@dataclass(frozen=True)
class IcSelection:
    """Winning lag orders plus the full candidate table.

    ``chosen_result`` carries the fitted system for the winning candidate
    so callers do not have to refit it.
    """

    chosen: LagOrders
    criterion: str
    table: tuple[IcCandidate, ...]
    chosen_result: EstimationResult


def wald_symmetry_test(h_pos: float, h_neg: float, cov: np.ndarray) -> WaldResult:
    """Test the restriction h_pos - h_neg = 0.

    ``cov`` is the 2x2 covariance of the estimates (h_pos, h_neg); the
    statistic is the squared difference over the variance of the
    difference, referred to the chi-square distribution with 1 degree of
    freedom.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2):
        raise InvalidInputError(f"covariance must be 2x2, got shape {cov.shape}")
    scale = float(np.max(np.abs(cov)))
    if abs(cov[0, 1] - cov[1, 0]) > 1e-8 * max(scale, 1e-300):
        raise InvalidInputError("covariance matrix is not symmetric")
    if cov[0, 0] < 0 or cov[1, 1] < 0:
        raise DegenerateCovarianceError("negative variance in the estimate covariance")
    var_diff = float(cov[0, 0] + cov[1, 1] - 2.0 * cov[0, 1])
    if var_diff <= 0:
        raise DegenerateCovarianceError(
            f"variance of the ratio difference is {var_diff:.6g}, cannot test"
        )
    diff = float(h_pos) - float(h_neg)
    statistic = diff * diff / var_diff
    p_value = float(stats.chi2.sf(statistic, df=1))
    return WaldResult(
        statistic=float(statistic),
        dof=1,
        p_value=p_value,
        restriction="h_pos - h_neg = 0",
        estimate_diff=diff,
        se_diff=math.sqrt(var_diff),
    )


def individual_significance(estimate: float, se: float) -> tuple[float, float]:
    """Squared z statistic and chi-square(1) p-value for estimate = 0."""
    if not se > 0:
        raise DegenerateCovarianceError(f"standard error must be positive, got {se}")
    statistic = (float(estimate) / float(se)) ** 2
    return statistic, float(stats.chi2.sf(statistic, df=1))


def multivariate_arch_test(u_pos, u_neg, lags: int = 1) -> ArchTestResult:
    """LM test for conditional heteroskedasticity in a residual pair.

    Builds w_t = (u_pos^2, u_neg^2, u_pos * u_neg) and regresses each
    element on a constant and lags 1..q of all three elements; the
    statistic sums n R^2 over the three regressions and is referred to the
    chi-square distribution with 3 * (3 * lags) degrees of freedom.
    """
    if lags < 1:
        raise ConfigError(f"lags must be a positive integer, got {lags}")
    u_pos = np.asarray(u_pos, dtype=float)
    u_neg = np.asarray(u_neg, dtype=float)
    if u_pos.shape != u_neg.shape or u_pos.ndim != 1:
        raise InvalidInputError("residual series must be equal-length vectors")
    T = len(u_pos)
    if T <= 3 * (lags + 1):
        raise InsufficientDataError(
            f"need more than {3 * (lags + 1)} residuals for {lags} lag(s), got {T}"
        )
    w = np.column_stack([u_pos**2, u_neg**2, u_pos * u_neg])
    n = T - lags
    cols = [np.ones(n)]
    for lag in range(1, lags + 1):
        cols.append(w[lags - lag : T - lag])
    X = np.column_stack(cols)
    p = X.shape[1]
    if np.linalg.matrix_rank(X) < p:
        raise RankDeficiencyError("lagged squared-residual regressors are collinear")
    statistic = 0.0
    xtx_inv_xt = np.linalg.pinv(X)
    for e in range(3):
        y = w[lags:, e]
        sst = float(np.sum((y - y.mean()) ** 2))
        if sst == 0.0:
            raise RankDeficiencyError("a squared-residual series is constant")
        beta = xtx_inv_xt @ y
        resid = y - X @ beta
        r2 = 1.0 - float(resid @ resid) / sst
        statistic += n * r2
    dof = 3 * (3 * lags)
    return ArchTestResult(
        statistic=float(statistic),
        dof=dof,
        p_value=float(stats.chi2.sf(statistic, df=dof)),
        lags_used=lags,
    )


def sure_estimate(
    components: ComponentSeries,
) -> tuple[OhrEstimate, OhrEstimate, np.ndarray, np.ndarray]:
    """Two-equation feasible-GLS seemingly unrelated regressions.

    Equation-by-equation least squares supplies the residual covariance
    (denominator T), then generalized least squares reweights the stacked
    system.  Returns the two ratio estimates, the 2x2 residual covariance
    and the 4x4 coefficient covariance ordered
    (alpha_pos, h_pos, alpha_neg, h_neg).
    """
    T = len(components)
    y1 = components.ds_pos
    y2 = components.ds_neg
    X1 = np.column_stack([np.ones(T), components.df_pos])
    X2 = np.column_stack([np.ones(T), components.df_neg])
    for name, series in (("positive", components.df_pos), ("negative", components.df_neg)):
        if np.ptp(series) == 0.0:
            raise RankDeficiencyError(f"{name} futures component is constant")
    b1, *_ = np.linalg.lstsq(X1, y1, rcond=None)
    b2, *_ = np.linalg.lstsq(X2, y2, rcond=None)
    e1 = y1 - X1 @ b1
    e2 = y2 - X2 @ b2
    s11 = float(e1 @ e1) / T
    s22 = float(e2 @ e2) / T
    s12 = float(e1 @ e2) / T
    det = s11 * s22 - s12 * s12
    if det <= 1e-300 or s11 <= 0 or s22 <= 0:
        raise DegenerateCovarianceError("residual covariance is singular")
    a = s22 / det
    b = -s12 / det
    c = s11 / det
    A = np.empty((4, 4))
    A[0:2, 0:2] = a * (X1.T @ X1)
    A[0:2, 2:4] = b * (X1.T @ X2)
    A[2:4, 0:2] = b * (X2.T @ X1)
    A[2:4, 2:4] = c * (X2.T @ X2)
    rhs = np.concatenate([a * (X1.T @ y1) + b * (X1.T @ y2), b * (X2.T @ y1) + c * (X2.T @ y2)])
    try:
        coef_cov = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise DegenerateCovarianceError(f"GLS normal equations are singular: {exc}") from exc
    beta = coef_cov @ rhs
    coef_cov = 0.5 * (coef_cov + coef_cov.T)
    se = np.sqrt(np.diag(coef_cov))
    est_pos = OhrEstimate(
        h=float(beta[1]),
        alpha=float(beta[0]),
        se_h=float(se[1]),
        kind="positive-component",
        method="sure",
    )
    est_neg = OhrEstimate(
        h=float(beta[3]),
        alpha=float(beta[2]),
        se_h=float(se[3]),
        kind="negative-component",
        method="sure",
    )
    resid_cov = np.array([[s11, s12], [s12, s22]])
    return est_pos, est_neg, resid_cov, coef_cov


def aic(loglik: float, n_params: int) -> float:
    """Akaike: -2 loglik + 2 k."""
    return -2.0 * loglik + 2.0 * n_params


def bic(loglik: float, n_params: int, n_obs: int) -> float:
    """Schwarz: -2 loglik + k ln(T)."""
    return -2.0 * loglik + n_params * math.log(n_obs)


def hqc(loglik: float, n_params: int, n_obs: int) -> float:
    """Hannan-Quinn: -2 loglik + 2 k ln(ln(T))."""
    return -2.0 * loglik + 2.0 * n_params * math.log(math.log(n_obs))


def _criterion_value(name: str, loglik: float, n_params: int, n_obs: int) -> float:
    if name == "aic":
        return aic(loglik, n_params)
    if name == "bic":
        return bic(loglik, n_params, n_obs)
    if name == "hqc":
        return hqc(loglik, n_params, n_obs)
    raise ConfigError(f"unknown information criterion {name!r}")


def _candidate_orders(max_lag: int, exhaustive: bool) -> list[LagOrders]:
    pairs = [kq for kq in TIED_LAG_GRID if max(kq) <= max_lag]
    if not exhaustive:
        return [LagOrders(k, q, k, q, k, q) for k, q in pairs]
    return [
        LagOrders(kp, qp, kn, qn, kx, qx)
        for (kp, qp), (kn, qn), (kx, qx) in itertools.product(pairs, repeat=3)
    ]


def select_lags(
    components: ComponentSeries,
    max_lag: int = 2,
    criterion: str = "bic",
    dist: str = "student_t",
    config: OptimizerConfig | None = None,
    exhaustive: bool = False,
) -> IcSelection:
    """Grid search over lag orders, each candidate fitted by full MLE.

    By default the three recursions share one (k, q) candidate from a small
    tied grid; ``exhaustive`` crosses the grid over the three recursions
    instead.  Candidates that fail to converge are recorded in the table
    and excluded from the minimum.
    """
    if max_lag < 1:
        raise ConfigError(f"max_lag must be at least 1, got {max_lag}")
    criterion = criterion.lower()
    if criterion not in ("aic", "bic", "hqc"):
        raise ConfigError(f"unknown information criterion {criterion!r}")
    T = len(components)
    rows: list[IcCandidate] = []
    best: tuple[float, IcCandidate, EstimationResult] | None = None
    for orders in _candidate_orders(max_lag, exhaustive):
        layout_k = ParamLayout(orders, dist).n_params
        try:
            result = fit_system(components, orders, dist=dist, config=config)
        except Exception as exc:
            rows.append(
                IcCandidate(
                    orders=orders,
                    loglik=None,
                    n_params=layout_k,
                    value=None,
                    converged=False,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
            continue
        if not result.converged:
            rows.append(
                IcCandidate(
                    orders=orders,
                    loglik=result.loglik,
                    n_params=result.n_params,
                    value=None,
                    converged=False,
                    error="did not converge",
                )
            )
            continue
        value = _criterion_value(criterion, result.loglik, result.n_params, T)
        row = IcCandidate(
            orders=orders,
            loglik=result.loglik,
            n_params=result.n_params,
            value=value,
            converged=True,
        )
        rows.append(row)
        if best is None or value < best[0]:
            best = (value, row, result)
    if best is None:
        raise ConvergenceError("no lag-order candidate converged")
    return IcSelection(
        chosen=best[1].orders,
        criterion=criterion,
        table=tuple(rows),
        chosen_result=best[2],
    )


@dataclass(frozen=True)
class PipelineOutcome:
    """Everything the reporting layer needs from one estimation run."""

    n_obs: int
    arch_test: ArchTestResult
    path: str
    forced: bool
    path_warning: str | None
    lag_selection: IcSelection | None
    estimation: EstimationResult | None
    estimate_pos: OhrEstimate
    estimate_neg: OhrEstimate
    ratio_covariance: np.ndarray
    wald: WaldResult
    significance_pos: tuple[float, float]
    significance_neg: tuple[float, float]
    sure_residual_cov: np.ndarray | None = None
    sure_coefficient_cov: np.ndarray | None = None


def analyze_components(
    components: ComponentSeries,
    force_path: str = "auto",
    pretest_lags: int = 1,
    pretest_alpha: float = 0.05,
    orders: LagOrders | None = None,
    max_lag: int = 2,
    criterion: str = "bic",
    dist: str = "student_t",
    config: OptimizerConfig | None = None,
    exhaustive: bool = False,
) -> PipelineOutcome:
    """Pre-test, estimate, and test ratio symmetry on a component sample.

    The ARCH pre-test on per-equation least-squares residuals routes the
    run: rejection selects the volatility-system MLE, failure to reject the
    SURE fallback.  ``force_path`` overrides the routing; ``orders`` pins
    the lag orders and skips selection on the system path.
    """
    if force_path not in ("auto", "sure", "mgarch"):
        raise ConfigError(f"force_path must be auto, sure or mgarch, got {force_path!r}")
    if not 0.0 < pretest_alpha < 1.0:
        raise ConfigError(f"pre-test level must be inside (0, 1), got {pretest_alpha}")

    ols_pos = ols_regression(components.ds_pos, components.df_pos)
    ols_neg = ols_regression(components.ds_neg, components.df_neg)
    u_pos = components.ds_pos - ols_pos.alpha - ols_pos.h * components.df_pos
    u_neg = components.ds_neg - ols_neg.alpha - ols_neg.h * components.df_neg
    arch = multivariate_arch_test(u_pos, u_neg, lags=pretest_lags)
    arch_rejects = arch.p_value < pretest_alpha

    if force_path == "auto":
        path = "mgarch" if arch_rejects else "sure"
        forced = False
        warning = None
    else:
        path = force_path
        forced = True
        if path == "sure" and arch_rejects:
            warning = (
                "ARCH pre-test rejects homoskedasticity "
                f"(p = {arch.p_value:.4g}); SURE standard errors may be unreliable"
            )
        elif path == "mgarch" and not arch_rejects:
            warning = (
                "ARCH pre-test does not reject homoskedasticity "
                f"(p = {arch.p_value:.4g}); the volatility system may be overparameterized"
            )
        else:
            warning = None

    lag_selection: IcSelection | None = None
    estimation: EstimationResult | None = None
    sure_resid_cov = None
    sure_coef_cov = None

    if path == "mgarch":
        if orders is None:
            lag_selection = select_lags(
                components,
                max_lag=max_lag,
                criterion=criterion,
                dist=dist,
                config=config,
                exhaustive=exhaustive,
            )
            estimation = lag_selection.chosen_result
        else:
            estimation = fit_system(components, orders, dist=dist, config=config)
        if not estimation.converged:
            raise ConvergenceError(
                f"system estimation did not converge (gradient norm {estimation.gradient_norm:.3g})"
            )
        if estimation.covariance is None:
            raise ConvergenceError("no parameter covariance available at the optimum")
        layout_idx = (ParamLayout.IDX_H_POS, ParamLayout.IDX_H_NEG)
        se_pos = float(estimation.se[layout_idx[0]])
        se_neg = float(estimation.se[layout_idx[1]])
        estimate_pos = OhrEstimate(
            h=estimation.h_pos,
            alpha=estimation.params.alpha_pos,
            se_h=se_pos,
            kind="positive-component",
            method="mgarch",
        )
        estimate_neg = OhrEstimate(
            h=estimation.h_neg,
            alpha=estimation.params.alpha_neg,
            se_h=se_neg,
            kind="negative-component",
            method="mgarch",
        )
        ratio_cov = estimation.ratio_covariance()
    else:
        estimate_pos, estimate_neg, sure_resid_cov, sure_coef_cov = sure_estimate(components)
        ratio_cov = sure_coef_cov[np.ix_([1, 3], [1, 3])]

    wald = wald_symmetry_test(estimate_pos.h, estimate_neg.h, ratio_cov)
    sig_pos = individual_significance(estimate_pos.h, estimate_pos.se_h)
    sig_neg = individual_significance(estimate_neg.h, estimate_neg.se_h)
    return PipelineOutcome(
        n_obs=len(components),
        arch_test=arch,
        path=path,
        forced=forced,
        path_warning=warning,
        lag_selection=lag_selection,
        estimation=estimation,
        estimate_pos=estimate_pos,
        estimate_neg=estimate_neg,
        ratio_covariance=ratio_cov,
        wald=wald,
        significance_pos=sig_pos,
        significance_neg=sig_neg,
        sure_residual_cov=sure_resid_cov,
        sure_coefficient_cov=sure_coef_cov,
    )
