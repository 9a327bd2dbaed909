"""Bivariate component volatility system: filtering, likelihoods, joint MLE.

The system couples two mean equations on the sign components,

    ds_pos[t] = alpha_pos + h_pos * df_pos[t] + u_pos[t]
    ds_neg[t] = alpha_neg + h_neg * df_neg[t] + u_neg[t]

with GARCH-type recursions for the conditional variances of u_pos and
u_neg and for their conditional covariance.  The innovation law is either
bivariate Gaussian or multivariate t with nu degrees of freedom,
parameterized so the filtered matrix H_t is the conditional covariance in
both cases (the t scale matrix is H_t * (nu - 2) / nu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstraintViolationError,
    DegenerateHedgeError,
    InsufficientDataError,
    InvalidInputError,
    RankDeficiencyError,
)
from .optimize import (
    BlockTransform,
    BoundedBlock,
    IdentityBlock,
    LogBlock,
    Optimum,
    OptimizerConfig,
    ScaledIdentityBlock,
    ShiftedLogBlock,
    SimplexBlock,
    maximize,
    parameter_covariance,
)
from .ratios import ols_regression
from .series import ComponentSeries

__all__ = [
    "LagOrders",
    "GarchSystemParams",
    "FilterInit",
    "FilteredVolatility",
    "ParamLayout",
    "EstimationResult",
    "residuals",
    "filter_volatility",
    "log_likelihood",
    "fit_system",
    "CORRELATION_BOUND",
    "PD_PENALTY_WEIGHT",
    "CROSS_PHI_BOUND",
]

LOG_2PI = math.log(2.0 * math.pi)

# Conditional correlations implied by the covariance recursion are clamped
# to this bound before entering the density; the squared excess beyond the
# bound is penalized so the likelihood stays smooth while infeasible
# regions remain unattractive to the optimizer.
CORRELATION_BOUND = 0.9999
PD_PENALTY_WEIGHT = 1e4

# Box bound on each covariance-recursion coefficient.  Signs are free; the
# magnitude cap keeps the recursion away from explosive territory, where the
# likelihood surface turns into a cliff that defeats finite-difference
# derivatives.  lambda_cross gets the tighter per-lag bound 1/q so the lag
# polynomial is always stable.
CROSS_PHI_BOUND = 1.0

_BIG_NEG = -1e15


@dataclass(frozen=True)
class LagOrders:
    """ARCH order k and GARCH order q for each of the three recursions."""

    k_pos: int = 1
    q_pos: int = 1
    k_neg: int = 1
    q_neg: int = 1
    k_cross: int = 1
    q_cross: int = 1

    def __post_init__(self):
        for name in ("k_pos", "q_pos", "k_neg", "q_neg", "k_cross", "q_cross"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ConstraintViolationError(f"{name} must be a nonnegative integer, got {v}")

    @property
    def max_order(self) -> int:
        return max(
            self.k_pos, self.q_pos, self.k_neg, self.q_neg, self.k_cross, self.q_cross
        )


def _param_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ConstraintViolationError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GarchSystemParams:
    """Full parameter set of the component system.

    The two variance recursions carry positivity and stationarity
    constraints; the covariance recursion's coefficients are unconstrained
    in sign because covariances may be negative.  ``nu`` is None under
    Gaussian innovations and must exceed 2 under t innovations so the
    conditional covariance exists.
    """

    alpha_pos: float
    h_pos: float
    alpha_neg: float
    h_neg: float
    gamma_pos: float
    phi_pos: np.ndarray
    lambda_pos: np.ndarray
    gamma_neg: float
    phi_neg: np.ndarray
    lambda_neg: np.ndarray
    gamma_cross: float
    phi_cross: np.ndarray
    lambda_cross: np.ndarray
    nu: float | None = None

    def __post_init__(self):
        for name in ("alpha_pos", "h_pos", "alpha_neg", "h_neg", "gamma_cross"):
            if not np.isfinite(getattr(self, name)):
                raise ConstraintViolationError(f"{name} must be finite")
        for name in (
            "phi_pos",
            "lambda_pos",
            "phi_neg",
            "lambda_neg",
            "phi_cross",
            "lambda_cross",
        ):
            object.__setattr__(self, name, _param_array(getattr(self, name), name))
        if not self.gamma_pos > 0 or not self.gamma_neg > 0:
            raise ConstraintViolationError(
                f"variance constants must be positive, got {self.gamma_pos}, {self.gamma_neg}"
            )
        for name in ("phi_pos", "lambda_pos", "phi_neg", "lambda_neg"):
            if np.any(getattr(self, name) < 0):
                raise ConstraintViolationError(f"{name} entries must be nonnegative")
        if self.phi_pos.sum() + self.lambda_pos.sum() >= 1.0:
            raise ConstraintViolationError("positive-side variance recursion is not stationary")
        if self.phi_neg.sum() + self.lambda_neg.sum() >= 1.0:
            raise ConstraintViolationError("negative-side variance recursion is not stationary")
        # The covariance recursion takes coefficients of either sign, but its
        # autoregressive part must stay stable or the filter explodes; the
        # per-lag boxes below imply sum |lambda_cross| < 1.
        if np.any(np.abs(self.phi_cross) >= CROSS_PHI_BOUND):
            raise ConstraintViolationError(
                f"covariance recursion needs |phi_cross| < {CROSS_PHI_BOUND}, got {self.phi_cross}"
            )
        q_cross = len(self.lambda_cross)
        if q_cross and np.any(np.abs(self.lambda_cross) >= 1.0 / q_cross):
            raise ConstraintViolationError(
                f"covariance recursion is explosive: need |lambda_cross| < 1/{q_cross}, "
                f"got {self.lambda_cross}"
            )
        if self.nu is not None and not self.nu > 2.0:
            raise ConstraintViolationError(f"degrees of freedom must exceed 2, got {self.nu}")

    @property
    def orders(self) -> LagOrders:
        return LagOrders(
            k_pos=len(self.phi_pos),
            q_pos=len(self.lambda_pos),
            k_neg=len(self.phi_neg),
            q_neg=len(self.lambda_neg),
            k_cross=len(self.phi_cross),
            q_cross=len(self.lambda_cross),
        )


@dataclass(frozen=True)
class FilterInit:
    """Presample values closing the recursions at the start of the sample.

    ``var_*`` and ``cov_cross`` stand in for lagged conditional moments,
    ``usq_*`` and ``uprod`` for lagged squared residuals and their product,
    whenever a recursion reaches before the first observation.
    """

    var_pos: float
    var_neg: float
    cov_cross: float
    usq_pos: float
    usq_neg: float
    uprod: float

    def __post_init__(self):
        vals = (self.var_pos, self.var_neg, self.cov_cross, self.usq_pos, self.usq_neg, self.uprod)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidInputError("presample values must be finite")
        if self.var_pos <= 0 or self.var_neg <= 0 or self.usq_pos < 0 or self.usq_neg < 0:
            raise InvalidInputError("presample variances must be positive")

    @classmethod
    def from_residuals(cls, u_pos: np.ndarray, u_neg: np.ndarray) -> "FilterInit":
        """Sample-moment policy: residual variances and mean cross product."""
        var_pos = float(np.var(u_pos, ddof=1))
        var_neg = float(np.var(u_neg, ddof=1))
        uprod = float(np.mean(u_pos * u_neg))
        if var_pos <= 0 or var_neg <= 0:
            raise DegenerateHedgeError("residuals have zero variance, volatility model degenerate")
        return cls(
            var_pos=var_pos,
            var_neg=var_neg,
            cov_cross=uprod,
            usq_pos=var_pos,
            usq_neg=var_neg,
            uprod=uprod,
        )


@dataclass(frozen=True)
class FilteredVolatility:
    """Filtered conditional variances and covariance with per-period PD flags."""

    var_pos: np.ndarray
    var_neg: np.ndarray
    cov_cross: np.ndarray
    pd_flag: np.ndarray


def _filter_loop(
    u_pos,
    u_neg,
    gamma_pos,
    phi_pos,
    lambda_pos,
    gamma_neg,
    phi_neg,
    lambda_neg,
    gamma_cross,
    phi_cross,
    lambda_cross,
    pre_var_pos,
    pre_var_neg,
    pre_cov,
    pre_usq_pos,
    pre_usq_neg,
    pre_uprod,
):
    T = u_pos.shape[0]
    var_pos = np.empty(T)
    var_neg = np.empty(T)
    cov = np.empty(T)
    for t in range(T):
        vp = gamma_pos
        for i in range(phi_pos.shape[0]):
            k = t - 1 - i
            vp += phi_pos[i] * (u_pos[k] * u_pos[k] if k >= 0 else pre_usq_pos)
        for j in range(lambda_pos.shape[0]):
            k = t - 1 - j
            vp += lambda_pos[j] * (var_pos[k] if k >= 0 else pre_var_pos)
        var_pos[t] = vp

        vn = gamma_neg
        for i in range(phi_neg.shape[0]):
            k = t - 1 - i
            vn += phi_neg[i] * (u_neg[k] * u_neg[k] if k >= 0 else pre_usq_neg)
        for j in range(lambda_neg.shape[0]):
            k = t - 1 - j
            vn += lambda_neg[j] * (var_neg[k] if k >= 0 else pre_var_neg)
        var_neg[t] = vn

        cx = gamma_cross
        for i in range(phi_cross.shape[0]):
            k = t - 1 - i
            cx += phi_cross[i] * (u_pos[k] * u_neg[k] if k >= 0 else pre_uprod)
        for j in range(lambda_cross.shape[0]):
            k = t - 1 - j
            cx += lambda_cross[j] * (cov[k] if k >= 0 else pre_cov)
        cov[t] = cx
    return var_pos, var_neg, cov


try:  # pragma: no cover - exercised implicitly on platforms with numba
    from numba import njit as _njit

    _filter_kernel = _njit(cache=True)(_filter_loop)
except ImportError:  # pragma: no cover
    _filter_kernel = _filter_loop


class ParamLayout:
    """Flat-vector layout of the system parameters for a given order set.

    Order: alpha_pos, h_pos, alpha_neg, h_neg, then (gamma, phi..., lambda...)
    for the positive, negative and cross recursions, then nu when the
    innovation law is t.
    """

    def __init__(self, orders: LagOrders, dist: str = "student_t"):
        if dist not in ("gaussian", "student_t"):
            raise ConstraintViolationError(f"unknown innovation law {dist!r}")
        self.orders = orders
        self.dist = dist
        names = ["alpha_pos", "h_pos", "alpha_neg", "h_neg"]
        names.append("gamma_pos")
        names += [f"phi_pos_{i}" for i in range(1, orders.k_pos + 1)]
        names += [f"lambda_pos_{j}" for j in range(1, orders.q_pos + 1)]
        names.append("gamma_neg")
        names += [f"phi_neg_{i}" for i in range(1, orders.k_neg + 1)]
        names += [f"lambda_neg_{j}" for j in range(1, orders.q_neg + 1)]
        names.append("gamma_cross")
        names += [f"phi_cross_{i}" for i in range(1, orders.k_cross + 1)]
        names += [f"lambda_cross_{j}" for j in range(1, orders.q_cross + 1)]
        if dist == "student_t":
            names.append("nu")
        self.names: tuple[str, ...] = tuple(names)
        self.n_params = len(names)

        i = 4
        self.sl_gamma_pos = i
        self.sl_phi_pos = slice(i + 1, i + 1 + orders.k_pos)
        self.sl_lambda_pos = slice(i + 1 + orders.k_pos, i + 1 + orders.k_pos + orders.q_pos)
        i = self.sl_lambda_pos.stop
        self.sl_gamma_neg = i
        self.sl_phi_neg = slice(i + 1, i + 1 + orders.k_neg)
        self.sl_lambda_neg = slice(i + 1 + orders.k_neg, i + 1 + orders.k_neg + orders.q_neg)
        i = self.sl_lambda_neg.stop
        self.sl_gamma_cross = i
        self.sl_phi_cross = slice(i + 1, i + 1 + orders.k_cross)
        self.sl_lambda_cross = slice(
            i + 1 + orders.k_cross, i + 1 + orders.k_cross + orders.q_cross
        )
        self.sl_nu = self.sl_lambda_cross.stop if dist == "student_t" else None

    # indices of the two hedge ratios inside the vector
    IDX_ALPHA_POS = 0
    IDX_H_POS = 1
    IDX_ALPHA_NEG = 2
    IDX_H_NEG = 3

    def pack(self, params: GarchSystemParams) -> np.ndarray:
        if params.orders != self.orders:
            raise ConstraintViolationError("parameter orders do not match the layout")
        if (params.nu is None) != (self.dist == "gaussian"):
            raise ConstraintViolationError("nu presence does not match the innovation law")
        vec = np.empty(self.n_params)
        vec[0:4] = (params.alpha_pos, params.h_pos, params.alpha_neg, params.h_neg)
        vec[self.sl_gamma_pos] = params.gamma_pos
        vec[self.sl_phi_pos] = params.phi_pos
        vec[self.sl_lambda_pos] = params.lambda_pos
        vec[self.sl_gamma_neg] = params.gamma_neg
        vec[self.sl_phi_neg] = params.phi_neg
        vec[self.sl_lambda_neg] = params.lambda_neg
        vec[self.sl_gamma_cross] = params.gamma_cross
        vec[self.sl_phi_cross] = params.phi_cross
        vec[self.sl_lambda_cross] = params.lambda_cross
        if self.sl_nu is not None:
            vec[self.sl_nu] = params.nu
        return vec

    def unpack(self, vec: np.ndarray) -> GarchSystemParams:
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (self.n_params,):
            raise ConstraintViolationError(
                f"vector has shape {vec.shape}, layout expects ({self.n_params},)"
            )
        return GarchSystemParams(
            alpha_pos=float(vec[0]),
            h_pos=float(vec[1]),
            alpha_neg=float(vec[2]),
            h_neg=float(vec[3]),
            gamma_pos=float(vec[self.sl_gamma_pos]),
            phi_pos=vec[self.sl_phi_pos],
            lambda_pos=vec[self.sl_lambda_pos],
            gamma_neg=float(vec[self.sl_gamma_neg]),
            phi_neg=vec[self.sl_phi_neg],
            lambda_neg=vec[self.sl_lambda_neg],
            gamma_cross=float(vec[self.sl_gamma_cross]),
            phi_cross=vec[self.sl_phi_cross],
            lambda_cross=vec[self.sl_lambda_cross],
            nu=float(vec[self.sl_nu]) if self.sl_nu is not None else None,
        )

    def build_transform(
        self,
        mean_scales: tuple[float, float, float, float] | None = None,
        cross_gamma_scale: float | None = None,
    ) -> BlockTransform:
        """Transform to an unconstrained space matching the layout's constraints.

        ``mean_scales`` preconditions (alpha_pos, h_pos, alpha_neg, h_neg)
        and ``cross_gamma_scale`` the covariance constant, so that unit
        steps in the search space are natural steps for every coordinate;
        both default to 1.
        """
        o = self.orders
        if mean_scales is None:
            mean_blk = IdentityBlock(4)
        else:
            mean_blk = ScaledIdentityBlock(mean_scales)
        blocks = [mean_blk, LogBlock(1)]
        if o.k_pos + o.q_pos > 0:
            blocks.append(SimplexBlock(o.k_pos + o.q_pos))
        blocks.append(LogBlock(1))
        if o.k_neg + o.q_neg > 0:
            blocks.append(SimplexBlock(o.k_neg + o.q_neg))
        if cross_gamma_scale is None:
            blocks.append(IdentityBlock(1))
        else:
            blocks.append(ScaledIdentityBlock([cross_gamma_scale]))
        if o.k_cross > 0:
            blocks.append(BoundedBlock(o.k_cross, CROSS_PHI_BOUND))
        if o.q_cross > 0:
            blocks.append(BoundedBlock(o.q_cross, 1.0 / o.q_cross))
        if self.dist == "student_t":
            blocks.append(ShiftedLogBlock(1, shift=2.0))
        return BlockTransform(blocks)

    def rescale_vector(self, scale: float) -> np.ndarray:
        """Multipliers mapping estimates on data/scale back to the data's units.

        Intercepts scale linearly, variance constants quadratically; hedge
        ratios, ARCH/GARCH coefficients and nu are scale free.
        """
        d = np.ones(self.n_params)
        d[self.IDX_ALPHA_POS] = scale
        d[self.IDX_ALPHA_NEG] = scale
        d[self.sl_gamma_pos] = scale**2
        d[self.sl_gamma_neg] = scale**2
        d[self.sl_gamma_cross] = scale**2
        return d


def residuals(
    params: GarchSystemParams, components: ComponentSeries
) -> tuple[np.ndarray, np.ndarray]:
    """Mean-equation residuals (u_pos, u_neg) for the given parameters."""
    u_pos = components.ds_pos - params.alpha_pos - params.h_pos * components.df_pos
    u_neg = components.ds_neg - params.alpha_neg - params.h_neg * components.df_neg
    return u_pos, u_neg


def _run_filter(vec: np.ndarray, layout: ParamLayout, u_pos, u_neg, init: FilterInit):
    return _filter_kernel(
        np.ascontiguousarray(u_pos, dtype=float),
        np.ascontiguousarray(u_neg, dtype=float),
        float(vec[layout.sl_gamma_pos]),
        np.ascontiguousarray(vec[layout.sl_phi_pos], dtype=float),
        np.ascontiguousarray(vec[layout.sl_lambda_pos], dtype=float),
        float(vec[layout.sl_gamma_neg]),
        np.ascontiguousarray(vec[layout.sl_phi_neg], dtype=float),
        np.ascontiguousarray(vec[layout.sl_lambda_neg], dtype=float),
        float(vec[layout.sl_gamma_cross]),
        np.ascontiguousarray(vec[layout.sl_phi_cross], dtype=float),
        np.ascontiguousarray(vec[layout.sl_lambda_cross], dtype=float),
        init.var_pos,
        init.var_neg,
        init.cov_cross,
        init.usq_pos,
        init.usq_neg,
        init.uprod,
    )


def filter_volatility(
    params: GarchSystemParams,
    u_pos: np.ndarray,
    u_neg: np.ndarray,
    init: FilterInit | None = None,
) -> FilteredVolatility:
    """Run the three recursions over the residual sample.

    The recursion is evaluated at every time index; lag references earlier
    than the first observation are served by the initialization policy
    (sample moments of the residuals by default).  Parameter feasibility is
    enforced by the GarchSystemParams type itself.
    """
    u_pos = np.asarray(u_pos, dtype=float)
    u_neg = np.asarray(u_neg, dtype=float)
    if u_pos.shape != u_neg.shape or u_pos.ndim != 1:
        raise InvalidInputError("residual series must be equal-length vectors")
    if init is None:
        init = FilterInit.from_residuals(u_pos, u_neg)
    layout = ParamLayout(params.orders, "gaussian" if params.nu is None else "student_t")
    vec = layout.pack(params)
    var_pos, var_neg, cov = _run_filter(vec, layout, u_pos, u_neg, init)
    pd_flag = cov * cov < var_pos * var_neg
    return FilteredVolatility(var_pos=var_pos, var_neg=var_neg, cov_cross=cov, pd_flag=pd_flag)


def _loglik_terms(u_pos, u_neg, var_pos, var_neg, cov, dist: str, nu: float | None):
    """Per-period log densities after correlation clamping, plus the penalty.

    Returns (terms, penalty) or None when the inputs put the density outside
    its numerical domain (used as a soft infeasibility signal).
    """
    if not (
        np.all(np.isfinite(var_pos)) and np.all(np.isfinite(var_neg)) and np.all(np.isfinite(cov))
    ):
        return None
    if np.any(var_pos <= 0.0) or np.any(var_neg <= 0.0):
        return None
    sd_prod = np.sqrt(var_pos * var_neg)
    # Explosive probe points can pair a huge covariance with a tiny variance
    # product; the clamp below absorbs the resulting overflow, so silence it.
    with np.errstate(over="ignore"):
        rho = cov / np.maximum(sd_prod, 1e-300)
    excess = np.abs(rho) - CORRELATION_BOUND
    np.clip(excess, 0.0, 1e6, out=excess)
    penalty = PD_PENALTY_WEIGHT * float(np.sum(excess * excess))
    cov_used = np.clip(rho, -CORRELATION_BOUND, CORRELATION_BOUND) * sd_prod
    det = var_pos * var_neg - cov_used * cov_used
    quad = (u_pos * u_pos * var_neg - 2.0 * u_pos * u_neg * cov_used + u_neg * u_neg * var_pos) / det
    if dist == "gaussian":
        terms = -LOG_2PI - 0.5 * np.log(det) - 0.5 * quad
    else:
        if nu is None or nu <= 2.0:
            return None
        terms = (
            math.log(nu)
            - math.log(2.0 * math.pi * (nu - 2.0))
            - 0.5 * np.log(det)
            - 0.5 * (nu + 2.0) * np.log1p(quad / (nu - 2.0))
        )
    return terms, penalty


def _loglik_vector(
    vec: np.ndarray,
    layout: ParamLayout,
    components: ComponentSeries,
    dist: str,
    init: FilterInit | None,
) -> float:
    """System log likelihood at a raw parameter vector.

    Infeasible or numerically broken points return a large negative value
    instead of raising, so finite-difference probes near constraint
    boundaries stay well defined.
    """
    a_p, h_p, a_n, h_n = vec[0], vec[1], vec[2], vec[3]
    u_pos = components.ds_pos - a_p - h_p * components.df_pos
    u_neg = components.ds_neg - a_n - h_n * components.df_neg
    use_init = init
    if use_init is None:
        var_p = float(np.var(u_pos, ddof=1))
        var_n = float(np.var(u_neg, ddof=1))
        if var_p <= 0 or var_n <= 0:
            return _BIG_NEG
        uprod = float(np.mean(u_pos * u_neg))
        use_init = FilterInit(
            var_pos=var_p,
            var_neg=var_n,
            cov_cross=uprod,
            usq_pos=var_p,
            usq_neg=var_n,
            uprod=uprod,
        )
    var_pos, var_neg, cov = _run_filter(vec, layout, u_pos, u_neg, use_init)
    nu = float(vec[layout.sl_nu]) if layout.sl_nu is not None else None
    out = _loglik_terms(u_pos, u_neg, var_pos, var_neg, cov, dist, nu)
    if out is None:
        return _BIG_NEG
    terms, penalty = out
    ll = float(np.sum(terms)) - penalty
    if not np.isfinite(ll):
        return _BIG_NEG
    return ll


def log_likelihood(
    params: GarchSystemParams,
    components: ComponentSeries,
    dist: str = "student_t",
    init: FilterInit | None = None,
) -> float:
    """Joint log likelihood of the component system under the given law.

    Gaussian: sum of bivariate normal log densities with covariance H_t.
    Student t: bivariate t with nu degrees of freedom and scale matrix
    H_t (nu - 2) / nu, so H_t is the conditional covariance; for two
    dimensions the normalizing constants reduce to
    log nu - log(2 pi (nu - 2)).  Conditional correlations beyond the
    clamping bound are repaired and penalized as documented on the module.
    """
    if dist not in ("gaussian", "student_t"):
        raise ConstraintViolationError(f"unknown innovation law {dist!r}")
    if dist == "student_t" and params.nu is None:
        raise ConstraintViolationError("t innovations require nu")
    if dist == "gaussian" and params.nu is not None:
        raise ConstraintViolationError("gaussian innovations do not take nu")
    layout = ParamLayout(params.orders, dist)
    return _loglik_vector(layout.pack(params), layout, components, dist, init)


@dataclass(frozen=True)
class EstimationResult:
    """Joint MLE output in the data's original units."""

    params: GarchSystemParams
    param_vector: np.ndarray
    param_names: tuple[str, ...]
    se: np.ndarray | None
    covariance: np.ndarray | None
    loglik: float
    converged: bool
    iterations: int
    gradient_norm: float
    orders: LagOrders
    dist: str
    n_obs: int
    n_params: int
    pd_violations: int
    scale: float

    @property
    def h_pos(self) -> float:
        return float(self.param_vector[ParamLayout.IDX_H_POS])

    @property
    def h_neg(self) -> float:
        return float(self.param_vector[ParamLayout.IDX_H_NEG])

    def ratio_covariance(self) -> np.ndarray:
        """2x2 covariance of (h_pos, h_neg) for the symmetry test."""
        if self.covariance is None:
            raise ConstraintViolationError("no parameter covariance available")
        idx = [ParamLayout.IDX_H_POS, ParamLayout.IDX_H_NEG]
        return self.covariance[np.ix_(idx, idx)]


def _starting_vector(components: ComponentSeries, layout: ParamLayout) -> np.ndarray:
    """Equation-by-equation OLS starts plus standard volatility mass splits.

    Variance constants start at the residual moment scaled by the mass not
    assigned to ARCH terms (0.1 total when present) and GARCH terms (0.8
    total when present); the same split applies to the cross recursion
    around the residual cross moment.
    """
    o = layout.orders
    try:
        est_pos = ols_regression(components.ds_pos, components.df_pos)
    except RankDeficiencyError as exc:
        raise RankDeficiencyError(f"positive futures component: {exc}") from exc
    try:
        est_neg = ols_regression(components.ds_neg, components.df_neg)
    except RankDeficiencyError as exc:
        raise RankDeficiencyError(f"negative futures component: {exc}") from exc
    u_pos = components.ds_pos - est_pos.alpha - est_pos.h * components.df_pos
    u_neg = components.ds_neg - est_neg.alpha - est_neg.h * components.df_neg
    var_pos = float(np.var(u_pos, ddof=1))
    var_neg = float(np.var(u_neg, ddof=1))
    if var_pos <= 0 or var_neg <= 0:
        raise DegenerateHedgeError("a component equation fits exactly, no volatility to model")
    uprod = float(np.mean(u_pos * u_neg))

    def mass(k: int, q: int) -> float:
        return 1.0 - (0.1 if k > 0 else 0.0) - (0.8 if q > 0 else 0.0)

    vec = np.empty(layout.n_params)
    vec[0:4] = (est_pos.alpha, est_pos.h, est_neg.alpha, est_neg.h)
    vec[layout.sl_gamma_pos] = var_pos * mass(o.k_pos, o.q_pos)
    vec[layout.sl_phi_pos] = 0.1 / o.k_pos if o.k_pos else 0.0
    vec[layout.sl_lambda_pos] = 0.8 / o.q_pos if o.q_pos else 0.0
    vec[layout.sl_gamma_neg] = var_neg * mass(o.k_neg, o.q_neg)
    vec[layout.sl_phi_neg] = 0.1 / o.k_neg if o.k_neg else 0.0
    vec[layout.sl_lambda_neg] = 0.8 / o.q_neg if o.q_neg else 0.0
    vec[layout.sl_gamma_cross] = uprod * mass(o.k_cross, o.q_cross)
    vec[layout.sl_phi_cross] = 0.1 / o.k_cross if o.k_cross else 0.0
    vec[layout.sl_lambda_cross] = 0.8 / o.q_cross if o.q_cross else 0.0
    if layout.sl_nu is not None:
        vec[layout.sl_nu] = 8.0
    return vec


def _rescaled(components: ComponentSeries, scale: float) -> ComponentSeries:
    return ComponentSeries(
        ds_pos=components.ds_pos / scale,
        ds_neg=components.ds_neg / scale,
        df_pos=components.df_pos / scale,
        df_neg=components.df_neg / scale,
    )


def fit_system(
    components: ComponentSeries,
    orders: LagOrders | None = None,
    dist: str = "student_t",
    config: OptimizerConfig | None = None,
    start: GarchSystemParams | None = None,
) -> EstimationResult:
    """Joint MLE of all system parameters.

    The data is internally standardized by its largest component standard
    deviation before optimization (intercepts and variance constants are
    mapped back afterwards, along with the likelihood and the covariance),
    which keeps the search well scaled for price series quoted in large
    currency units.
    """
    if dist not in ("gaussian", "student_t"):
        raise ConstraintViolationError(f"unknown innovation law {dist!r}")
    orders = orders or LagOrders()
    config = config or OptimizerConfig()
    T = len(components)
    if T < 30:
        raise InsufficientDataError(f"need at least 30 observations to fit the system, got {T}")

    ds = components.ds
    df = components.df
    scale = max(float(np.std(ds, ddof=1)), float(np.std(df, ddof=1)))
    if scale < 1e-12:
        raise DegenerateHedgeError("both change series are constant")
    scaled = _rescaled(components, scale)

    layout = ParamLayout(orders, dist)
    if start is not None:
        start_vec = layout.pack(start) / layout.rescale_vector(scale)
    else:
        start_vec = _starting_vector(scaled, layout)

    # Precondition the unconstrained coordinates so a unit line-search step
    # is a natural move for every parameter: mean coefficients scale with
    # the starting residual spread (per unit of regressor for the slopes)
    # and the covariance constant with the residual cross moment.
    u_pos0, u_neg0 = residuals(layout.unpack(start_vec), scaled)
    s_up = max(float(np.std(u_pos0, ddof=1)), 1e-8)
    s_un = max(float(np.std(u_neg0, ddof=1)), 1e-8)
    sx_p = max(float(np.std(scaled.df_pos, ddof=1)), 1e-8)
    sx_n = max(float(np.std(scaled.df_neg, ddof=1)), 1e-8)
    transform = layout.build_transform(
        mean_scales=(s_up, s_up / sx_p, s_un, s_un / sx_n),
        cross_gamma_scale=s_up * s_un,
    )

    def objective(vec: np.ndarray) -> float:
        return _loglik_vector(vec, layout, scaled, dist, None)

    opt = maximize(objective, start_vec, transform, config)

    covariance_scaled = None
    try:
        covariance_scaled = parameter_covariance(opt)
    except Exception:
        if opt.converged:
            raise

    d = layout.rescale_vector(scale)
    vec_orig = opt.params * d
    params = layout.unpack(vec_orig)
    loglik = opt.loglik - 2.0 * T * math.log(scale)
    if covariance_scaled is not None:
        covariance = covariance_scaled * np.outer(d, d)
        se = np.sqrt(np.diag(covariance))
    else:
        covariance = None
        se = None

    u_pos, u_neg = residuals(params, components)
    filtered = filter_volatility(params, u_pos, u_neg)
    pd_violations = int(np.sum(~filtered.pd_flag))

    return EstimationResult(
        params=params,
        param_vector=vec_orig,
        param_names=layout.names,
        se=se,
        covariance=covariance,
        loglik=float(loglik),
        converged=opt.converged,
        iterations=opt.iterations,
        gradient_norm=opt.gradient_norm,
        orders=orders,
        dist=dist,
        n_obs=T,
        n_params=layout.n_params,
        pd_violations=pd_violations,
        scale=scale,
    )
