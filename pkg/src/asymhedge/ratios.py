"""Closed-form and regression hedge ratios, portfolio variance, strategies.

The symmetric minimum-variance hedge ratio is h* = rho * sigma_s / sigma_f;
it equals the slope of the least-squares regression of spot changes on
futures changes.  The asymmetric variant applies the same formula to the
positive and negative components separately, giving one ratio per market
direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    DegenerateHedgeError,
    InvalidInputError,
    NoHedgeNeeded,
    RankDeficiencyError,
)
from .series import ComponentSeries, MomentSummary, sample_moments

__all__ = [
    "HedgedPortfolio",
    "OhrEstimate",
    "HedgeStrategy",
    "symmetric_ohr_moment",
    "ols_regression",
    "asymmetric_ohr_moment",
    "portfolio_variance",
    "strategy_for",
]

RatioKind = Literal["symmetric", "positive-component", "negative-component"]
RatioMethod = Literal["moment", "ols", "sure", "mgarch"]
Position = Literal["long", "short"]


@dataclass(frozen=True)
class HedgedPortfolio:
    """A spot holding of q_s units hedged with q_f futures units (h = q_f / q_s)."""

    q_s: float
    q_f: float

    def __post_init__(self):
        if not self.q_s > 0:
            raise InvalidInputError(f"spot quantity must be positive, got {self.q_s}")

    @property
    def h(self) -> float:
        return self.q_f / self.q_s


@dataclass(frozen=True)
class OhrEstimate:
    """A hedge-ratio estimate with its provenance.

    ``se_h`` is None when the estimator does not supply a standard error
    (the pure moment formula); the OLS standard error uses the classical
    homoskedastic formula and is descriptive only.
    """

    h: float
    alpha: float | None
    se_h: float | None
    kind: RatioKind
    method: RatioMethod

    def __post_init__(self):
        if self.se_h is not None and self.se_h < 0:
            raise InvalidInputError(f"standard error must be nonnegative, got {self.se_h}")


@dataclass(frozen=True)
class HedgeStrategy:
    """The futures position offsetting a given asset position."""

    asset_position: Position
    futures_position: Position


def symmetric_ohr_moment(moments: MomentSummary) -> OhrEstimate:
    """Minimum-variance hedge ratio h = rho * sigma_s / sigma_f from moments.

    Raises a degenerate-hedge error when the futures series never moves
    (sigma_f = 0), since no futures position can then offset spot risk.
    """
    if moments.sigma_f == 0.0:
        raise DegenerateHedgeError("futures changes have zero variance, hedge ratio undefined")
    h = moments.rho * moments.sigma_s / moments.sigma_f
    return OhrEstimate(h=float(h), alpha=None, se_h=None, kind="symmetric", method="moment")


def ols_regression(y, x) -> OhrEstimate:
    """Least-squares fit of y = alpha + h * x + u.

    The slope equals the moment formula rho * sd(y) / sd(x) on the same
    data.  The reported standard error is the classical homoskedastic one.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.ndim != 1 or x.ndim != 1 or len(y) != len(x):
        raise InvalidInputError("regression inputs must be equal-length vectors")
    n = len(y)
    if n < 3:
        raise InvalidInputError(f"need at least 3 observations for regression, got {n}")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
        raise InvalidInputError("regression inputs contain non-finite entries")
    x_mean = x.mean()
    sxx = float(np.sum((x - x_mean) ** 2))
    if sxx == 0.0:
        raise RankDeficiencyError("regressor is constant, slope is not identified")
    y_mean = y.mean()
    sxy = float(np.sum((x - x_mean) * (y - y_mean)))
    h = sxy / sxx
    alpha = y_mean - h * x_mean
    resid = y - alpha - h * x
    sigma2 = float(resid @ resid) / (n - 2)
    se_h = float(np.sqrt(sigma2 / sxx))
    return OhrEstimate(h=float(h), alpha=float(alpha), se_h=se_h, kind="symmetric", method="ols")


def asymmetric_ohr_moment(components: ComponentSeries) -> tuple[OhrEstimate, OhrEstimate]:
    """Position-dependent ratios (h_pos, h_neg) from the component moments.

    h_pos is computed on the positive components (ds_pos against df_pos),
    h_neg on the negative ones; both use the full-length series with the
    zeros included, because the decomposition is defined per period.
    """
    pos = sample_moments(components.ds_pos, components.df_pos)
    neg = sample_moments(components.ds_neg, components.df_neg)
    if pos.sigma_f == 0.0:
        raise DegenerateHedgeError("positive futures component has zero variance")
    if neg.sigma_f == 0.0:
        raise DegenerateHedgeError("negative futures component has zero variance")
    h_pos = OhrEstimate(
        h=pos.rho * pos.sigma_s / pos.sigma_f,
        alpha=None,
        se_h=None,
        kind="positive-component",
        method="moment",
    )
    h_neg = OhrEstimate(
        h=neg.rho * neg.sigma_s / neg.sigma_f,
        alpha=None,
        se_h=None,
        kind="negative-component",
        method="moment",
    )
    return h_pos, h_neg


def portfolio_variance(q_s: float, h: float, moments: MomentSummary) -> float:
    """Variance of the hedged portfolio's one-period change.

    Returns q_s^2 * (sigma_s^2 + h^2 sigma_f^2 - 2 h rho sigma_s sigma_f),
    a strictly convex function of h whenever sigma_f > 0, minimized at the
    symmetric ratio rho * sigma_s / sigma_f.
    """
    if not q_s > 0:
        raise InvalidInputError(f"spot quantity must be positive, got {q_s}")
    s, f, rho = moments.sigma_s, moments.sigma_f, moments.rho
    return float(q_s**2 * (s**2 + h**2 * f**2 - 2.0 * h * rho * s * f))


def strategy_for(h: float, asset_position: Position) -> HedgeStrategy:
    """Futures position implied by the sign of h and the asset position.

    An investor long the asset with h > 0 shorts futures; short the asset
    with h > 0 goes long futures; a negative ratio flips the futures side.
    A ratio of exactly zero raises the no-hedge-needed signal.
    """
    if asset_position not in ("long", "short"):
        raise InvalidInputError(f"asset position must be 'long' or 'short', got {asset_position!r}")
    if not np.isfinite(h):
        raise InvalidInputError(f"hedge ratio must be finite, got {h}")
    if h == 0.0:
        raise NoHedgeNeeded("hedge ratio is zero, futures add no variance reduction")
    if h > 0:
        futures = "short" if asset_position == "long" else "long"
    else:
        futures = "long" if asset_position == "long" else "short"
    return HedgeStrategy(asset_position=asset_position, futures_position=futures)
