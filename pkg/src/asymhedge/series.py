"""Time-series data model: validation, differencing, sign splits, moments.

All types are frozen dataclasses wrapping read-only numpy arrays, so they
are safe to share across threads; every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateHedgeError, InvalidInputError

__all__ = [
    "PriceSeries",
    "ReturnSeries",
    "ComponentSeries",
    "MomentSummary",
    "first_difference",
    "log_difference",
    "split_components",
    "sample_moments",
]


def _as_readonly_float(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PriceSeries:
    """Aligned spot and futures price levels on a strictly increasing calendar.

    Parameters
    ----------
    timestamps : array_like of numpy.datetime64
        Observation dates, strictly increasing, no duplicates.
    spot, futures : array_like of float
        Price levels per date, strictly positive and finite.
    """

    timestamps: np.ndarray
    spot: np.ndarray
    futures: np.ndarray

    def __post_init__(self):
        ts = np.array(self.timestamps, dtype="datetime64[ns]", copy=True)
        if ts.ndim != 1:
            raise InvalidInputError("timestamps must be one-dimensional")
        spot = _as_readonly_float(self.spot, "spot")
        futures = _as_readonly_float(self.futures, "futures")
        n = len(ts)
        if not (n == len(spot) == len(futures)):
            raise InvalidInputError(
                f"length mismatch: {n} timestamps, {len(spot)} spot, {len(futures)} futures"
            )
        if n < 3:
            raise InvalidInputError(f"need at least 3 observations, got {n}")
        diffs = np.diff(ts)
        if np.any(diffs <= np.timedelta64(0, "ns")):
            bad = ts[1:][diffs <= np.timedelta64(0, "ns")][0]
            raise InvalidInputError(f"timestamps not strictly increasing at {bad}")
        if np.any(spot <= 0) or np.any(futures <= 0):
            raise InvalidInputError("spot and futures prices must be strictly positive")
        ts.flags.writeable = False
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "spot", spot)
        object.__setattr__(self, "futures", futures)

    def __len__(self) -> int:
        return len(self.spot)


@dataclass(frozen=True)
class ReturnSeries:
    """Per-period spot and futures changes (same length, all finite)."""

    ds: np.ndarray
    df: np.ndarray

    def __post_init__(self):
        ds = _as_readonly_float(self.ds, "ds")
        df = _as_readonly_float(self.df, "df")
        if len(ds) != len(df):
            raise InvalidInputError(f"length mismatch: {len(ds)} ds vs {len(df)} df")
        object.__setattr__(self, "ds", ds)
        object.__setattr__(self, "df", df)

    def __len__(self) -> int:
        return len(self.ds)


@dataclass(frozen=True)
class ComponentSeries:
    """Sign-decomposed change series.

    ``ds_pos`` and ``df_pos`` are nonnegative, ``ds_neg`` and ``df_neg``
    nonpositive, all of equal length.  Series produced by
    :func:`split_components` additionally have at most one nonzero member
    per pair at each time index; simulated component systems may have both
    sides active simultaneously, so that property is not enforced here.
    """

    ds_pos: np.ndarray
    ds_neg: np.ndarray
    df_pos: np.ndarray
    df_neg: np.ndarray

    def __post_init__(self):
        ds_pos = _as_readonly_float(self.ds_pos, "ds_pos")
        ds_neg = _as_readonly_float(self.ds_neg, "ds_neg")
        df_pos = _as_readonly_float(self.df_pos, "df_pos")
        df_neg = _as_readonly_float(self.df_neg, "df_neg")
        n = len(ds_pos)
        if not (n == len(ds_neg) == len(df_pos) == len(df_neg)):
            raise InvalidInputError("component series must all have the same length")
        if np.any(ds_pos < 0) or np.any(df_pos < 0):
            raise InvalidInputError("positive components must be nonnegative")
        if np.any(ds_neg > 0) or np.any(df_neg > 0):
            raise InvalidInputError("negative components must be nonpositive")
        object.__setattr__(self, "ds_pos", ds_pos)
        object.__setattr__(self, "ds_neg", ds_neg)
        object.__setattr__(self, "df_pos", df_pos)
        object.__setattr__(self, "df_neg", df_neg)

    def __len__(self) -> int:
        return len(self.ds_pos)

    @property
    def ds(self) -> np.ndarray:
        """Recombined spot changes ds_pos + ds_neg."""
        return self.ds_pos + self.ds_neg

    @property
    def df(self) -> np.ndarray:
        """Recombined futures changes df_pos + df_neg."""
        return self.df_pos + self.df_neg


@dataclass(frozen=True)
class MomentSummary:
    """Sample moments of a paired (spot-change, futures-change) sample.

    ``rho`` is the Pearson correlation; when either series is constant it
    is reported as 0.0 with ``degenerate`` set, so downstream closed-form
    ratios return 0 instead of propagating NaN.
    """

    sigma_s: float
    sigma_f: float
    rho: float
    mean_s: float
    mean_f: float
    degenerate: bool = field(default=False)

    def __post_init__(self):
        if self.sigma_s < 0 or self.sigma_f < 0:
            raise InvalidInputError("standard deviations must be nonnegative")
        if not -1.0 <= self.rho <= 1.0:
            raise InvalidInputError(f"correlation {self.rho} outside [-1, 1]")


def first_difference(prices: PriceSeries) -> ReturnSeries:
    """Per-period changes ds[t] = spot[t+1] - spot[t], same for futures.

    The result has length ``len(prices) - 1``.
    """
    return ReturnSeries(ds=np.diff(prices.spot), df=np.diff(prices.futures))


def log_difference(prices: PriceSeries) -> ReturnSeries:
    """Per-period log changes log(spot[t+1]) - log(spot[t]), same for futures.

    Well defined because price levels are strictly positive.  The result
    has length ``len(prices) - 1``.
    """
    return ReturnSeries(ds=np.diff(np.log(prices.spot)), df=np.diff(np.log(prices.futures)))


def split_components(returns: ReturnSeries) -> ComponentSeries:
    """Decompose changes into positive parts max(x, 0) and negative parts min(x, 0).

    The two parts re-sum to the input exactly, and at each index at most one
    of the pair is nonzero.
    """
    return ComponentSeries(
        ds_pos=np.maximum(returns.ds, 0.0),
        ds_neg=np.minimum(returns.ds, 0.0),
        df_pos=np.maximum(returns.df, 0.0),
        df_neg=np.minimum(returns.df, 0.0),
    )


def sample_moments(x, y) -> MomentSummary:
    """Sample standard deviations, means and Pearson correlation of two series.

    Variances use the T-1 denominator.  The denominator choice cancels in
    hedge-ratio formulas, which are ratios of these moments.  A constant
    series yields ``rho = 0`` with the ``degenerate`` flag set.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise InvalidInputError("moment inputs must be one-dimensional")
    if len(x) != len(y):
        raise InvalidInputError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise InvalidInputError("need at least 2 observations for sample moments")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidInputError("moment inputs contain non-finite entries")
    mean_x = float(np.mean(x))
    mean_y = float(np.mean(y))
    sd_x = float(np.std(x, ddof=1))
    sd_y = float(np.std(y, ddof=1))
    if sd_x == 0.0 or sd_y == 0.0:
        return MomentSummary(
            sigma_s=sd_x, sigma_f=sd_y, rho=0.0, mean_s=mean_x, mean_f=mean_y, degenerate=True
        )
    cov = float(np.sum((x - mean_x) * (y - mean_y)) / (len(x) - 1))
    rho = cov / (sd_x * sd_y)
    rho = float(min(1.0, max(-1.0, rho)))
    return MomentSummary(sigma_s=sd_x, sigma_f=sd_y, rho=rho, mean_s=mean_x, mean_f=mean_y)
