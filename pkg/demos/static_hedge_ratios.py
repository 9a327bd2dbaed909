"""Closed-form hedge ratios on a small synthetic sample.

Walks the static layer end to end: price changes, the moment and
regression routes to the symmetric ratio, the variance curve that ratio
minimizes, the sign split, and the position table the component ratios
imply.

Run:  python3 demos/static_hedge_ratios.py
"""

import numpy as np

from asymhedge import (
    PriceSeries,
    asymmetric_ohr_moment,
    first_difference,
    ols_regression,
    portfolio_variance,
    sample_moments,
    split_components,
    strategy_for,
    symmetric_ohr_moment,
)


def build_prices(T=500, seed=11):
    """Correlated spot and futures random walks around a common trend."""
    rng = np.random.default_rng(seed)
    common = rng.normal(0.0, 1.0, T)
    ds = 0.8 * common + rng.normal(0.0, 0.5, T)
    df = common + rng.normal(0.0, 0.4, T)
    timestamps = (np.datetime64("2021-01-04") + np.arange(T + 1)).astype("datetime64[ns]")
    spot = 120.0 + np.concatenate([[0.0], np.cumsum(ds)])
    futures = 125.0 + np.concatenate([[0.0], np.cumsum(df)])
    return PriceSeries(timestamps=timestamps, spot=spot, futures=futures)


def main():
    prices = build_prices()
    returns = first_difference(prices)
    moments = sample_moments(returns.ds, returns.df)
    print(f"sample: T={len(returns.ds)}  sigma_s={moments.sigma_s:.4f}  "
          f"sigma_f={moments.sigma_f:.4f}  rho={moments.rho:.4f}")

    by_moment = symmetric_ohr_moment(moments)
    by_ols = ols_regression(returns.ds, returns.df)
    print(f"\nsymmetric ratio, moment route:     h = {by_moment.h:.6f}")
    print(f"symmetric ratio, regression route: h = {by_ols.h:.6f} "
          f"(se {by_ols.se_h:.6f})")
    print(f"routes agree to {abs(by_moment.h - by_ols.h):.2e}")

    print("\nhedged-portfolio variance around the optimum:")
    for shift in (-0.2, -0.1, 0.0, 0.1, 0.2):
        h = by_moment.h + shift
        var = portfolio_variance(1.0, h, moments)
        marker = "  <- minimum" if shift == 0.0 else ""
        print(f"  h = {h:7.4f}  variance = {var:.6f}{marker}")

    components = split_components(returns)
    est_pos, est_neg = asymmetric_ohr_moment(components)
    print(f"\ncomponent ratios: h_pos = {est_pos.h:.6f}  h_neg = {est_neg.h:.6f}")
    print(f"negative/positive = {est_neg.h / est_pos.h:.4f}")

    print("\npositions implied by each ratio (one unit of the asset):")
    long_side = strategy_for(est_neg.h, "long")
    short_side = strategy_for(est_pos.h, "short")
    print(f"  long the asset:  {long_side.futures_position} {abs(est_neg.h):.4f} "
          "futures per unit (downside ratio h_neg)")
    print(f"  short the asset: {short_side.futures_position} {abs(est_pos.h):.4f} "
          "futures per unit (upside ratio h_pos)")


if __name__ == "__main__":
    main()
