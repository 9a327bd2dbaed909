"""Closed-form and regression hedge ratios, variance, strategy mapping."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymhedge.errors import DegenerateHedgeError, NoHedgeNeeded, RankDeficiencyError
from asymhedge.ratios import (
    asymmetric_ohr_moment,
    ols_regression,
    portfolio_variance,
    strategy_for,
    symmetric_ohr_moment,
)
from asymhedge.series import MomentSummary, ReturnSeries, sample_moments, split_components

from conftest import make_components


def moments(sigma_s=1.0, sigma_f=1.0, rho=0.5, mean_s=0.0, mean_f=0.0, degenerate=False):
    return MomentSummary(sigma_s=sigma_s, sigma_f=sigma_f, rho=rho,
                         mean_s=mean_s, mean_f=mean_f, degenerate=degenerate)


class TestSymmetricOhrMoment:
    def test_uncorrelated(self):
        assert symmetric_ohr_moment(moments(rho=0.0)).h == 0.0

    def test_proportional_series(self):
        x = np.array([1.0, -2.0, 3.0, 0.5])
        m = sample_moments(2.0 * x, x)
        est = symmetric_ohr_moment(m)
        assert est.h == pytest.approx(2.0, rel=1e-12)
        assert est.kind == "symmetric"
        assert est.method == "moment"
        assert est.se_h is None

    def test_matches_normal_equations_oracle(self, rng):
        x = rng.normal(0, 1.5, 200)
        y = 0.7 * x + rng.normal(0, 0.5, 200)
        xc = x - x.mean()
        oracle = float((xc * (y - y.mean())).sum() / (xc ** 2).sum())
        est = symmetric_ohr_moment(sample_moments(y, x))
        assert est.h == pytest.approx(oracle, rel=1e-12)

    def test_zero_futures_volatility(self):
        with pytest.raises(DegenerateHedgeError):
            symmetric_ohr_moment(moments(sigma_f=0.0))

    def test_degenerate_flag_gives_zero_ratio(self):
        est = symmetric_ohr_moment(moments(rho=0.0, degenerate=True))
        assert est.h == 0.0


class TestOlsRegression:
    def test_flat_response(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        y = np.full(4, 3.0)
        est = ols_regression(y, x)
        assert est.alpha == pytest.approx(3.0)
        assert est.h == pytest.approx(0.0, abs=1e-14)

    def test_exact_proportionality(self):
        x = np.array([1.0, -1.0, 2.0, 0.5, -0.25])
        est = ols_regression(2.0 * x, x)
        assert est.h == pytest.approx(2.0, rel=1e-12)
        assert est.alpha == pytest.approx(0.0, abs=1e-12)

    def test_four_point_hand_oracle(self):
        x = np.array([1.0, -1.0, 2.0, -2.0])
        y = np.array([1.2, -0.8, 2.1, -2.3])
        n = len(x)
        sx, sy = x.sum(), y.sum()
        sxx, sxy = (x * x).sum(), (x * y).sum()
        slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
        intercept = (sy - slope * sx) / n
        est = ols_regression(y, x)
        assert est.h == pytest.approx(slope, rel=1e-12)
        assert est.alpha == pytest.approx(intercept, rel=1e-12)
        assert est.se_h is not None and est.se_h >= 0

    def test_constant_regressor(self):
        with pytest.raises(RankDeficiencyError):
            ols_regression(np.array([1.0, 2.0, 3.0]), np.ones(3))

    @given(seed=st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=50, deadline=None)
    def test_slope_equals_moment_formula(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(10, 200))
        x = rng.normal(rng.normal(), np.exp(rng.normal()), n)
        y = rng.normal() * x + rng.normal(0, 1, n)
        est_ols = ols_regression(y, x)
        est_mom = symmetric_ohr_moment(sample_moments(y, x))
        assert est_ols.h == pytest.approx(est_mom.h, rel=1e-10)


class TestAsymmetricOhrMoment:
    def test_shared_proportionality(self):
        comps = make_components(T=200, seed=2, h_pos=0.9, h_neg=0.9, noise=0.0)
        pos, neg = asymmetric_ohr_moment(comps)
        assert pos.h == pytest.approx(0.9, rel=1e-10)
        assert neg.h == pytest.approx(0.9, rel=1e-10)

    def test_constructed_asymmetry(self):
        comps = make_components(T=200, seed=5, h_pos=0.4, h_neg=0.7, noise=0.0)
        pos, neg = asymmetric_ohr_moment(comps)
        assert pos.h == pytest.approx(0.4, rel=1e-10)
        assert neg.h == pytest.approx(0.7, rel=1e-10)
        assert pos.kind == "positive-component"
        assert neg.kind == "negative-component"

    def test_matches_componentwise_oracle(self, rng):
        comps = make_components(T=300, seed=7, h_pos=0.3, h_neg=0.8, noise=0.4)

        def slope(y, x):
            xc = x - x.mean()
            return float((xc * (y - y.mean())).sum() / (xc ** 2).sum())

        pos, neg = asymmetric_ohr_moment(comps)
        assert pos.h == pytest.approx(slope(comps.ds_pos, comps.df_pos), rel=1e-10)
        assert neg.h == pytest.approx(slope(comps.ds_neg, comps.df_neg), rel=1e-10)

    def test_zero_variance_side_named(self):
        comps = split_components(
            ReturnSeries(ds=np.array([1.0, 2.0, 1.5]), df=np.array([1.0, 2.0, 0.5]))
        )
        with pytest.raises(DegenerateHedgeError, match="negative"):
            asymmetric_ohr_moment(comps)


class TestPortfolioVariance:
    def test_arithmetic_example(self):
        v = portfolio_variance(1.0, 0.5, moments(sigma_s=1, sigma_f=1, rho=0.5))
        assert v == pytest.approx(0.75, rel=1e-12)

    def test_unhedged(self):
        assert portfolio_variance(1.0, 0.0, moments(sigma_s=1, sigma_f=1, rho=0.5)) == pytest.approx(1.0)

    @given(
        sigma_s=st.floats(min_value=0.1, max_value=10),
        sigma_f=st.floats(min_value=0.1, max_value=10),
        rho=st.floats(min_value=-0.99, max_value=0.99),
    )
    @settings(max_examples=100, deadline=None)
    def test_moment_ratio_minimizes(self, sigma_s, sigma_f, rho):
        m = moments(sigma_s=sigma_s, sigma_f=sigma_f, rho=rho)
        h_star = symmetric_ohr_moment(m).h
        v_star = portfolio_variance(1.0, h_star, m)
        for eps in (0.01, 0.1, 1.0):
            assert v_star <= portfolio_variance(1.0, h_star + eps, m) + 1e-12
            assert v_star <= portfolio_variance(1.0, h_star - eps, m) + 1e-12

    def test_grid_minimum_at_analytic_ratio(self, rng):
        m = moments(sigma_s=2.0, sigma_f=1.5, rho=-0.4)
        h_star = symmetric_ohr_moment(m).h
        grid = h_star + np.linspace(-1.0, 1.0, 101)
        values = [portfolio_variance(1.0, h, m) for h in grid]
        assert int(np.argmin(values)) == int(np.argmin(np.abs(grid - h_star)))


class TestStrategyFor:
    @pytest.mark.parametrize(
        "h,asset,futures",
        [
            (0.7, "long", "short"),
            (0.4, "short", "long"),
            (-0.2, "long", "long"),
            (-0.2, "short", "short"),
        ],
    )
    def test_table_mapping(self, h, asset, futures):
        s = strategy_for(h, asset)
        assert s.asset_position == asset
        assert s.futures_position == futures

    def test_zero_ratio_signals_no_hedge(self):
        with pytest.raises(NoHedgeNeeded):
            strategy_for(0.0, "long")

    @given(h=st.floats(min_value=-5, max_value=5).filter(lambda v: abs(v) > 1e-9))
    @settings(max_examples=50, deadline=None)
    def test_antisymmetric_in_position(self, h):
        a = strategy_for(h, "long").futures_position
        b = strategy_for(h, "short").futures_position
        assert {a, b} == {"long", "short"}


class TestScaleInvariance:
    def test_common_scaling_leaves_h(self, rng):
        x = rng.normal(0, 1, 100)
        y = 0.6 * x + rng.normal(0, 0.3, 100)
        base = symmetric_ohr_moment(sample_moments(y, x)).h
        scaled = symmetric_ohr_moment(sample_moments(5.0 * y, 5.0 * x)).h
        assert scaled == pytest.approx(base, rel=1e-12)

    def test_futures_scaling_divides_h(self, rng):
        x = rng.normal(0, 1, 100)
        y = 0.6 * x + rng.normal(0, 0.3, 100)
        base = symmetric_ohr_moment(sample_moments(y, x)).h
        scaled = symmetric_ohr_moment(sample_moments(y, 4.0 * x)).h
        assert scaled == pytest.approx(base / 4.0, rel=1e-12)
