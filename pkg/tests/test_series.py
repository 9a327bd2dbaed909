"""Data model: differencing, sign decomposition, sample moments."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from asymhedge.errors import InvalidInputError
from asymhedge.series import (
    ComponentSeries,
    PriceSeries,
    ReturnSeries,
    first_difference,
    log_difference,
    sample_moments,
    split_components,
)

from conftest import make_prices


def series(spot, futures, start="2020-01-01"):
    n = len(spot)
    ts = (np.datetime64(start) + np.arange(n)).astype("datetime64[ns]")
    return PriceSeries(timestamps=ts, spot=np.asarray(spot, dtype=float),
                       futures=np.asarray(futures, dtype=float))


finite_changes = arrays(
    np.float64,
    st.integers(min_value=2, max_value=60),
    elements=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
)


class TestPriceSeries:
    def test_valid_construction(self, prices):
        assert len(prices) == 40

    def test_duplicate_timestamps_rejected(self):
        ts = np.array(["2020-01-01", "2020-01-02", "2020-01-02"], dtype="datetime64[ns]")
        with pytest.raises(InvalidInputError):
            PriceSeries(timestamps=ts, spot=np.ones(3), futures=np.ones(3))

    def test_decreasing_timestamps_rejected(self):
        ts = np.array(["2020-01-03", "2020-01-02", "2020-01-04"], dtype="datetime64[ns]")
        with pytest.raises(InvalidInputError):
            PriceSeries(timestamps=ts, spot=np.ones(3), futures=np.ones(3))

    def test_nonpositive_prices_rejected(self):
        with pytest.raises(InvalidInputError):
            series([1.0, 0.0, 2.0], [1.0, 1.0, 1.0])

    def test_too_short_rejected(self):
        with pytest.raises(InvalidInputError):
            series([1.0, 2.0], [1.0, 2.0])

    def test_length_mismatch_rejected(self):
        ts = np.array(["2020-01-01", "2020-01-02", "2020-01-03"], dtype="datetime64[ns]")
        with pytest.raises(InvalidInputError):
            PriceSeries(timestamps=ts, spot=np.ones(3), futures=np.ones(4))


class TestFirstDifference:
    def test_constant_series(self):
        r = first_difference(series([5, 5, 5], [2, 2, 2]))
        assert np.array_equal(r.ds, [0, 0])
        assert np.array_equal(r.df, [0, 0])

    def test_direct_subtraction(self):
        r = first_difference(series([1, 2, 4], [10, 12, 11]))
        assert np.array_equal(r.ds, [1, 2])
        assert np.array_equal(r.df, [2, -1])

    def test_telescoping_identity(self):
        p = make_prices(n=60, seed=3)
        r = first_difference(p)
        assert np.isclose(r.ds.sum(), p.spot[-1] - p.spot[0])
        assert np.isclose(r.df.sum(), p.futures[-1] - p.futures[0])

    def test_length(self, prices):
        assert len(first_difference(prices)) == len(prices) - 1

    def test_increasing_series_gives_positive_changes(self):
        p = series(np.arange(1.0, 11.0), np.arange(2.0, 12.0))
        r = first_difference(p)
        assert np.all(r.ds > 0) and np.all(r.df > 0)


class TestLogDifference:
    def test_matches_log_ratio(self):
        p = series([1.0, 2.0, 4.0], [10.0, 12.0, 11.0])
        r = log_difference(p)
        assert np.allclose(r.ds, np.diff(np.log(p.spot)))
        assert np.allclose(r.df, np.diff(np.log(p.futures)))


class TestSplitComponents:
    def test_max_min_definition(self):
        r = ReturnSeries(ds=np.array([-1.0, 2.0, 0.0, -3.0]),
                         df=np.array([1.0, -2.0, 0.0, 3.0]))
        c = split_components(r)
        assert np.array_equal(c.ds_pos, [0, 2, 0, 0])
        assert np.array_equal(c.ds_neg, [-1, 0, 0, -3])
        assert np.array_equal(c.df_pos, [1, 0, 0, 3])
        assert np.array_equal(c.df_neg, [0, -2, 0, 0])

    def test_all_positive(self):
        c = split_components(ReturnSeries(ds=np.array([1.0, 2.0]), df=np.array([1.0, 1.0])))
        assert np.array_equal(c.ds_pos, [1, 2])
        assert np.array_equal(c.ds_neg, [0, 0])

    @given(ds=finite_changes, df=finite_changes)
    @settings(max_examples=100, deadline=None)
    def test_reconstruction_bit_identical(self, ds, df):
        n = min(len(ds), len(df))
        r = ReturnSeries(ds=ds[:n], df=df[:n])
        c = split_components(r)
        assert np.array_equal(c.ds_pos + c.ds_neg, r.ds)
        assert np.array_equal(c.df_pos + c.df_neg, r.df)

    @given(ds=finite_changes, df=finite_changes)
    @settings(max_examples=100, deadline=None)
    def test_sign_constraints_and_exclusivity(self, ds, df):
        n = min(len(ds), len(df))
        c = split_components(ReturnSeries(ds=ds[:n], df=df[:n]))
        assert np.all(c.ds_pos >= 0) and np.all(c.df_pos >= 0)
        assert np.all(c.ds_neg <= 0) and np.all(c.df_neg <= 0)
        assert not np.any((c.ds_pos > 0) & (c.ds_neg < 0))
        assert not np.any((c.df_pos > 0) & (c.df_neg < 0))


class TestSampleMoments:
    def test_identical_series(self):
        x = np.array([1.0, -1.0, 1.0, -1.0])
        m = sample_moments(x, x)
        assert m.rho == pytest.approx(1.0)
        assert m.sigma_s == pytest.approx(m.sigma_f)
        assert not m.degenerate

    def test_sign_flip(self):
        x = np.array([1.0, -1.0, 2.0, 0.5])
        m = sample_moments(x, -x)
        assert m.rho == pytest.approx(-1.0)

    def test_against_textbook_formulas(self):
        x = np.array([1.0, -1.0, 2.0, -2.0])
        y = np.array([1.2, -0.8, 2.1, -2.3])
        n = len(x)
        mx, my = x.mean(), y.mean()
        sxx = ((x - mx) ** 2).sum() / (n - 1)
        syy = ((y - my) ** 2).sum() / (n - 1)
        sxy = ((x - mx) * (y - my)).sum() / (n - 1)
        m = sample_moments(x, y)
        assert m.sigma_s == pytest.approx(np.sqrt(sxx), rel=1e-12)
        assert m.sigma_f == pytest.approx(np.sqrt(syy), rel=1e-12)
        assert m.rho == pytest.approx(sxy / np.sqrt(sxx * syy), rel=1e-12)
        assert m.mean_s == pytest.approx(mx)
        assert m.mean_f == pytest.approx(my)

    def test_symmetry_in_rho(self, rng):
        x = rng.normal(0, 1, 30)
        y = rng.normal(0, 1, 30)
        assert sample_moments(x, y).rho == pytest.approx(sample_moments(y, x).rho, rel=1e-12)

    def test_rho_invariant_under_positive_scaling(self, rng):
        x = rng.normal(0, 1, 30)
        y = rng.normal(0, 1, 30)
        base = sample_moments(x, y).rho
        assert sample_moments(3.7 * x, y).rho == pytest.approx(base, rel=1e-12)
        assert sample_moments(x, 0.01 * y + 5.0).rho == pytest.approx(base, rel=1e-12)

    def test_constant_series_degenerate(self):
        x = np.ones(5)
        y = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        m = sample_moments(x, y)
        assert m.degenerate
        assert m.rho == 0.0

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            sample_moments(np.ones(3), np.ones(4))


class TestComponentSeriesInvariants:
    def test_sign_violation_rejected(self):
        with pytest.raises(InvalidInputError):
            ComponentSeries(ds_pos=np.array([-0.1, 0.0]), ds_neg=np.zeros(2),
                            df_pos=np.zeros(2), df_neg=np.zeros(2))

    def test_recombination_properties(self):
        c = split_components(ReturnSeries(ds=np.array([1.0, -2.0]), df=np.array([-1.0, 2.0])))
        assert np.array_equal(c.ds, [1.0, -2.0])
        assert np.array_equal(c.df, [-1.0, 2.0])
