"""Volatility system: constraints, filtering, likelihood."""

import math

import numpy as np
import pytest

from asymhedge.errors import (
    ConstraintViolationError,
    DegenerateHedgeError,
    InsufficientDataError,
)
from asymhedge.garch import (
    CROSS_PHI_BOUND,
    FilterInit,
    GarchSystemParams,
    LagOrders,
    ParamLayout,
    filter_volatility,
    fit_system,
    log_likelihood,
    residuals,
)
from asymhedge.series import ComponentSeries, ReturnSeries, split_components

from conftest import constant_variance_params, make_components


def garch11_params(gamma=0.1, phi=0.2, lam=0.3, cross_gamma=0.0, **kw):
    return GarchSystemParams(
        alpha_pos=kw.get("alpha_pos", 0.0), h_pos=kw.get("h_pos", 0.0),
        alpha_neg=kw.get("alpha_neg", 0.0), h_neg=kw.get("h_neg", 0.0),
        gamma_pos=gamma, phi_pos=[phi], lambda_pos=[lam],
        gamma_neg=gamma, phi_neg=[phi], lambda_neg=[lam],
        gamma_cross=cross_gamma, phi_cross=[], lambda_cross=[],
        nu=kw.get("nu"),
    )


def iid_bivariate_loglik(u_pos, u_neg, var_pos, var_neg, cov, dist="gaussian", nu=None):
    """Directly coded i.i.d. bivariate density with constant covariance."""
    det = var_pos * var_neg - cov * cov
    inv = np.array([[var_neg, -cov], [-cov, var_pos]]) / det
    total = 0.0
    for a, b in zip(u_pos, u_neg):
        q = inv[0, 0] * a * a + 2 * inv[0, 1] * a * b + inv[1, 1] * b * b
        if dist == "gaussian":
            total += -math.log(2 * math.pi) - 0.5 * math.log(det) - 0.5 * q
        else:
            total += (
                math.lgamma((nu + 2) / 2)
                - math.lgamma(nu / 2)
                - math.log((nu - 2) * math.pi)
                - 0.5 * math.log(det)
                - ((nu + 2) / 2) * math.log1p(q / (nu - 2))
            )
    return total


class TestLagOrders:
    def test_defaults_and_counts(self):
        o = LagOrders()
        assert (o.k_pos, o.q_pos, o.k_neg, o.q_neg, o.k_cross, o.q_cross) == (1, 1, 1, 1, 1, 1)

    def test_negative_rejected(self):
        with pytest.raises(ConstraintViolationError):
            LagOrders(-1, 0, 0, 0, 0, 0)


class TestGarchSystemParams:
    def test_nonpositive_gamma_rejected(self):
        with pytest.raises(ConstraintViolationError):
            garch11_params(gamma=0.0)

    def test_negative_variance_coefficients_rejected(self):
        with pytest.raises(ConstraintViolationError):
            garch11_params(phi=-0.1)

    def test_nonstationary_variance_rejected(self):
        with pytest.raises(ConstraintViolationError, match="stationary"):
            garch11_params(phi=0.5, lam=0.5)

    def test_nu_must_exceed_two(self):
        with pytest.raises(ConstraintViolationError):
            garch11_params(nu=2.0)
        garch11_params(nu=2.0001)  # boundary is open

    def test_cross_coefficients_sign_free_but_bounded(self):
        p = GarchSystemParams(
            alpha_pos=0, h_pos=0, alpha_neg=0, h_neg=0,
            gamma_pos=0.1, phi_pos=[], lambda_pos=[],
            gamma_neg=0.1, phi_neg=[], lambda_neg=[],
            gamma_cross=-0.05, phi_cross=[-0.3], lambda_cross=[-0.5],
        )
        assert p.phi_cross[0] == -0.3
        with pytest.raises(ConstraintViolationError):
            GarchSystemParams(
                alpha_pos=0, h_pos=0, alpha_neg=0, h_neg=0,
                gamma_pos=0.1, phi_pos=[], lambda_pos=[],
                gamma_neg=0.1, phi_neg=[], lambda_neg=[],
                gamma_cross=0.0, phi_cross=[CROSS_PHI_BOUND + 0.1], lambda_cross=[],
            )
        with pytest.raises(ConstraintViolationError, match="explosive"):
            GarchSystemParams(
                alpha_pos=0, h_pos=0, alpha_neg=0, h_neg=0,
                gamma_pos=0.1, phi_pos=[], lambda_pos=[],
                gamma_neg=0.1, phi_neg=[], lambda_neg=[],
                gamma_cross=0.0, phi_cross=[], lambda_cross=[0.6, 0.6],
            )

    def test_layout_pack_unpack_round_trip(self):
        p = garch11_params(gamma=0.2, phi=0.15, lam=0.6, cross_gamma=0.01, nu=7.0)
        layout = ParamLayout(p.orders, "student_t")
        q = layout.unpack(layout.pack(p))
        assert q.gamma_pos == pytest.approx(p.gamma_pos)
        assert q.nu == pytest.approx(7.0)


class TestResiduals:
    def test_exact_fit(self):
        comps = make_components(T=50, seed=1, h_pos=1.0, h_neg=1.0, noise=0.0)
        p = constant_variance_params(h_pos=1.0, h_neg=1.0)
        u_pos, u_neg = residuals(p, comps)
        assert np.allclose(u_pos, 0.0)
        assert np.allclose(u_neg, 0.0)

    def test_intercept_only(self):
        comps = make_components(T=50, seed=2)
        p = constant_variance_params(alpha_pos=1.0)
        u_pos, _ = residuals(p, comps)
        assert np.allclose(u_pos, comps.ds_pos - 1.0)

    def test_hand_oracle(self, rng):
        comps = make_components(T=80, seed=3)
        p = constant_variance_params(alpha_pos=0.3, h_pos=0.45, alpha_neg=-0.2, h_neg=0.85)
        u_pos, u_neg = residuals(p, comps)
        for t in (0, 17, 79):
            assert u_pos[t] == pytest.approx(comps.ds_pos[t] - 0.3 - 0.45 * comps.df_pos[t])
            assert u_neg[t] == pytest.approx(comps.ds_neg[t] + 0.2 - 0.85 * comps.df_neg[t])


class TestFilter:
    def test_constant_variance_degeneracy(self, rng):
        u = rng.normal(0, 1, 100)
        p = constant_variance_params(gamma_pos=0.7, gamma_neg=1.3, gamma_cross=0.2)
        f = filter_volatility(p, u, -np.abs(u))
        assert np.all(f.var_pos == 0.7)
        assert np.all(f.var_neg == 1.3)
        assert np.all(f.cov_cross == 0.2)

    def test_one_step_recursion_arithmetic(self):
        p = garch11_params(gamma=0.1, phi=0.2, lam=0.3)
        init = FilterInit(var_pos=1.0, var_neg=1.0, cov_cross=0.0,
                          usq_pos=4.0, usq_neg=4.0, uprod=0.0)
        f = filter_volatility(p, np.array([0.5]), np.array([-0.5]), init=init)
        assert f.var_pos[0] == pytest.approx(0.1 + 0.2 * 4.0 + 0.3 * 1.0, rel=1e-14)

    def test_time_average_matches_unconditional_variance(self):
        gamma, phi, lam = 0.05, 0.1, 0.8
        target = gamma / (1 - phi - lam)
        rng = np.random.default_rng(12)
        T = 200_000
        u = np.empty(T)
        var = target
        for t in range(T):
            u[t] = math.sqrt(var) * rng.standard_normal()
            var = gamma + phi * u[t] ** 2 + lam * var
        p = garch11_params(gamma=gamma, phi=phi, lam=lam, cross_gamma=0.0)
        f = filter_volatility(p, u, u.copy())
        assert f.var_pos.mean() == pytest.approx(target, rel=0.05)

    def test_causality(self, rng):
        u_pos = rng.normal(0, 1, 150)
        u_neg = rng.normal(0, 1, 150)
        p = garch11_params(gamma=0.2, phi=0.1, lam=0.5, cross_gamma=0.05)
        init = FilterInit(var_pos=1.0, var_neg=1.0, cov_cross=0.0,
                          usq_pos=1.0, usq_neg=1.0, uprod=0.0)
        full = filter_volatility(p, u_pos, u_neg, init=init)
        head = filter_volatility(p, u_pos[:60], u_neg[:60], init=init)
        assert np.array_equal(head.var_pos, full.var_pos[:60])
        assert np.array_equal(head.cov_cross, full.cov_cross[:60])

    def test_pd_flag_marks_violations(self):
        # Constant covariance larger than the geometric mean of the variances.
        p = constant_variance_params(gamma_pos=1.0, gamma_neg=1.0, gamma_cross=1.5)
        init = FilterInit(var_pos=1.0, var_neg=1.0, cov_cross=0.0,
                          usq_pos=1.0, usq_neg=1.0, uprod=0.0)
        f = filter_volatility(p, np.zeros(10), np.zeros(10), init=init)
        assert not f.pd_flag.any()


class TestLogLikelihood:
    def test_standard_normal_at_origin(self):
        comps = ComponentSeries(ds_pos=np.zeros(1), ds_neg=np.zeros(1),
                                df_pos=np.zeros(1), df_neg=np.zeros(1))
        p = constant_variance_params(gamma_pos=1.0, gamma_neg=1.0, gamma_cross=0.0)
        init = FilterInit(var_pos=1.0, var_neg=1.0, cov_cross=0.0,
                          usq_pos=1.0, usq_neg=1.0, uprod=0.0)
        ll = log_likelihood(p, comps, dist="gaussian", init=init)
        assert ll == pytest.approx(-math.log(2 * math.pi), rel=1e-12)

    def test_iid_oracle_gaussian(self, rng):
        comps = make_components(T=120, seed=4, h_pos=0.4, h_neg=0.7, noise=0.5)
        p = constant_variance_params(gamma_pos=0.3, gamma_neg=0.4, gamma_cross=0.05,
                                     alpha_pos=0.1, h_pos=0.4, alpha_neg=-0.1, h_neg=0.7)
        u_pos, u_neg = residuals(p, comps)
        expected = iid_bivariate_loglik(u_pos, u_neg, 0.3, 0.4, 0.05)
        assert log_likelihood(p, comps, dist="gaussian") == pytest.approx(expected, abs=1e-8)

    def test_iid_oracle_student_t(self, rng):
        comps = make_components(T=90, seed=5, h_pos=0.4, h_neg=0.7, noise=0.5)
        p = constant_variance_params(gamma_pos=0.5, gamma_neg=0.6, gamma_cross=-0.1,
                                     alpha_pos=0.0, h_pos=0.4, alpha_neg=0.0, h_neg=0.7,
                                     nu=5.0)
        u_pos, u_neg = residuals(p, comps)
        expected = iid_bivariate_loglik(u_pos, u_neg, 0.5, 0.6, -0.1, dist="t", nu=5.0)
        assert log_likelihood(p, comps, dist="student_t") == pytest.approx(expected, abs=1e-8)

    def test_large_nu_approaches_gaussian(self):
        comps = make_components(T=60, seed=6, noise=0.5)
        base = dict(gamma_pos=0.4, gamma_neg=0.5, gamma_cross=0.1,
                    alpha_pos=0.05, h_pos=0.5, alpha_neg=-0.05, h_neg=0.5)
        p_g = constant_variance_params(**base)
        p_t = constant_variance_params(**base, nu=1e6)
        ll_g = log_likelihood(p_g, comps, dist="gaussian")
        ll_t = log_likelihood(p_t, comps, dist="student_t")
        assert ll_t == pytest.approx(ll_g, abs=1e-4)

    def test_deterministic(self):
        comps = make_components(T=70, seed=7)
        p = garch11_params(gamma=0.2, phi=0.1, lam=0.6, cross_gamma=0.02,
                           h_pos=0.5, h_neg=0.5, nu=6.0)
        assert log_likelihood(p, comps) == log_likelihood(p, comps)

    def test_finite_under_pd_repair(self):
        comps = make_components(T=50, seed=8, noise=0.5)
        p = constant_variance_params(gamma_pos=0.2, gamma_neg=0.2, gamma_cross=0.5,
                                     h_pos=0.5, h_neg=0.5)
        ll = log_likelihood(p, comps, dist="gaussian")
        assert np.isfinite(ll)
        repaired = constant_variance_params(gamma_pos=0.2, gamma_neg=0.2, gamma_cross=0.19,
                                            h_pos=0.5, h_neg=0.5)
        assert log_likelihood(repaired, comps, dist="gaussian") > ll

    def test_standardized_residuals_scale_invariant(self):
        comps = make_components(T=80, seed=9, h_pos=0.4, h_neg=0.7, noise=0.3)
        p = garch11_params(gamma=0.05, phi=0.1, lam=0.7, cross_gamma=0.01,
                           alpha_pos=0.1, h_pos=0.4, alpha_neg=-0.1, h_neg=0.7)
        c = 37.0
        scaled = ComponentSeries(ds_pos=c * comps.ds_pos, ds_neg=c * comps.ds_neg,
                                 df_pos=c * comps.df_pos, df_neg=c * comps.df_neg)
        p_scaled = GarchSystemParams(
            alpha_pos=c * p.alpha_pos, h_pos=p.h_pos,
            alpha_neg=c * p.alpha_neg, h_neg=p.h_neg,
            gamma_pos=c * c * p.gamma_pos, phi_pos=p.phi_pos, lambda_pos=p.lambda_pos,
            gamma_neg=c * c * p.gamma_neg, phi_neg=p.phi_neg, lambda_neg=p.lambda_neg,
            gamma_cross=c * c * p.gamma_cross, phi_cross=p.phi_cross,
            lambda_cross=p.lambda_cross,
        )
        u1_pos, u1_neg = residuals(p, comps)
        u2_pos, u2_neg = residuals(p_scaled, scaled)
        f1 = filter_volatility(p, u1_pos, u1_neg)
        f2 = filter_volatility(p_scaled, u2_pos, u2_neg)
        assert np.allclose(u2_pos / np.sqrt(f2.var_pos), u1_pos / np.sqrt(f1.var_pos), rtol=1e-10)
        assert np.allclose(u2_neg / np.sqrt(f2.var_neg), u1_neg / np.sqrt(f1.var_neg), rtol=1e-10)


class TestFitSystem:
    def test_too_short(self):
        comps = make_components(T=10, seed=1)
        with pytest.raises(InsufficientDataError):
            fit_system(comps, LagOrders(0, 0, 0, 0, 0, 0))

    def test_constant_data_degenerate(self):
        comps = split_components(ReturnSeries(ds=np.zeros(50), df=np.zeros(50)))
        with pytest.raises(DegenerateHedgeError):
            fit_system(comps, LagOrders(0, 0, 0, 0, 0, 0))

    def test_constant_variance_fit_recovers_slopes(self):
        comps = make_components(T=800, seed=10, h_pos=0.4, h_neg=0.7, noise=0.2)
        res = fit_system(comps, LagOrders(0, 0, 0, 0, 0, 0), dist="gaussian")
        assert res.converged
        assert res.params.h_pos == pytest.approx(0.4, abs=0.05)
        assert res.params.h_neg == pytest.approx(0.7, abs=0.05)
        assert res.se is not None and np.all(res.se > 0)
        assert res.loglik == pytest.approx(
            log_likelihood(res.params, comps, dist="gaussian"), rel=1e-9
        )

    def test_ratio_covariance_shape(self):
        comps = make_components(T=400, seed=11, h_pos=0.5, h_neg=0.5, noise=0.2)
        res = fit_system(comps, LagOrders(0, 0, 0, 0, 0, 0), dist="gaussian")
        cov = res.ratio_covariance()
        assert cov.shape == (2, 2)
        assert cov[0, 1] == pytest.approx(cov[1, 0])
        assert cov[0, 0] > 0 and cov[1, 1] > 0
