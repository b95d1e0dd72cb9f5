import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rfuowc.channels import (
    EggParams,
    PointingParams,
    RfLinkParams,
    UowcLinkParams,
    WATER_PRESETS,
    egg_moment,
    get_preset,
    relay_constant_c,
    relay_gain_sq,
    rf_avg_power_gain,
    rf_avg_snr,
    rf_snr_cdf,
    rf_snr_cdf_sum,
    rf_snr_pdf,
    rf_snr_pdf_sum,
    uowc_budget,
    uowc_snr_cdf,
    uowc_snr_pdf,
)
from rfuowc.quadrature import adaptive_quad
from rfuowc.system import SystemConfig

WEAK = PointingParams(a0=0.5076, xi=0.6079)
STRONG = PointingParams(a0=0.1641, xi=0.5244)


def grid_cfg(key="salty/4.7", pointing=WEAK, mu1=100.0):
    return SystemConfig.from_direct_snr(mu1=mu1, n_relays=3,
                                        egg=get_preset(key).egg,
                                        pointing=pointing, uowc_scale=mu1)


class TestPresets:
    def test_registry_has_exactly_six_rows(self):
        assert sorted(WATER_PRESETS) == [
            "fresh/16.5", "fresh/4.7", "fresh/7.1",
            "salty/16.5", "salty/4.7", "salty/7.1",
        ]

    def test_values_as_printed(self):
        egg = get_preset("salty/4.7").egg
        assert (egg.w, egg.lam, egg.a, egg.b, egg.c) == \
            (0.2064, 0.3953, 0.5307, 1.2154, 35.7368)
        egg = get_preset("fresh/16.5").egg
        assert (egg.w, egg.lam, egg.a, egg.b, egg.c) == \
            (0.5117, 0.1602, 0.0075, 2.9963, 216.8356)

    def test_unknown_key(self):
        with pytest.raises(KeyError):
            get_preset("brackish/4.7")


class TestRfHop:
    def test_path_gain(self):
        assert rf_avg_power_gain(RfLinkParams(1, 1, 1e-3, 0.0, 1.0, 1)) == 1e-3
        assert rf_avg_power_gain(RfLinkParams(1, 1, 1e-3, 3.0, 4.0, 1)) == pytest.approx(4e-5)
        assert rf_avg_power_gain(RfLinkParams(1, 1, 1e-3, 30.0, 40.0, 1)) == pytest.approx(4e-7)

    def test_avg_snr(self):
        p = RfLinkParams(p1=0.1, sigma1_sq=1e-12, g0=1e-3, radius_r=0.0,
                         height_l=1.0, n_relays=1)
        assert rf_avg_snr(p) == pytest.approx(1e8)
        p = RfLinkParams(p1=1e-12, sigma1_sq=1e-12, g0=1.0, radius_r=0.0,
                         height_l=1.0, n_relays=1)
        assert rf_avg_snr(p) == pytest.approx(1.0)
        p = RfLinkParams(p1=0.1, sigma1_sq=1e-12, g0=1e-3, radius_r=30.0,
                         height_l=40.0, n_relays=1)
        assert rf_avg_snr(p) == pytest.approx(4e4)

    def test_degenerate_geometry(self):
        with pytest.raises(ValueError):
            RfLinkParams(p1=1, sigma1_sq=1, g0=1, radius_r=0.0, height_l=0.0,
                         n_relays=1)

    def test_pdf_values(self):
        assert rf_snr_pdf(0.0, 2.0, 1) == pytest.approx(0.5)
        mu1 = 3.7
        want = (2.0 / mu1) * (math.exp(-1.0) - math.exp(-2.0))
        assert rf_snr_pdf(mu1, mu1, 2) == pytest.approx(want, rel=1e-13)

    def test_pdf_normalizes(self):
        val, _ = adaptive_quad(lambda x: rf_snr_pdf(x, 3.0, 5), 0.0, 400.0,
                               epsabs=1e-13, epsrel=1e-11)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_cdf_values(self):
        assert rf_snr_cdf(0.0, 5.0, 7) == 0.0
        assert rf_snr_cdf(5.0, 5.0, 1) == pytest.approx(1 - math.exp(-1), rel=1e-13)
        assert rf_snr_cdf(5.0, 5.0, 2) == pytest.approx((1 - math.exp(-1)) ** 2, rel=1e-13)

    def test_binomial_identity_tight_grid(self):
        for n in (1, 4, 9, 16):
            for x in np.geomspace(2.0, 20.0, 100):
                ref = rf_snr_cdf(float(x), 1.0, n)
                assert rf_snr_cdf_sum(float(x), 1.0, n) == pytest.approx(ref, rel=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 16), st.floats(0.5, 30.0), st.floats(0.05, 1e5))
    def test_binomial_identity_loose(self, n, ratio, mu1):
        x = ratio * mu1
        assert rf_snr_cdf_sum(x, mu1, n) == pytest.approx(
            rf_snr_cdf(x, mu1, n), abs=1e-9)

    def test_pdf_is_cdf_derivative(self):
        mu1, n = 4.0, 6
        for x in np.linspace(0.5, 30.0, 12):
            h = 1e-6 * mu1
            want = (rf_snr_cdf(x + h, mu1, n) - rf_snr_cdf(x - h, mu1, n)) / (2 * h)
            assert rf_snr_pdf(x, mu1, n) == pytest.approx(want, rel=1e-6)
            assert rf_snr_pdf_sum(x, mu1, n) == pytest.approx(want, rel=1e-6)

    def test_relay_constant(self):
        assert relay_constant_c(10.0, 1) == pytest.approx(11.0, rel=1e-14)
        assert relay_constant_c(10.0, 2) == pytest.approx(16.0, rel=1e-14)
        assert relay_constant_c(1.0, 4) == pytest.approx(1.0 + 25.0 / 12.0, rel=1e-13)

    def test_relay_constant_is_one_plus_mean(self):
        mu1, n = 3.0, 5
        val, _ = adaptive_quad(lambda x: x * rf_snr_pdf(x, mu1, n), 0.0, 600.0,
                               epsabs=1e-12, epsrel=1e-10)
        assert relay_constant_c(mu1, n) == pytest.approx(1.0 + val, rel=1e-8)

    def test_relay_gain_conventions(self):
        uowc = UowcLinkParams(eta=1.0, p2=1.0, n0=1.0, pr=2.0)
        sq = relay_gain_sq(uowc, sigma1_sq=1.0, c_const=1.0)
        assert sq == pytest.approx(2.0)
        assert relay_gain_sq(uowc, 1.0, 1.0, "literal") == pytest.approx(4.0)
        assert relay_gain_sq(uowc, 1.0, 2.0) == pytest.approx(sq / 2.0)
        with pytest.raises(ValueError):
            relay_gain_sq(uowc, 1.0, 1.0, "other")


class TestIrradianceMoments:
    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.0, 1.0), st.floats(0.05, 3.0), st.floats(0.05, 3.0),
           st.floats(0.05, 3.0), st.floats(0.5, 200.0),
           st.floats(0.05, 1.0), st.floats(0.1, 8.0))
    def test_zeroth_moment_is_one(self, w, lam, a, b, c, a0, xi):
        egg = EggParams(w=w, lam=lam, a=a, b=b, c=c)
        pointing = PointingParams(a0=a0, xi=xi)
        assert egg_moment(0, egg, pointing) == 1.0

    def test_no_jitter_limit(self):
        for key in WATER_PRESETS:
            egg = get_preset(key).egg
            wide = PointingParams(a0=1.0, xi=1e4)
            for n in (1, 2, 3):
                pure = (egg.w * egg.lam ** n * math.factorial(n)
                        + (1 - egg.w) * egg.b ** n
                        * math.exp(math.lgamma(egg.a + n / egg.c)
                                   - math.lgamma(egg.a)))
                assert egg_moment(n, egg, wide) == pytest.approx(pure, rel=1e-6)

    def test_jensen(self):
        for key in WATER_PRESETS:
            egg = get_preset(key).egg
            for pointing in (WEAK, STRONG):
                m1 = egg_moment(1, egg, pointing)
                m2 = egg_moment(2, egg, pointing)
                assert m2 >= m1 * m1

    def test_moment_validation(self):
        with pytest.raises(ValueError):
            egg_moment(-1, get_preset("salty/4.7").egg, WEAK)


class TestBudget:
    def test_mu2_definition(self):
        uowc = UowcLinkParams(eta=0.8, p2=0.1, n0=1e-21, pr=0.1)
        egg = get_preset("salty/4.7").egg
        m1, m2, mu2, avg2, rho = uowc_budget(uowc, egg, WEAK, g_relay_sq=2.5)
        assert m1 == pytest.approx(egg_moment(1, egg, WEAK))
        assert m2 == pytest.approx(egg_moment(2, egg, WEAK))
        assert mu2 == pytest.approx(2.5 * (0.1 * 0.8 * m1) ** 2 / 1e-21, rel=1e-12)
        assert avg2 == pytest.approx(mu2 * m2 / m1 ** 2, rel=1e-12)
        assert rho == pytest.approx(avg2 / m1 ** 2, rel=1e-12)
        assert avg2 / mu2 >= 1.0  # Jensen

    def test_rho_conventions(self):
        uowc = UowcLinkParams(eta=1.0, p2=1.0, n0=1.0, pr=1.0)
        egg = get_preset("salty/4.7").egg
        *_, mu2, _, rho = uowc_budget(uowc, egg, WEAK, 1.0, "mu2")
        assert rho == mu2
        with pytest.raises(ValueError):
            uowc_budget(uowc, egg, WEAK, 1.0, "something")

    def test_bandwidth_multiplier(self):
        base = UowcLinkParams(eta=1.0, p2=1.0, n0=1e-3, pr=1.0)
        wide = UowcLinkParams(eta=1.0, p2=1.0, n0=1e-3, pr=1.0, bandwidth=10.0)
        egg = get_preset("salty/4.7").egg
        mu2_base = uowc_budget(base, egg, WEAK, 1.0)[2]
        mu2_wide = uowc_budget(wide, egg, WEAK, 1.0)[2]
        assert mu2_wide == pytest.approx(mu2_base / 10.0)


class TestOpticalSnrDistribution:
    def test_pdf_nonnegative_on_log_grid(self):
        cfg = grid_cfg()
        xs = np.geomspace(cfg.budget.rho * 1e-8, cfg.budget.rho * 1e4, 200)
        vals = uowc_snr_pdf(xs, cfg.budget, cfg.egg, cfg.pointing)
        assert np.all(vals >= 0.0)

    @pytest.mark.parametrize("key", ["salty/4.7", "fresh/16.5"])
    def test_pdf_normalizes(self, key):
        cfg = grid_cfg(key)
        lo = math.log(cfg.budget.rho) - 70.0
        hi = math.log(cfg.budget.rho) + 30.0
        val, _ = adaptive_quad(
            lambda u: np.exp(u) * uowc_snr_pdf(np.exp(u), cfg.budget, cfg.egg,
                                               cfg.pointing),
            lo, hi, epsabs=1e-9, epsrel=1e-8)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_cdf_limits(self):
        cfg = grid_cfg("salty/16.5", STRONG)
        scale = cfg.budget.rho * cfg.pointing.a0 * cfg.egg.lam
        beta = min(cfg.pointing.xi2, cfg.egg.a * cfg.egg.c)
        x_small = scale * math.exp(-40.0 / beta)
        assert uowc_snr_cdf(x_small, cfg.budget, cfg.egg, cfg.pointing) <= 1e-6
        assert uowc_snr_cdf(cfg.budget.rho * 1e12, cfg.budget, cfg.egg,
                            cfg.pointing) == pytest.approx(1.0, abs=1e-6)

    def test_cdf_monotone_500_points(self):
        cfg = grid_cfg("salty/7.1")
        xs = np.geomspace(cfg.budget.rho * 1e-10, cfg.budget.rho * 1e6, 500)
        vals = uowc_snr_cdf(xs, cfg.budget, cfg.egg, cfg.pointing)
        assert np.all(np.diff(vals) >= -1e-12)

    def test_cdf_derivative_matches_pdf(self):
        cfg = grid_cfg()
        xs = np.geomspace(cfg.budget.rho * 0.01, cfg.budget.rho * 2.0, 20)
        for x in xs:
            h = 1e-4 * x
            num = (uowc_snr_cdf(x + h, cfg.budget, cfg.egg, cfg.pointing)
                   - uowc_snr_cdf(x - h, cfg.budget, cfg.egg, cfg.pointing)) / (2 * h)
            ana = uowc_snr_pdf(x, cfg.budget, cfg.egg, cfg.pointing)
            assert num == pytest.approx(ana, rel=1e-4, abs=1e-300)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            EggParams(w=1.5, lam=1, a=1, b=1, c=1)
        with pytest.raises(ValueError):
            EggParams(w=0.5, lam=0.0, a=1, b=1, c=1)
        with pytest.raises(ValueError):
            PointingParams(a0=0.0, xi=1.0)
        with pytest.raises(ValueError):
            PointingParams(a0=1.2, xi=1.0)
        with pytest.raises(ValueError):
            UowcLinkParams(eta=1.0, p2=1.0, n0=0.0, pr=1.0)
