import math

import numpy as np
import pytest

from rfuowc.channels import EggParams, PointingParams, egg_moment, get_preset, \
    rf_snr_cdf, uowc_snr_cdf
from rfuowc.mc import (
    McConfig,
    chunk_stream,
    mc_moment,
    mc_outage,
    sample_egg_irradiance,
    sample_pointing,
    sample_rf_best_snr,
    sample_uowc_snr,
)
from rfuowc.system import OutageQuery, SystemConfig, outage_quadrature

WEAK = PointingParams(a0=0.5076, xi=0.6079)


def grid_cfg(key="salty/4.7", mu1=100.0):
    return SystemConfig.from_direct_snr(mu1=mu1, n_relays=3,
                                        egg=get_preset(key).egg,
                                        pointing=WEAK, uowc_scale=mu1)


def three_sigma(mean_hat, stderr, target):
    return abs(mean_hat - target) <= 3.0 * max(stderr, 1e-300)


class TestStreams:
    def test_chunks_cover_sample_count(self):
        mc = McConfig(n_samples=2_500_000, seed=1, chunk_size=1 << 20)
        sizes = mc.chunks()
        assert sum(sizes) == mc.n_samples
        assert sizes[:-1] == [1 << 20] * 2

    def test_streams_differ_by_chunk(self):
        a = chunk_stream(5, 0).random(4)
        b = chunk_stream(5, 1).random(4)
        c = chunk_stream(5, 0).random(4)
        assert not np.allclose(a, b)
        np.testing.assert_array_equal(a, c)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            McConfig(n_samples=0)
        with pytest.raises(ValueError):
            McConfig(n_samples=1, chunk_size=0)


class TestSamplers:
    def test_rf_best_snr_mean_single(self):
        rng = chunk_stream(11, 0)
        x = sample_rf_best_snr(rng, 4.0, 1, 400_000)
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert three_sigma(x.mean(), se, 4.0)

    def test_rf_best_snr_harmonic_mean(self):
        rng = chunk_stream(12, 0)
        x = sample_rf_best_snr(rng, 1.0, 4, 400_000)
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert three_sigma(x.mean(), se, 25.0 / 12.0)

    def test_rf_best_snr_ecdf_matches_analytic(self):
        rng = chunk_stream(13, 0)
        mu1, n = 2.5, 2
        x = sample_rf_best_snr(rng, mu1, n, 400_000)
        p_hat = np.mean(x <= mu1)
        se = math.sqrt(p_hat * (1 - p_hat) / x.size)
        assert three_sigma(p_hat, se, rf_snr_cdf(mu1, mu1, n))

    def test_egg_pure_exponential_branch(self):
        rng = chunk_stream(14, 0)
        egg = EggParams(w=1.0, lam=2.0, a=1.0, b=1.0, c=1.0)
        x = sample_egg_irradiance(rng, egg, 400_000)
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert three_sigma(x.mean(), se, 2.0)

    def test_egg_gg_collapses_to_exponential(self):
        rng = chunk_stream(15, 0)
        egg = EggParams(w=0.0, lam=1.0, a=1.0, b=3.0, c=1.0)
        x = sample_egg_irradiance(rng, egg, 400_000)
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert three_sigma(x.mean(), se, 3.0)

    def test_egg_preset_mean(self):
        rng = chunk_stream(16, 0)
        egg = get_preset("salty/4.7").egg
        x = sample_egg_irradiance(rng, egg, 400_000)
        want = (egg.w * egg.lam + (1 - egg.w) * egg.b
                * math.exp(math.lgamma(egg.a + 1 / egg.c) - math.lgamma(egg.a)))
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert three_sigma(x.mean(), se, want)

    def test_tiny_shape_has_no_underflow(self):
        rng = chunk_stream(17, 0)
        egg = get_preset("fresh/16.5").egg  # a = 0.0075
        x = sample_egg_irradiance(rng, egg, 500_000)
        assert np.all(x > 0.0)

    def test_pointing_no_jitter_limit(self):
        rng = chunk_stream(18, 0)
        x = sample_pointing(rng, PointingParams(a0=0.7, xi=1e6), 1000)
        np.testing.assert_allclose(x, 0.7, rtol=1e-3)

    def test_pointing_half_mean(self):
        rng = chunk_stream(19, 0)
        x = sample_pointing(rng, PointingParams(a0=1.0, xi=1.0), 1_000_000)
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert three_sigma(x.mean(), se, 0.5)

    def test_pointing_preset_mean(self):
        rng = chunk_stream(20, 0)
        p = WEAK
        x = sample_pointing(rng, p, 400_000)
        want = p.a0 * p.xi2 / (1.0 + p.xi2)
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert three_sigma(x.mean(), se, want)

    def test_scalar_draws(self):
        rng = chunk_stream(21, 0)
        assert isinstance(sample_rf_best_snr(rng, 1.0, 3), float)
        assert isinstance(sample_pointing(rng, WEAK), float)


class TestMoments:
    def test_zeroth_exact(self):
        est = mc_moment(0, get_preset("salty/4.7").egg, WEAK,
                        McConfig(n_samples=10, seed=1))
        assert est.mean == 1.0 and est.std_err == 0.0

    @pytest.mark.parametrize("key", ["salty/4.7", "fresh/7.1", "fresh/16.5"])
    @pytest.mark.parametrize("order", [1, 2])
    def test_matches_analytic(self, key, order):
        egg = get_preset(key).egg
        est = mc_moment(order, egg, WEAK, McConfig(n_samples=1_000_000, seed=97))
        assert three_sigma(est.mean, est.std_err, egg_moment(order, egg, WEAK))

    def test_validation(self):
        with pytest.raises(ValueError):
            mc_moment(-1, get_preset("salty/4.7").egg, WEAK,
                      McConfig(n_samples=10, seed=1))


class TestOutage:
    def test_deterministic(self):
        cfg = grid_cfg()
        mc = McConfig(n_samples=300_000, seed=7, chunk_size=65_536)
        a = mc_outage(cfg, OutageQuery(10.0), mc)
        b = mc_outage(cfg, OutageQuery(10.0), mc)
        assert a == b

    def test_seed_changes_estimate(self):
        cfg = grid_cfg()
        a = mc_outage(cfg, OutageQuery(10.0), McConfig(n_samples=100_000, seed=1))
        b = mc_outage(cfg, OutageQuery(10.0), McConfig(n_samples=100_000, seed=2))
        assert a.mean != b.mean

    def test_tiny_threshold(self):
        cfg = grid_cfg()
        est = mc_outage(cfg, OutageQuery(1e-12), McConfig(n_samples=200_000, seed=3))
        assert est.mean <= 3.0 * est.std_err + 1e-12

    def test_first_hop_lower_bound(self):
        cfg = grid_cfg()
        gth = 10.0
        est = mc_outage(cfg, OutageQuery(gth), McConfig(n_samples=300_000, seed=4))
        lower = rf_snr_cdf(gth, cfg.budget.mu1, cfg.rf.n_relays)
        assert est.mean >= lower - 3.0 * est.std_err

    @pytest.mark.parametrize("key,gth", [("salty/16.5", 10.0), ("fresh/4.7", 1.0)])
    def test_matches_quadrature(self, key, gth):
        cfg = grid_cfg(key)
        q = OutageQuery(gth)
        ref = outage_quadrature(cfg, q).value
        est = mc_outage(cfg, q, McConfig(n_samples=1_000_000, seed=5))
        sigma = max(est.std_err, math.sqrt(ref * (1 - ref) / est.n))
        assert abs(est.mean - ref) <= 3.0 * sigma

    def test_floored_matches_floored_quadrature(self):
        cfg = grid_cfg("salty/4.7")
        q = OutageQuery(10.0)
        ref = outage_quadrature(cfg, q, floor_c=True).value
        est = mc_outage(cfg, q, McConfig(n_samples=1_000_000, seed=6), floor_c=True)
        assert abs(est.mean - ref) <= 3.0 * est.std_err


class TestDistribution:
    @pytest.mark.parametrize("key", ["salty/4.7", "fresh/16.5"])
    def test_ks_against_analytic_cdf(self, key):
        cfg = grid_cfg(key)
        n = 200_000
        g2 = np.sort(sample_uowc_snr(chunk_stream(77, 0), cfg, n))
        grid = np.exp(np.linspace(math.log(g2[0]) - 0.01,
                                  math.log(g2[-1]) + 0.01, 800))
        f_grid = uowc_snr_cdf(grid, cfg.budget, cfg.egg, cfg.pointing)
        f_s = np.interp(np.log(g2), np.log(grid), f_grid)
        idx = np.arange(1, n + 1)
        d_stat = max(float(np.max(np.abs(f_s - idx / n))),
                     float(np.max(np.abs(f_s - (idx - 1) / n))))
        assert d_stat < 1.6276 / math.sqrt(n)

    def test_chi_square_pdf_consistency(self):
        # histogram of samples vs integrated density, 1% level
        from scipy.stats import chi2
        cfg = grid_cfg("salty/7.1")
        n = 1_000_000
        g2 = sample_uowc_snr(chunk_stream(88, 0), cfg, n)
        qs = np.quantile(g2, np.linspace(0.0, 1.0, 41))
        qs[0], qs[-1] = qs[0] * 0.5, qs[-1] * 2.0
        counts, _ = np.histogram(g2, bins=qs)
        cdf_edges = uowc_snr_cdf(qs, cfg.budget, cfg.egg, cfg.pointing)
        probs = np.diff(cdf_edges)
        expected = probs * n
        stat = float(np.sum((counts - expected) ** 2 / expected))
        assert stat < chi2.ppf(0.99, df=len(counts) - 1)
