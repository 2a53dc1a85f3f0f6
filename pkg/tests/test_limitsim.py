import numpy as np
import pytest

from breakdate import (
    DgpSpec,
    LimitSimConfig,
    argmax_cdf,
    argmax_quantile,
    compute_plugins,
    generate,
    scan_break,
    simulate_general,
    simulate_stationary,
)
from breakdate.core import InvalidSpec
from breakdate.plugin import PluginParams


def params(rho=0.5, lam=0.5, xi1=1.0, xi2=1.0, T=100):
    return PluginParams(xi1, xi2, rho, rho, 1.0, lam, h=1.0 / T, N=1.0, t_hat=int(lam * T), T=T)


class TestConfig:
    @pytest.mark.parametrize("kw", [{"n_grid": 100}, {"n_draws": 0}, {"pi": 0.5}, {"N": -1}, {"units": "x"}])
    def test_rejects(self, kw):
        with pytest.raises(InvalidSpec):
            LimitSimConfig(**kw)


class TestStationary:
    def test_domain(self):
        d = simulate_stationary(params(0.4, 0.3), LimitSimConfig(n_draws=100, pi=0.05))
        assert d.domain_lo == pytest.approx(100 * 0.4 * (0.05 - 0.3))
        assert d.domain_hi == pytest.approx(100 * 0.4 * (0.95 - 0.3))
        assert np.all((d.draws >= d.domain_lo - 1e-9) & (d.draws <= d.domain_hi + 1e-9))

    def test_deterministic(self):
        cfg = LimitSimConfig(n_draws=500, seed=3)
        a = simulate_stationary(params(), cfg).draws
        b = simulate_stationary(params(), cfg).draws
        assert np.array_equal(a, b)
        c = simulate_stationary(params(), LimitSimConfig(n_draws=500, seed=4)).draws
        assert not np.array_equal(a, c)

    def test_prefix_stable(self):
        a = simulate_stationary(params(), LimitSimConfig(n_draws=200, seed=3)).draws
        b = simulate_stationary(params(), LimitSimConfig(n_draws=500, seed=3)).draws
        assert np.array_equal(a, b[:200])

    def test_symmetric(self):
        d = simulate_stationary(params(0.8), LimitSimConfig(n_draws=20000, n_grid=1000, seed=1)).draws
        assert abs(np.mean(d)) < 0.15
        assert abs(np.mean(d > 0) - 0.5) < 0.02

    def test_closed_form(self):
        # wide domain: the law is the two-sided argmax of -|s|/2 + W(s)
        p = PluginParams(1, 1, 200 / 0.45, 0, 1, 0.5, h=1.0, N=1.0, T=1)
        d = simulate_stationary(p, LimitSimConfig(n_draws=20000, n_grid=4000, seed=5)).draws
        for x in (2.0, 7.7, 15.0):
            assert np.mean(np.abs(d) <= x) == pytest.approx(2 * argmax_cdf(x) - 1, abs=0.015)

    def test_noiseless_point_mass(self):
        d = simulate_stationary(params(np.inf), LimitSimConfig(n_draws=50))
        assert np.all(d.draws == 0)
        assert d.date_coordinate(np.array([49, 50, 51])).tolist() == [-np.inf, 0.0, np.inf]

    def test_drift_ratio_skews(self):
        d = simulate_stationary(params(0.5, xi1=4.0), LimitSimConfig(n_draws=5000, seed=2)).draws
        assert np.mean(d < 0) > 0.6

    def test_date_coordinate(self):
        d = simulate_stationary(params(0.5), LimitSimConfig(n_draws=10))
        assert d.date_coordinate(60) == pytest.approx(0.5 * 10)


class TestGeneral:
    def test_close_to_stationary(self, m1_sample):
        d = m1_sample.data
        est = scan_break(d)
        p = compute_plugins(d, est)
        cfg = LimitSimConfig(n_draws=4000, n_grid=1000, seed=1)
        g = simulate_general(d, est, cfg).draws
        s = simulate_stationary(p, cfg).draws
        assert np.quantile(np.abs(g), 0.9) == pytest.approx(np.quantile(np.abs(s), 0.9), rel=0.25)

    def test_domain_matches(self, m1_sample):
        d = m1_sample.data
        est = scan_break(d)
        cfg = LimitSimConfig(n_draws=100, n_grid=500, seed=1)
        g = simulate_general(d, est, cfg)
        assert g.mode == "general"
        assert g.draws.min() >= g.domain_lo - 1e-9 and g.draws.max() <= g.domain_hi + 1e-9

    def test_long_memory_regressor(self):
        s = generate(DgpSpec("M10", 200, 0.5, 1.0, seed=2))
        est = scan_break(s.data)
        g = simulate_general(s.data, est, LimitSimConfig(n_draws=200, n_grid=500, seed=1))
        assert np.all(np.isfinite(g.draws))


class TestClosedForm:
    def test_cdf_limits(self):
        assert argmax_cdf(0.0) == pytest.approx(0.5)
        assert argmax_cdf(200.0) == pytest.approx(1.0, abs=1e-8)
        assert argmax_cdf(-7.7) == pytest.approx(1 - argmax_cdf(7.7))

    def test_quantile(self):
        # frozen: 0.975 quantile of the classical argmax law
        assert argmax_quantile(0.975) == pytest.approx(11.0333, abs=1e-3)
        assert argmax_cdf(argmax_quantile(0.9)) == pytest.approx(0.9)
