import numpy as np
import pytest

from breakdate import DgpSpec, WeakIdentification, compute_plugins, generate, lrv_qs_prewhitened, scan_break
from breakdate.core import InvalidData, TimeSeriesDataset
from breakdate.plugin import PluginParams, autocovariances, qs_kernel, regime_moments


class TestPlugins:
    def test_mean_shift_relations(self, m1_sample):
        d = m1_sample.data
        est = scan_break(d)
        p = compute_plugins(d, est)
        a1, a2, b1, b2 = regime_moments(d, est)
        assert p.xi1 == pytest.approx(1.0)  # z = 1 in both regimes
        assert p.xi2 == pytest.approx(b2 / b1)
        assert p.rho == pytest.approx(a1**2 / b1)
        e = est.residuals
        dl = est.delta_hat[0]
        # with z = 1: rho = delta^2 / mean(e^2 | regime 1)
        assert p.rho == pytest.approx(dl**2 / np.mean(e[: est.t_hat] ** 2))
        assert p.vartheta == pytest.approx(p.rho * dl**2 / p.sigma_bar_sq)

    def test_scale_invariance(self, fs51_sample):
        d = fs51_sample.data
        p1 = compute_plugins(d, scan_break(d))
        p2 = compute_plugins(d.scaled(13.0), scan_break(d.scaled(13.0)))
        for k in ("xi1", "xi2", "rho", "vartheta"):
            assert getattr(p1, k) == pytest.approx(getattr(p2, k), rel=1e-10)

    def test_weak(self):
        d = TimeSeriesDataset(np.ones(40), Z=np.ones(40))
        with pytest.raises(WeakIdentification):
            compute_plugins(d, scan_break(d))

    def test_noiseless_infinite(self, noiseless):
        p = compute_plugins(noiseless, scan_break(noiseless))
        assert np.isinf(p.rho)

    def test_limit_scale(self):
        p = PluginParams(1, 1, 0.5, 0.25, 1, 0.5, h=0.01)
        assert p.scale("rho") == pytest.approx(50)
        assert p.scale("vartheta") == pytest.approx(25)
        with pytest.raises(ValueError):
            p.scale("x")

    def test_hetero_ratio(self):
        s = generate(DgpSpec("M2", 2000, 0.5, 1.0, seed=4))
        est = scan_break(s.data)
        assert compute_plugins(s.data, est).xi2 == pytest.approx(4.0, rel=0.2)


class TestLrv:
    def test_qs_kernel(self):
        k = qs_kernel(np.array([0.0, 1.0, 5.0]))
        assert k[0] == 1.0
        assert abs(k[1]) < 1 and abs(k[2]) < 0.05

    def test_autocovariances(self):
        u = np.random.default_rng(0).standard_normal(50)
        g = autocovariances(u)
        assert g[0] == pytest.approx(u @ u / 50)
        assert g[3] == pytest.approx(u[3:] @ u[:-3] / 50)

    def test_iid(self):
        x = np.random.default_rng(1).standard_normal(5000)
        assert lrv_qs_prewhitened(x) == pytest.approx(1.0, rel=0.1)

    def test_ar1(self):
        from scipy.signal import lfilter

        x = lfilter([1], [1, -0.5], np.random.default_rng(2).standard_normal(5000))
        assert lrv_qs_prewhitened(x) == pytest.approx(4.0, rel=0.15)

    def test_fixed_bandwidth_zero(self):
        x = np.random.default_rng(3).standard_normal(200)
        v = lrv_qs_prewhitened(x, bandwidth=0, prewhiten=False)
        assert v == pytest.approx(np.var(x))

    def test_clamp(self):
        x = np.cumsum(np.random.default_rng(4).standard_normal(500))
        _, info = lrv_qs_prewhitened(x, return_info=True)
        assert info["clamped"] and info["phi"] == 0.97

    def test_short(self):
        with pytest.raises(InvalidData):
            lrv_qs_prewhitened(np.ones(5))
