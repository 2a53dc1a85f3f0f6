import numpy as np
import pytest

from breakdate.core import (
    InvalidData,
    InvalidSpec,
    ModelSpec,
    OutOfRange,
    TimeSeriesDataset,
    Underdetermined,
    build_design,
    ols_fit,
    trimmed_range,
)


class TestDataset:
    def test_shapes(self):
        d = TimeSeriesDataset(np.arange(20.0), np.ones(20), np.c_[np.ones(20), np.arange(20.0)])
        assert (d.T, d.p, d.q) == (20, 2, 1)
        assert d.X.shape == (20, 3)
        assert d.h == pytest.approx(1 / 20)

    def test_span(self):
        d = TimeSeriesDataset(np.zeros(10), Z=np.ones(10), N=5.0)
        assert d.h == 0.5

    def test_requires_z(self):
        with pytest.raises(InvalidData):
            TimeSeriesDataset(np.zeros(10), np.ones(10), None)

    def test_row_mismatch(self):
        with pytest.raises(InvalidData):
            TimeSeriesDataset(np.zeros(10), Z=np.ones(9))

    def test_nan(self):
        y = np.zeros(10)
        y[3] = np.nan
        with pytest.raises(InvalidData):
            TimeSeriesDataset(y, Z=np.ones(10))

    def test_too_short(self):
        with pytest.raises(InvalidData):
            TimeSeriesDataset(np.zeros(5), np.ones(5), np.ones((5, 1)))

    def test_bad_span(self):
        with pytest.raises(InvalidData):
            TimeSeriesDataset(np.zeros(10), Z=np.ones(10), N=0)

    def test_scaled(self):
        d = TimeSeriesDataset(np.arange(10.0), Z=np.ones(10))
        assert np.array_equal(d.scaled(3.0).y, 3 * d.y)

    def test_frozen(self):
        d = TimeSeriesDataset(np.zeros(10), Z=np.ones(10))
        with pytest.raises(Exception):
            d.N = 2.0


class TestModelSpec:
    @pytest.mark.parametrize("kw", [{"trim": 0.0}, {"trim": 0.5}, {"pi": -0.1}, {"pi": 0.6}])
    def test_rejects(self, kw):
        with pytest.raises(InvalidSpec):
            ModelSpec(**kw)


class TestOls:
    def test_exact_fit(self):
        X = np.c_[np.ones(5), np.arange(5.0)]
        fit = ols_fit(X, 2 + 3 * np.arange(5.0))
        np.testing.assert_allclose(fit.coefficients, [2, 3])
        assert fit.ssr == pytest.approx(0, abs=1e-20)
        assert fit.rank == 2

    def test_matches_lstsq(self):
        rng = np.random.default_rng(0)
        X, y = rng.standard_normal((30, 4)), rng.standard_normal(30)
        np.testing.assert_allclose(ols_fit(X, y).coefficients, np.linalg.lstsq(X, y, rcond=None)[0])

    def test_rank_deficient_min_norm(self):
        X = np.c_[np.ones(6), np.ones(6)]
        fit = ols_fit(X, np.full(6, 2.0))
        assert fit.rank == 1
        np.testing.assert_allclose(fit.coefficients, [1, 1])

    def test_underdetermined(self):
        with pytest.raises(Underdetermined):
            ols_fit(np.ones((2, 3)), np.ones(2))


class TestDesign:
    def test_trimmed_range(self):
        assert trimmed_range(100, 1, 0.15) == (15, 85)
        assert trimmed_range(10, 4, 0.15) == (4, 8)

    def test_build_design(self):
        d = TimeSeriesDataset(np.zeros(8), np.ones(8), np.arange(8.0))
        X = build_design(d, 3)
        assert X.shape == (8, 3)
        assert np.all(X[:3, 2] == 0) and np.array_equal(X[3:, 2], np.arange(3.0, 8.0))

    def test_out_of_range(self):
        d = TimeSeriesDataset(np.zeros(100), Z=np.ones(100))
        with pytest.raises(OutOfRange):
            build_design(d, 5, trim=0.15)
        with pytest.raises(OutOfRange):
            build_design(d, 101)
