import numpy as np
import pytest

from breakdate import DgpSpec, TimeSeriesDataset, generate


@pytest.fixture
def noiseless():
    """Mean shift of one at date 50, no noise."""
    y = np.r_[np.zeros(50), np.ones(50)]
    return TimeSeriesDataset(y, Z=np.ones(100))


@pytest.fixture
def m1_sample():
    return generate(DgpSpec("M1", 100, 0.5, 1.0, seed=11))


@pytest.fixture
def fs51_sample():
    return generate(DgpSpec("FS51", 200, 0.4, 1.0, seed=3))


def random_dataset(seed, T=None):
    """Regression with a random number of stable and shifting regressors."""
    rng = np.random.default_rng(seed)
    T = T or int(rng.integers(40, 160))
    p = int(rng.integers(1, 3))
    q = int(rng.integers(0, 3))
    Z = rng.standard_normal((T, p))
    Z[:, 0] = 1.0 if rng.random() < 0.5 else Z[:, 0]
    D = rng.standard_normal((T, q)) if q else None
    t0 = int(rng.integers(T // 4, 3 * T // 4))
    shift = (np.arange(T) >= t0)[:, None] * Z @ rng.normal(0, 1, p)
    y = Z @ rng.normal(0, 1, p) + shift + rng.standard_normal(T)
    if q:
        y += D @ rng.normal(0, 1, q)
    return TimeSeriesDataset(y, D, Z)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
