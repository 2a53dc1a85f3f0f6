"""Simulation of the continuous-record limit law of the break-date estimator.

Both simulators return draws of the argmax location of a two-sided
drifted Gaussian process, in units where the pre-break side has drift
``-|s|/2`` and unit diffusion.  One unit of ``N (lambda - lambda_0)``
corresponds to ``scale`` units of ``s``; the default scale is the
continuous-record signal-to-noise ratio ``rho / h``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from ._backend import kernels
from .breakscan import BreakEstimate
from .core import DegenerateDomain, InvalidSpec, TimeSeriesDataset
from .plugin import PluginParams, compute_plugins, regime_moments


@dataclass(frozen=True)
class LimitSimConfig:
    """Simulation settings.

    ``units`` selects the scale tying the process to calendar time:
    ``"rho"`` (default) or ``"vartheta"``.  ``N`` defaults to the span
    of the dataset the plug-ins came from.
    """

    n_draws: int = 10000
    n_grid: int = 2000
    pi: float = 0.05
    N: float | None = None
    seed: int = 0
    units: str = "rho"

    def __post_init__(self):
        if self.n_grid < 200:
            raise InvalidSpec("n_grid must be at least 200")
        if self.n_draws < 1:
            raise InvalidSpec("n_draws must be positive")
        if not 0 < self.pi < 0.5:
            raise InvalidSpec("pi must lie in (0, 1/2)")
        if self.N is not None and not self.N > 0:
            raise InvalidSpec("span N must be positive")
        if self.units not in ("rho", "vartheta"):
            raise InvalidSpec(f"unknown units {self.units!r}")


@dataclass
class LimitDraws:
    """Simulated argmax locations and the interval they were drawn on.

    ``scale`` converts back to dates: hypothesised date ``T_b`` sits at
    ``scale * N * (T_b - t_hat) / T``.
    """

    draws: np.ndarray
    domain_lo: float
    domain_hi: float
    mode: str
    scale: float = 1.0
    N: float = 1.0
    T: int = 0
    t_hat: int = 0

    def date_coordinate(self, dates):
        dates = np.asarray(dates, dtype=float)
        if not np.isfinite(self.scale):
            return np.where(dates == self.t_hat, 0.0, np.copysign(np.inf, dates - self.t_hat))
        return self.scale * self.N * (dates - self.t_hat) / self.T

    def to_csv(self, path):
        np.savetxt(path, self.draws, delimiter=",", header="draw", comments="", fmt="%.17g")


def stream_key(seed: int) -> tuple[int, int]:
    """Philox key derived from a user seed."""
    k = np.random.SeedSequence(int(seed)).generate_state(2, np.uint64)
    return int(k[0]), int(k[1])


def _seed(cfg, rng):
    if rng is None:
        return cfg.seed
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(2**63))
    return int(rng)


def _walk(seed, n_draws, left, right, first=0):
    k0, k1 = stream_key(seed)
    arrs = [np.ascontiguousarray(a, dtype=float) for a in (*left, *right)]
    return kernels.walk_argmax(k0, k1, first, n_draws, *arrs)


def stationary_domain(lambda_hat, scale, N, pi):
    return N * scale * (pi - lambda_hat), N * scale * (1.0 - pi - lambda_hat)


def stationary_paths(lo, hi, xi1, xi2, n_grid):
    """Per-step drift, sd and position for each side of the domain."""
    width = hi - lo
    if not width > 0:
        raise DegenerateDomain(f"empty domain [{lo}, {hi}]")
    nl = int(round(n_grid * max(-lo, 0.0) / width))
    nr = n_grid - nl
    if lo < 0 and nl == 0:
        nl, nr = 1, nr - 1
    if hi > 0 and nr == 0:
        nl, nr = nl - 1, 1

    def side(length, n, drift, var):
        if n == 0:
            return np.empty(0), np.empty(0), np.empty(0)
        d = length / n
        j = np.arange(1, n + 1)
        return np.full(n, -0.5 * drift * d), np.full(n, np.sqrt(var * d)), j * d

    ml, sl, pl = side(max(-lo, 0.0), nl, 1.0, 1.0)
    mr, sr, pr = side(max(hi, 0.0), nr, xi1, xi2)
    return (ml, sl, -pl), (mr, sr, pr)


def simulate_stationary(params: PluginParams, cfg: LimitSimConfig | None = None,
                        rng=None) -> LimitDraws:
    """Draws from the argmax of ``V(s)`` on the trimmed domain.

    ``V(s) = -|s|/2 + W1(-s)`` for ``s < 0`` and
    ``-xi1 |s|/2 + sqrt(xi2) W2(s)`` for ``s >= 0``, with ``s`` confined
    to ``N * scale * [pi - lambda_hat, 1 - pi - lambda_hat]``.

    Parameters
    ----------
    params : PluginParams
    cfg : LimitSimConfig, optional
    rng : int or numpy.random.Generator, optional
        Overrides ``cfg.seed``.  Each draw has its own counter-based
        stream, so draw ``i`` does not depend on ``n_draws``.

    Returns
    -------
    LimitDraws
    """
    cfg = cfg or LimitSimConfig()
    scale = params.scale(cfg.units)
    N = cfg.N or params.N
    meta = dict(scale=scale, N=N, T=params.T, t_hat=params.t_hat)
    if not np.isfinite(scale):
        # noiseless fit: the law is a point mass at the estimate
        return LimitDraws(np.zeros(cfg.n_draws), -np.inf, np.inf, "stationary", **meta)
    lo, hi = stationary_domain(params.lambda_hat, scale, N, cfg.pi)
    left, right = stationary_paths(lo, hi, params.xi1, params.xi2, cfg.n_grid)
    draws = _walk(_seed(cfg, rng), cfg.n_draws, left, right)
    return LimitDraws(draws, lo, hi, "stationary", **meta)


def simulate_general(data: TimeSeriesDataset, est: BreakEstimate,
                     cfg: LimitSimConfig | None = None, rng=None,
                     params: PluginParams | None = None, lrv: bool = False) -> LimitDraws:
    """Draws from the limit law with time-varying regime moments.

    Moving the break one date across observation ``k`` adds drift
    ``-(u/2) a_k / a1`` and variance ``u b_k / b1`` to the criterion,
    with ``a_k = (z_k' delta)^2``, ``b_k = e_k^2 a_k`` and ``a1``, ``b1``
    their pre-break averages; ``u`` is the process scale per date.
    Each date is split into equal sub-steps so the path has at least
    ``n_grid`` points.

    With constant moments this reduces to :func:`simulate_stationary`.
    """
    cfg = cfg or LimitSimConfig()
    params = params or compute_plugins(data, est, lrv=lrv)
    scale = params.scale(cfg.units)
    T, t_hat = data.T, est.t_hat
    N = cfg.N or data.N
    meta = dict(scale=scale, N=N, T=T, t_hat=t_hat)
    first = int(np.ceil(T * cfg.pi - 1e-9))
    last = int(np.floor(T * (1 - cfg.pi) + 1e-9))
    if not first < last:
        raise DegenerateDomain("trimmed date range is empty")
    u = scale * N / T
    a1, _, b1, b2 = regime_moments(data, est, lrv)
    if not np.isfinite(u) or b1 == 0:
        return LimitDraws(np.zeros(cfg.n_draws), -np.inf, np.inf, "general", **meta)
    lo, hi = u * (first - t_hat), u * (last - t_hat)

    z = est.shifting_regressors(data) @ est.delta_hat
    a = z * z / a1
    e = est.residuals
    # per-date noise weights, normalised so the regime means are 1 and
    # xi2 (under lrv the long-run variances fix the regime totals)
    b = e * e * z * z
    m1, m2 = b[:t_hat].mean(), b[t_hat:].mean()
    b = np.concatenate([b[:t_hat] / m1, b[t_hat:] * (b2 / b1 / m2 if m2 > 0 else 0.0)])
    # dates crossed when the break moves left, nearest first, then right
    kl = np.arange(t_hat - 1, first - 1, -1)
    kr = np.arange(t_hat, last)
    n_dates = len(kl) + len(kr)
    m = max(1, int(np.ceil(cfg.n_grid / max(n_dates, 1))))

    def side(idx, sign):
        if len(idx) == 0:
            return np.empty(0), np.empty(0), np.empty(0)
        mu = np.repeat(-0.5 * u * a[idx] / m, m)
        sd = np.repeat(np.sqrt(u * b[idx] / m), m)
        pos = sign * u * np.arange(1, len(idx) * m + 1) / m
        return mu, sd, pos

    draws = _walk(_seed(cfg, rng), cfg.n_draws, side(kl, -1.0), side(kr, 1.0))
    return LimitDraws(draws, lo, hi, "general", **meta)


def argmax_cdf(x):
    """CDF of the argmax of ``-|s|/2 + W(s)`` over the real line.

    Closed form for the two-sided Brownian motion with drift.
    """
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    with np.errstate(over="ignore", invalid="ignore"):
        tail = (
            np.sqrt(ax / (2 * np.pi)) * np.exp(-ax / 8)
            - 0.5 * (ax + 5) * stats.norm.cdf(-np.sqrt(ax) / 2)
            + 1.5 * np.exp(ax + stats.norm.logcdf(-1.5 * np.sqrt(ax)))
        )
    f = 1.0 + tail
    return np.where(x >= 0, f, 1.0 - f)


def argmax_quantile(p: float) -> float:
    """Quantile of :func:`argmax_cdf`."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -argmax_quantile(1 - p)
    return optimize.brentq(lambda x: argmax_cdf(x) - p, 0.0, 1e3, xtol=1e-12)
