"""Kernel densities, highest-density-region sets and the Bai interval."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._constants import BAI_QUANTILES
from .breakscan import BreakEstimate
from .core import InvalidData, TimeSeriesDataset, WeakIdentification
from .limitsim import LimitDraws, argmax_quantile
from .plugin import PluginParams, check_identified, regime_moments

_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass
class DensityEstimate:
    """Gaussian kernel density of a set of draws.

    ``atom`` is set when the draws have no spread; the density is then a
    point mass, reported as ``inf`` at the atom and 0 elsewhere.
    """

    draws: np.ndarray
    bandwidth: float
    draw_densities: np.ndarray
    atom: float | None = None
    _grid: tuple | None = field(default=None, repr=False)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        if self.atom is not None:
            return np.where(np.isclose(x, self.atom, rtol=0, atol=1e-12), np.inf, 0.0)
        if self._grid is not None:
            g, f = self._grid
            return np.interp(x, g, f, left=0.0, right=0.0)
        return _exact(self.draws, self.bandwidth, x)

    __call__ = eval


def silverman_bandwidth(x) -> float:
    """``0.9 min(sd, IQR/1.34) n^(-1/5)``, falling back to ``sd`` if IQR is 0."""
    x = np.asarray(x, dtype=float)
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34) if q75 > q25 else sd
    return 0.9 * spread * x.shape[0] ** -0.2


def _exact(draws, bw, x, chunk=2048):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.shape[0])
    for s in range(0, x.shape[0], chunk):
        u = (x[s:s + chunk, None] - draws[None, :]) / bw
        out[s:s + chunk] = np.exp(-0.5 * u * u).sum(axis=1)
    return out / (draws.shape[0] * bw * _SQRT2PI)


def _binned(draws, bw, n_bins):
    """Linear binning followed by an FFT convolution with the kernel."""
    lo, hi = draws.min() - 5 * bw, draws.max() + 5 * bw
    g = np.linspace(lo, hi, n_bins)
    d = g[1] - g[0]
    pos = (draws - lo) / d
    i = np.clip(np.floor(pos).astype(int), 0, n_bins - 2)
    w = pos - i
    counts = np.bincount(i, 1 - w, n_bins) + np.bincount(i + 1, w, n_bins)
    m = 2 * n_bins
    k = np.arange(m, dtype=float)
    k[k >= n_bins] -= m
    kern = np.exp(-0.5 * (k * d / bw) ** 2)
    f = np.fft.irfft(np.fft.rfft(counts, m) * np.fft.rfft(kern), m)[:n_bins]
    f[f < 1e-12 * f.max()] = 0.0  # FFT round-off
    f = f / (draws.shape[0] * bw * _SQRT2PI)
    return g, f


def kde(draws, method: str = "auto", min_draws: int = 1000) -> DensityEstimate:
    """Gaussian KDE with Silverman's bandwidth.

    Parameters
    ----------
    draws : LimitDraws or array_like
    method : {"auto", "exact", "binned"}
        ``exact`` sums every kernel; ``binned`` (what ``auto`` picks)
        uses linear binning on a grid of at least eight bins per
        bandwidth and interpolates back to the draws.
    min_draws : int
        Smallest accepted sample.

    Returns
    -------
    DensityEstimate
    """
    x = np.asarray(getattr(draws, "draws", draws), dtype=float).ravel()
    if x.shape[0] < min_draws:
        raise InvalidData(f"need at least {min_draws} draws, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise InvalidData("non-finite draws")
    if np.ptp(x) == 0:
        return DensityEstimate(x, 0.0, np.full(x.shape[0], np.inf), atom=float(x[0]))
    bw = silverman_bandwidth(x)
    if method == "auto":
        method = "binned"
    if method == "exact":
        return DensityEstimate(x, bw, _exact(x, bw, x))
    if method != "binned":
        raise ValueError(f"unknown method {method!r}")
    span = np.ptp(x) + 10 * bw
    n_bins = int(min(max(2048, 1 << int(np.ceil(np.log2(8 * span / bw)))), 1 << 20))
    g, f = _binned(x, bw, n_bins)
    return DensityEstimate(x, bw, np.interp(x, g, f), _grid=(g, f))


def hdr_threshold(dens: DensityEstimate, alpha: float) -> float:
    """Largest ``cv`` with at least ``1 - alpha`` of the draws at or above it.

    The region is ``{x : f(x) >= cv}``; ``cv`` is the smallest draw
    density in the retained block, so draws tied with it are kept and
    the mass never falls short of ``1 - alpha``.  A point mass gives
    ``inf``, which keeps only the atom.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if dens.atom is not None:
        return np.inf
    f = np.sort(dens.draw_densities)
    n = f.shape[0]
    keep = math.ceil((1 - alpha) * n - 1e-9)
    return float(f[n - keep])


@dataclass
class ConfidenceSet:
    """Union of disjoint integer date ranges ``[lo, hi]`` (inclusive)."""

    intervals: list
    level: float
    method: str
    cv: float | None = None
    weak: bool = False

    def __post_init__(self):
        self.intervals = [(int(a), int(b)) for a, b in self.intervals]

    @property
    def length(self) -> int:
        return sum(b - a + 1 for a, b in self.intervals)

    def __len__(self):
        return self.length

    def __contains__(self, date) -> bool:
        return any(a <= date <= b for a, b in self.intervals)

    def dates(self) -> np.ndarray:
        if not self.intervals:
            return np.empty(0, dtype=int)
        return np.concatenate([np.arange(a, b + 1) for a, b in self.intervals])

    def issubset(self, other: "ConfidenceSet") -> bool:
        return all(d in other for d in self.dates())

    def text(self) -> str:
        return "∪".join(f"[{a}-{b}]" for a, b in self.intervals)

    __str__ = text

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "level": self.level,
            "intervals": [list(iv) for iv in self.intervals],
            "text": self.text(),
            "length": self.length,
            "cv": self.cv,
            "weak_identification": self.weak,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dates(cls, dates, level, method, cv=None, weak=False):
        d = np.unique(np.asarray(dates, dtype=int))
        if d.size == 0:
            return cls([], level, method, cv, weak)
        cut = np.flatnonzero(np.diff(d) > 1)
        starts = np.r_[d[0], d[cut + 1]]
        ends = np.r_[d[cut], d[-1]]
        return cls(list(zip(starts, ends)), level, method, cv, weak)


def candidate_dates(T: int, edge: int) -> tuple[int, int]:
    """Dates eligible for a confidence set after dropping ``edge`` at each end."""
    return 1 + edge, T - edge


def default_edge(est: BreakEstimate) -> int:
    """Number of estimated regression coefficients."""
    return len(est.beta_hat) + len(est.delta_hat)


def full_range_set(T, edge, level, method):
    lo, hi = candidate_dates(T, edge)
    return ConfidenceSet([(lo, hi)], level, method, weak=True)


def hdr_confidence_set(draws: LimitDraws | None, est: BreakEstimate,
                       params: PluginParams | None, alpha: float, T: int,
                       edge: int | None = None, dens: DensityEstimate | None = None) -> ConfidenceSet:
    """HDR confidence set for the break date.

    Each candidate date ``T_b`` is mapped to the draw coordinate it
    would have if it were the true date and kept when the density there
    reaches the HDR threshold.  The estimate itself is always kept.

    Parameters
    ----------
    draws : LimitDraws or None
        ``None`` (or ``params=None``) signals weak identification and
        returns the full candidate range.
    est : BreakEstimate
    params : PluginParams or None
    alpha : float
    T : int
    edge : int, optional
        Dates dropped at each end; defaults to the number of estimated
        coefficients.
    dens : DensityEstimate, optional
        Reuse a density already fitted to ``draws``.
    """
    edge = default_edge(est) if edge is None else edge
    if draws is None or params is None:
        return full_range_set(T, edge, 1 - alpha, "hdr")
    dens = dens or kde(draws)
    cv = hdr_threshold(dens, alpha)
    lo, hi = candidate_dates(T, edge)
    dates = np.arange(lo, hi + 1)
    f = dens.eval(draws.date_coordinate(dates))
    keep = dates[f >= cv]
    keep = np.union1d(keep, [min(max(est.t_hat, lo), hi)])
    return ConfidenceSet.from_dates(keep, 1 - alpha, "hdr", cv=cv)


def bai_quantile(alpha: float) -> float:
    """``1 - alpha/2`` quantile of the argmax of ``-|s|/2 + W(s)``."""
    key = round(1 - alpha / 2, 6)
    if key in BAI_QUANTILES:
        return BAI_QUANTILES[key]
    return argmax_quantile(1 - alpha / 2)


def bai_confidence_interval(est: BreakEstimate, data: TimeSeriesDataset, alpha: float,
                            lrv: bool = False, edge: int | None = None) -> ConfidenceSet:
    """Interval from the classical shrinking-shift limit law.

    The half-width on each side is ``ceil(q / L_i)`` where ``q`` is the
    ``1 - alpha/2`` quantile of the argmax law and
    ``L_i = (delta' Q_i delta)^2 / (delta' Omega_i delta)`` uses the
    moments of regime ``i``, so heteroskedasticity across the break
    widens only the affected side.  A noiseless fit gives ``t_hat +/- 1``.
    """
    edge = default_edge(est) if edge is None else edge
    try:
        check_identified(data, est.delta_hat)
    except WeakIdentification:
        return full_range_set(data.T, edge, 1 - alpha, "bai")
    q = bai_quantile(alpha)
    a1, a2, b1, b2 = regime_moments(data, est, lrv)

    def half(a, b):
        if b <= 0:
            return 1
        return max(1, math.ceil(q * b / (a * a) - 1e-12))

    lo = max(1, est.t_hat - half(a1, b1))
    hi = min(data.T, est.t_hat + half(a2, b2))
    return ConfidenceSet([(lo, hi)], 1 - alpha, "bai")
