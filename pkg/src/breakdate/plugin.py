"""Plug-in estimates for the limit law and a prewhitened QS long-run variance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .breakscan import BreakEstimate
from .core import InvalidData, TimeSeriesDataset, WeakIdentification

PHI_MAX = 0.97


@dataclass(frozen=True)
class PluginParams:
    """Feasible parameters of the limit law.

    ``rho`` and ``vartheta`` are the sample quantities; their continuous
    record counterparts carry an extra ``1/h`` (see :attr:`rho_lim`).
    """

    xi1: float
    xi2: float
    rho: float
    vartheta: float
    sigma_bar_sq: float
    lambda_hat: float
    h: float = 1.0
    N: float = 1.0
    t_hat: int = 0
    T: int = 0

    @property
    def rho_lim(self) -> float:
        return self.rho / self.h

    @property
    def vartheta_lim(self) -> float:
        return self.vartheta / self.h

    def scale(self, units: str = "rho") -> float:
        """Limit-law units per unit of ``N (lambda - lambda_0)``."""
        if units == "rho":
            return self.rho_lim
        if units == "vartheta":
            return self.vartheta_lim
        raise ValueError(f"unknown units {units!r}")


def check_identified(data: TimeSeriesDataset, delta) -> None:
    """Raise :class:`WeakIdentification` when ``delta`` is numerically zero."""
    thresh = 1e-10 * np.linalg.norm(data.y) / np.sqrt(data.T)
    if not np.linalg.norm(delta) > thresh:
        raise WeakIdentification(f"|delta_hat| = {np.linalg.norm(delta):.3g} is numerically zero")


def regime_moments(data: TimeSeriesDataset, est: BreakEstimate, lrv: bool = False):
    """Regime averages of ``(z'd)^2`` and of its noise-weighted counterpart.

    Returns
    -------
    a1, a2, b1, b2 : float
        ``a_i`` averages ``(z_k' delta)^2`` over regime ``i``; ``b_i``
        averages ``e_k^2 (z_k' delta)^2``, or with ``lrv=True`` is the
        long-run variance of ``e_k z_k' delta`` within the regime.
    """
    z = est.shifting_regressors(data) @ est.delta_hat
    e = est.residuals
    t = est.t_hat
    a = z * z
    a1, a2 = a[:t].mean(), a[t:].mean()
    if lrv:
        w = e * z
        b1, b2 = lrv_qs_prewhitened(w[:t]), lrv_qs_prewhitened(w[t:])
    else:
        b = e * e * a
        b1, b2 = b[:t].mean(), b[t:].mean()
    return float(a1), float(a2), float(b1), float(b2)


def compute_plugins(data: TimeSeriesDataset, est: BreakEstimate,
                    lrv: bool = False) -> PluginParams:
    """Plug-in estimates of the drift ratio, diffusion ratio and scales.

    Parameters
    ----------
    data : TimeSeriesDataset
    est : BreakEstimate
    lrv : bool
        Replace the regime averages of ``e^2 (z'delta)^2`` by prewhitened
        QS long-run variances, for serially correlated errors.

    Raises
    ------
    WeakIdentification
        If ``delta_hat`` is numerically zero.
    """
    check_identified(data, est.delta_hat)
    a1, a2, b1, b2 = regime_moments(data, est, lrv)
    e = est.residuals
    sbar = float(e @ e) / data.T
    with np.errstate(divide="ignore", invalid="ignore"):
        xi2 = b2 / b1 if b1 > 0 else 1.0
        rho = a1 * a1 / b1 if b1 > 0 else np.inf
        vartheta = rho * float(est.delta_hat @ est.delta_hat) / sbar if sbar > 0 else np.inf
    return PluginParams(
        xi1=a2 / a1,
        xi2=float(xi2),
        rho=float(rho),
        vartheta=float(vartheta),
        sigma_bar_sq=sbar,
        lambda_hat=est.lambda_hat,
        h=data.h,
        N=data.N,
        t_hat=est.t_hat,
        T=data.T,
    )


def qs_kernel(x):
    """Quadratic spectral kernel, ``k(0) = 1``."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = x != 0
    a = 6.0 * np.pi * x[nz] / 5.0
    out[nz] = 25.0 / (12.0 * np.pi**2 * x[nz] ** 2) * (np.sin(a) / a - np.cos(a))
    return out


def autocovariances(u):
    """Biased sample autocovariances ``(1/T) sum u_t u_{t-j}`` for all lags."""
    n = u.shape[0]
    m = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(u, m)
    return np.fft.irfft(f * np.conj(f), m)[:n] / n


def _ar1(u):
    return float(u[1:] @ u[:-1]) / float(u[:-1] @ u[:-1]) if np.any(u[:-1]) else 0.0


def lrv_qs_prewhitened(series, bandwidth: float | None = None,
                       prewhiten: bool = True, return_info: bool = False):
    """Long-run variance with AR(1) prewhitening and a QS kernel.

    The bandwidth follows the AR(1) plug-in rule
    ``1.3221 (alpha(2) T)^(1/5)`` computed on the whitened series, and
    the whitened estimate is recoloured by ``(1 - phi)^-2``.

    Parameters
    ----------
    series : array_like
        At least 10 observations; demeaned internally.
    bandwidth : float, optional
        Fixed bandwidth; ``0`` keeps only the lag-0 term.
    prewhiten : bool
    return_info : bool
        Also return a dict with ``phi``, ``bandwidth`` and ``clamped``.
    """
    x = np.asarray(series, dtype=float).ravel()
    if x.shape[0] < 10:
        raise InvalidData("long-run variance needs at least 10 observations")
    if not np.all(np.isfinite(x)):
        raise InvalidData("non-finite series")
    x = x - x.mean()
    phi, clamped = 0.0, False
    if prewhiten:
        phi = _ar1(x)
        if abs(phi) > PHI_MAX:
            phi, clamped = float(np.sign(phi) * PHI_MAX), True
        u = x[1:] - phi * x[:-1]
    else:
        u = x
    n = u.shape[0]
    gam = autocovariances(u)
    if bandwidth is None:
        r = float(np.clip(_ar1(u), -PHI_MAX, PHI_MAX))
        alpha2 = 4.0 * r * r / (1.0 - r) ** 4
        bandwidth = 1.3221 * (alpha2 * n) ** 0.2
    if bandwidth > 0:
        w = qs_kernel(np.arange(1, n) / bandwidth)
        omega = gam[0] + 2.0 * float(w @ gam[1:])
    else:
        omega = gam[0]
    omega = max(omega, 0.0) / (1.0 - phi) ** 2
    if return_info:
        return omega, {"phi": phi, "bandwidth": bandwidth, "clamped": clamped}
    return omega
