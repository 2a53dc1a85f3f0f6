"""Simulation designs with a single break in the regression coefficients.

Every design has the form

    y_t = D_t' nu + Z_t' beta + Z_t' delta 1{t > T_b} + e_t,

with ``T_b = floor(T lambda0)``; the models differ in the regressors
and in the error process.  Recursive processes start from zero and run
through a burn-in before the sample is kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .core import InvalidSpec, TimeSeriesDataset

BURN_IN = 500
TRUNCATION = 1000

_DEFAULTS = {
    "M1": {"beta": 1.0, "sigma2": 1.0},
    "M2": {"beta": 1.0},
    "M3": {"beta": 1.0, "ar": 0.3, "sigma2": 0.49},
    "M4": {"beta": 1.0, "nu": 1.0, "z_ar": 0.5, "z_sigma2": 0.75},
    "M5": {"beta": 1.0, "nu": 1.0, "z_ar": 0.5, "z_sigma2": 1.0},
    "M6": {"beta": 1.0, "ar": 0.3, "df": 5.0},
    "M7": {"beta": 0.0, "nu": 0.3, "sigma2": 0.49},
    "M8": {"beta": 0.0, "nu": 0.8, "sigma2": 0.04},
    "M9": {"beta": 1.0, "nu": 1.0, "omega": 0.1, "phi": 0.2, "d": 0.6,
           "z_mean": 1.0, "z_sigma2": 1.44},
    "M10": {"beta": 1.0, "nu": 0.0, "z_ar": 0.3, "d": 0.5},
    "FS51": {"beta": 1.0, "nu": 1.0, "z_ar": 0.5, "sigma2": 1.0},
}

MODELS = tuple(_DEFAULTS)
PREDICTABLE = ("M7", "M8")
# error structure, which selects the variance estimator downstream
SERIAL = ("M3", "M6")
HETERO = ("M2", "M5")


@dataclass(frozen=True)
class DgpSpec:
    """A simulation design.

    Parameters
    ----------
    model : str
        One of :data:`MODELS`.
    T : int
    lambda0 : float
        Break fraction; the last pre-break date is ``floor(T lambda0)``.
    delta0 : float
    seed : int
    extra : dict
        Overrides for the model constants in ``_DEFAULTS``.
    """

    model: str = "M1"
    T: int = 100
    lambda0: float = 0.5
    delta0: float = 1.0
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in _DEFAULTS:
            raise InvalidSpec(f"unknown model {self.model!r}; expected one of {MODELS}")
        if not 0 < self.lambda0 < 1 or self.lambda0 * self.T < 2 or self.T - self.t_b0 < 2:
            raise InvalidSpec("break must leave at least two observations per regime")
        unknown = set(self.extra) - set(_DEFAULTS[self.model])
        if unknown:
            raise InvalidSpec(f"unknown parameters for {self.model}: {sorted(unknown)}")
        par = self.params
        ar_keys = ["ar", "z_ar"] + (["nu"] if self.model in PREDICTABLE else [])
        for key in ar_keys:
            if key in par and not abs(par[key]) < 1:
                raise InvalidSpec(f"{key} must lie in (-1, 1)")
        if "d" in par and not 0 < par["d"] < 1:
            raise InvalidSpec("fractional order must lie in (0, 1)")

    @property
    def t_b0(self) -> int:
        return int(np.floor(self.T * self.lambda0 + 1e-9))

    @property
    def params(self) -> dict:
        return {**_DEFAULTS[self.model], **self.extra}

    def replicate(self, seed: int) -> "DgpSpec":
        return DgpSpec(self.model, self.T, self.lambda0, self.delta0, seed, dict(self.extra))


@dataclass
class Sample:
    data: TimeSeriesDataset
    t_b0: int
    spec: DgpSpec
    info: dict = field(default_factory=dict)


def fractional_diff_coeffs(d: float, K: int) -> np.ndarray:
    """First ``K`` weights of ``(1 - L)^d``: ``psi_j = psi_{j-1} (j - 1 - d) / j``.

    >>> fractional_diff_coeffs(0.5, 3)
    array([ 1.   , -0.5  , -0.125])
    """
    if not 0 <= d < 1:
        raise InvalidSpec("d must lie in [0, 1)")
    if K < 1:
        raise InvalidSpec("K must be positive")
    return _frac_weights(d, K)


def _frac_weights(d, K):
    j = np.arange(1, K)
    return np.concatenate([[1.0], np.cumprod((j - 1 - d) / j)])


def _ar1(innov, phi):
    """``x_t = phi x_{t-1} + innov_t`` from ``x_0 = 0``."""
    return signal.lfilter([1.0], [1.0, -phi], innov)


def figarch_errors(u, omega=0.1, phi=0.2, d=0.6, K=TRUNCATION):
    """``e_t = sigma_t u_t`` with ``sigma_t^2 = omega + lambda(L) e_t^2``.

    ``lambda(L) = 1 - (1 - phi L)(1 - L)^d``, truncated after ``K`` lags.
    Returns the errors and the number of variances clamped at 1e-8.
    """
    psi = _frac_weights(d, K + 1)
    lam = -(psi[1:] - phi * psi[:-1])  # lags 1..K
    n = u.shape[0]
    e2 = np.zeros(n + K)
    e = np.empty(n)
    clamped = 0
    rev = lam[::-1]
    for t in range(n):
        s2 = omega + rev @ e2[t:t + K]
        if s2 < 1e-8:
            s2, clamped = 1e-8, clamped + 1
        e[t] = np.sqrt(s2) * u[t]
        e2[t + K] = e[t] * e[t]
    return e, clamped


def arfima_regressor(eps, ar=0.3, d=0.5, K=TRUNCATION):
    """Unit-variance ARFIMA(ar, d, 0) series from a truncated MA filter.

    ``eps`` must hold at least ``K`` more values than the output.
    """
    ma = _frac_weights(-d, K)
    c = signal.lfilter([1.0], [1.0, -ar], ma)
    c /= np.sqrt(c @ c)
    return signal.fftconvolve(eps, c)[K - 1:eps.shape[0]]


def generate(spec: DgpSpec, rng=None) -> Sample:
    """Draw one sample from ``spec``.

    ``rng`` may override ``spec.seed`` with an integer.  Error,
    regressor and auxiliary shocks use separate child streams.
    """
    seed = spec.seed if rng is None else int(rng)
    g_e, g_z, g_v = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))
    par = spec.params
    T, m, t0 = spec.T, spec.model, spec.t_b0
    n = T + BURN_IN
    post = (np.arange(1, T + 1) > t0).astype(float)
    info = {}
    D = None
    Z = np.ones(T)

    if m in ("M1", "M2", "M3", "M6"):
        if m == "M1":
            e = np.sqrt(par["sigma2"]) * g_e.standard_normal(T)
        elif m == "M2":
            e = (1.0 + post) * g_e.standard_normal(T)
        elif m == "M3":
            e = _ar1(np.sqrt(par["sigma2"]) * g_e.standard_normal(n), par["ar"])[BURN_IN:]
        else:
            e = _ar1(g_e.standard_t(par["df"], n), par["ar"])[BURN_IN:]
        y = par["beta"] + spec.delta0 * post + e
    elif m in ("M4", "M5", "FS51"):
        if m == "FS51":
            Z = _ar1(g_z.standard_normal(T), par["z_ar"])
            e = np.sqrt(par["sigma2"]) * g_e.standard_normal(T)
        else:
            Z = _ar1(np.sqrt(par["z_sigma2"]) * g_z.standard_normal(n), par["z_ar"])[BURN_IN:]
            if m == "M4":
                e = g_e.standard_normal(T)
            else:
                e = g_v.standard_normal(T) * np.abs(Z)
        D = np.ones(T)
        y = par["nu"] + Z * (par["beta"] + spec.delta0 * post) + e
    elif m in PREDICTABLE:
        nu = par["nu"]
        u = np.sqrt(par["sigma2"]) * g_e.standard_normal(n)
        shift = np.concatenate([np.zeros(BURN_IN), post])
        c = par["beta"] + (1.0 - nu) * spec.delta0 * shift
        yy = signal.lfilter([1.0], [1.0, -nu], c + u)
        y, D = yy[BURN_IN:], yy[BURN_IN - 1:-1]
    elif m == "M9":
        e, info["clamped_variances"] = figarch_errors(
            g_e.standard_normal(n), par["omega"], par["phi"], par["d"])
        e = e[BURN_IN:]
        Z = par["z_mean"] + np.sqrt(par["z_sigma2"]) * g_z.standard_normal(T)
        D = np.ones(T)
        y = par["nu"] + Z * (par["beta"] + spec.delta0 * post) + e
    else:  # M10
        Z = arfima_regressor(g_z.standard_normal(T + BURN_IN + TRUNCATION - 1),
                             par["z_ar"], par["d"])[BURN_IN:]
        e = g_e.standard_normal(T)
        D = np.ones(T)
        y = par["nu"] * D + Z * (par["beta"] + spec.delta0 * post) + e

    return Sample(TimeSeriesDataset(y, D, Z), t0, spec, info)


def to_csv(sample: Sample, path) -> None:
    """Write ``y, d1..dq, z1..zp`` with a header row."""
    d = sample.data
    cols = [d.y[:, None], d.D, d.Z]
    names = ["y"] + [f"d{i + 1}" for i in range(d.q)] + [f"z{i + 1}" for i in range(d.p)]
    np.savetxt(path, np.hstack(cols), delimiter=",", header=",".join(names),
               comments="", fmt="%.17g")
