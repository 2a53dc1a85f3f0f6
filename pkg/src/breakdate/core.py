"""Data containers and the least-squares primitive shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg


class BreakdateError(Exception):
    """Base class for all package errors."""


class InvalidData(BreakdateError):
    pass


class Underdetermined(BreakdateError):
    pass


class OutOfRange(BreakdateError):
    pass


class DegenerateDesign(BreakdateError):
    pass


class WeakIdentification(BreakdateError):
    """The estimated shift is numerically zero, so the limit law is undefined."""


class DegenerateDomain(BreakdateError):
    pass


class InvalidSpec(BreakdateError):
    pass


class Unsupported(BreakdateError):
    pass


def _as_matrix(a, n, name):
    if a is None:
        return np.empty((n, 0))
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.shape[0] != n:
        raise InvalidData(f"{name} must have {n} rows, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class TimeSeriesDataset:
    """Observed sample: ``y``, stable regressors ``D`` and shifting regressors ``Z``.

    ``N`` is the time span of the continuous-record embedding; only the
    sampling interval ``h = N / T`` depends on it.
    """

    y: np.ndarray
    D: np.ndarray
    Z: np.ndarray
    N: float = 1.0

    def __init__(self, y, D=None, Z=None, N=1.0):
        y = np.asarray(y, dtype=float).ravel()
        T = y.shape[0]
        D = _as_matrix(D, T, "D")
        Z = _as_matrix(Z, T, "Z")
        if Z.shape[1] < 1:
            raise InvalidData("at least one shifting regressor is required")
        for name, a in (("y", y), ("D", D), ("Z", Z)):
            if not np.all(np.isfinite(a)):
                raise InvalidData(f"{name} contains non-finite values")
        p, q = Z.shape[1], D.shape[1]
        if T < 2 * (p + q) + 2:
            raise InvalidData(f"T={T} too small for p={p}, q={q}")
        if not N > 0:
            raise InvalidData("span N must be positive")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "N", float(N))

    @property
    def T(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.Z.shape[1]

    @property
    def q(self) -> int:
        return self.D.shape[1]

    @property
    def X(self) -> np.ndarray:
        """Full-sample block ``[D | Z]``."""
        return np.hstack([self.D, self.Z])

    @property
    def h(self) -> float:
        return self.N / self.T

    def scaled(self, c: float) -> "TimeSeriesDataset":
        return TimeSeriesDataset(c * self.y, self.D, self.Z, self.N)


@dataclass(frozen=True)
class ModelSpec:
    trim: float = 0.15
    pi: float = 0.05
    has_predictable: bool = False
    N: float = 1.0

    def __post_init__(self):
        if not 0 < self.trim < 0.5:
            raise InvalidSpec("estimation trimming must lie in (0, 1/2)")
        if not 0 < self.pi < 0.5:
            raise InvalidSpec("limit-law trimming must lie in (0, 1/2)")


@dataclass
class OlsFit:
    coefficients: np.ndarray
    residuals: np.ndarray
    ssr: float
    rank: int
    extra: dict = field(default_factory=dict)


def ols_fit(X, y) -> OlsFit:
    """Minimum-norm least squares through a column-pivoted QR factorisation."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if y.shape[0] != n:
        raise InvalidData("X and y disagree in length")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise InvalidData("non-finite input to ols_fit")
    if n < k:
        raise Underdetermined(f"{n} observations for {k} coefficients")
    if k == 0:
        return OlsFit(np.empty(0), y.copy(), float(y @ y), 0)
    Q, R, piv = linalg.qr(X, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    tol = max(n, k) * np.finfo(float).eps * (d[0] if d.size else 0.0)
    rank = int(np.sum(d > tol))
    if rank == k:
        b = np.empty(k)
        b[piv] = linalg.solve_triangular(R, Q.T @ y)
    else:
        # rank-deficient: the pivoted QR only locates the rank, the SVD
        # solver returns the minimum-norm coefficients
        b = linalg.lstsq(X, y, cond=None, lapack_driver="gelsd")[0]
    resid = y - X @ b
    return OlsFit(b, resid, float(resid @ resid), rank)


def trimmed_range(T: int, k: int, trim: float) -> tuple[int, int]:
    """Admissible break indices ``[max(k, ceil(T trim)), floor(T (1 - trim))]``."""
    lo = max(k, int(np.ceil(T * trim - 1e-9)))
    hi = int(np.floor(T * (1 - trim) + 1e-9))
    return lo, hi


def build_design(data: TimeSeriesDataset, t_b: int, trim: float | None = None):
    """Design ``[D | Z | Z2]`` where ``Z2`` is ``Z`` with rows ``1..t_b`` zeroed.

    With ``trim`` given, ``t_b`` must lie in the trimmed range; otherwise
    any index in ``0..T`` is accepted.
    """
    T = data.T
    if trim is not None:
        lo, hi = trimmed_range(T, data.p + data.q, trim)
        if not lo <= t_b <= hi:
            raise OutOfRange(f"break index {t_b} outside [{lo}, {hi}]")
    elif not 0 <= t_b <= T:
        raise OutOfRange(f"break index {t_b} outside [0, {T}]")
    Z2 = data.Z.copy()
    Z2[:t_b] = 0.0
    return np.hstack([data.X, Z2])
