"""Least-squares estimation of a single break date.

The fast scan profiles out the full-sample block ``X = [D | Z]`` once
and updates the post-break cross products with reverse cumulative sums,
so every candidate costs ``O(p^2)`` after an ``O(T k^2)`` set-up.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .core import (
    DegenerateDesign,
    InvalidSpec,
    ModelSpec,
    OutOfRange,
    TimeSeriesDataset,
    build_design,
    ols_fit,
    trimmed_range,
)


@dataclass
class SsrProfile:
    candidates: np.ndarray
    ssr: np.ndarray
    q_stat: np.ndarray


@dataclass
class BreakEstimate:
    """Fitted single-break model.

    Attributes
    ----------
    t_hat : int
        Last pre-break observation (1-based count of regime-1 rows).
    lambda_hat : float
        ``t_hat / T``.
    beta_hat : ndarray
        Coefficients on ``[D | Z]``; the ``Z`` part is the regime-1 value.
    delta_hat : ndarray
        Post-break shift in the ``Z`` coefficients.
    residuals : ndarray
    profile : SsrProfile
    rank_deficient : bool
        Whether the refit at ``t_hat`` was rank deficient.
    predictable_coeffs : tuple or None
        ``(mu1, alpha1, mu2, alpha2)`` from the two-step estimator.
    zmat : ndarray or None
        Regressors whose shift ``delta_hat`` refers to, when they differ
        from ``data.Z`` (two-step estimator only).
    """

    t_hat: int
    lambda_hat: float
    beta_hat: np.ndarray
    delta_hat: np.ndarray
    residuals: np.ndarray
    profile: SsrProfile
    rank_deficient: bool = False
    predictable_coeffs: tuple | None = None
    zmat: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    @property
    def ssr(self) -> float:
        return float(self.residuals @ self.residuals)

    def shifting_regressors(self, data: TimeSeriesDataset) -> np.ndarray:
        return data.Z if self.zmat is None else self.zmat


def orth_basis(X):
    """Orthonormal basis of the column space of ``X`` (rank revealing)."""
    if X.shape[1] == 0:
        return X
    Q, R, _ = linalg.qr(X, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    tol = max(X.shape) * np.finfo(float).eps * d[0]
    return Q[:, d > tol]


def _batched_pinv_quad(A, g, scale):
    """``g' A^+ g`` and the rank of each symmetric ``A`` in a stack."""
    w, V = np.linalg.eigh(A)
    tol = 1e-10 * scale
    keep = w > tol
    c = np.einsum("nij,ni->nj", V, g)
    inv = np.where(keep, 1.0 / np.where(keep, w, 1.0), 0.0)
    return np.einsum("nj,nj->n", c * c, inv), keep.sum(axis=1)


def ssr_profile_fast(data: TimeSeriesDataset, lo: int, hi: int):
    """SSR and ``Q_T`` for every candidate in ``lo..hi``.

    Returns
    -------
    ssr, q_stat : ndarray
    deficient : ndarray of bool
        True where ``Z2' M Z2`` has rank below ``p``.
    """
    y, Z = data.y, data.Z
    Q = orth_basis(data.X)
    ytil = y - Q @ (Q.T @ y)
    ssr_x = float(ytil @ ytil)
    p = Z.shape[1]

    # suffix sums: entry i collects rows i..T-1, i.e. observations after a
    # break at index i
    def suffix(a):
        c = np.cumsum(a[::-1], axis=0)[::-1]
        return np.concatenate([c, np.zeros((1,) + a.shape[1:])], axis=0)

    zz = suffix(Z[:, :, None] * Z[:, None, :])
    P = suffix(Q[:, :, None] * Z[:, None, :])
    g = suffix(Z * ytil[:, None])
    idx = np.arange(lo, hi + 1)
    A = zz[idx] - np.einsum("nri,nrj->nij", P[idx], P[idx])
    A = 0.5 * (A + np.swapaxes(A, 1, 2))
    scale = max(float(np.trace(zz[0])), np.finfo(float).tiny)
    q_stat, rank = _batched_pinv_quad(A, g[idx], scale)
    ssr = np.maximum(ssr_x - q_stat, 0.0)
    return ssr, q_stat, rank < p


def ssr_profile_brute(data: TimeSeriesDataset, lo: int, hi: int):
    """Per-candidate OLS refit; the reference for :func:`ssr_profile_fast`."""
    base = ols_fit(data.X, data.y)
    ssr_x, rank_x = base.ssr, base.rank
    ssr = np.empty(hi - lo + 1)
    deficient = np.empty(hi - lo + 1, dtype=bool)
    for j, t_b in enumerate(range(lo, hi + 1)):
        fit = ols_fit(build_design(data, t_b), data.y)
        ssr[j] = fit.ssr
        deficient[j] = fit.rank < rank_x + data.p
    return ssr, ssr_x - ssr, deficient


def _refit(data, t_b, profile):
    fit = ols_fit(build_design(data, t_b), data.y)
    k = data.q + data.p
    return BreakEstimate(
        t_hat=int(t_b),
        lambda_hat=t_b / data.T,
        beta_hat=fit.coefficients[:k],
        delta_hat=fit.coefficients[k:],
        residuals=fit.residuals,
        profile=profile,
        rank_deficient=fit.rank < k + data.p,
    )


def scan_break(data: TimeSeriesDataset, spec: ModelSpec | None = None,
               brute_force: bool = False) -> BreakEstimate:
    """Least-squares break date over the trimmed candidate range.

    Parameters
    ----------
    data : TimeSeriesDataset
    spec : ModelSpec, optional
        Supplies the estimation trimming (default 0.15).
    brute_force : bool
        Refit a full OLS at every candidate instead of the cumulative
        update.  Slow; kept as a reference implementation.

    Returns
    -------
    BreakEstimate
        Ties in the SSR are resolved toward the smallest index.
    """
    spec = spec or ModelSpec()
    lo, hi = trimmed_range(data.T, data.p + data.q, spec.trim)
    if lo > hi:
        raise DegenerateDesign(f"empty candidate range [{lo}, {hi}]")
    prof = ssr_profile_brute if brute_force else ssr_profile_fast
    ssr, q_stat, deficient = prof(data, lo, hi)
    if np.all(deficient):
        raise DegenerateDesign("every candidate partition is rank deficient")
    profile = SsrProfile(np.arange(lo, hi + 1), ssr, q_stat)
    return _refit(data, lo + int(np.argmin(ssr)), profile)


def estimate_given_break(data: TimeSeriesDataset, spec: ModelSpec | None,
                         t_b: int) -> BreakEstimate:
    spec = spec or ModelSpec()
    lo, hi = trimmed_range(data.T, data.p + data.q, spec.trim)
    if not lo <= t_b <= hi:
        raise OutOfRange(f"break index {t_b} outside [{lo}, {hi}]")
    ssr, q_stat, _ = ssr_profile_brute(data, t_b, t_b)
    return _refit(data, t_b, SsrProfile(np.array([t_b]), ssr, q_stat))


def _find_predictable(data):
    """Locate the constant and the lagged-``y`` columns within ``[D | Z]``."""
    X = data.X
    const = lag = None
    for j in range(X.shape[1]):
        c = X[:, j]
        if const is None and np.all(c == c[0]) and c[0] != 0:
            const = j
        elif lag is None and np.array_equal(c[1:], data.y[:-1]):
            lag = j
    if const is None or lag is None:
        raise InvalidSpec("two-step estimation needs a constant and a lagged-y column")
    return const, lag


def two_step_predictable(data: TimeSeriesDataset,
                         spec: ModelSpec | None = None) -> BreakEstimate:
    """Two-step estimator for a model with a constant and a lagged ``y``.

    Step one fits regime-specific intercepts and autoregressive slopes,
    ``y_k = mu_i + alpha_i y_{k-1} + u_k``, at each candidate.  Step two
    regresses the de-drifted series on whatever regressors remain, the
    ``Z`` members with regime-specific coefficients.  The candidate with
    the smallest second-step SSR is the estimate.

    Coefficients are reported on the observed scale: ``alpha_i`` is the
    slope on ``y_{k-1}``, so the increment-form coefficient is
    ``(alpha_i - 1) / h``.
    """
    spec = spec or ModelSpec(has_predictable=True)
    const, lag = _find_predictable(data)
    X = data.X
    q = data.q
    drift = X[:, [const, lag]]
    rest = [j for j in range(X.shape[1]) if j not in (const, lag)]
    rest_d = [j for j in rest if j < q]
    rest_z = [j for j in rest if j >= q]
    D_rest, Z_rest = X[:, rest_d], X[:, rest_z]
    zmat = np.hstack([drift, Z_rest])
    p_tot = zmat.shape[1]
    lo, hi = trimmed_range(data.T, max(data.p + data.q, p_tot + len(rest_d)), spec.trim)
    step1 = TimeSeriesDataset(data.y, None, drift, data.N)

    if not rest:
        ssr, q_stat, deficient = ssr_profile_fast(step1, lo, hi)
    else:
        ssr = np.empty(hi - lo + 1)
        deficient = np.zeros(hi - lo + 1, dtype=bool)
        for j, t_b in enumerate(range(lo, hi + 1)):
            r, _ = _drift_residual(data.y, drift, t_b)
            fit = ols_fit(_rest_design(D_rest, Z_rest, t_b), r)
            ssr[j] = fit.ssr
        q_stat = ols_fit(np.hstack([drift, D_rest, Z_rest]), data.y).ssr - ssr
    if np.all(deficient):
        raise DegenerateDesign("every candidate partition is rank deficient")
    t_b = lo + int(np.argmin(ssr))
    profile = SsrProfile(np.arange(lo, hi + 1), ssr, q_stat)

    r, (c1, c2) = _drift_residual(data.y, drift, t_b)
    fit = ols_fit(_rest_design(D_rest, Z_rest, t_b), r)
    nd, nz = len(rest_d), len(rest_z)
    b_d = fit.coefficients[:nd]
    b_z1 = fit.coefficients[nd:nd + nz]
    d_z = fit.coefficients[nd + nz:]
    beta = np.empty(X.shape[1])
    beta[const], beta[lag] = c1
    beta[rest_d] = b_d
    beta[rest_z] = b_z1
    delta = np.concatenate([c2 - c1, d_z])
    return BreakEstimate(
        t_hat=int(t_b),
        lambda_hat=t_b / data.T,
        beta_hat=beta,
        delta_hat=delta,
        residuals=fit.residuals,
        profile=profile,
        predictable_coeffs=(float(c1[0]), float(c1[1]), float(c2[0]), float(c2[1])),
        zmat=zmat,
    )


def _drift_residual(y, drift, t_b):
    """Residual of ``y`` after removing regime-wise drift fits."""
    f1 = ols_fit(drift[:t_b], y[:t_b])
    f2 = ols_fit(drift[t_b:], y[t_b:])
    return np.concatenate([f1.residuals, f2.residuals]), (f1.coefficients, f2.coefficients)


def _rest_design(D_rest, Z_rest, t_b):
    Z2 = Z_rest.copy()
    Z2[:t_b] = 0.0
    return np.hstack([D_rest, Z_rest, Z2])
