"""Monte Carlo evaluation of break-date confidence sets.

Each replication is seeded from ``(cell seed, replication index)`` so a
cell gives the same aggregates however its replications are split
across worker processes.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from ._backend import kernels
from ._constants import SUPW_CRITICAL
from .breakscan import orth_basis, scan_break, ssr_profile_fast, two_step_predictable
from .confsets import bai_confidence_interval, default_edge, full_range_set, hdr_confidence_set
from .core import (
    BreakdateError,
    DegenerateDesign,
    ModelSpec,
    TimeSeriesDataset,
    Unsupported,
    WeakIdentification,
    trimmed_range,
)
from .dgp import HETERO, PREDICTABLE, SERIAL, DgpSpec, generate
from .limitsim import LimitSimConfig, simulate_general, simulate_stationary, stream_key
from .plugin import compute_plugins, lrv_qs_prewhitened

METHODS = ("hdr", "bai")
GENERAL_MODE = ("M9", "M10")
LEVELS = (0.10, 0.05, 0.01)


def variance_kind(model: str) -> str:
    """Variance estimator used for ``model``: ``iid``, ``hc`` or ``lrv``."""
    if model in SERIAL:
        return "lrv"
    if model in HETERO:
        return "hc"
    return "iid"


# -- sup-Wald -----------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _simulated_critical(level, trim, p, n_paths=100_000, n_grid=2000, seed=7):
    lo = max(int(math.ceil(trim * n_grid - 1e-9)) - 1, 0)
    hi = min(int(math.floor((1 - trim) * n_grid + 1e-9)) - 1, n_grid - 2)
    if lo > hi:
        lo = hi = n_grid // 2 - 1
    k0, k1 = stream_key(seed + p)
    sups = kernels.bridge_sup(k0, k1, 0, n_paths, n_grid, p,
                              np.array([lo], dtype=np.int64), np.array([hi], dtype=np.int64))
    return float(np.quantile(sups[:, 0], 1 - level))


def sup_wald_critical_value(level: float, trim: float, p: int) -> float:
    """Asymptotic critical value of the sup-Wald test for one break.

    Cached values come from ``scripts/gen_constants.py``; other trims are
    simulated on first use and memoised.

    Raises
    ------
    Unsupported
        For levels other than 0.10, 0.05 and 0.01.
    """
    level = round(float(level), 6)
    if level not in LEVELS:
        raise Unsupported(f"level {level} not in {LEVELS}")
    if not 0 < trim < 0.5:
        raise Unsupported("trim must lie in (0, 1/2)")
    key = (int(p), round(float(trim), 6), level)
    if key in SUPW_CRITICAL:
        return SUPW_CRITICAL[key]
    return _simulated_critical(level, key[1], key[0])


def wald_profile(data: TimeSeriesDataset, trim: float = 0.15, variance: str = "iid"):
    """Wald statistics for ``delta = 0`` at every trimmed candidate.

    Parameters
    ----------
    data : TimeSeriesDataset
    trim : float
    variance : {"iid", "hc", "lrv"}
        ``hc`` is the White form; ``lrv`` (``p = 1`` only) uses the
        prewhitened QS long-run variance of the score.
    """
    lo, hi = trimmed_range(data.T, data.p + data.q, trim)
    if lo > hi:
        raise DegenerateDesign("empty candidate range")
    ssr, q_stat, deficient = ssr_profile_fast(data, lo, hi)
    if np.all(deficient):
        raise DegenerateDesign("every candidate partition is rank deficient")
    T, k, p = data.T, data.q + data.p, data.p
    if variance == "iid":
        with np.errstate(divide="ignore", invalid="ignore"):
            w = q_stat / (ssr / (T - k - p))
        return np.where(deficient, 0.0, np.nan_to_num(w, posinf=0.0))
    if variance == "lrv" and p != 1:
        raise Unsupported("long-run variance Wald statistic needs p = 1")
    if variance not in ("hc", "lrv"):
        raise ValueError(f"unknown variance {variance!r}")
    Q = orth_basis(data.X)
    out = np.zeros(hi - lo + 1)
    for j, t_b in enumerate(range(lo, hi + 1)):
        if deficient[j]:
            continue
        Z2 = data.Z.copy()
        Z2[:t_b] = 0.0
        M = Z2 - Q @ (Q.T @ Z2)
        A = M.T @ M
        d = np.linalg.solve(A, M.T @ data.y)
        e = data.y - Q @ (Q.T @ data.y) - M @ d
        if variance == "hc":
            S = (M * (e * e)[:, None]).T @ M
        else:
            S = np.array([[T * lrv_qs_prewhitened(M[:, 0] * e)]])
        V = np.linalg.solve(A, np.linalg.solve(A, S).T)
        try:
            out[j] = float(d @ np.linalg.solve(V, d))
        except np.linalg.LinAlgError:
            out[j] = 0.0
    return out


def sup_wald(data: TimeSeriesDataset, trim: float = 0.15, variance: str = "iid",
             level: float = 0.05):
    """Sup-Wald statistic and whether it rejects at ``level``.

    Returns
    -------
    statistic : float
    reject : bool
    """
    stat = float(np.max(wald_profile(data, trim, variance)))
    return stat, stat > sup_wald_critical_value(level, trim, data.p)


# -- cells --------------------------------------------------------------------

@dataclass
class McCell:
    """One table cell: a design, the methods evaluated on it and results."""

    spec: DgpSpec
    methods: tuple = METHODS
    reps: int = 2000
    alpha: float = 0.05
    n_draws: int = 2000
    n_grid: int = 1000
    pi: float = 0.05
    trim: float = 0.15
    units: str = "rho"
    coverage: dict = field(default_factory=dict)
    avg_length: dict = field(default_factory=dict)
    supw_rejection: float | None = None
    failures: int = 0
    weak: int = 0

    def key(self) -> tuple:
        s = self.spec
        return (s.model, s.T, s.lambda0, s.delta0, self.reps, s.seed)

    def rows(self) -> list[dict]:
        s = self.spec
        base = dict(model=s.model, T=s.T, lambda0=s.lambda0, delta0=s.delta0,
                    reps=self.reps, seed=s.seed, supw_rejection=self.supw_rejection,
                    failures=self.failures, weak=self.weak)
        return [dict(base, method=m, coverage=self.coverage.get(m),
                     avg_length=self.avg_length.get(m)) for m in self.methods]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spec"] = asdict(self.spec)
        return d


def replication_seeds(seed: int, rep: int) -> tuple[int, int]:
    """Independent seeds for the data and the limit-law draws of one replication."""
    a, b = np.random.SeedSequence([int(seed), int(rep)]).generate_state(2, np.uint32)
    return int(a), int(b)


def one_replication(cell: McCell, rep: int, scale_y: float = 1.0) -> dict:
    """Run replication ``rep`` of ``cell``.

    Returns a dict with per-method ``cover`` and ``length``, ``reject``,
    and ``weak`` / ``failed`` flags.  ``scale_y`` multiplies ``y``
    before estimation (used to check scale invariance).
    """
    spec = cell.spec
    s_data, s_sim = replication_seeds(spec.seed, rep)
    sample = generate(spec.replicate(s_data))
    data = sample.data if scale_y == 1.0 else sample.data.scaled(scale_y)
    out = {"rep": rep, "weak": False, "failed": False}
    mspec = ModelSpec(trim=cell.trim, pi=cell.pi, has_predictable=spec.model in PREDICTABLE)
    kind = variance_kind(spec.model)
    lrv = kind == "lrv"
    try:
        _, out["reject"] = sup_wald(data, cell.trim, kind)
        est = two_step_predictable(data, mspec) if spec.model in PREDICTABLE else scan_break(data, mspec)
    except BreakdateError:
        out["failed"] = True
        return out
    edge = default_edge(est)
    sim = LimitSimConfig(n_draws=cell.n_draws, n_grid=cell.n_grid, pi=cell.pi,
                         seed=s_sim, units=cell.units)
    for m in cell.methods:
        try:
            if m == "bai":
                cs = bai_confidence_interval(est, data, cell.alpha, lrv=lrv, edge=edge)
            else:
                params = compute_plugins(data, est, lrv=lrv)
                if spec.model in GENERAL_MODE:
                    draws = simulate_general(data, est, sim, params=params, lrv=lrv)
                else:
                    draws = simulate_stationary(params, sim)
                cs = hdr_confidence_set(draws, est, params, cell.alpha, data.T, edge=edge)
        except WeakIdentification:
            out["weak"] = True
            cs = full_range_set(data.T, edge, 1 - cell.alpha, m)
        except BreakdateError:
            out["failed"] = True
            return out
        out[m] = (sample.t_b0 in cs, cs.length)
    return out


def _run_chunk(args):
    cell, reps = args
    return [one_replication(cell, r) for r in reps]


def run_cell(cell: McCell, rng=None, workers: int = 1) -> McCell:
    """Evaluate coverage, mean length and sup-Wald rejection for a cell.

    Parameters
    ----------
    cell : McCell
        Request; result fields are filled in place and returned.
    rng : int, optional
        Overrides ``cell.spec.seed``.
    workers : int
        Worker processes.  Results do not depend on this.
    """
    if cell.reps < 1:
        raise ValueError("reps must be positive")
    if rng is not None:
        cell.spec = cell.spec.replicate(int(rng))
    reps = list(range(cell.reps))
    if workers <= 1:
        results = [one_replication(cell, r) for r in reps]
    else:
        n_chunks = workers * 4
        chunks = [reps[i::n_chunks] for i in range(n_chunks)]
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_run_chunk, [(cell, c) for c in chunks if c]))
        results = sorted((r for part in parts for r in part), key=lambda r: r["rep"])
    ok = [r for r in results if not r["failed"]]
    cell.failures = len(results) - len(ok)
    cell.weak = sum(r["weak"] for r in ok)
    for m in cell.methods:
        cov = [r[m][0] for r in ok]
        lens = [r[m][1] for r in ok]
        cell.coverage[m] = float(np.mean(cov)) if ok else float("nan")
        cell.avg_length[m] = float(np.mean(lens)) if ok else float("nan")
    cell.supw_rejection = float(np.mean([r["reject"] for r in ok])) if ok else float("nan")
    return cell


def null_rejection_rate(model: str = "M1", reps: int = 2000, T: int = 100, seed: int = 0,
                        trim: float = 0.15, level: float = 0.05) -> float:
    """Sup-Wald rejection frequency with no break (``delta0 = 0``)."""
    spec = DgpSpec(model, T, 0.5, 0.0, seed)
    kind = variance_kind(model)
    hits = 0
    for r in range(reps):
        s, _ = replication_seeds(seed, r)
        hits += sup_wald(generate(spec.replicate(s)).data, trim, kind, level)[1]
    return hits / reps


def chi2_limit(p: int, level: float) -> float:
    """Critical value the sup-Wald value tends to as the trim approaches 1/2."""
    return float(stats.chi2.ppf(1 - level, p))
