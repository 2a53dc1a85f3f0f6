"""Regenerate ``src/breakdate/_constants.py``.

Argmax quantiles come from the closed-form CDF and are cross-checked by
a wide-domain simulation.  Sup-Wald critical values are quantiles of the
simulated sup of the squared standardised Brownian bridge.

Usage::

    python3 scripts/gen_constants.py [--paths 1000000] [--grid 10000]
"""

import argparse
import pathlib
import time

import numpy as np

from breakdate import _backend
from breakdate.limitsim import LimitSimConfig, argmax_cdf, argmax_quantile, simulate_stationary, stream_key
from breakdate.plugin import PluginParams

LEVELS = (0.10, 0.05, 0.01)
TRIMS = (0.05, 0.10, 0.15, 0.20, 0.25)
OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "breakdate" / "_constants.py"


def bridge_ranges(trims, n_grid):
    lo = np.array([int(np.ceil(t * n_grid - 1e-9)) - 1 for t in trims], dtype=np.int64)
    hi = np.array([int(np.floor((1 - t) * n_grid + 1e-9)) - 1 for t in trims], dtype=np.int64)
    return lo, hi


def supw_quantiles(p, trims, n_paths, n_grid, seed, chunk=50000):
    k0, k1 = stream_key(seed)
    lo, hi = bridge_ranges(trims, n_grid)
    sups = np.empty((n_paths, len(trims)))
    for s in range(0, n_paths, chunk):
        m = min(chunk, n_paths - s)
        sups[s:s + m] = _backend.kernels.bridge_sup(k0, k1, s, m, n_grid, p, lo, hi)
    return {(t, lev): float(np.quantile(sups[:, r], 1 - lev))
            for r, t in enumerate(trims) for lev in LEVELS}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=1_000_000)
    ap.add_argument("--grid", type=int, default=10_000)
    ap.add_argument("--paths-multi", type=int, default=200_000,
                    help="paths for p = 2, 3")
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()

    bai = {round(1 - a / 2, 6): argmax_quantile(1 - a / 2) for a in LEVELS}
    # simulation cross-check on a domain wide enough to be untruncated
    s = 200 / 0.45
    par = PluginParams(1.0, 1.0, s, s, 1.0, 0.5, h=1.0, N=1.0, t_hat=50, T=100)
    d = simulate_stationary(par, LimitSimConfig(n_draws=100_000, n_grid=8000, seed=args.seed))
    for prob, q in bai.items():
        print(f"argmax q{prob}: closed form {q:.4f}, simulated {np.quantile(d.draws, prob):.4f}")
    for x in (2.0, 7.7, 15.0):
        print(f"argmax F({x}): closed form {float(argmax_cdf(x)):.4f}, "
              f"simulated {np.mean(d.draws <= x):.4f}")

    supw = {}
    for p in (1, 2, 3):
        n = args.paths if p == 1 else args.paths_multi
        t0 = time.time()
        for (t, lev), v in supw_quantiles(p, TRIMS, n, args.grid, args.seed + p).items():
            supw[(p, t, lev)] = v
        print(f"p={p}: {n} paths in {time.time() - t0:.0f}s, 5%/0.15 = {supw[(p, 0.15, 0.05)]:.3f}")

    lines = [
        '"""Generated by scripts/gen_constants.py; do not edit by hand."""',
        "",
        f"# sup-Wald: {args.paths} paths (p=1), {args.paths_multi} (p=2,3), "
        f"{args.grid}-point grid, seed {args.seed}",
        "",
        "BAI_QUANTILES = {",
        *[f"    {k!r}: {v!r}," for k, v in sorted(bai.items())],
        "}",
        "",
        "SUPW_CRITICAL = {",
        *[f"    {k!r}: {round(v, 4)!r}," for k, v in sorted(supw.items())],
        "}",
        "",
    ]
    OUT.write_text("\n".join(lines))
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
