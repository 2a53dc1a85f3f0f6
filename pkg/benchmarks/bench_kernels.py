"""Compiled vs numpy kernels on typical workloads.

    python benchmarks/bench_kernels.py [--repeat 3]

Both backends consume the same random streams, so the check column
reports the largest absolute difference between their outputs.
"""

import argparse
import time

import numpy as np

from breakdate import _pykernels
from breakdate.limitsim import stream_key, stationary_domain, stationary_paths

try:
    from breakdate import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def walk_case(n_draws, n_grid):
    lo, hi = stationary_domain(0.5, 0.5, 100.0, 0.05)
    left, right = stationary_paths(lo, hi, 1.0, 1.0, n_grid)
    arrs = [np.ascontiguousarray(a, dtype=float) for a in (*left, *right)]
    k0, k1 = stream_key(1)
    return "walk_argmax", (k0, k1, 0, n_draws, *arrs)


def bridge_case(n_paths, n_grid):
    k0, k1 = stream_key(2)
    lo = np.array([int(0.15 * n_grid) - 1], dtype=np.int64)
    hi = np.array([int(0.85 * n_grid) - 1], dtype=np.int64)
    return "bridge_sup", (k0, k1, 0, n_paths, n_grid, 1, lo, hi)


def best_of(fn, args, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cases = [walk_case(2000, 1000), walk_case(10000, 2000), bridge_case(2000, 2000)]
    print(f"{'kernel':<12} {'size':>12} {'compiled s':>11} {'python s':>10} {'speedup':>8} {'max diff':>9}")
    for name, a in cases:
        size = f"{a[3]}x{a[4] if name == 'bridge_sup' else a[4].shape[0] + a[7].shape[0]}"
        tp, op = best_of(getattr(_pykernels, name), a, args.repeat)
        if _kernels is None:
            print(f"{name:<12} {size:>12} {'-':>11} {tp:>10.3f}")
            continue
        tc, oc = best_of(getattr(_kernels, name), a, args.repeat)
        diff = float(np.max(np.abs(np.asarray(oc, float) - np.asarray(op, float))))
        print(f"{name:<12} {size:>12} {tc:>11.3f} {tp:>10.3f} {tp / tc:>8.1f} {diff:>9.1e}")


if __name__ == "__main__":
    main()
