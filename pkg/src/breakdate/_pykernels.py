"""Pure numpy fallback for the compiled kernels.

Produces the same Philox word streams as the compiled module; the
normals agree up to the last-ulp behaviour of the vectorized
``log``/``sin``/``cos`` used by numpy.
"""

import numpy as np

_BLOCK = 256


def _normals(k0, k1, draws, m):
    """Box-Muller normals, ``m`` per draw, from per-draw Philox streams."""
    key = np.array([k0, k1], dtype=np.uint64)
    n_words = 2 * ((m + 1) // 2)
    raw = np.empty((len(draws), n_words), dtype=np.uint64)
    for row, i in enumerate(draws):
        ctr = np.array([0, i, 0, 0], dtype=np.uint64)
        raw[row] = np.random.Philox(key=key, counter=ctr).random_raw(n_words)
    u = ((raw >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * 2.0**-53
    r = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    theta = 2.0 * np.pi * u[:, 1::2]
    z = np.empty((len(draws), n_words))
    z[:, 0::2] = r * np.cos(theta)
    z[:, 1::2] = r * np.sin(theta)
    return z[:, :m]


def walk_argmax(k0, k1, first, n_draws, mu_l, sd_l, pos_l, mu_r, sd_r, pos_r):
    nl, nr = len(mu_l), len(mu_r)
    out = np.empty(n_draws)
    for start in range(0, n_draws, _BLOCK):
        stop = min(start + _BLOCK, n_draws)
        z = _normals(k0, k1, range(first + start, first + stop), nl + nr)
        best = np.zeros(stop - start)
        arg = np.zeros(stop - start)
        if nl:
            left = np.cumsum(mu_l + sd_l * z[:, :nl], axis=1)
            j = np.argmax(left, axis=1)
            top = left[np.arange(len(j)), j]
            hit = top > 0.0
            best[hit] = top[hit]
            arg[hit] = pos_l[j[hit]]
        if nr:
            right = np.cumsum(mu_r + sd_r * z[:, nl:], axis=1)
            j = np.argmax(right, axis=1)
            top = right[np.arange(len(j)), j]
            hit = (top > best) | ((top == best) & (pos_r[j] < -arg))
            arg[hit] = pos_r[j[hit]]
        out[start:stop] = arg
    return out


def bridge_sup(k0, k1, first, n_draws, n_grid, p, i_lo, i_hi):
    out = np.empty((n_draws, len(i_lo)))
    lam = np.arange(1, n_grid) / n_grid
    block = max(1, _BLOCK * 2000 // max(n_grid * p, 1))
    for start in range(0, n_draws, block):
        stop = min(start + block, n_draws)
        z = _normals(k0, k1, range(first + start, first + stop), n_grid * p)
        w = np.cumsum(z.reshape(stop - start, p, n_grid) / np.sqrt(n_grid), axis=2)
        b = w[:, :, :-1] - lam * w[:, :, -1:]
        stat = (b**2).sum(axis=1) / (lam * (1 - lam))
        for r, (a, c) in enumerate(zip(i_lo, i_hi)):
            out[start:stop, r] = stat[:, a:c + 1].max(axis=1)
    return out
