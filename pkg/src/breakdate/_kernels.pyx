# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled argmax kernel for two-sided drifted random walks.

Each draw owns a Philox4x64-10 stream keyed by the simulation seed with
the draw index in the second counter word, so draw ``i`` is the same
whichever block or worker computes it.  The word sequence is identical
to ``numpy.random.Philox(key=key, counter=[0, i, 0, 0]).random_raw``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, sin, cos, M_PI
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef extern from *:
    """
    static inline uint64_t mulhilo64(uint64_t a, uint64_t b, uint64_t* hi) {
        unsigned __int128 p = (unsigned __int128)a * b;
        *hi = (uint64_t)(p >> 64);
        return (uint64_t)p;
    }
    """
    uint64_t mulhilo64(uint64_t a, uint64_t b, uint64_t* hi) noexcept nogil

cdef uint64_t M0 = 0xD2E7470EE14C6C93ULL
cdef uint64_t M1 = 0xCA5A826395121157ULL
cdef uint64_t W0 = 0x9E3779B97F4A7C15ULL
cdef uint64_t W1 = 0xBB67AE8584CAA73BULL
cdef double TWO_M53 = 1.0 / 9007199254740992.0


cdef inline void philox_block(uint64_t c0, uint64_t c1, uint64_t k0,
                              uint64_t k1, uint64_t* out) noexcept nogil:
    cdef uint64_t x0 = c0, x1 = c1, x2 = 0, x3 = 0
    cdef uint64_t hi0, lo0, hi1, lo1
    cdef int r
    for r in range(10):
        lo0 = mulhilo64(M0, x0, &hi0)
        lo1 = mulhilo64(M1, x2, &hi1)
        x0 = hi1 ^ x1 ^ k0
        x1 = lo1
        x2 = hi0 ^ x3 ^ k1
        x3 = lo0
        k0 += W0
        k1 += W1
    out[0] = x0
    out[1] = x1
    out[2] = x2
    out[3] = x3


cdef struct Stream:
    uint64_t k0
    uint64_t k1
    uint64_t draw
    uint64_t block
    uint64_t words[4]
    int used
    double spare
    int has_spare


cdef inline uint64_t next_word(Stream* s) noexcept nogil:
    if s.used == 4:
        s.block += 1
        philox_block(s.block, s.draw, s.k0, s.k1, s.words)
        s.used = 0
    s.used += 1
    return s.words[s.used - 1]


cdef inline double next_normal(Stream* s) noexcept nogil:
    cdef double u1, u2, r
    if s.has_spare:
        s.has_spare = 0
        return s.spare
    u1 = (<double>((next_word(s) >> 11) + 1)) * TWO_M53
    u2 = (<double>((next_word(s) >> 11) + 1)) * TWO_M53
    r = sqrt(-2.0 * log(u1))
    s.spare = r * sin(2.0 * M_PI * u2)
    s.has_spare = 1
    return r * cos(2.0 * M_PI * u2)


def walk_argmax(uint64_t k0, uint64_t k1, int64_t first, int64_t n_draws,
                const double[::1] mu_l, const double[::1] sd_l,
                const double[::1] pos_l, const double[::1] mu_r,
                const double[::1] sd_r, const double[::1] pos_r):
    """Grid location of the maximum of each simulated two-sided walk.

    Step ``j`` on the left adds ``mu_l[j] + sd_l[j] * z`` and lands at
    ``pos_l[j]``; the right side is analogous.  The walk starts at 0,
    which is itself a candidate, and ties go to the point nearer 0.
    """
    cdef Py_ssize_t nl = mu_l.shape[0], nr = mu_r.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] res = np.empty(n_draws)
    cdef double[::1] out = res
    cdef Stream s
    cdef Py_ssize_t d, j
    cdef double v, best, arg
    with nogil:
        for d in range(n_draws):
            s.k0 = k0
            s.k1 = k1
            s.draw = <uint64_t>(first + d)
            s.block = 0
            s.used = 4
            s.has_spare = 0
            best = 0.0
            arg = 0.0
            v = 0.0
            for j in range(nl):
                v = v + (mu_l[j] + sd_l[j] * next_normal(&s))
                if v > best:
                    best = v
                    arg = pos_l[j]
            v = 0.0
            for j in range(nr):
                v = v + (mu_r[j] + sd_r[j] * next_normal(&s))
                if v > best or (v == best and pos_r[j] < -arg):
                    best = v
                    arg = pos_r[j]
            out[d] = arg
    return res


def bridge_sup(uint64_t k0, uint64_t k1, int64_t first, int64_t n_draws,
               int64_t n_grid, int64_t p, const int64_t[::1] i_lo,
               const int64_t[::1] i_hi):
    """Sup of ``|B(l)|^2 / (l (1 - l))`` over each index range ``i_lo[r]..i_hi[r]``.

    ``B`` is a ``p``-dimensional Brownian bridge built from ``n_grid``
    Gaussian increments per dimension, sampled at ``l = (j + 1) / n_grid``.
    Returns an ``(n_draws, n_ranges)`` array.
    """
    cdef Py_ssize_t nr = i_lo.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] res = np.full((n_draws, nr), -1.0)
    cdef double[:, ::1] out = res
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wbuf = np.empty(n_grid * p)
    cdef double[::1] w = wbuf
    cdef Stream s
    cdef Py_ssize_t d, j, c, r
    cdef double sd = 1.0 / sqrt(<double>n_grid), acc, b, lam, stat
    with nogil:
        for d in range(n_draws):
            s.k0 = k0
            s.k1 = k1
            s.draw = <uint64_t>(first + d)
            s.block = 0
            s.used = 4
            s.has_spare = 0
            for c in range(p):
                acc = 0.0
                for j in range(n_grid):
                    acc = acc + sd * next_normal(&s)
                    w[c * n_grid + j] = acc
            for j in range(n_grid - 1):
                lam = (j + 1.0) / n_grid
                stat = 0.0
                for c in range(p):
                    b = w[c * n_grid + j] - lam * w[c * n_grid + n_grid - 1]
                    stat = stat + b * b
                stat = stat / (lam * (1.0 - lam))
                for r in range(nr):
                    if i_lo[r] <= j <= i_hi[r] and stat > out[d, r]:
                        out[d, r] = stat
    return res
