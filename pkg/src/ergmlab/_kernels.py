"""Compiled inner loops for the Glauber and edge-swap chains.

The kernels handle models whose terms are edges, two-stars and triangles, for
which the change statistic of pair (i, j) is

    c_edge + c_star * (d_i' + d_j') + c_tri * |N(i) & N(j)|

with d' the degree excluding the pair itself.  State is mutated in place:
``bits`` (n x W uint64), ``deg`` (int64), ``counts`` = [E, V, T] (int64).
"""

import math

import numba
import numpy as np


@numba.njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@numba.njit(cache=True, inline="always")
def _common(bits, i, j):
    c = 0
    for w in range(bits.shape[1]):
        c += _popcount(bits[i, w] & bits[j, w])
    return np.int64(c)


@numba.njit(cache=True, inline="always")
def _has(bits, i, j):
    return (bits[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1)


@numba.njit(cache=True, inline="always")
def _toggle(bits, deg, i, j, step):
    bits[i, j >> 6] ^= np.uint64(1) << np.uint64(j & 63)
    bits[j, i >> 6] ^= np.uint64(1) << np.uint64(i & 63)
    deg[i] += step
    deg[j] += step


@numba.njit(cache=True, inline="always")
def _logistic(h):
    if h >= 0.0:
        return 1.0 / (1.0 + math.exp(-h))
    z = math.exp(h)
    return z / (1.0 + z)


@numba.njit(cache=True)
def glauber_steps(bits, deg, counts, coef, pair_i, pair_j, n_steps, rng):
    """``n_steps`` heat-bath updates of uniformly chosen pairs."""
    npairs = pair_i.shape[0]
    c_edge, c_star, c_tri = coef[0], coef[1], coef[2]
    for _ in range(n_steps):
        idx = rng.integers(0, npairs)
        u = rng.random()
        i = pair_i[idx]
        j = pair_j[idx]
        y = np.int64(_has(bits, i, j))
        dsum = deg[i] + deg[j] - 2 * y
        cn = _common(bits, i, j)
        h = c_edge + c_star * dsum + c_tri * cn
        new = 1 if u < _logistic(h) else 0
        if new != y:
            if new == 1:
                counts[0] += 1
                counts[1] += dsum
                counts[2] += cn
                _toggle(bits, deg, i, j, 1)
            else:
                counts[0] -= 1
                counts[1] -= dsum
                counts[2] -= cn
                _toggle(bits, deg, i, j, -1)


@numba.njit(cache=True)
def swap_steps(bits, deg, counts, coef, pair_i, pair_j, present, absent, n_steps, rng):
    """Metropolis moves of one edge from a present pair to an absent pair.

    ``present``/``absent`` hold pair indices; an accepted move exchanges the
    two entries in place, so the edge count never changes.  Returns the
    number of accepted moves.
    """
    k = present.shape[0]
    m = absent.shape[0]
    c_star, c_tri = coef[1], coef[2]
    accepted = 0
    if k == 0 or m == 0:
        return accepted
    for _ in range(n_steps):
        a = rng.integers(0, k)
        b = rng.integers(0, m)
        u = rng.random()
        f = present[a]
        hh = absent[b]
        fi, fj = pair_i[f], pair_j[f]
        hi, hj = pair_i[hh], pair_j[hh]
        # remove f, then evaluate both change statistics in g - f
        _toggle(bits, deg, fi, fj, -1)
        ds_f = deg[fi] + deg[fj]
        cn_f = _common(bits, fi, fj)
        ds_h = deg[hi] + deg[hj]
        cn_h = _common(bits, hi, hj)
        dh = c_star * (ds_h - ds_f) + c_tri * (cn_h - cn_f)
        if dh >= 0.0 or u < math.exp(dh):
            _toggle(bits, deg, hi, hj, 1)
            counts[1] += ds_h - ds_f
            counts[2] += cn_h - cn_f
            present[a] = hh
            absent[b] = f
            accepted += 1
        else:
            _toggle(bits, deg, fi, fj, 1)
    return accepted
