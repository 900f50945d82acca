"""Numba kernels.  Rows are independent, so ``prange`` over rows keeps every
output entry's accumulation order fixed regardless of the thread count."""

from __future__ import annotations

import os

import numba
import numpy as np
from numba import njit, prange

from ._tables import binomial_table, mask_directions, sparse_lines

NAME = "numba"

# tbb in this ecosystem is often too old and warns on first parallel launch
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "omp"
_CHUNK = 256


@njit(cache=True, inline="always")
def _rank(c, n, n_items, binom):
    r = 0
    prev = -1
    for i in range(n):
        r += binom[n_items - prev - 1, n - i] - binom[n_items - c[i], n - i]
        prev = c[i]
    return r


@njit(parallel=True, cache=True)
def _rank_rows(configs, n_items, binom):
    out = np.empty(configs.shape[0], dtype=np.int64)
    n = configs.shape[1]
    for b in prange(configs.shape[0]):
        out[b] = _rank(configs[b], n, n_items, binom)
    return out


def rank_configs(configs: np.ndarray, n_items: int) -> np.ndarray:
    configs = np.ascontiguousarray(configs, dtype=np.int64)
    n = configs.shape[1]
    return _rank_rows(configs, n_items, binomial_table(n_items, n))


@njit(cache=True)
def _groups(c, n, m, gsite, gmask, gstart):
    ng = 0
    i = 0
    while i < n:
        s = c[i] // m
        mask = 0
        gstart[ng] = i
        while i < n and c[i] // m == s:
            mask |= 1 << (c[i] % m)
            i += 1
        gsite[ng] = s
        gmask[ng] = mask
        ng += 1
    return ng


@njit(parallel=True, cache=True)
def _row_counts(basis, m, rptr):
    n_rows, n = basis.shape
    counts = np.empty(n_rows, dtype=np.int64)
    n_chunks = (n_rows + _CHUNK - 1) // _CHUNK
    for ch in prange(n_chunks):
        gsite = np.empty(n, dtype=np.int64)
        gmask = np.empty(n, dtype=np.int64)
        gstart = np.empty(n, dtype=np.int64)
        for i in range(ch * _CHUNK, min(n_rows, (ch + 1) * _CHUNK)):
            ng = _groups(basis[i], n, m, gsite, gmask, gstart)
            cnt = 1
            for g in range(ng):
                cnt *= rptr[gmask[g] + 1] - rptr[gmask[g]]
            counts[i] = cnt
    return counts


@njit(parallel=True, cache=True)
def _fill_rows(basis, m, inv_adv, rptr, rmask, ramp, dirtab, binom, indptr, indices, data):
    n_rows, n = basis.shape
    n_items = inv_adv.size
    n_chunks = (n_rows + _CHUNK - 1) // _CHUNK
    for ch in prange(n_chunks):
        gsite = np.empty(n, dtype=np.int64)
        gmask = np.empty(n, dtype=np.int64)
        gstart = np.empty(n, dtype=np.int64)
        digit = np.empty(n, dtype=np.int64)
        pre = np.empty(n, dtype=np.int64)
        for i in range(ch * _CHUNK, min(n_rows, (ch + 1) * _CHUNK)):
            ng = _groups(basis[i], n, m, gsite, gmask, gstart)
            for g in range(ng):
                digit[g] = 0
            base = indptr[i]
            end = indptr[i + 1]
            for e in range(base, end):
                amp = 1.0 + 0.0j
                for g in range(ng):
                    k = rptr[gmask[g]] + digit[g]
                    cm = rmask[k]
                    amp *= ramp[k]
                    u = 0
                    while u < m and dirtab[cm, u] >= 0:
                        pre[gstart[g] + u] = gsite[g] * m + dirtab[cm, u]
                        u += 1
                for t in range(n):
                    pre[t] = inv_adv[pre[t]]
                # insertion sort; n is small
                for t in range(1, n):
                    v = pre[t]
                    s = t - 1
                    while s >= 0 and pre[s] > v:
                        pre[s + 1] = pre[s]
                        s -= 1
                    pre[s + 1] = v
                indices[e] = _rank(pre, n, n_items, binom)
                data[e] = amp
                # mixed-radix increment, last group fastest
                g = ng - 1
                while g >= 0:
                    digit[g] += 1
                    if digit[g] < rptr[gmask[g] + 1] - rptr[gmask[g]]:
                        break
                    digit[g] = 0
                    g -= 1
            # order row entries by column
            for t in range(base + 1, end):
                jv = indices[t]
                dv = data[t]
                s = t - 1
                while s >= base and indices[s] > jv:
                    indices[s + 1] = indices[s]
                    data[s + 1] = data[s]
                    s -= 1
                indices[s + 1] = jv
                data[s + 1] = dv


def build_transitions(basis, m, advect, local):
    """CSR of collide-after-advect on the sector basis (no diagonal phases).

    ``basis`` is the lexicographic ``(B, n)`` configuration array, ``advect``
    the slot permutation and ``local`` the ``2^m x 2^m`` local unitary on
    occupation masks.  Returns ``(indptr, indices, data)``.
    """
    basis = np.ascontiguousarray(basis, dtype=np.int64)
    n_rows, n = basis.shape
    inv_adv = np.empty_like(advect)
    inv_adv[advect] = np.arange(advect.size)
    rptr, rmask, ramp = sparse_lines(local, axis=0)
    dirtab, _ = mask_directions(m)
    binom = binomial_table(advect.size, n)
    counts = _row_counts(basis, m, rptr)
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.empty(indptr[-1], dtype=np.int64)
    data = np.empty(indptr[-1], dtype=np.complex128)
    _fill_rows(basis, m, inv_adv, rptr, rmask, ramp, dirtab, binom, indptr, indices, data)
    return indptr, indices, data


@njit(parallel=True, cache=True)
def csr_matvec(indptr, indices, data, x):
    n_rows = indptr.size - 1
    y = np.empty(n_rows, dtype=np.complex128)
    for i in prange(n_rows):
        acc = 0.0 + 0.0j
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        y[i] = acc
    return y


@njit(parallel=True, cache=True)
def csr_power(indptr, indices, data, x, steps):
    """Apply the CSR operator ``steps`` times without leaving compiled code."""
    n_rows = indptr.size - 1
    cur = x.copy()
    nxt = np.empty(n_rows, dtype=np.complex128)
    for _ in range(steps):
        for i in prange(n_rows):
            acc = 0.0 + 0.0j
            for k in range(indptr[i], indptr[i + 1]):
                acc += data[k] * cur[indices[k]]
            nxt[i] = acc
        cur, nxt = nxt, cur
    return cur
