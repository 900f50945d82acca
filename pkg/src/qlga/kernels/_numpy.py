"""Vectorized numpy fallback.  Builds the same table as the numba kernels
by scattering each source configuration forward, then sorting."""

from __future__ import annotations

import numpy as np

from ._tables import binomial_table, mask_directions, sparse_lines

NAME = "numpy"


def rank_configs(configs: np.ndarray, n_items: int) -> np.ndarray:
    configs = np.asarray(configs, dtype=np.int64)
    n_rows, n = configs.shape
    binom = binomial_table(n_items, n)
    rank = np.zeros(n_rows, dtype=np.int64)
    prev = np.full(n_rows, -1, dtype=np.int64)
    for i in range(n):
        rank += binom[n_items - prev - 1, n - i] - binom[n_items - configs[:, i], n - i]
        prev = configs[:, i]
    return rank


def build_transitions(basis, m, advect, local):
    basis = np.asarray(basis, dtype=np.int64)
    n_rows, n = basis.shape
    cptr, cmask, camp = sparse_lines(local, axis=1)
    dirtab, pop = mask_directions(m)
    rows_all = np.arange(n_rows)

    moved = np.sort(advect[basis], axis=1)
    sites = moved // m
    dirs = moved % m
    new_group = np.ones((n_rows, n), dtype=bool)
    new_group[:, 1:] = sites[:, 1:] != sites[:, :-1]
    gid = np.cumsum(new_group, axis=1) - 1
    ngroups = gid[:, -1] + 1 if n else np.zeros(n_rows, dtype=np.int64)
    gmask = np.zeros((n_rows, n), dtype=np.int64)
    gstart = np.zeros((n_rows, n), dtype=np.int64)
    gsite = np.zeros((n_rows, n), dtype=np.int64)
    for t in range(n):
        gmask[rows_all, gid[:, t]] |= 1 << dirs[:, t]
        first = new_group[:, t]
        gstart[rows_all[first], gid[first, t]] = t
        gsite[rows_all[first], gid[first, t]] = sites[first, t]

    src = rows_all.copy()
    amp = np.ones(n_rows, dtype=np.complex128)
    out = moved.copy()
    for g in range(n):
        active = ngroups[src] > g
        if not active.any():
            break
        act = np.flatnonzero(active)
        mk = gmask[src[act], g]
        cnt = cptr[mk + 1] - cptr[mk]
        rep = np.repeat(act, cnt)
        offs = np.arange(rep.size) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        k = np.repeat(cptr[mk], cnt) + offs
        om = cmask[k]
        new_amp = amp[rep] * camp[k]
        new_out = out[rep]
        s = src[rep]
        start = gstart[s, g]
        base_slot = gsite[s, g] * m
        for u in range(m):
            sel = u < pop[om]
            new_out[sel, start[sel] + u] = base_slot[sel] + dirtab[om[sel], u]
        keep = np.flatnonzero(~active)
        src = np.concatenate([src[keep], s])
        amp = np.concatenate([amp[keep], new_amp])
        out = np.concatenate([out[keep], new_out])

    rows = rank_configs(out, advect.size)
    order = np.lexsort((src, rows))
    rows, indices, data = rows[order], src[order], amp[order]
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n_rows), out=indptr[1:])
    return indptr, indices, data


def _row_ids(indptr):
    return np.repeat(np.arange(indptr.size - 1), np.diff(indptr))


def csr_matvec(indptr, indices, data, x, _rows=None):
    rows = _row_ids(indptr) if _rows is None else _rows
    prod = data * x[indices]
    n_rows = indptr.size - 1
    return np.bincount(rows, prod.real, n_rows) + 1j * np.bincount(rows, prod.imag, n_rows)


def csr_power(indptr, indices, data, x, steps):
    rows = _row_ids(indptr)
    cur = np.asarray(x, dtype=np.complex128).copy()
    for _ in range(steps):
        cur = csr_matvec(indptr, indices, data, cur, rows)
    return cur
