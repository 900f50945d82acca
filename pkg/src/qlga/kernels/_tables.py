"""Backend-independent lookup tables fed to the kernels."""

from __future__ import annotations

import math

import numpy as np

_INT64_MAX = np.iinfo(np.int64).max


def binomial_table(n_items: int, k_max: int) -> np.ndarray:
    """``table[a, k] = C(a, k)`` for ``0 <= a <= n_items``, ``0 <= k <= k_max``."""
    table = np.zeros((n_items + 1, k_max + 1), dtype=np.int64)
    for k in range(k_max + 1):
        for a in range(k, n_items + 1):
            c = math.comb(a, k)
            if c > _INT64_MAX:
                raise OverflowError(f"C({a}, {k}) does not fit in int64")
            table[a, k] = c
    return table


def mask_directions(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Per local occupation mask: set bits in ascending order, and popcount."""
    size = 1 << m
    dirs = np.full((size, m), -1, dtype=np.int64)
    pop = np.zeros(size, dtype=np.int64)
    for mask in range(size):
        bits = [b for b in range(m) if mask >> b & 1]
        dirs[mask, : len(bits)] = bits
        pop[mask] = len(bits)
    return dirs, pop


def sparse_lines(local: np.ndarray, axis: int, atol: float = 0.0):
    """Nonzero pattern of the local unitary, row-wise (axis=0) or column-wise.

    Returns ``(ptr, mask, amp)``: for line ``a`` the partner masks are
    ``mask[ptr[a]:ptr[a+1]]`` with amplitudes ``amp[...]``, partner ascending.
    """
    mat = local if axis == 0 else local.T
    size = mat.shape[0]
    ptr = np.zeros(size + 1, dtype=np.int64)
    masks, amps = [], []
    for a in range(size):
        nz = np.flatnonzero(np.abs(mat[a]) > atol)
        masks.extend(nz.tolist())
        amps.extend(mat[a, nz].tolist())
        ptr[a + 1] = len(masks)
    return ptr, np.asarray(masks, dtype=np.int64), np.asarray(amps, dtype=np.complex128)
