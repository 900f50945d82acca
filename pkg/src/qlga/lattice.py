"""Periodic Cartesian lattice geometry and the advection permutation.

Slots are linearized site-major, direction-minor: ``slot = site * m + v``
with ``m = 2 * D``.  Sites are linearized row-major over their coordinate
tuple.  Direction ``2i`` is ``+e_i`` and ``2i + 1`` is ``-e_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class LatticeSpec:
    """A ``D``-dimensional periodic lattice with ``extent`` sites per axis."""

    dimension: int
    extent: int

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ConfigError(f"dimension must be a positive integer, got {self.dimension}")
        if int(self.extent) != self.extent or self.extent < 2:
            raise ConfigError(f"extent must be an integer >= 2, got {self.extent}")

    @property
    def n_sites(self) -> int:
        return self.extent**self.dimension

    @property
    def slots_per_site(self) -> int:
        return 2 * self.dimension

    @property
    def n_slots(self) -> int:
        return self.n_sites * self.slots_per_site

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.extent,) * self.dimension

    @cached_property
    def site_coords(self) -> np.ndarray:
        """Integer coordinates of every site, shape ``(n_sites, D)``."""
        grids = np.indices(self.shape).reshape(self.dimension, -1)
        return np.ascontiguousarray(grids.T)

    def site_index(self, coords) -> int:
        coords = tuple(int(c) % self.extent for c in np.atleast_1d(coords))
        if len(coords) != self.dimension:
            raise ConfigError(f"expected {self.dimension} coordinates, got {len(coords)}")
        return int(np.ravel_multi_index(coords, self.shape))

    def slot_index(self, coords, direction: int) -> int:
        if not 0 <= direction < self.slots_per_site:
            raise ConfigError(f"direction {direction} outside [0, {self.slots_per_site})")
        return self.site_index(coords) * self.slots_per_site + direction

    def slot_site(self, slot: int) -> tuple[tuple[int, ...], int]:
        """Inverse of :meth:`slot_index`: ``(coords, direction)``."""
        if not 0 <= slot < self.n_slots:
            raise ConfigError(f"slot {slot} outside [0, {self.n_slots})")
        site, v = divmod(int(slot), self.slots_per_site)
        return tuple(int(c) for c in self.site_coords[site]), v

    def physical_coords(self, eps: float) -> np.ndarray:
        """Site positions ``eps * (x - extent / 2)``, shape ``(n_sites, D)``."""
        return eps * (self.site_coords - self.extent / 2)

    def to_dict(self) -> dict:
        return {"D": self.dimension, "q_lat": self.extent}


def directions(spec: LatticeSpec) -> np.ndarray:
    """Signed unit vectors, row ``2i`` is ``+e_i`` and row ``2i+1`` is ``-e_i``."""
    d = spec.dimension
    out = np.zeros((2 * d, d), dtype=np.int64)
    for i in range(d):
        out[2 * i, i] = 1
        out[2 * i + 1, i] = -1
    return out


def opposite(direction: int) -> int:
    return direction ^ 1


def advect_permutation(spec: LatticeSpec) -> np.ndarray:
    """Array ``perm`` with ``perm[slot]`` the slot it streams into.

    A particle in slot ``(x, v)`` moves to ``(x + v mod extent, v)``.
    """
    dirs = directions(spec)
    m = spec.slots_per_site
    coords = spec.site_coords
    perm = np.empty(spec.n_slots, dtype=np.int64)
    for v in range(m):
        moved = (coords + dirs[v]) % spec.extent
        target = np.ravel_multi_index(moved.T, spec.shape)
        perm[v::m] = target * m + v
    return perm
