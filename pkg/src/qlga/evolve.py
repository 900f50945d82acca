"""The time step: advect, collide, external potential, pair interaction.

Two independent assemblies of the same operator live here.  ``step`` and
``evolve`` use a sparse transition table built by the kernels (fast path).
``step_matrix`` composes explicit per-site operators with dictionary
lookups and evaluates the phases straight from the potential callables;
it is the dense oracle used on small sectors.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Optional, Union

import numpy as np
import scipy.sparse as sp

from .collision import (
    Collision1DParams,
    CollisionDDParams,
    PairPotentialSpec,
    PotentialSpec,
    UnitaryOperator,
    local_collision_matrix,
)
from .errors import CapacityError, ConfigError, UnitarityError, UnsupportedSectorError
from .kernels import get_backend
from .lattice import LatticeSpec, advect_permutation
from .state import SectorState, sector_basis

log = logging.getLogger(__name__)

DENSE_CAP = 4096
NORM_DRIFT_TOL = 1e-9

Observer = Callable[[int, float, np.ndarray], None]


@dataclass(frozen=True)
class TransitionTable:
    """CSR form of the one-step operator on one sector."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    backend: str

    @property
    def size(self) -> int:
        return self.indptr.size - 1

    def to_sparse(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.data, self.indices, self.indptr), shape=(self.size, self.size))


@dataclass(frozen=True, eq=False)
class QlgaModel:
    lattice: LatticeSpec
    collision: Union[Collision1DParams, CollisionDDParams]
    potential: Optional[PotentialSpec] = None
    pair_potential: Optional[PairPotentialSpec] = None
    eps: float = 1.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigError("eps must be positive")
        if self.potential is not None and not math.isclose(self.potential.eps, self.eps, rel_tol=1e-12):
            raise ConfigError("potential eps differs from model eps")
        if isinstance(self.collision, Collision1DParams) and self.lattice.dimension != 1:
            raise ConfigError("Collision1DParams requires a 1D lattice")
        if isinstance(self.collision, CollisionDDParams) and self.collision.dimension != self.lattice.dimension:
            raise ConfigError("collision dimension does not match the lattice")

    @property
    def global_phase(self) -> complex:
        return self.collision.global_phase

    def check_sector(self, n: int) -> None:
        if n >= 2 and not isinstance(self.collision, Collision1DParams):
            raise UnsupportedSectorError(
                "multi-particle collisions are defined only for the 1D rule with a pair phase"
            )

    @cached_property
    def local_matrix(self) -> np.ndarray:
        return local_collision_matrix(self.collision, self.lattice.dimension)

    @cached_property
    def advection(self) -> np.ndarray:
        return advect_permutation(self.lattice)

    @cached_property
    def site_positions(self) -> np.ndarray:
        return self.lattice.physical_coords(self.eps)

    @cached_property
    def site_potential(self) -> np.ndarray:
        if self.potential is None:
            return np.zeros(self.lattice.n_sites)
        return self.potential.values(self.site_positions)

    @cached_property
    def pair_site_matrix(self) -> Optional[np.ndarray]:
        if self.pair_potential is None:
            return None
        return self.pair_potential.site_matrix(self.site_positions)

    def diagonal_phases(self, basis: np.ndarray) -> np.ndarray:
        """Potential and pair phases of each configuration, vectorized."""
        m = self.lattice.slots_per_site
        sites = basis // m
        total = self.site_potential[sites].sum(axis=1)
        vm = self.pair_site_matrix
        if vm is not None:
            n = basis.shape[1]
            for a in range(n):
                for b in range(a + 1, n):
                    total = total + vm[sites[:, a], sites[:, b]]
        return np.exp(-1j * self.eps**2 * total)

    @cached_property
    def _tables(self) -> dict:
        return {}

    def transitions(self, n: int, backend: Optional[str] = None) -> TransitionTable:
        kern = get_backend(backend)
        key = (n, kern.NAME)
        if key not in self._tables:
            self.check_sector(n)
            basis = sector_basis(self.lattice, n)
            indptr, indices, data = kern.build_transitions(
                basis, self.lattice.slots_per_site, self.advection, self.local_matrix
            )
            rows = np.repeat(np.arange(basis.shape[0]), np.diff(indptr))
            data = data * self.diagonal_phases(basis)[rows]
            self._tables[key] = TransitionTable(n, indptr, indices, data, kern.NAME)
            log.debug("built %s transition table: n=%d rows=%d nnz=%d", kern.NAME, n, basis.shape[0], data.size)
        return self._tables[key]


def _check_compatible(state: SectorState, model: QlgaModel) -> None:
    if state.lattice != model.lattice:
        raise ConfigError("state and model live on different lattices")


def step(state: SectorState, model: QlgaModel, backend: Optional[str] = None) -> SectorState:
    _check_compatible(state, model)
    table = model.transitions(state.n, backend)
    kern = get_backend(table.backend)
    amps = kern.csr_matvec(table.indptr, table.indices, table.data, state.amplitudes)
    return SectorState(state.lattice, state.n, amps)


def evolve(
    state: SectorState,
    model: QlgaModel,
    steps: int,
    observers: Iterable[Observer] = (),
    backend: Optional[str] = None,
) -> SectorState:
    """Apply ``steps`` time steps.

    Observers are called as ``obs(t, norm, site_occupation)`` for every
    ``t`` in ``0..steps``.  Raises :class:`UnitarityError` if the norm
    drifts by more than ``1e-9`` over the run.
    """
    if steps < 0 or int(steps) != steps:
        raise ConfigError("steps must be a non-negative integer")
    _check_compatible(state, model)
    observers = list(observers)
    table = model.transitions(state.n, backend)
    kern = get_backend(table.backend)
    norm0 = state.norm()
    if not observers:
        amps = kern.csr_power(table.indptr, table.indices, table.data, state.amplitudes, int(steps))
        out = SectorState(state.lattice, state.n, amps)
    else:
        out = state
        for t in range(int(steps) + 1):
            if t:
                amps = kern.csr_matvec(table.indptr, table.indices, table.data, out.amplitudes)
                out = SectorState(state.lattice, state.n, amps)
            nrm, occ = out.norm(), out.site_occupation()
            for obs in observers:
                obs(t, nrm, occ)
    drift = abs(out.norm() - norm0)
    if drift > NORM_DRIFT_TOL:
        raise UnitarityError(f"norm drifted by {drift:.3e} over {steps} steps")
    return out


def step_matrix(model: QlgaModel, n: int, cap: int = DENSE_CAP) -> UnitaryOperator:
    """Dense one-step operator ``M[i, j] = <config i| U |config j>``.

    Assembled as ``diag(phases) . prod_sites(C_site) . P_advect`` from
    explicit per-site operators.
    """
    model.check_sector(n)
    lat = model.lattice
    size = math.comb(lat.n_slots, n)
    if size > cap:
        raise CapacityError(size, cap, "dense step matrix")
    m = lat.slots_per_site
    configs = [tuple(int(s) for s in row) for row in sector_basis(lat, n)]
    index = {c: i for i, c in enumerate(configs)}

    adv = model.advection
    p_rows = [index[tuple(sorted(int(adv[s]) for s in c))] for c in configs]
    op = sp.csr_matrix((np.ones(size), (p_rows, np.arange(size))), shape=(size, size), dtype=np.complex128)

    local = model.local_matrix
    for site in range(lat.n_sites):
        rows, cols, vals = [], [], []
        for j, c in enumerate(configs):
            here = [s for s in c if s // m == site]
            if not here:
                rows.append(j), cols.append(j), vals.append(1.0)
                continue
            mask = sum(1 << (s % m) for s in here)
            rest = [s for s in c if s // m != site]
            for out_mask in range(1 << m):
                amp = local[out_mask, mask]
                if amp == 0:
                    continue
                new = sorted(rest + [site * m + b for b in range(m) if out_mask >> b & 1])
                rows.append(index[tuple(new)]), cols.append(j), vals.append(amp)
        op = sp.csr_matrix((vals, (rows, cols)), shape=(size, size), dtype=np.complex128) @ op

    pos = model.site_positions
    phases = np.ones(size, dtype=np.complex128)
    for i, c in enumerate(configs):
        x = pos[[s // m for s in c]]
        total = 0.0
        if model.potential is not None and n:
            total += float(np.sum(model.potential.values(x)))
        if model.pair_potential is not None:
            for a in range(n):
                for b in range(a + 1, n):
                    total += float(model.pair_potential.values(x[a], x[b]))
        phases[i] = np.exp(-1j * model.eps**2 * total)
    dense = (sp.diags(phases) @ op).toarray()
    return UnitaryOperator(dense)


def sublattice_projector(model: QlgaModel, parity_class: int) -> np.ndarray:
    """Boolean site mask of the sites with ``x mod 2 == parity_class`` (1D)."""
    if model.lattice.dimension != 1:
        raise ConfigError("parity sublattices are provided for D = 1 only")
    if parity_class not in (0, 1):
        raise ConfigError("parity class must be 0 or 1")
    return model.lattice.site_coords[:, 0] % 2 == parity_class


def slot_mask(model: QlgaModel, site_mask: np.ndarray) -> np.ndarray:
    """Expand a site mask to the one-particle slot basis."""
    return np.repeat(site_mask, model.lattice.slots_per_site)
