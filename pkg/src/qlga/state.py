"""Fixed-particle-number wavefunctions over occupation configurations."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CapacityError, ConfigError
from .kernels import get_backend
from .lattice import LatticeSpec

DEFAULT_BASIS_CAP = 2_000_000
NORM_TOL = 1e-12


@lru_cache(maxsize=16)
def _cached_basis(n_items: int, n: int) -> np.ndarray:
    size = math.comb(n_items, n)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n_items), n)),
        dtype=np.int64,
        count=size * n,
    )
    basis = flat.reshape(size, n)
    basis.flags.writeable = False
    return basis


def sector_basis(lattice: LatticeSpec, n: int, cap: int = DEFAULT_BASIS_CAP) -> np.ndarray:
    """All ``n``-particle configurations in lexicographic order.

    Each row is a strictly increasing tuple of slot indices.  The returned
    array is shared and read-only.

    Raises
    ------
    CapacityError
        If ``C(n_slots, n)`` exceeds ``cap``.
    """
    n_items = lattice.n_slots
    if not 0 <= n <= n_items:
        raise ConfigError(f"particle count {n} outside [0, {n_items}]")
    size = math.comb(n_items, n)
    if size > cap:
        raise CapacityError(size, cap)
    return _cached_basis(n_items, n)


def configuration_index(lattice: LatticeSpec, configs) -> np.ndarray:
    """Lexicographic rank of each configuration (rows of ``configs``)."""
    configs = np.atleast_2d(np.asarray(configs, dtype=np.int64))
    return get_backend().rank_configs(configs, lattice.n_slots)


@dataclass(frozen=True)
class WavepacketParams:
    center: tuple[float, ...]
    width: float
    wavenumber: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        object.__setattr__(self, "wavenumber", tuple(float(k) for k in np.atleast_1d(self.wavenumber)))
        if not self.width > 0:
            raise ConfigError("packet width must be positive")
        if len(self.center) != len(self.wavenumber):
            raise ConfigError("center and wavenumber must have the same dimension")
        if any(abs(k) > math.pi for k in self.wavenumber):
            raise ConfigError("wavenumber components must lie in [-pi, pi]")


@dataclass
class SectorState:
    """Normalized amplitudes over the ``n``-particle sector basis."""

    lattice: LatticeSpec
    n: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        size = math.comb(self.lattice.n_slots, self.n)
        if self.amplitudes.shape != (size,):
            raise ConfigError(f"expected {size} amplitudes, got shape {self.amplitudes.shape}")

    @property
    def basis(self) -> np.ndarray:
        return sector_basis(self.lattice, self.n, cap=max(DEFAULT_BASIS_CAP, self.amplitudes.size))

    def norm(self) -> float:
        # numpy's pairwise summation gives a fixed reduction order
        return math.sqrt(float(np.sum(self.amplitudes.real**2 + self.amplitudes.imag**2)))

    def copy(self) -> "SectorState":
        return SectorState(self.lattice, self.n, self.amplitudes.copy())

    def normalized(self) -> "SectorState":
        nrm = self.norm()
        if nrm == 0:
            raise ConfigError("cannot normalize the zero vector")
        return SectorState(self.lattice, self.n, self.amplitudes / nrm)

    def slot_amplitudes(self) -> np.ndarray:
        """``(n_sites, m)`` array of single-particle amplitudes ``psi_v(x)``."""
        if self.n != 1:
            raise ConfigError("slot amplitudes exist only in the one-particle sector")
        return self.amplitudes.reshape(self.lattice.n_sites, self.lattice.slots_per_site)

    def site_occupation(self) -> np.ndarray:
        """Expected particle number on each site; sums to ``n``."""
        prob = self.amplitudes.real**2 + self.amplitudes.imag**2
        sites = self.basis // self.lattice.slots_per_site
        occ = np.zeros(self.lattice.n_sites)
        for col in range(self.n):
            occ += np.bincount(sites[:, col], prob, self.lattice.n_sites)
        return occ

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "lattice": self.lattice.to_dict(),
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, payload: dict) -> "SectorState":
        lat = LatticeSpec(int(payload["lattice"]["D"]), int(payload["lattice"]["q_lat"]))
        amps = np.asarray(payload["amplitudes"], dtype=float).reshape(-1, 2)
        return cls(lat, int(payload["n"]), amps[:, 0] + 1j * amps[:, 1])


def basis_state(lattice: LatticeSpec, slots) -> SectorState:
    """Unit amplitude on a single configuration of occupied slots."""
    slots = sorted(int(s) for s in slots)
    if len(set(slots)) != len(slots):
        raise ConfigError("a slot holds at most one particle")
    for s in slots:
        if not 0 <= s < lattice.n_slots:
            raise ConfigError(f"slot {s} outside [0, {lattice.n_slots})")
    n = len(slots)
    size = math.comb(lattice.n_slots, n)
    if size > DEFAULT_BASIS_CAP:
        raise CapacityError(size, DEFAULT_BASIS_CAP)
    amps = np.zeros(size, dtype=np.complex128)
    amps[configuration_index(lattice, [slots])[0] if n else 0] = 1.0
    return SectorState(lattice, n, amps)


def point_state(lattice: LatticeSpec, slot) -> SectorState:
    """One particle in ``slot`` (an index, or a ``(coords, direction)`` pair)."""
    if isinstance(slot, tuple):
        coords, direction = slot
        slot = lattice.slot_index(coords, direction)
    return basis_state(lattice, [slot])


def gaussian_state(lattice: LatticeSpec, params: WavepacketParams, direction_weights=None,
                   parity: int | None = None) -> SectorState:
    """Single-particle Gaussian packet ``w_v exp(-|x-x0|^2 / 4 sigma^2) exp(i k.x)``.

    Distances are taken as plain coordinate differences (no wrap), so the
    packet should sit away from the boundary.  With ``parity`` set (1D
    only), amplitudes on sites of the other parity class are zeroed.
    """
    if params.width < 1:
        raise ConfigError(f"packet width {params.width} < 1 lattice unit is unresolved")
    d = lattice.dimension
    if len(params.center) != d:
        raise ConfigError(f"packet has dimension {len(params.center)}, lattice has {d}")
    m = lattice.slots_per_site
    w = np.ones(m, dtype=np.complex128) if direction_weights is None else np.asarray(direction_weights, dtype=np.complex128)
    if w.shape != (m,):
        raise ConfigError(f"need {m} direction weights")
    x = lattice.site_coords.astype(float)
    dx = x - np.asarray(params.center)
    env = np.exp(-np.sum(dx**2, axis=1) / (4 * params.width**2)) * np.exp(1j * x @ np.asarray(params.wavenumber))
    if parity is not None:
        if d != 1:
            raise ConfigError("parity classes are defined for D = 1 only")
        env = np.where(lattice.site_coords[:, 0] % 2 == parity, env, 0.0)
    amps = (env[:, None] * w[None, :]).ravel()
    return SectorState(lattice, 1, amps).normalized()


def total_amplitude(state: SectorState, t: int, global_phase: complex) -> np.ndarray:
    """Direction-summed amplitude per site with the accumulated global phase removed."""
    if state.n != 1:
        raise ConfigError("total amplitude is defined in the one-particle sector")
    if abs(abs(global_phase) - 1) > 1e-12:
        raise ConfigError("global phase must have unit modulus")
    return global_phase ** (-t) * state.slot_amplitudes().sum(axis=1)
