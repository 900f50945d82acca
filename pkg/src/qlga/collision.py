"""Unitary ingredients of one time step: collision matrices, potential and
pair-interaction phases, and the mass relations of the collision rules."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, UnitarityError

UNITARY_TOL = 1e-12
PHASE_TOL = 1e-12


def unitarity_residual(mat: np.ndarray) -> float:
    """``max |U U^dagger - I|``."""
    mat = np.asarray(mat)
    return float(np.max(np.abs(mat @ mat.conj().T - np.eye(mat.shape[0]))))


@dataclass(frozen=True)
class UnitaryOperator:
    """Dense square matrix certified unitary to ``tol`` at construction."""

    matrix: np.ndarray = field(repr=False)
    tol: float = UNITARY_TOL

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"unitary operator must be square, got shape {mat.shape}")
        res = unitarity_residual(mat)
        if not res <= self.tol:
            raise UnitarityError(f"unitarity residual {res:.3e} exceeds {self.tol:.1e}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "residual", res)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        return self.matrix @ other


def _check_phase(name: str, z: complex) -> complex:
    z = complex(z)
    if not math.isfinite(z.real) or not math.isfinite(z.imag) or abs(abs(z) - 1) > PHASE_TOL:
        raise ConfigError(f"{name} must be a unit complex number, got {z}")
    return z


@dataclass(frozen=True)
class Collision1DParams:
    """1D rule with ``q = cos(theta)``, ``p = -i sin(theta)`` and pair phase ``phi``."""

    theta: float
    phi: complex = 1.0

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ConfigError("theta must be finite")
        object.__setattr__(self, "phi", _check_phase("phi", self.phi))

    @property
    def q(self) -> complex:
        return complex(math.cos(self.theta), 0.0)

    @property
    def p(self) -> complex:
        return complex(0.0, -math.sin(self.theta))

    @property
    def global_phase(self) -> complex:
        """``p + q``, the phase carried by the uniform single-particle mode."""
        return self.p + self.q


@dataclass(frozen=True)
class CollisionDDParams:
    """Lattice-symmetric single-particle rule from its three eigenphases."""

    mu: complex
    nu: complex
    lam: complex
    dimension: int

    def __post_init__(self):
        for name in ("mu", "nu", "lam"):
            object.__setattr__(self, name, _check_phase(name, getattr(self, name)))
        if self.dimension < 1:
            raise ConfigError("dimension must be positive")
        if abs(self.mu - self.nu) < PHASE_TOL:
            raise ConfigError("mu must differ from nu")
        if self.dimension > 1 and abs(self.mu - self.lam) < PHASE_TOL:
            raise ConfigError("mu must differ from lambda")

    @classmethod
    def from_angles(cls, mu: float, nu: float, lam: float, dimension: int) -> "CollisionDDParams":
        return cls(cmath.exp(1j * mu), cmath.exp(1j * nu), cmath.exp(1j * lam), dimension)

    @property
    def global_phase(self) -> complex:
        return self.mu


def build_T1(params: Collision1DParams) -> UnitaryOperator:
    """4x4 collision matrix in the ``(--, +-, -+, ++)`` basis."""
    q, p = params.q, params.p
    if abs(abs(q) ** 2 + abs(p) ** 2 - 1) > UNITARY_TOL or abs(p * q.conjugate() + p.conjugate() * q) > UNITARY_TOL:
        raise ConfigError("collision parameters violate |q|^2+|p|^2=1 or p q* + p* q = 0")
    mat = np.array(
        [[1, 0, 0, 0], [0, q, p, 0], [0, p, q, 0], [0, 0, 0, params.phi]],
        dtype=np.complex128,
    )
    return UnitaryOperator(mat)


def direction_projectors(dimension: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Projectors onto the constant, parity-odd and remaining direction vectors."""
    m = 2 * dimension
    const = np.full((m, m), 1.0 / m)
    odd = np.zeros((m, m))
    for i in range(dimension):
        u = np.zeros(m)
        u[2 * i], u[2 * i + 1] = 1.0, -1.0
        odd += np.outer(u, u) / 2
    even = np.eye(m) - const - odd
    return const, odd, even


def build_C_dd(params: CollisionDDParams) -> UnitaryOperator:
    """``2D x 2D`` single-particle collision matrix ``mu P_c + nu P_odd + lam P_even``.

    Entry ``[u, v]`` is the amplitude for an incoming direction ``v`` to
    leave along ``u``.
    """
    const, odd, even = direction_projectors(params.dimension)
    return UnitaryOperator(params.mu * const + params.nu * odd + params.lam * even)


def mass_1d(params: Collision1DParams) -> float:
    q, p = params.q, params.p
    if abs(q) < 1e-15:
        raise ConfigError("q = 0 gives infinite mass")
    m = 1j * p / q
    return m.real


def mass_dd(mu: complex, nu: complex, d: int) -> float:
    """Mass from ``i / 2m = (nu / (mu - nu) + 1/2) / d``."""
    mu, nu = complex(mu), complex(nu)
    if abs(mu - nu) < PHASE_TOL:
        raise ConfigError("mu = nu is degenerate")
    rhs = (nu / (mu - nu) + 0.5) / d
    if abs(rhs) < 1e-15:
        raise ConfigError("mass relation gives infinite mass")
    m = 1j / (2 * rhs)
    if abs(m.imag) > 1e-10 * max(1.0, abs(m)):
        raise ConfigError(f"mass relation gives non-real mass {m}")
    return m.real


def mass_dd_nu1(mu: complex, d: int, nu: complex = 1.0) -> float:
    """Closed form ``m = i (mu - 1) / (d (mu + 1))`` stated for ``nu = 1, lam = -1``.

    Raises :class:`ConfigError` when ``nu`` is not 1, where the form makes no claim.
    """
    mu = complex(mu)
    if abs(complex(nu) - 1) > PHASE_TOL:
        raise ConfigError("closed form applies only for nu = 1")
    if abs(mu + 1) < PHASE_TOL:
        raise ConfigError("mu = -1 gives infinite mass")
    m = 1j * (mu - 1) / (d * (mu + 1))
    if abs(m.imag) > 1e-10 * max(1.0, abs(m)):
        raise ConfigError(f"non-real mass {m}")
    return m.real


@dataclass(frozen=True)
class PotentialSpec:
    """External potential ``V(x)`` on physical coordinates of shape ``(..., D)``."""

    function: Callable[[np.ndarray], np.ndarray]
    eps: float
    name: str = "custom"

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigError("lattice scale eps must be positive")

    def values(self, coords: np.ndarray) -> np.ndarray:
        v = np.asarray(self.function(np.asarray(coords, dtype=float)), dtype=float)
        if not np.all(np.isfinite(v)):
            raise ConfigError(f"potential {self.name!r} is not finite on every site")
        return v


def quadratic_potential(a: float, eps: float) -> PotentialSpec:
    return PotentialSpec(lambda x: a * np.sum(x**2, axis=-1), eps, name="quadratic")


def potential_phase_op(spec: PotentialSpec, x) -> UnitaryOperator:
    """Per-q-bit ``diag(1, exp(-i eps^2 V(x)))`` in the ``(-, +)`` basis."""
    v = float(spec.values(np.atleast_1d(np.asarray(x, dtype=float))))
    return UnitaryOperator(np.diag([1.0, cmath.exp(-1j * spec.eps**2 * v)]))


def gas_T(mu: complex, phi: complex, a: float, eps: float, x: float) -> UnitaryOperator:
    """1D collision matrix with the quadratic potential phase folded in."""
    mu = _check_phase("mu", mu)
    phi = _check_phase("phi", phi)
    ph = cmath.exp(-1j * a * eps**2 * x**2)
    mat = np.array(
        [
            [1, 0, 0, 0],
            [0, (mu + 1) / 2 * ph, (mu - 1) / 2 * ph, 0],
            [0, (mu - 1) / 2 * ph, (mu + 1) / 2 * ph, 0],
            [0, 0, 0, phi * ph**2],
        ],
        dtype=np.complex128,
    )
    return UnitaryOperator(mat)


@dataclass(frozen=True)
class PairPotentialSpec:
    """Symmetric two-body potential ``V(x, y)`` on physical coordinates."""

    function: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = "custom"

    def values(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.asarray(self.function(np.asarray(x, float), np.asarray(y, float)), dtype=float)

    def site_matrix(self, coords: np.ndarray, sym_tol: float = 1e-12) -> np.ndarray:
        """``V`` between every pair of sites; checks symmetry and finiteness."""
        n = coords.shape[0]
        vm = self.values(coords[:, None, :], coords[None, :, :])
        vm = np.broadcast_to(vm, (n, n))
        if not np.all(np.isfinite(vm)):
            raise ConfigError(f"pair potential {self.name!r} is not finite")
        if np.max(np.abs(vm - vm.T), initial=0.0) > sym_tol:
            raise ConfigError(f"pair potential {self.name!r} is not symmetric")
        return np.ascontiguousarray(vm)


def quadratic_distance_pair(coefficient: float) -> PairPotentialSpec:
    return PairPotentialSpec(lambda x, y: coefficient * np.sum((x - y) ** 2, axis=-1), "quadratic_distance")


def table_pair(values, eps: float, extent: int) -> PairPotentialSpec:
    """``V`` looked up by minimum-image lattice distance; zero past the table."""
    table = np.asarray(values, dtype=float)
    period = eps * extent

    def fn(x, y):
        diff = np.abs(x - y)
        diff = np.minimum(diff, period - diff)
        dist = np.rint(np.sqrt(np.sum(diff**2, axis=-1)) / eps).astype(np.int64)
        out = np.zeros(dist.shape)
        inside = dist < table.size
        out[inside] = table[dist[inside]]
        return out

    return PairPotentialSpec(fn, "table")


def pair_interaction_phase(spec: PairPotentialSpec, x, y, eps: float) -> complex:
    v = float(spec.values(np.atleast_1d(x), np.atleast_1d(y)))
    return cmath.exp(-1j * eps**2 * v)


def local_collision_matrix(params, dimension: int) -> np.ndarray:
    """Collision rule on the ``2^m`` occupation masks of one site.

    Bit ``v`` of a mask is the slot with direction ``v``.  In 1D with
    :class:`Collision1DParams` this is exactly ``build_T1`` (mask order
    coincides with ``(--, +-, -+, ++)``).  Otherwise only the one-particle
    block is defined; multi-particle masks are left as identity and the
    evolution refuses sectors that would reach them.
    """
    m = 2 * dimension
    if isinstance(params, Collision1DParams):
        if dimension != 1:
            raise ConfigError("Collision1DParams requires D = 1")
        return build_T1(params).matrix
    if params.dimension != dimension:
        raise ConfigError("collision dimension does not match the lattice")
    single = build_C_dd(params).matrix
    local = np.eye(1 << m, dtype=np.complex128)
    bits = [1 << v for v in range(m)]
    for u in range(m):
        for v in range(m):
            local[bits[u], bits[v]] = single[u, v]
    return local
