"""Continuum references: free Gaussian packets, oscillator eigenfunctions,
and plane-wave dispersion of the lattice rule."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .collision import CollisionDDParams, mass_dd, mass_dd_nu1
from .errors import BranchError, ConfigError
from .evolve import QlgaModel
from .lattice import LatticeSpec, directions
from .state import WavepacketParams


@dataclass(frozen=True)
class ContinuumParams:
    mass: float
    a: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ConfigError("mass must be positive")
        if self.a < 0:
            raise ConfigError("oscillator coefficient must be non-negative")

    @property
    def omega(self) -> float:
        return math.sqrt(2 * self.a / self.mass)


def free_gaussian(x, t: float, packet: WavepacketParams, m: float) -> np.ndarray:
    """Exact solution of ``d/dt psi = (i / 2m) laplacian psi`` for Gaussian data.

    At ``t = 0`` this is ``(2 pi sigma^2)^(-D/4) exp(-|x-x0|^2/(4 sigma^2) + i k.x)``,
    normalized on the continuum.  ``x`` has shape ``(..., D)`` or ``(...,)``
    in 1D.
    """
    x = np.asarray(x, dtype=float)
    d = len(packet.center)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    sigma = packet.width
    s_t = sigma * (1 + 1j * t / (2 * m * sigma**2))
    out = np.ones(x.shape[:-1], dtype=np.complex128)
    for i in range(d):
        x0, k = packet.center[i], packet.wavenumber[i]
        xi = x[..., i]
        env = np.exp(-((xi - x0 - k * t / m) ** 2) / (4 * sigma * s_t))
        out = out * (2 * math.pi * sigma**2) ** -0.25 * np.sqrt(sigma / s_t) * env
        out = out * np.exp(1j * k * xi - 1j * k**2 * t / (2 * m))
    return out


def ho_eigenfunction(n_level: int, m: float, omega: float, x) -> np.ndarray:
    """Oscillator eigenfunction ``H_n(sqrt(m w) x) exp(-m w x^2 / 2)`` on a grid.

    Uses the normalized three-term recurrence for Hermite functions, then
    rescales so that ``sum f^2 dx = 1`` on the supplied (uniform) grid.
    """
    if n_level < 0:
        raise ConfigError("level must be non-negative")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = math.sqrt(m * omega) * x
    prev = np.zeros_like(y)
    cur = math.pi**-0.25 * np.exp(-(y**2) / 2)
    for k in range(n_level):
        prev, cur = cur, math.sqrt(2 / (k + 1)) * y * cur - math.sqrt(k / (k + 1)) * prev
    if x.size > 1:
        dx = abs(x[1] - x[0])
        nrm = math.sqrt(float(np.sum(cur**2)) * dx)
    else:
        nrm = (m * omega) ** -0.25
    return cur / nrm


def single_particle_block(model: QlgaModel) -> np.ndarray:
    """``m x m`` collision block acting on one particle's direction amplitudes."""
    m = model.lattice.slots_per_site
    local = model.local_matrix
    bits = [1 << v for v in range(m)]
    return local[np.ix_(bits, bits)]


def fourier_block(model: QlgaModel, k) -> np.ndarray:
    """One step on the plane wave ``exp(i k.x)``: collide after advecting."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    dirs = directions(model.lattice)
    return single_particle_block(model) * np.exp(-1j * dirs @ k)[None, :]


def _tracked_phase(model: QlgaModel, k, n_sub: int = 64) -> float:
    """Unwrapped ``arg(lambda(k)) - arg(g)`` following the branch that starts at ``g``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    g = model.global_phase
    target = g
    phase = 0.0
    for s in range(n_sub + 1):
        vals = np.linalg.eigvals(fourier_block(model, k * s / n_sub))
        dist = np.abs(vals - target)
        order = np.argsort(dist)
        if s == 0 and dist[order[0]] > 1e-9:
            raise BranchError("global phase is not an eigenvalue of the uniform mode")
        if len(vals) > 1 and dist[order[1]] < max(3 * dist[order[0]], 1e-9):
            raise BranchError(f"eigenphase branch ambiguous near k = {k * s / n_sub}")
        z = vals[order[0]]
        phase += cmath.phase(z / target)
        target = z
    return phase


def measure_dispersion(model: QlgaModel, k) -> float:
    """Eigenphase rotation per step of the slow branch at wavevector ``k``.

    Returns ``omega(k) = -(arg lambda(k) - arg g)`` with ``g`` the global
    phase; multiply by ``1 / eps^2`` for physical frequency.
    """
    if model.potential is not None or model.pair_potential is not None:
        raise ConfigError("dispersion is measured for the free model only")
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.size != model.lattice.dimension:
        raise ConfigError("wavevector dimension does not match the lattice")
    if np.any(np.abs(k) > math.pi):
        raise ConfigError("wavevector components must lie in [-pi, pi]")
    return -_tracked_phase(model, k)


@dataclass(frozen=True)
class MassFit:
    mass: float
    curvature: float
    r_squared: float


def fit_mass(ks: np.ndarray, omegas: np.ndarray) -> MassFit:
    """Least-squares ``omega = c k^2 + b``; mass ``1 / 2c``."""
    ks = np.asarray(ks, dtype=float)
    omegas = np.asarray(omegas, dtype=float)
    design = np.column_stack([ks**2, np.ones_like(ks)])
    coef, *_ = np.linalg.lstsq(design, omegas, rcond=None)
    resid = omegas - design @ coef
    ss_tot = float(np.sum((omegas - omegas.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return MassFit(1.0 / (2.0 * coef[0]), float(coef[0]), r2)


def dispersion_curve(model: QlgaModel, ks, axis=None) -> np.ndarray:
    """``omega`` along a direction (default: first lattice axis) for scalar ``ks``."""
    d = model.lattice.dimension
    axis = np.eye(d)[0] if axis is None else np.asarray(axis, dtype=float) / np.linalg.norm(axis)
    return np.array([measure_dispersion(model, kk * axis) for kk in np.asarray(ks, dtype=float)])


def arbitrate_mass_formulas(mu: complex, nu: complex, lam: complex, D: int,
                            k_max: float = 0.05, n_k: int = 11) -> dict:
    """Both closed-form mass predictions against the measured eigenphase curvature.

    The measurement fits ``omega = c |k|^2`` along a lattice axis and along
    the main diagonal; their spread is reported as ``anisotropy``.
    """
    if D not in (1, 2, 3):
        raise ConfigError("arbitration supports D in {1, 2, 3}")
    params = CollisionDDParams(mu, nu, lam, D)
    model = QlgaModel(LatticeSpec(D, 2), params)
    ks = np.linspace(-k_max, k_max, n_k)
    axis_fit = fit_mass(ks, dispersion_curve(model, ks))
    diag_fit = fit_mass(ks, dispersion_curve(model, ks, np.ones(D)))
    report = {
        "D": D,
        "mu": params.mu,
        "nu": params.nu,
        "lam": params.lam,
        "m_measured": axis_fit.mass,
        "m_measured_diagonal": diag_fit.mass,
        "anisotropy": abs(axis_fit.mass - diag_fit.mass) / abs(axis_fit.mass),
        "r_squared": axis_fit.r_squared,
    }
    for key, fn in (("m_mu_nu", lambda: mass_dd(mu, nu, D)), ("m_nu1", lambda: mass_dd_nu1(mu, D, nu))):
        try:
            report[key] = fn()
        except ConfigError:
            report[key] = float("nan")
    rel = {key: abs(report[key] - axis_fit.mass) / abs(axis_fit.mass) for key in ("m_mu_nu", "m_nu1")}
    report["rel_err_mu_nu"] = rel["m_mu_nu"]
    report["rel_err_nu1"] = rel["m_nu1"]
    finite = {k: v for k, v in rel.items() if math.isfinite(v)}
    report["closest"] = min(finite, key=finite.get) if finite else None
    return report
