"""Eigen-analysis of the one-step operator and the oscillator eigenstate run."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .collision import Collision1DParams, UnitaryOperator, quadratic_potential
from .errors import ConfigError, ConvergenceError
from .evolve import QlgaModel, step_matrix, sublattice_projector
from .lattice import LatticeSpec
from .oracle import ho_eigenfunction

EIG_TOL = 1e-9
CLUSTER_TOL = 1e-8

# oscillator reference: m = 1, omega = 1, oscillator length 0.6 sqrt(l) sites
REFERENCE_A = 0.5
REFERENCE_THETA = math.pi / 4


def reference_eps(l_sites: int) -> float:
    return 1.0 / (0.6 * math.sqrt(l_sites))


@dataclass
class Eigensystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.eigenvalues)


def _clusters(phases: np.ndarray, tol: float) -> list[np.ndarray]:
    order = np.argsort(phases)
    groups, cur = [], [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if phases[b] - phases[a] <= tol:
            cur.append(b)
        else:
            groups.append(np.array(cur))
            cur = [b]
    groups.append(np.array(cur))
    # the circle closes between the last and the first phase
    if len(groups) > 1 and phases[order[0]] + 2 * math.pi - phases[order[-1]] <= tol:
        groups[0] = np.concatenate([groups.pop(), groups[0]])
    return groups


def eigendecompose(U, tol: float = EIG_TOL) -> Eigensystem:
    """Complete eigensystem of a unitary matrix.

    A complex Schur form of a normal matrix is diagonal up to rounding, so
    the Schur vectors are already an orthonormal eigenbasis; each
    eigenpair is then re-checked against ``tol`` independently of that.
    """
    mat = U.matrix if isinstance(U, UnitaryOperator) else np.asarray(U, dtype=np.complex128)
    if mat.shape[0] > 4096:
        raise ConfigError("dense diagonalization is capped at dimension 4096")
    tri, vecs = scipy.linalg.schur(mat, output="complex")
    vals = np.diag(tri).copy()
    for idx in _clusters(np.angle(vals), CLUSTER_TOL):
        if idx.size > 1:
            q, _ = np.linalg.qr(vecs[:, idx])
            vecs[:, idx] = q
    vecs /= np.linalg.norm(vecs, axis=0)
    residuals = np.linalg.norm(mat @ vecs - vecs * vals, axis=0)
    worst = float(residuals.max(initial=0.0))
    off_circle = float(np.max(np.abs(np.abs(vals) - 1), initial=0.0))
    if worst > tol or off_circle > tol:
        raise ConvergenceError(f"eigen residual {worst:.2e}, unit-circle deviation {off_circle:.2e} exceed {tol:.0e}")
    return Eigensystem(vals, vecs, residuals)


def eigenphase_to_energy(lambda_val, global_phase, eps: float):
    """``E = -(arg lambda - arg g) / eps^2`` with the phase difference in ``(-pi, pi]``."""
    lam = np.asarray(lambda_val, dtype=np.complex128)
    diff = np.angle(lam / global_phase)
    diff = np.where(diff <= -math.pi, diff + 2 * math.pi, diff)
    out = -diff / eps**2
    return float(out) if out.ndim == 0 else out


def count_nodes(profile: np.ndarray, rel_floor: float = 1e-3) -> int:
    """Sign changes of a profile after removing its global phase."""
    profile = np.asarray(profile)
    ref = profile[np.argmax(np.abs(profile))]
    real = (profile * np.conj(ref) / abs(ref)).real
    keep = real[np.abs(real) > rel_floor * np.abs(real).max()]
    return int(np.sum(np.sign(keep[1:]) != np.sign(keep[:-1])))


def oscillator_model(l_sites: int, a_coeff: float, theta: float, eps: float) -> QlgaModel:
    return QlgaModel(
        LatticeSpec(1, l_sites),
        Collision1DParams(theta),
        quadratic_potential(a_coeff, eps),
        eps=eps,
    )


@dataclass
class OscillatorReport:
    l_sites: int
    a_coeff: float
    theta: float
    eps: float
    mass: float
    omega: float
    energies: np.ndarray
    continuum_energies: np.ndarray
    overlaps: np.ndarray
    nodes: np.ndarray
    matched: np.ndarray
    positions: np.ndarray = field(repr=False)
    profiles: np.ndarray = field(repr=False)
    continuum: np.ndarray = field(repr=False)
    all_eigenvalues: np.ndarray = field(repr=False)

    def good_states(self, threshold: float = 0.95) -> int:
        """Number of leading levels reproduced with overlap >= threshold."""
        count = 0
        for ov in self.overlaps:
            if ov < threshold:
                break
            count += 1
        return count

    def summary(self) -> dict:
        return {
            "l_sites": self.l_sites,
            "a": self.a_coeff,
            "theta": self.theta,
            "eps": self.eps,
            "mass": self.mass,
            "omega": self.omega,
            "energies": self.energies.tolist(),
            "continuum_energies": self.continuum_energies.tolist(),
            "overlaps": self.overlaps.tolist(),
            "nodes": self.nodes.tolist(),
            "n_eigenvalues": int(self.all_eigenvalues.size),
            "max_unit_circle_deviation": float(np.max(np.abs(np.abs(self.all_eigenvalues) - 1))),
        }


def oscillator_eigenstate_experiment(
    l_sites: int,
    a_coeff: float,
    theta: float,
    eps: float,
    n_levels: int = 4,
    parity_class: int = 0,
) -> OscillatorReport:
    """Diagonalize the one-particle step in ``V = a x^2`` and compare with the continuum.

    Eigenvectors are restricted to one parity class of sites and summed
    over directions.  Physical states are those whose eigenphase lies within
    ``pi/2`` of the global phase and whose amplitude sits mostly in the
    direction-symmetric mode; among those, continuum levels are assigned by
    maximum overlap.
    """
    if l_sites < 4 or l_sites % 2:
        raise ConfigError("l_sites must be an even number >= 4")
    model = oscillator_model(l_sites, a_coeff, theta, eps)
    params = model.collision
    mass = math.tan(theta)
    if not mass > 0:
        raise ConfigError("theta must lie in (0, pi/2) for a positive mass")
    omega = math.sqrt(2 * a_coeff / mass)

    system = eigendecompose(step_matrix(model, 1))
    mask = sublattice_projector(model, parity_class)
    x = model.site_positions[mask, 0]
    amps = system.eigenvectors.reshape(l_sites, 2, -1)[mask]
    totals = amps.sum(axis=1)
    weight = np.sum(np.abs(amps) ** 2, axis=(0, 1))
    symmetric = np.sum(np.abs(totals) ** 2, axis=0) / (2 * np.maximum(weight, 1e-300))
    rel_phase = np.angle(system.eigenvalues / params.global_phase)
    physical = np.flatnonzero((symmetric > 0.5) & (np.abs(rel_phase) < math.pi / 2))
    energies = eigenphase_to_energy(system.eigenvalues[physical], params.global_phase, eps)
    physical = physical[np.argsort(energies)]
    energies = np.sort(energies)

    profiles = totals[:, physical]
    profiles = profiles / np.linalg.norm(profiles, axis=0)
    n_levels = min(n_levels, physical.size)
    continuum = np.column_stack([ho_eigenfunction(n, mass, omega, x) for n in range(n_levels)])
    continuum = continuum / np.linalg.norm(continuum, axis=0)
    overlap_matrix = np.abs(continuum.T @ profiles)
    rows, cols = linear_sum_assignment(-overlap_matrix)
    matched = cols[np.argsort(rows)]

    matched_profiles = profiles[:, matched]
    # align phases with the real continuum functions for plotting
    align = np.sum(continuum * matched_profiles, axis=0)
    matched_profiles = matched_profiles * np.exp(-1j * np.angle(align))
    return OscillatorReport(
        l_sites=l_sites,
        a_coeff=a_coeff,
        theta=theta,
        eps=eps,
        mass=mass,
        omega=omega,
        energies=energies[matched],
        continuum_energies=omega * (np.arange(n_levels) + 0.5),
        overlaps=overlap_matrix[np.arange(n_levels), matched],
        nodes=np.array([count_nodes(matched_profiles[:, i]) for i in range(n_levels)]),
        matched=matched,
        positions=x,
        profiles=matched_profiles,
        continuum=continuum,
        all_eigenvalues=system.eigenvalues,
    )


def ladder_energies(model: QlgaModel, count: int) -> np.ndarray:
    """Lowest ``count`` physical energies of a one-particle 1D model."""
    system = eigendecompose(step_matrix(model, 1))
    l_sites = model.lattice.n_sites
    amps = system.eigenvectors.reshape(l_sites, 2, -1)
    symmetric = np.sum(np.abs(amps.sum(axis=1)) ** 2, axis=0) / 2
    rel_phase = np.angle(system.eigenvalues / model.global_phase)
    keep = (symmetric > 0.5) & (np.abs(rel_phase) < math.pi / 2)
    energies = np.sort(eigenphase_to_energy(system.eigenvalues[keep], model.global_phase, model.eps))
    return energies[:count]
