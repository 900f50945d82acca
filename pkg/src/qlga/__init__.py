"""Quantum lattice-gas automata simulator."""

from .collision import (
    Collision1DParams,
    CollisionDDParams,
    PairPotentialSpec,
    PotentialSpec,
    UnitaryOperator,
    build_C_dd,
    build_T1,
    gas_T,
    mass_1d,
    mass_dd,
    quadratic_potential,
)
from .errors import (
    BranchError,
    CapacityError,
    ConfigError,
    ConvergenceError,
    QlgaError,
    UnitarityError,
    UnsupportedSectorError,
)
from .evolve import QlgaModel, evolve, step, step_matrix, sublattice_projector
from .lattice import LatticeSpec, advect_permutation, directions, opposite
from .state import (
    SectorState,
    WavepacketParams,
    basis_state,
    gaussian_state,
    point_state,
    sector_basis,
    total_amplitude,
)

__version__ = "0.1.0"
