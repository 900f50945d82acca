import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qlga import ConfigError, UnitarityError, UnitaryOperator
from qlga.collision import (
    Collision1DParams,
    CollisionDDParams,
    PairPotentialSpec,
    build_C_dd,
    build_T1,
    direction_projectors,
    gas_T,
    local_collision_matrix,
    mass_1d,
    mass_dd,
    mass_dd_nu1,
    pair_interaction_phase,
    potential_phase_op,
    quadratic_distance_pair,
    quadratic_potential,
    table_pair,
    unitarity_residual,
)

angles = st.floats(-math.pi, math.pi, allow_nan=False)


def test_T1_identity_at_zero():
    assert np.array_equal(build_T1(Collision1DParams(0.0, 1.0)).matrix, np.eye(4))


def test_T1_layout():
    p = Collision1DParams(0.3, np.exp(0.2j))
    t = build_T1(p).matrix
    assert t[0, 0] == 1 and t[3, 3] == p.phi
    assert t[1, 1] == t[2, 2] == math.cos(0.3)
    assert t[1, 2] == t[2, 1] == -1j * math.sin(0.3)
    assert np.count_nonzero(t) == 6


def test_T1_pi_over_4_unitarity():
    t = build_T1(Collision1DParams(math.pi / 4, 1j)).matrix
    assert unitarity_residual(t) <= 1e-15


@given(angles, angles)
def test_1d_constraints_hold(theta, phi):
    p = Collision1DParams(theta, cmath.exp(1j * phi))
    assert abs(abs(p.q) ** 2 + abs(p.p) ** 2 - 1) < 1e-15
    assert abs(p.p * p.q.conjugate() + p.p.conjugate() * p.q) < 1e-15


def test_phase_validation():
    with pytest.raises(ConfigError):
        Collision1DParams(0.1, 1.1)
    with pytest.raises(ConfigError):
        CollisionDDParams(1, 1, -1, 2)
    with pytest.raises(ConfigError):
        CollisionDDParams(1j, 1, 1j, 2)


def test_unitary_operator_rejects_non_unitary():
    with pytest.raises(UnitarityError):
        UnitaryOperator(np.array([[1.0, 1e-9], [0.0, 1.0]]))


@given(angles)
def test_T1_matches_gas_T_without_potential(gamma):
    # q = (mu + 1) / 2, p = (mu - 1) / 2 satisfy the 1D constraints for unit mu
    mu = cmath.exp(1j * gamma)
    q, p = (mu + 1) / 2, (mu - 1) / 2
    assert abs(abs(q) ** 2 + abs(p) ** 2 - 1) < 1e-14
    assert abs(p * q.conjugate() + p.conjugate() * q) < 1e-14
    g = gas_T(mu, 1j, 0.0, 0.3, 1.7).matrix
    expected = np.array([[1, 0, 0, 0], [0, q, p, 0], [0, p, q, 0], [0, 0, 0, 1j]])
    assert np.max(np.abs(g - expected)) <= 1e-14


def test_gas_T_identity():
    assert np.max(np.abs(gas_T(1, 1, 0.0, 0.5, 2.0).matrix - np.eye(4))) == 0


def test_gas_T_two_particle_phase_doubles():
    a, eps, x = 0.7, 0.4, 1.3
    g = gas_T(np.exp(0.5j), np.exp(0.2j), a, eps, x).matrix
    single = np.exp(-1j * a * eps**2 * x**2)
    assert abs(g[3, 3] - np.exp(0.2j) * single**2) < 1e-15
    assert abs(g[1, 1] - (np.exp(0.5j) + 1) / 2 * single) < 1e-15


def test_gas_T_is_potential_after_collision():
    # folding the potential into the collision equals per-q-bit phases applied after it
    mu, phi, a, eps, x = np.exp(0.8j), np.exp(-1.1j), 0.6, 0.5, -2.0
    pot = potential_phase_op(quadratic_potential(a, eps), [x]).matrix
    two_qubit = np.kron(pot, pot)  # basis (--, -+, +-, ++) is symmetric here
    t1 = gas_T(mu, phi, 0.0, eps, x).matrix
    assert np.max(np.abs(two_qubit @ t1 - gas_T(mu, phi, a, eps, x).matrix)) < 1e-15


def test_C_dd_1d_block():
    mu, nu = np.exp(0.4j), np.exp(-1.3j)
    c = build_C_dd(CollisionDDParams(mu, nu, 1.0, 1)).matrix
    q, p = (mu + nu) / 2, (mu - nu) / 2
    assert np.max(np.abs(c - np.array([[q, p], [p, q]]))) < 1e-15
    assert np.allclose(sorted(np.linalg.eigvals(c), key=np.angle), sorted([mu, nu], key=np.angle), atol=1e-14)


def test_C_dd_2d_entries():
    mu = np.exp(1j * math.pi / 3)
    c = build_C_dd(CollisionDDParams(mu, 1, -1, 2)).matrix
    for u in range(4):
        for v in range(4):
            expected = (mu + 1) / 4 - (1 if u == v ^ 1 else 0)
            assert abs(c[u, v] - expected) < 1e-15
    assert unitarity_residual(c) < 1e-15


@pytest.mark.parametrize("d", [1, 2, 3])
def test_C_dd_degenerate_identity_rejected(d):
    # mu = nu = lambda = 1 is the identity, whose mass is undefined
    with pytest.raises(ConfigError):
        CollisionDDParams(1, 1, 1, d)


@pytest.mark.parametrize("d", [2, 3])
def test_C_dd_projectors_sum_to_identity(d):
    const, odd, even = direction_projectors(d)
    assert np.allclose(const + odd + even, np.eye(2 * d), atol=1e-15)
    for p in (const, odd, even):
        assert np.allclose(p @ p, p, atol=1e-15)


@given(st.integers(1, 3), angles, angles, angles)
def test_C_dd_eigenvectors(d, a, b, c):
    mu, nu, lam = (cmath.exp(1j * t) for t in (a, b, c))
    if abs(mu - nu) < 1e-6 or (d > 1 and abs(mu - lam) < 1e-6):
        return
    mat = build_C_dd(CollisionDDParams(mu, nu, lam, d)).matrix
    assert unitarity_residual(mat) <= 1e-12
    ones = np.ones(2 * d)
    assert np.max(np.abs(mat @ ones - mu * ones)) < 1e-14
    for i in range(d):
        v = np.zeros(2 * d)
        v[2 * i], v[2 * i + 1] = 1, -1
        assert np.max(np.abs(mat @ v - nu * v)) < 1e-14
    if d > 1:
        w = np.zeros(2 * d)
        w[0] = w[1] = 1
        w[2] = w[3] = -1
        assert np.max(np.abs(mat @ w - lam * w)) < 1e-14


@given(st.floats(-1.5, 1.5))
def test_mass_1d_is_tan(theta):
    if abs(math.cos(theta)) < 1e-3:
        return
    assert abs(mass_1d(Collision1DParams(theta)) - math.tan(theta)) <= 1e-12 * max(1, abs(math.tan(theta)))


def test_mass_1d_pi_over_4():
    assert abs(mass_1d(Collision1DParams(math.pi / 4)) - 1) < 1e-15


def test_mass_1d_infinite():
    with pytest.raises(ConfigError):
        mass_1d(Collision1DParams(math.pi / 2))


@given(st.floats(0.05, 1.5))
def test_mass_dd_reproduces_1d(theta):
    p = Collision1DParams(theta)
    m = mass_dd(p.q + p.p, p.q - p.p, 1)
    assert abs(m - mass_1d(p)) <= 1e-10 * max(1, abs(m))


@given(st.floats(0.05, 3.0))
def test_mass_dd_nu_one(gamma):
    mu = cmath.exp(1j * gamma)
    assert abs(mass_dd(mu, 1, 1) + math.tan(gamma / 2)) < 1e-10 * max(1, math.tan(gamma / 2))
    # the two closed forms coincide in one dimension
    assert abs(mass_dd_nu1(mu, 1) - mass_dd(mu, 1, 1)) < 1e-10 * max(1, math.tan(gamma / 2))
    # and differ by d^2 otherwise
    assert abs(mass_dd(mu, 1, 2) - 4 * mass_dd_nu1(mu, 2)) < 1e-10 * max(1, math.tan(gamma / 2))


def test_mass_dd_degenerate():
    with pytest.raises(ConfigError):
        mass_dd(1j, 1j, 2)
    with pytest.raises(ConfigError):
        mass_dd(1j, 1j * (1 + 1e-14), 2)


def test_mass_dd_non_real():
    # |mu| != 1 breaks realness
    with pytest.raises(ConfigError):
        mass_dd(2.0, 1j, 1)


def test_potential_phase_op():
    assert np.array_equal(potential_phase_op(quadratic_potential(0.0, 1.0), [3.0]).matrix, np.eye(2))
    spec = quadratic_potential(1.0, 1.0)
    op = potential_phase_op(spec, [math.sqrt(math.pi)]).matrix
    assert abs(op[1, 1] + 1) < 1e-15 and op[0, 0] == 1


def test_pair_phase():
    zero = PairPotentialSpec(lambda x, y: 0.0 * np.sum(x - y, axis=-1))
    assert pair_interaction_phase(zero, [0.0], [1.0], 1.0) == 1
    spec = PairPotentialSpec(lambda x, y: np.full(np.broadcast_shapes(x.shape, y.shape)[:-1], math.pi / 2))
    assert abs(pair_interaction_phase(spec, [0.0], [1.0], 1.0) + 1j) < 1e-15


def test_table_pair_minimum_image():
    spec = table_pair([5.0, 2.0, 1.0], eps=0.5, extent=8)
    x = np.array([[0.0], [0.5], [1.0], [3.5]])
    vm = spec.site_matrix(x)
    assert vm[0, 0] == 5.0 and vm[0, 1] == 2.0 and vm[0, 2] == 1.0
    # 0 and 3.5 are one site apart across the wrap (period 4)
    assert vm[0, 3] == 2.0


def test_asymmetric_pair_rejected():
    spec = PairPotentialSpec(lambda x, y: np.sum(x, axis=-1) + 0 * np.sum(y, axis=-1))
    with pytest.raises(ConfigError):
        spec.site_matrix(np.array([[0.0], [1.0]]))


def test_local_matrix_1d_is_T1():
    p = Collision1DParams(0.7, np.exp(0.1j))
    assert np.array_equal(local_collision_matrix(p, 1), build_T1(p).matrix)


def test_local_matrix_dd_single_block():
    p = CollisionDDParams.from_angles(0.5, 0.0, math.pi, 2)
    local = local_collision_matrix(p, 2)
    c = build_C_dd(p).matrix
    bits = [1, 2, 4, 8]
    assert np.array_equal(local[np.ix_(bits, bits)], c)
    assert unitarity_residual(local) < 1e-12


@given(st.floats(-3.0, 3.0))
def test_C_dd_1d_is_T1_block(theta):
    p = Collision1DParams(theta)
    if abs(p.p) < 1e-6:
        return
    c = build_C_dd(CollisionDDParams(p.q + p.p, p.q - p.p, 1.0, 1)).matrix
    t = build_T1(p).matrix
    assert np.max(np.abs(c - t[1:3, 1:3])) <= 1e-14
