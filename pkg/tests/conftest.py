import math

import numpy as np
import pytest
from hypothesis import settings

from qlga import Collision1DParams, LatticeSpec, QlgaModel, quadratic_potential
from qlga.collision import quadratic_distance_pair, table_pair

settings.register_profile("qlga", deadline=None, max_examples=40)
settings.load_profile("qlga")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state_vector(rng, size):
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return v / np.linalg.norm(v)


def small_1d_models(extent=4):
    """A spread of 1D models: free, potential, pair, both, odd angles."""
    lat = LatticeSpec(1, extent)
    eps = 0.7
    return {
        "free": QlgaModel(lat, Collision1DParams(math.pi / 4)),
        "streaming": QlgaModel(lat, Collision1DParams(0.0)),
        "phi": QlgaModel(lat, Collision1DParams(0.3, np.exp(0.9j))),
        "potential": QlgaModel(lat, Collision1DParams(1.1, np.exp(-0.4j)), quadratic_potential(0.8, eps), eps=eps),
        "pair": QlgaModel(lat, Collision1DParams(0.6, 1j), None, quadratic_distance_pair(0.45), eps=eps),
        "contact": QlgaModel(lat, Collision1DParams(0.6, -1), None, table_pair([2.0, 0.5], eps, extent), eps=eps),
        "all": QlgaModel(lat, Collision1DParams(2.2, np.exp(2.1j)), quadratic_potential(-0.3, eps),
                         quadratic_distance_pair(0.2), eps=eps),
    }
