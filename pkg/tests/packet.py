"""Free Gaussian packet run compared against the continuum solution.

The packet has width ``l / 64`` and runs ``l^2 / 512`` steps, so physical
time and packet shape are fixed as ``l`` grows.  The lattice amplitude is
matched to the continuum one by the projection at ``t = 0`` and both are
rescaled by the same factor, so the error is relative to a unit packet.
"""

import math

import numpy as np

from qlga import Collision1DParams, LatticeSpec, QlgaModel, WavepacketParams, evolve, gaussian_state, total_amplitude
from qlga.oracle import free_gaussian


def packet_error(l_sites, parity=0, k0=0.0, backend=None):
    lat = LatticeSpec(1, l_sites)
    sigma, steps = l_sites / 64, l_sites * l_sites // 512
    packet = WavepacketParams((l_sites / 2,), sigma, (k0,))
    state = gaussian_state(lat, packet, parity=parity)
    model = QlgaModel(lat, Collision1DParams(math.pi / 4))
    g = model.global_phase
    x = np.arange(l_sites)

    active0 = x % 2 == parity
    f0 = free_gaussian(x[active0].astype(float), 0, packet, 1.0)
    c = np.vdot(f0, total_amplitude(state, 0, g)[active0]) / np.vdot(f0, f0)
    scale = 1 / np.linalg.norm(c * f0)

    out = evolve(state, model, steps, backend=backend)
    active = (x + steps) % 2 == parity
    psi = total_amplitude(out, steps, g)[active] * scale
    ref = c * free_gaussian(x[active].astype(float), steps, packet, 1.0) * scale
    return float(np.linalg.norm(psi - ref))
