"""Time the numba and numpy backends on table builds and evolution.

    python3 benchmarks/bench_step.py [--repeat 3]

Each case reports the best of ``--repeat`` runs after one warm-up call
(which absorbs numba compilation) and checks the two backends agree.
"""

import argparse
import math
import time

import numpy as np

from qlga import Collision1DParams, LatticeSpec, QlgaModel, SectorState, WavepacketParams, evolve, gaussian_state
from qlga.collision import quadratic_distance_pair

CASES = [
    # (label, extent, n, steps)
    ("1 particle, 4096 sites", 4096, 1, 2000),
    ("2 particles, 256 sites", 256, 2, 200),
    ("3 particles, 48 sites", 48, 3, 50),
]


def initial_state(lat, n):
    if n == 1:
        return gaussian_state(lat, WavepacketParams((lat.extent / 2,), lat.extent / 64, (0.2,)))
    rng = np.random.default_rng(0)
    size = math.comb(lat.n_slots, n)
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return SectorState(lat, n, v / np.linalg.norm(v))


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    print(f"{'case':<26}{'stage':<10}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for label, extent, n, steps in CASES:
        lat = LatticeSpec(1, extent)
        state = initial_state(lat, n)
        pair = quadratic_distance_pair(0.1) if n > 1 else None

        def build_model():
            return QlgaModel(lat, Collision1DParams(0.7), None, pair)

        def build(backend):
            return build_model().transitions(n, backend)

        models = {}

        def run(backend):
            # table build is timed separately; reuse one model per backend
            if backend not in models:
                models[backend] = build_model()
            return evolve(state, models[backend], steps, backend=backend).amplitudes

        results = {}
        for stage, fn in (("build", build), ("evolve", run)):
            t_nb, out_nb = best_of(lambda: fn("numba"), args.repeat)
            t_np, out_np = best_of(lambda: fn("numpy"), args.repeat)
            results[stage] = (out_nb, out_np)
            print(f"{label:<26}{stage:<10}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}")
        a, b = results["build"]
        assert np.array_equal(a.data, b.data) and np.array_equal(a.indices, b.indices)
        diff = np.max(np.abs(results["evolve"][0] - results["evolve"][1]))
        print(f"{'':<26}{'max |numba - numpy| after evolve':<34}{diff:.1e}")


if __name__ == "__main__":
    main()
