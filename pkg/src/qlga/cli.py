"""``qlga`` command line: evolve, spectrum, dispersion, arbitrate, estimate.

Exit codes: 0 success, 2 configuration error, 3 capacity error,
4 numerical-tolerance failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import complexity, kernels
from .collision import CollisionDDParams, mass_dd, mass_dd_nu1
from .config import build_initial_state, build_model, load_config
from .errors import (
    BranchError,
    CapacityError,
    ConfigError,
    ConvergenceError,
    UnitarityError,
    UnsupportedSectorError,
)
from .evolve import QlgaModel, evolve
from .oracle import arbitrate_mass_formulas, fit_mass, measure_dispersion
from .spectral import oscillator_eigenstate_experiment

log = logging.getLogger("qlga")

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_NUMERIC = 0, 2, 3, 4

EVOLVE_HEADER_PREFIX = ["t", "norm"]
SPECTRUM_HEADER = ["state_index", "level", "site", "x", "re", "im", "continuum_value"]
DISPERSION_HEADER = ["k", "omega_measured", "omega_mu_nu", "omega_nu1", "status"]


class _Outputs:
    """Collects output files and publishes them only if the command succeeds."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.pending: list[tuple[Path, Path]] = []

    def path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=self.out_dir)
        os.close(fd)
        self.pending.append((Path(tmp), self.out_dir / name))
        return Path(tmp)

    def commit(self):
        for tmp, final in self.pending:
            os.replace(tmp, final)
        self.pending.clear()

    def discard(self):
        for tmp, _ in self.pending:
            with contextlib.suppress(FileNotFoundError):
                tmp.unlink()
        self.pending.clear()


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x: float) -> str:
    return repr(float(x))


def _mass_predictions(model: QlgaModel) -> tuple[float, float]:
    """Closed-form masses for the model's rule; NaN where a form is undefined."""
    coll = model.collision
    if isinstance(coll, CollisionDDParams):
        mu, nu, d = coll.mu, coll.nu, coll.dimension
    else:
        mu, nu, d = coll.q + coll.p, coll.q - coll.p, 1
    out = []
    for fn in (lambda: mass_dd(mu, nu, d), lambda: mass_dd_nu1(mu, d, nu)):
        try:
            out.append(fn())
        except ConfigError:
            out.append(float("nan"))
    return out[0], out[1]


def _k_grid(run: dict, default_max: float = 0.2, default_n: int = 21) -> np.ndarray:
    k_max = float(run.get("k_max", default_max))
    k_min = float(run.get("k_min", -k_max))
    n_k = int(run.get("n_k", default_n))
    if not (abs(k_min) <= math.pi and abs(k_max) <= math.pi and k_min <= k_max):
        raise ConfigError("k grid must satisfy -pi <= k_min <= k_max <= pi")
    return np.linspace(k_min, k_max, n_k)


def _dispersion_rows(model: QlgaModel, ks: np.ndarray):
    m_general, m_nu1 = _mass_predictions(model)
    axis = np.eye(model.lattice.dimension)[0]
    rows, good_k, good_w = [], [], []
    for k in ks:
        try:
            w = measure_dispersion(model, k * axis)
            status = "ok"
            good_k.append(k), good_w.append(w)
        except BranchError as exc:
            w, status = float("nan"), f"branch_error: {exc}"
            log.warning("k=%g: %s", k, exc)
        rows.append([_fmt(k), _fmt(w), _fmt(k * k / (2 * m_general)), _fmt(k * k / (2 * m_nu1)), status])
    return rows, np.array(good_k), np.array(good_w), m_general, m_nu1


def cmd_evolve(args) -> int:
    cfg = load_config(args.config)
    model = build_model(cfg)
    state = build_initial_state(cfg, model.lattice)
    steps = int(cfg.get("run", {}).get("steps", 0))
    model.check_sector(state.n)

    outputs = _Outputs(Path(args.out))
    try:
        csv_path = outputs.path("evolve.csv")
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(EVOLVE_HEADER_PREFIX + [f"p_{i}" for i in range(model.lattice.n_sites)])

            def observer(t, norm, occ):
                writer.writerow([t, _fmt(norm)] + [_fmt(v) for v in occ])

            final = evolve(state, model, steps, observers=[observer])
        outputs.path("final_state.json").write_text(json.dumps(final.to_json()))
        outputs.commit()
    finally:
        outputs.discard()
    log.info("evolve: %d steps, final norm %.15f", steps, final.norm())
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    model = build_model(cfg)
    run = cfg.get("run", {})
    mc = cfg["model"]
    if model.lattice.dimension != 1 or "theta" not in mc:
        raise ConfigError("spectrum needs a 1D model with theta")
    pot = mc.get("potential", {"name": "none"})
    if pot["name"] != "quadratic":
        raise ConfigError("spectrum needs a quadratic potential")
    report = oscillator_eigenstate_experiment(
        model.lattice.extent,
        float(pot["a"]),
        model.collision.theta,
        model.eps,
        n_levels=int(run.get("levels", 4)),
        parity_class=int(run.get("parity_class", 0)),
    )
    outputs = _Outputs(Path(args.out))
    try:
        rows = []
        sites = np.flatnonzero(model.lattice.site_coords[:, 0] % 2 == int(run.get("parity_class", 0)))
        for level in range(report.profiles.shape[1]):
            for i, site in enumerate(sites):
                z = report.profiles[i, level]
                rows.append([int(report.matched[level]), level, int(site), _fmt(report.positions[i]),
                             _fmt(z.real), _fmt(z.imag), _fmt(report.continuum[i, level])])
        _write_csv(outputs.path("spectrum.csv"), SPECTRUM_HEADER, rows)
        summary = report.summary()
        summary["eigenphases"] = np.angle(report.all_eigenvalues).tolist()
        outputs.path("spectrum_summary.json").write_text(json.dumps(summary, indent=2))
        outputs.commit()
    finally:
        outputs.discard()
    return EXIT_OK


def cmd_dispersion(args) -> int:
    cfg = load_config(args.config)
    model = build_model(cfg)
    if model.potential is not None or model.pair_potential is not None:
        raise ConfigError("dispersion needs a free model (no potentials)")
    ks = _k_grid(cfg.get("run", {}))
    rows, good_k, good_w, m_general, m_nu1 = _dispersion_rows(model, ks)
    fit = fit_mass(good_k, good_w) if good_k.size >= 2 else None
    outputs = _Outputs(Path(args.out))
    try:
        _write_csv(outputs.path("dispersion.csv"), DISPERSION_HEADER, rows)
        summary = {
            "fitted_mass": None if fit is None else fit.mass,
            "r_squared": None if fit is None else fit.r_squared,
            "m_mu_nu": m_general,
            "m_nu1": m_nu1,
        }
        outputs.path("dispersion_fit.json").write_text(json.dumps(summary, indent=2))
        outputs.commit()
    finally:
        outputs.discard()
    if fit is not None:
        print(f"fitted mass {fit.mass:.6f} (R^2 = {fit.r_squared:.6f})")
    return EXIT_OK


def cmd_arbitrate(args) -> int:
    cfg = load_config(args.config)
    model = build_model(cfg)
    if not isinstance(model.collision, CollisionDDParams):
        raise ConfigError("arbitrate needs mu/nu/lambda angles")
    if model.potential is not None or model.pair_potential is not None:
        raise ConfigError("arbitrate needs a free model (no potentials)")
    run = cfg.get("run", {})
    coll = model.collision
    report = arbitrate_mass_formulas(coll.mu, coll.nu, coll.lam, coll.dimension,
                                     k_max=float(run.get("k_max", 0.05)), n_k=int(run.get("n_k", 11)))
    rows, *_ = _dispersion_rows(model, _k_grid(run, default_max=0.05, default_n=11))
    outputs = _Outputs(Path(args.out))
    try:
        _write_csv(outputs.path("arbitrate.csv"), DISPERSION_HEADER, rows)
        summary = {k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in report.items()}
        outputs.path("arbitrate_summary.json").write_text(json.dumps(summary, indent=2))
        outputs.commit()
    finally:
        outputs.discard()
    print(f"measured m = {report['m_measured']:.6f}; mu-nu relation {report['m_mu_nu']:.6f}; "
          f"nu=1 closed form {report['m_nu1']:.6f}; closest: {report['closest']}")
    return EXIT_OK


def format_estimates(q: int, D: int, n: int) -> str:
    lines = [f"{'formula':<18}{'inputs':<22}{'log10':>14}  exact"]
    for est in complexity.estimate_all(q, D, n):
        inputs = f"q={q} D={D}" + (f" n={n}" if est.formula_id in ("variables", "classical") else "")
        exact = "-" if est.exact_ops is None else str(est.exact_ops)
        lines.append(f"{est.formula_id:<18}{inputs:<22}{est.log10_ops:>14.6f}  {exact}")
    return "\n".join(lines)


def cmd_estimate(args) -> int:
    print(format_estimates(args.q, args.D, args.n))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlga", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--threads", type=int, default=None, help="worker threads; never changes results")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("evolve", cmd_evolve), ("spectrum", cmd_spectrum),
                     ("dispersion", cmd_dispersion), ("arbitrate", cmd_arbitrate)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", default=Path("."), type=Path)
        p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
        p.set_defaults(func=fn)
    p = sub.add_parser("estimate")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.threads is not None:
            kernels.set_num_threads(args.threads)
        return args.func(args)
    except (ConfigError, UnsupportedSectorError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UnitarityError, ConvergenceError) as exc:
        print(f"numerical tolerance failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
