"""Run configuration: TOML files validated against a JSON schema.

Angles (``theta``, ``phi``, ``mu``, ``nu``, ``lambda``) are given in units
of pi.  ``theta``/``phi`` select the 1D rule; ``mu``/``nu``/``lambda``
select the lattice-symmetric single-particle rule in any dimension.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import jsonschema

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .collision import (
    Collision1DParams,
    CollisionDDParams,
    quadratic_distance_pair,
    quadratic_potential,
    table_pair,
)
from .errors import ConfigError
from .evolve import QlgaModel
from .lattice import LatticeSpec
from .state import SectorState, WavepacketParams, basis_state, gaussian_state

_number = {"type": "number"}
_vector = {"type": "array", "items": _number, "minItems": 1}

SCHEMA = {
    "type": "object",
    "required": ["model"],
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "required": ["dimension", "extent"],
            "additionalProperties": False,
            "properties": {
                "dimension": {"type": "integer", "minimum": 1, "maximum": 3},
                "extent": {"type": "integer", "minimum": 2},
                "eps": {"type": "number", "exclusiveMinimum": 0},
                "theta": _number,
                "phi": _number,
                "mu": _number,
                "nu": _number,
                "lambda": _number,
                "potential": {
                    "type": "object",
                    "required": ["name"],
                    "additionalProperties": False,
                    "properties": {
                        "name": {"enum": ["none", "quadratic"]},
                        "a": _number,
                    },
                },
                "pair_potential": {
                    "type": "object",
                    "required": ["name"],
                    "additionalProperties": False,
                    "properties": {
                        "name": {"enum": ["none", "quadratic_distance", "table"]},
                        "coefficient": _number,
                        "values": {"type": "array", "items": _number},
                    },
                },
            },
            "oneOf": [
                {"required": ["theta"], "not": {"anyOf": [{"required": ["mu"]}, {"required": ["nu"]}, {"required": ["lambda"]}]}},
                {"required": ["mu", "nu", "lambda"], "not": {"anyOf": [{"required": ["theta"]}, {"required": ["phi"]}]}},
            ],
        },
        "run": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "steps": {"type": "integer", "minimum": 0},
                "n": {"type": "integer", "minimum": 0},
                "levels": {"type": "integer", "minimum": 1},
                "parity_class": {"enum": [0, 1]},
                "k_min": _number,
                "k_max": _number,
                "n_k": {"type": "integer", "minimum": 1},
                "initial": {
                    "type": "object",
                    "required": ["kind"],
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"enum": ["gaussian", "configuration"]},
                        "center": _vector,
                        "width": {"type": "number", "exclusiveMinimum": 0},
                        "wavenumber": _vector,
                        "weights": {"type": "array", "items": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}},
                        "parity": {"enum": [0, 1]},
                        "slots": {
                            "type": "array",
                            "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2},
                        },
                    },
                },
            },
        },
    },
}


def _check_finite(node, path="config"):
    if isinstance(node, dict):
        for k, v in node.items():
            _check_finite(v, f"{path}.{k}")
    elif isinstance(node, list):
        for i, v in enumerate(node):
            _check_finite(v, f"{path}[{i}]")
    elif isinstance(node, float) and not math.isfinite(node):
        raise ConfigError(f"{path} must be finite")


def validate(cfg: dict) -> dict:
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None
    _check_finite(cfg)
    return cfg


def load_config(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        with path.open("rb") as fh:
            cfg = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return validate(cfg)


def build_model(cfg: dict) -> QlgaModel:
    mc = cfg["model"]
    lattice = LatticeSpec(mc["dimension"], mc["extent"])
    eps = float(mc.get("eps", 1.0))
    if "theta" in mc:
        if lattice.dimension != 1:
            raise ConfigError("theta/phi describe the 1D rule; use mu/nu/lambda for D > 1")
        collision = Collision1DParams(math.pi * mc["theta"], complex(math.cos(math.pi * mc.get("phi", 0.0)), math.sin(math.pi * mc.get("phi", 0.0))))
    else:
        collision = CollisionDDParams.from_angles(
            math.pi * mc["mu"], math.pi * mc["nu"], math.pi * mc["lambda"], lattice.dimension
        )
    pot = mc.get("potential", {"name": "none"})
    potential = None
    if pot["name"] == "quadratic":
        if "a" not in pot:
            raise ConfigError("quadratic potential needs coefficient 'a'")
        potential = quadratic_potential(float(pot["a"]), eps)
    pair = mc.get("pair_potential", {"name": "none"})
    pair_potential = None
    if pair["name"] == "quadratic_distance":
        if "coefficient" not in pair:
            raise ConfigError("quadratic_distance needs 'coefficient'")
        pair_potential = quadratic_distance_pair(float(pair["coefficient"]))
    elif pair["name"] == "table":
        if not pair.get("values"):
            raise ConfigError("table pair potential needs non-empty 'values'")
        pair_potential = table_pair(pair["values"], eps, lattice.extent)
    model = QlgaModel(lattice, collision, potential, pair_potential, eps)
    if pair_potential is not None:
        # surfaces asymmetric or non-finite tables before any run starts
        model.pair_site_matrix
    model.site_potential
    return model


def build_initial_state(cfg: dict, lattice: LatticeSpec) -> SectorState:
    run = cfg.get("run", {})
    init = run.get("initial")
    if init is None:
        raise ConfigError("run.initial is required")
    if init["kind"] == "gaussian":
        for key in ("center", "width"):
            if key not in init:
                raise ConfigError(f"gaussian initial state needs '{key}'")
        k = init.get("wavenumber", [0.0] * lattice.dimension)
        params = WavepacketParams(tuple(init["center"]), float(init["width"]), tuple(k))
        weights = None
        if "weights" in init:
            weights = [complex(re, im) for re, im in init["weights"]]
        state = gaussian_state(lattice, params, weights, parity=init.get("parity"))
        if run.get("n", 1) != 1:
            raise ConfigError("gaussian initial states are single-particle; set n = 1")
        return state
    slots = []
    for entry in init.get("slots", []):
        *coords, direction = entry
        if len(coords) != lattice.dimension:
            raise ConfigError(f"slot {entry} needs {lattice.dimension} coordinates and a direction")
        if any(not 0 <= c < lattice.extent for c in coords):
            raise ConfigError(f"slot {entry} has coordinates outside [0, {lattice.extent})")
        slots.append(lattice.slot_index(coords, direction))
    state = basis_state(lattice, slots)
    if "n" in run and run["n"] != state.n:
        raise ConfigError(f"run.n = {run['n']} but the configuration holds {state.n} particles")
    return state
