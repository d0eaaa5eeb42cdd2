"""Scenario configs: schema validation, defaults, and descriptor construction."""

from __future__ import annotations

import copy
import json
from importlib import resources

import jsonschema

from . import algebra as alg
from . import controls as ctl
from . import maps
from . import matrix as mx


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "sampling": {"trials": 1000, "seed": 0, "scale": 1.0},
    "extraction": {"tol": 1e-12, "max_n": 60},
    "tolerances": {"closure": 1e-10, "hom": 1e-10},
}
EXAMPLE23_DEFAULTS = {
    "algebra": {"kind": "full", "n": 2},
    "map": {"variant": "transpose"},
    "control": {"variant": "constant", "c": 4.0},
}
REQUIRED = {
    "closure": ("algebra",),
    "stability": ("algebra", "map", "control"),
    "decompose": ("lambda",),
    "example23": (),
}


def load_schema(name: str = "config") -> dict:
    text = resources.files("jstar").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def normalize(raw: dict) -> dict:
    """Validate against the schema and fill defaults. Raises :class:`ConfigError`."""
    try:
        jsonschema.validate(raw, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    cfg = copy.deepcopy(raw)
    for section, defaults in DEFAULTS.items():
        cfg[section] = {**defaults, **cfg.get(section, {})}
    if cfg["scenario"] == "example23":
        for section, default in EXAMPLE23_DEFAULTS.items():
            cfg.setdefault(section, copy.deepcopy(default))
    missing = [k for k in REQUIRED[cfg["scenario"]] if k not in cfg]
    if missing:
        raise ConfigError(f"scenario {cfg['scenario']!r} needs: {', '.join(missing)}")
    return cfg


def _need(frag: dict, key: str, what: str):
    if key not in frag:
        raise ConfigError(f"{what} needs {key!r}")
    return frag[key]


def build_algebra(frag: dict) -> alg.AlgebraDescriptor:
    kind = frag["kind"]
    try:
        if kind == "full":
            return alg.make_full(_need(frag, "n", "full algebra"))
        if kind == "cartan1":
            return alg.make_cartan_type1(_need(frag, "n", "cartan1"), _need(frag, "m", "cartan1"))
        if kind == "cartan4":
            return alg.make_cartan_type4(_need(frag, "k", "cartan4"))
        return alg.make_custom([mx.from_literal(b) for b in _need(frag, "basis", "custom algebra")])
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"algebra: {exc}") from None


def build_map(frag: dict, domain: alg.AlgebraDescriptor) -> maps.Map:
    variant = frag["variant"]
    try:
        if variant == "exact_uv":
            n, m = domain.shape
            # U/V literals win; otherwise random unitaries if seeded, else identity
            seed = frag.get("unitary_seed")
            if "U" in frag:
                U = mx.from_literal(frag["U"])
            else:
                U = mx.identity(n) if seed is None else maps.random_unitary(n, seed)
            if "V" in frag:
                V = mx.from_literal(frag["V"])
            else:
                V = mx.identity(m) if seed is None else maps.random_unitary(m, seed + 1)
            return maps.ExactUV(U, V, domain)
        if variant == "transpose":
            return maps.Transpose(domain)
        if variant == "zero":
            return maps.Zero(domain)
        inner = build_map(_need(frag, "inner", variant), domain)
        if variant == "truncated":
            return maps.TruncatedBall(inner, frag.get("radius", 1.0))
        return maps.BallNoise(inner, _need(frag, "alpha", variant), _need(frag, "p", variant),
                              _need(frag, "support_radius", variant), frag.get("seed", 0))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"map: {exc}") from None


def build_control(frag: dict) -> ctl.Control:
    variant = frag["variant"]
    try:
        if variant == "constant":
            return ctl.Constant(float(_need(frag, "c", "constant control")))
        if variant == "power":
            return ctl.Power(float(_need(frag, "alpha", "power control")), float(_need(frag, "p", "power control")))
        return ctl.Sum(tuple(build_control(p) for p in _need(frag, "parts", "sum control")))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"control: {exc}") from None
