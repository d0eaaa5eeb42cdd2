"""Scenario execution: config in, :class:`RunReport` out."""

from __future__ import annotations

import time

import numpy as np
from dataclasses import dataclass
from typing import Any

from . import __version__
from . import algebra as alg
from . import config as cfgmod
from . import maps
from . import matrix as mx
from . import report
from . import stability as st
from .scalars import decompose_lambda
from .rng import derive_seed

T_ZERO_TOL = 1e-12


@dataclass
class RunReport:
    scenario: str
    config: dict
    payload: dict
    passed: bool
    reason: str | None = None
    wall_time: float = 0.0
    version: str = __version__

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        out = {
            "version": self.version,
            "scenario": self.scenario,
            "config": self.config,
            "payload": report.to_jsonable(self.payload),
            "pass": bool(self.passed),
            "reason": self.reason,
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, indent: int | None = 2, include_timing: bool = False) -> str:
        return report.dumps(self.to_dict(include_timing), indent)


def _closure(cfg: dict) -> tuple[dict, bool]:
    a = cfgmod.build_algebra(cfg["algebra"])
    s, tol = cfg["sampling"], cfg["tolerances"]["closure"]
    rep = alg.verify_closure(a, s["trials"], tol, seed=s["seed"], scale=s["scale"])
    payload: dict[str, Any] = {"closure": rep}
    ok = rep.passed
    if a.kind is alg.Kind.CARTAN4:
        spin = alg.verify_spin_property(a, s["trials"], seed=s["seed"], scale=s["scale"])
        # per-sample contract tol * (1 + ||x||^2), samples have ||x|| < 2 * scale
        spin_bound = tol * (1.0 + (2.0 * s["scale"]) ** 2)
        payload["spin"] = {"max_residual": spin, "bound": spin_bound, "passed": spin <= spin_bound}
        ok = ok and spin <= spin_bound
    return payload, ok


def _decompose(cfg: dict) -> tuple[dict, bool]:
    re, im = cfg["lambda"]
    lam = complex(re, im)
    if lam == 0:
        raise cfgmod.ConfigError("lambda must be nonzero")
    d = decompose_lambda(lam)
    tol = 1e-12 * (1.0 + abs(lam))
    payload = {
        "lambda": lam,
        "M": d.M,
        "mu1": d.triple.mu1,
        "mu2": d.triple.mu2,
        "mu3": d.triple.mu3,
        "target": d.triple.target,
        "residual": d.residual,
        "tolerance": tol,
    }
    return payload, d.residual <= tol


def _stability(cfg: dict) -> tuple[dict, bool]:
    a = cfgmod.build_algebra(cfg["algebra"])
    h = cfgmod.build_map(cfg["map"], a)
    ctrl = cfgmod.build_control(cfg["control"])
    s, e = cfg["sampling"], cfg["extraction"]
    rep = st.assess("stability", h, ctrl, a, trials=s["trials"], seed=s["seed"], scale=s["scale"],
                    tol=e["tol"], max_n=e["max_n"], hom_tol=cfg["tolerances"]["hom"])
    return {"stability": rep}, rep.passed


def _example23(cfg: dict) -> tuple[dict, bool]:
    a = cfgmod.build_algebra(cfg["algebra"])
    H = cfgmod.build_map(cfg["map"], a)
    try:
        h = maps.make_example23(H)
    except ValueError as exc:
        raise cfgmod.ConfigError(f"map: {exc}") from None
    ctrl = cfgmod.build_control(cfg["control"])
    s, e, hom_tol = cfg["sampling"], cfg["extraction"], cfg["tolerances"]["hom"]
    trials, seed, scale = s["trials"], s["seed"], s["scale"]

    rep = st.assess("example23", h, ctrl, a, trials=trials, seed=seed, scale=scale,
                    tol=e["tol"], max_n=e["max_n"], hom_tol=hom_tol)

    t_max, t_witness, t_nonconv = 0.0, None, 0
    for t in range(trials):
        x = alg.sample(a, derive_seed(seed, 4, t), scale)
        res = st.extract(h, x, e["tol"], e["max_n"])
        if not res.converged:
            t_nonconv += 1
        n = mx.spectral_norm(res.value)
        if t_witness is None or n > t_max:
            t_max, t_witness = n, {"x": x, "T_x": res.value, "n_used": res.n_used}
    restricted = st.verify_restricted_mu(h, a, trials, derive_seed(seed, 5), scale=scale,
                                         tol=e["tol"], max_n=e["max_n"])
    h_check = maps.is_exact_jstar_hom(h, min(trials, 100), hom_tol, seed=derive_seed(seed, 6), scale=scale)

    checks = {
        "sup_defect_within_control": rep.hypothesis_margin_min is not None and rep.hypothesis_margin_min >= 0,
        "extracted_is_zero": t_max <= T_ZERO_TOL and t_nonconv == 0,
        "bound_holds": rep.passed and rep.bound_margin_min >= 0,
        "restricted_mu": not restricted.nonconverged
        and max(restricted.i_homogeneity, restricted.c_linearity) <= hom_tol,
    }
    payload = {
        "stability": rep,
        "extracted_norm_max": t_max,
        "extracted_witness": t_witness,
        "restricted_mu": restricted,
        "h_is_exact_jstar_hom": h_check,
        "checks": checks,
    }
    return payload, all(checks.values())


SCENARIOS = {
    "closure": _closure,
    "decompose": _decompose,
    "stability": _stability,
    "example23": _example23,
}


def run(raw_config: dict) -> RunReport:
    """Validate, execute and report one scenario.

    Invalid configs raise :class:`jstar.config.ConfigError`; numerical
    failures (overflow guards, non-convergence) produce a failed report.
    """
    cfg = cfgmod.normalize(raw_config)
    start = time.perf_counter()
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            payload, ok = SCENARIOS[cfg["scenario"]](cfg)
        reason = None if ok else "certified check failed"
    except cfgmod.ConfigError:
        raise
    except (ValueError, ArithmeticError, st.ExtractionFailure) as exc:
        payload, ok, reason = {}, False, f"{type(exc).__name__}: {exc}"
    return RunReport(cfg["scenario"], cfg, payload, ok, reason, time.perf_counter() - start)
