"""The builtin acceptance matrix, one :class:`RunReport` per criterion.

Every criterion runs with fixed seeds, so two invocations produce
byte-identical JSON. Determinism itself (criterion 10) is checked by running
the suite twice and comparing the serialized output.
"""

from __future__ import annotations

import math
import time
from typing import Callable, Iterable

import numpy as np

from . import algebra as alg
from . import controls as ctl
from . import maps
from . import matrix as mx
from . import report
from . import stability as st
from .rng import SplitMix64, derive_seed
from .runner import RunReport, run
from .scalars import unimodular_triples, verify_lambda_action

SUITE_SEED = 20050101


def _report(name: str, params: dict, payload: dict, passed: bool, start: float) -> RunReport:
    return RunReport(name, params, payload, passed, None if passed else "criterion failed",
                     time.perf_counter() - start)


def cube_identity(seed: int = SUITE_SEED) -> RunReport:
    start = time.perf_counter()
    shapes = [(1, 1), (2, 2), (3, 3), (4, 4), (2, 3)]
    algebras = [alg.make_cartan_type1(n, m) for n, m in shapes]
    worst, witness = 0.0, None
    for i in range(200):
        a = algebras[i % len(shapes)]
        scale = 10.0 ** (4.0 * SplitMix64.from_labels(seed, 1, i).uniform() - 2.0)
        x = alg.sample(a, derive_seed(seed, 1, i, 1), scale)
        nx = mx.spectral_norm(x)
        err = abs(mx.spectral_norm(mx.triple(x)) - nx**3)
        ratio = err / (1e-9 * max(1.0, nx**3))
        if witness is None or ratio > worst:
            worst, witness = ratio, {"x": x, "abs_error": err}
    payload = {"max_error_over_tolerance": worst, "witness": witness}
    return _report("criterion-1-cube-identity", {"samples": 200, "shapes": shapes, "tol": 1e-9},
                   payload, worst <= 1.0, start)


def closure(seed: int = SUITE_SEED) -> RunReport:
    start = time.perf_counter()
    cases = {
        "full2": alg.make_full(2),
        "full3": alg.make_full(3),
        "cartan1_2x3": alg.make_cartan_type1(2, 3),
        "cartan4_k3": alg.make_cartan_type4(3),
        "cartan4_k5": alg.make_cartan_type4(5),
    }
    payload, ok = {}, True
    for i, (name, a) in enumerate(cases.items()):
        rep = alg.verify_closure(a, 1000, 1e-10, seed=derive_seed(seed, 2, i))
        payload[name] = {"max_residual": rep.max_residual, "passed": rep.passed}
        ok = ok and rep.passed
    for k in (3, 5):
        r = alg.verify_spin_property(alg.make_cartan_type4(k), 1000, seed=derive_seed(seed, 2, 10 + k))
        payload[f"spin_k{k}"] = {"max_residual": r, "passed": r <= 1e-10}
        ok = ok and r <= 1e-10
    return _report("criterion-2-closure", {"trials": 1000, "tol": 1e-10}, payload, ok, start)


def example23_configs(seed: int = SUITE_SEED, control: ctl.Control | None = None) -> list[dict]:
    ctrl = report.control_to_json(control if control is not None else ctl.Constant(4.0))
    base = {
        "scenario": "example23",
        "algebra": {"kind": "full", "n": 2},
        "control": ctrl,
        "sampling": {"trials": 1000, "seed": derive_seed(seed, 3), "scale": 1.0},
    }
    return [
        {**base, "map": {"variant": "transpose"}},
        {**base, "map": {"variant": "exact_uv", "unitary_seed": derive_seed(seed, 3, 1)}},
    ]


def example23(seed: int = SUITE_SEED, control: ctl.Control | None = None) -> RunReport:
    start = time.perf_counter()
    payload, ok = {}, True
    for cfg in example23_configs(seed, control):
        rep = run(cfg)
        inner = cfg["map"]["variant"]
        stab = rep.payload.get("stability")
        hom = stab.hom_residuals if stab else None
        payload[inner] = {
            "pass": rep.passed,
            "reason": rep.reason,
            "sup_defect": stab.sup_defect if stab else None,
            "extracted_norm_max": rep.payload.get("extracted_norm_max"),
            "bound_margin_min": stab.bound_margin_min if stab else None,
            "bound_witness": stab.bound_witness if stab else None,
            "hom_residuals_max": max(hom.additivity, hom.s1_homogeneity, hom.general_lambda, hom.triple)
            if hom else None,
            "checks": rep.payload.get("checks"),
        }
        ok = ok and rep.passed
    params = {"configs": example23_configs(seed, control)}
    return _report("criterion-3-example23", params, payload, ok, start)


def _exact_maps(seed: int) -> dict[str, tuple[Callable, alg.AlgebraDescriptor]]:
    m2 = alg.make_full(2)
    c4 = alg.make_cartan_type4(5)
    c23 = alg.make_cartan_type1(2, 3)
    return {
        "identity_m2": (maps.identity_map(m2), m2),
        "transpose_m2": (maps.Transpose(m2), m2),
        "uv_m2": (maps.ExactUV(maps.random_unitary(2, seed), maps.random_unitary(2, seed + 1), m2), m2),
        "uv_cartan1_2x3": (maps.ExactUV(maps.random_unitary(2, seed + 2), maps.random_unitary(3, seed + 3), c23), c23),
        "identity_spin5": (maps.identity_map(c4), c4),
    }


def unimodular(seed: int = SUITE_SEED, count: int = 10**6) -> RunReport:
    start = time.perf_counter()
    rng = SplitMix64.from_labels(seed, 4)
    u = rng.uniform_block(2 * count)
    lam = 100.0 * u[0::2] * np.exp(2j * np.pi * u[1::2])
    lam = np.concatenate([lam, [100.0, -100.0, 100j, 0.25, 0.2499999999999999, 1e-12, 1.0, 1j, -2.0]])
    r = np.abs(lam)
    M = np.floor(4.0 * r) + 1.0
    mu1, mu2, mu3 = unimodular_triples(3.0 * lam / M)
    unimod = max(float(np.max(np.abs(np.abs(m) - 1.0))) for m in (mu1, mu2, mu3))
    recon = float(np.max(np.abs(M / 3.0 * (mu1 + mu2 + mu3) - lam) / (1.0 + r)))
    ratio = float(np.max(r / M))
    payload = {
        "count": int(lam.size),
        "max_unimodular_error": unimod,
        "max_reconstruction_error_rel": recon,
        "max_lambda_over_M": ratio,
    }
    ok = unimod <= 1e-12 and recon <= 1e-12 and ratio < 0.25

    action = {}
    for i, (name, (T, a)) in enumerate(_exact_maps(derive_seed(seed, 4, 1)).items()):
        worst = 0.0
        for t in range(50):
            x = alg.sample(a, derive_seed(seed, 4, 2, i, t))
            for lam_i in st.LAMBDA_SET:
                worst = max(worst, verify_lambda_action(T, lam_i, x))
        action[name] = worst
        ok = ok and worst <= 1e-10
    payload["lambda_action_max"] = action
    params = {"count": int(lam.size), "lambdas": list(st.LAMBDA_SET)}
    return _report("criterion-4-unimodular", params, payload, ok, start)


GAVRUTA_ALPHAS = (0.1, 1.0, 10.0)
GAVRUTA_PS = (0.0, 0.25, 0.5, 0.75, 0.9)
GAVRUTA_NORMS = ((1.0, 1.0, 0.0), (0.5, 2.0, 3.0), (100.0, 0.0, 1e-3), (1e-3, 1e-3, 1e-3))


def gavruta(seed: int = SUITE_SEED) -> RunReport:
    """Closed form vs 60-term partial sum, plus the corollary identity.

    The partial sum misses the geometric remainder ``2^(60(p-1))`` of the
    closed form, so the relative-error test is only satisfiable for p <= 0.5.
    The certified enclosure (closed form within value + tail) is reported
    alongside for every cell.
    """
    start = time.perf_counter()
    cells, ok = [], True
    for alpha in GAVRUTA_ALPHAS:
        for p in GAVRUTA_PS:
            c = ctl.Power(alpha, p)
            worst_rel, enclosed = 0.0, True
            for nx, ny, nz in GAVRUTA_NORMS:
                closed = ctl.eval_tilde(c, nx, ny, nz)
                series = ctl.eval_tilde_series(c, nx, ny, nz, 60)
                worst_rel = max(worst_rel, abs(closed - series.value) / closed)
                enclosed = enclosed and abs(closed - series.value) <= series.tail_bound
            corr = 0.0
            for nx in (0.1, 1.0, 10.0):
                a, b = ctl.corollary_bound(alpha, p, nx), ctl.eval_tilde(c, nx, nx, 0.0)
                corr = max(corr, abs(a - b) / b)
            cell_ok = worst_rel <= 1e-9 and corr <= 1e-12
            cells.append({"alpha": alpha, "p": p, "truncation_rel_error": worst_rel,
                          "certified_enclosure": enclosed, "corollary_rel_error": corr, "passed": cell_ok})
            ok = ok and cell_ok
    params = {"n_terms": 60, "truncation_tol": 1e-9, "corollary_tol": 1e-12}
    return _report("criterion-5-gavruta-series", params, {"cells": cells}, ok, start)


def rate_law(seed: int = SUITE_SEED) -> RunReport:
    start = time.perf_counter()
    a = alg.make_full(1)
    inner = maps.identity_map(a)
    support = 1e3
    points = (1e-3 * np.exp(0.3j), 0.37 + 0j, 2.5e-2j)
    runs, ok = [], True
    for p in (0.25, 0.5):
        h = maps.BallNoise(inner, 1.0, p, support, derive_seed(seed, 6))
        expected = 2.0 ** (p - 1.0)
        for x0 in points:
            x = mx.cmatrix(x0)
            res = st.extract(h, x, 1e-12, 60)
            nx = abs(x0)
            ratios = [res.deltas[n + 1] / res.deltas[n] for n in range(len(res.deltas) - 1)
                      if 2.0 ** (n + 2) * nx < support]
            dev = max(abs(q / expected - 1.0) for q in ratios) if ratios else math.inf
            good = res.converged and len(ratios) >= 5 and dev <= 1e-6
            runs.append({"p": p, "x": x0, "ratios_measured": len(ratios), "max_rel_deviation": dev,
                         "rate_estimate": res.rate_estimate, "converged": res.converged,
                         "n_used": res.n_used, "passed": good})
            ok = ok and good
    params = {"support_radius": support, "alpha": 1.0, "tol": 1e-12, "max_n": 60, "ratio_tol": 1e-6}
    return _report("criterion-6-rate-law", params, {"runs": runs}, ok, start)


def _x_plus_transpose(x):
    return x + x.T


def superstability(seed: int = SUITE_SEED) -> RunReport:
    start = time.perf_counter()
    m2 = alg.make_full(2)
    candidates = {name: (T, a, True) for name, (T, a) in _exact_maps(derive_seed(seed, 7)).items()}
    candidates["x_plus_transpose_m2"] = (_x_plus_transpose, m2, False)
    payload, ok = {}, True
    for i, (name, (T, a, exact)) in enumerate(candidates.items()):
        hom_r = st.check_r_homogeneous(T, 2.0, 50, derive_seed(seed, 7, i), algebra=a)
        worst_rel, worst_abs, d0_min = 0.0, 0.0, math.inf
        for t in range(20):
            z = alg.sample(a, derive_seed(seed, 7, i, t))
            d = st.scaled_defect_chain(T, z, 2.0, 5)
            worst_abs = max(worst_abs, max(d))
            d0_min = min(d0_min, d[0])
            if d[0] > 0:
                worst_rel = max(worst_rel, max(abs(v - d[0]) for v in d) / d[0])
            elif any(v != 0 for v in d):
                worst_rel = math.inf
        good = hom_r <= 1e-11 and worst_rel <= 1e-9
        if exact:
            good = good and worst_abs <= 1e-10
        payload[name] = {"r_homogeneity": hom_r, "max_rel_variation": worst_rel, "max_d": worst_abs,
                         "min_d0": d0_min, "exact": exact, "passed": good}
        ok = ok and good
    return _report("criterion-7-superstability-chain", {"r": 2.0, "n_max": 5, "z_samples": 20}, payload, ok, start)


def restricted_mu(seed: int = SUITE_SEED) -> RunReport:
    start = time.perf_counter()
    payload, ok = {}, True
    for i, (name, (h, a)) in enumerate(_exact_maps(derive_seed(seed, 8)).items()):
        r = st.verify_restricted_mu(h, a, 100, derive_seed(seed, 8, i))
        good = not r.nonconverged and max(r.i_homogeneity, r.c_linearity) <= 1e-10
        payload[name] = {"i_homogeneity": r.i_homogeneity, "c_linearity": r.c_linearity, "passed": good}
        ok = ok and good
    m2 = alg.make_full(2)
    for name, H in (("example23_transpose", maps.Transpose(m2)),
                    ("example23_identity", maps.identity_map(m2))):
        r = st.verify_restricted_mu(maps.make_example23(H), m2, 200, derive_seed(seed, 8, 99))
        good = not r.nonconverged and r.i_homogeneity == 0.0 and r.c_linearity == 0.0
        payload[name] = {"i_homogeneity": r.i_homogeneity, "c_linearity": r.c_linearity, "passed": good}
        ok = ok and good
    return _report("criterion-8-restricted-mu", {"exact_tol": 1e-10}, payload, ok, start)


def negative_controls(seed: int = SUITE_SEED) -> RunReport:
    start = time.perf_counter()
    m2 = alg.make_full(2)
    h = maps.make_example23(maps.Transpose(m2))
    bound = st.verify_bound(h, ctl.Constant(0.5), m2, 1000, derive_seed(seed, 9))
    check = maps.is_exact_jstar_hom(h, 50, 1e-10, seed=derive_seed(seed, 9, 1))
    bound_ok = (not bound.passed) and bound.witness is not None and bound.witness["margin"] < 0
    hom_ok = (not check.ok) and check.witness is not None and check.witness["check"] == "additivity"
    payload = {
        "verify_bound_constant_0.5": {"passed": bound.passed, "margin_min": bound.bound_margin_min,
                                      "witness": bound.witness, "detected": bound_ok},
        "is_exact_jstar_hom_truncated": {"result": check.ok, "witness": check.witness, "detected": hom_ok},
    }
    return _report("criterion-9-negative-controls", {}, payload, bound_ok and hom_ok, start)


CRITERIA: dict[int, Callable[..., RunReport]] = {
    1: cube_identity,
    2: closure,
    3: example23,
    4: unimodular,
    5: gavruta,
    6: rate_law,
    7: superstability,
    8: restricted_mu,
    9: negative_controls,
}


def builtin_suite(only: Iterable[int] | None = None, *, example23_control: ctl.Control | None = None,
                  seed: int = SUITE_SEED) -> list[RunReport]:
    """Run the acceptance criteria (all of them, or the ids in ``only``)."""
    ids = sorted(CRITERIA) if only is None else sorted(set(only))
    out = []
    for i in ids:
        if i == 3:
            out.append(example23(seed, example23_control))
        else:
            out.append(CRITERIA[i](seed))
    return out


def suite_passed(reports: Iterable[RunReport]) -> bool:
    return all(r.passed for r in reports)


def suite_json(reports: list[RunReport], indent: int | None = 2) -> str:
    return report.dumps({"pass": suite_passed(reports), "reports": [r.to_dict() for r in reports]}, indent)
