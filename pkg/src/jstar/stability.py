"""Defects, Hyers extraction, bound certification and homomorphism checks.

The limit map ``T(x) = lim 2^-n h(2^n x)`` is materialized pointwise: every
evaluation of ``T`` runs its own extraction. Extraction does not stop until
the iterate scale ``2^n ||x||`` has reached the map's ``exact_beyond`` norm,
past which ``h`` agrees with an exact homomorphism and the iterates can no
longer jump.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import algebra as alg
from . import controls as ctl
from . import matrix as mx
from .scalars import verify_lambda_action
from .rng import derive_seed

DEFAULT_TOL = 1e-12
DEFAULT_MAX_N = 60
OVERFLOW_LIMIT = 1e300
MU_SET = (1.0 + 0j, -1.0 + 0j, 1j, cmath.exp(1j * math.pi / 4), cmath.exp(1j))
LAMBDA_SET = (2.0 + 0j, -0.5 + 1.2j, 10j)
REAL_PAIRS = ((1.0, 0.0), (0.0, 1.0), (2.0, -3.0), (0.5, 0.5))

Evaluator = Callable[[np.ndarray], np.ndarray]


def _threads() -> int:
    raw = os.environ.get("JSTAR_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _pmap(fn, items: Sequence) -> list:
    """Order-preserving map, threaded when JSTAR_THREADS (default: cores) > 1."""
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _norm(x) -> float:
    return mx.spectral_norm(x)


# ---------------------------------------------------------------- defects

def defect_mixed(h: Evaluator, mu: complex, x, y, z) -> float:
    """``||h(mu x + mu y + z z* z) - mu h(x) - mu h(y) - h(z) h(z)* h(z)||`` for unimodular mu."""
    mu = complex(mu)
    if abs(abs(mu) - 1.0) > 1e-12:
        raise ValueError(f"mu must be unimodular, |mu| = {abs(mu)}")
    hz = h(z)
    lhs = h(mu * x + mu * y + mx.triple(z))
    return _norm(lhs - mu * h(x) - mu * h(y) - mx.triple(hz))


def defect_general(T: Evaluator, lam: complex, x, y, z) -> float:
    """``||T(lam x + y + z z* z) - lam T(x) - T(y) - T(z) T(z)* T(z)||`` for any complex lam."""
    lam = complex(lam)
    tz = T(z)
    return _norm(T(lam * x + y + mx.triple(z)) - lam * T(x) - T(y) - mx.triple(tz))


def _sample_triple(a: alg.AlgebraDescriptor, seed: int, t: int, scale: float):
    return tuple(alg.sample(a, derive_seed(seed, t, role), scale) for role in range(3))


@dataclass(frozen=True)
class DefectScan:
    sup: float
    witness: dict | None
    hypothesis_margin_min: float | None = None


def scan_defects(h: Evaluator, a: alg.AlgebraDescriptor, mu_set: Iterable[complex], trials: int,
                 scale: float, seed: int, ctrl: ctl.Control | None = None) -> DefectScan:
    """Max mixed defect over samples; with ``ctrl``, also min of ``phi - defect``."""
    mus = tuple(complex(m) for m in mu_set)

    def one(t):
        x, y, z = _sample_triple(a, seed, t, scale)
        best, best_mu = -1.0, None
        for mu in mus:
            d = defect_mixed(h, mu, x, y, z)
            if d > best:
                best, best_mu = d, mu
        margin = None
        if ctrl is not None:
            margin = ctl.eval_phi(ctrl, _norm(x), _norm(y), _norm(z)) - best
        return best, best_mu, margin, (x, y, z)

    results = _pmap(one, range(trials))
    if not results or not mus:
        return DefectScan(0.0, None, None)
    i = max(range(len(results)), key=lambda k: results[k][0])
    best, mu, _, (x, y, z) = results[i]
    margin = min(r[2] for r in results) if ctrl is not None else None
    return DefectScan(best, {"mu": mu, "x": x, "y": y, "z": z, "defect": best}, margin)


def sup_defect(h: Evaluator, a: alg.AlgebraDescriptor, mu_set: Iterable[complex], trials: int,
               scale: float, seed: int) -> float:
    return scan_defects(h, a, mu_set, trials, scale, seed).sup


# ---------------------------------------------------------------- extraction

def hyers_iterate(h: Evaluator, x: np.ndarray, n: int, *, norm_x: float | None = None) -> np.ndarray:
    """``2^-n h(2^n x)``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    nx = _norm(x) if norm_x is None else norm_x
    if nx > 0 and n * math.log(2.0) + math.log(nx) > math.log(OVERFLOW_LIMIT):
        raise ValueError(f"2^{n} * ||x|| overflows the iteration guard")
    s = 2.0**n
    return h(s * x) / s


@dataclass(frozen=True)
class ExtractionResult:
    value: np.ndarray
    n_used: int
    deltas: list[float]
    rate_estimate: float
    converged: bool


def _rate(deltas: Sequence[float]) -> float:
    """Geometric mean of the last (up to 5) ratios of consecutive positive deltas; 0 if none."""
    ratios = [b / a for a, b in zip(deltas[:-1], deltas[1:]) if a > 0 and b > 0][-5:]
    if not ratios:
        return 0.0
    return math.exp(sum(math.log(r) for r in ratios) / len(ratios))


def extract(h: Evaluator, x: np.ndarray, tol: float = DEFAULT_TOL, max_n: int = DEFAULT_MAX_N,
            min_scale: float | None = None) -> ExtractionResult:
    """Iterate ``2^-n h(2^n x)`` until consecutive iterates agree within ``tol``.

    ``min_scale`` defaults to ``h.exact_beyond`` (0 for plain callables): the
    stop is accepted only once ``2^n ||x|| >= min_scale`` as well.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if min_scale is None:
        min_scale = getattr(h, "exact_beyond", 0.0)
    nx = _norm(x)
    prev = hyers_iterate(h, x, 0, norm_x=nx)
    deltas: list[float] = []
    for n in range(1, max_n + 1):
        cur = hyers_iterate(h, x, n, norm_x=nx)
        deltas.append(_norm(cur - prev))
        prev = cur
        if deltas[-1] <= tol and (nx == 0 or 2.0**n * nx >= min_scale):
            return ExtractionResult(cur, n, deltas, _rate(deltas), True)
    return ExtractionResult(prev, max_n, deltas, _rate(deltas), False)


class ExtractionFailure(RuntimeError):
    def __init__(self, x: np.ndarray, result: ExtractionResult):
        super().__init__(f"extraction did not converge within {result.n_used} steps")
        self.x = x
        self.result = result


class ExtractedMap:
    """The limit map ``T`` of ``h``, evaluated pointwise by :func:`extract`."""

    def __init__(self, h: Evaluator, tol: float = DEFAULT_TOL, max_n: int = DEFAULT_MAX_N):
        self.h = h
        self.tol = tol
        self.max_n = max_n
        self.domain = getattr(h, "domain", None)

    def result(self, x: np.ndarray) -> ExtractionResult:
        return extract(self.h, x, self.tol, self.max_n)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        res = self.result(x)
        if not res.converged:
            raise ExtractionFailure(x, res)
        return res.value


# ---------------------------------------------------------------- bound certification

def slack(phi_tilde: float) -> float:
    return 1e-9 * (1.0 + phi_tilde)


@dataclass(frozen=True)
class BoundReport:
    samples: int
    bound_margin_min: float
    passed: bool
    witness: dict | None
    nonconverged: list[dict] = field(default_factory=list)


def verify_bound(h: Evaluator, ctrl: ctl.Control, a: alg.AlgebraDescriptor, trials: int, seed: int, *,
                 scale: float = 1.0, tol: float = DEFAULT_TOL, max_n: int = DEFAULT_MAX_N) -> BoundReport:
    """Check ``||h(x) - T(x)|| <= phi~(||x||, ||x||, 0) + slack`` at sampled x."""

    def one(t):
        x = alg.sample(a, derive_seed(seed, t), scale)
        res = extract(h, x, tol, max_n)
        nx = _norm(x)
        bound = ctl.eval_tilde(ctrl, nx, nx, 0.0)
        gap = _norm(h(x) - res.value)
        return x, res, bound, gap

    worst_margin, witness, failed, nonconverged = math.inf, None, False, []
    for x, res, bound, gap in _pmap(one, range(trials)):
        if not res.converged:
            nonconverged.append({"x": x, "n_used": res.n_used, "last_delta": res.deltas[-1]})
            failed = True
            continue
        margin = bound - gap
        if margin < worst_margin:
            worst_margin = margin
            witness = {"x": x, "distance": gap, "phi_tilde": bound, "margin": margin}
        if margin < -slack(bound):
            failed = True
    if worst_margin == math.inf:
        worst_margin = 0.0
    return BoundReport(trials, worst_margin, not failed, witness, nonconverged)


# ---------------------------------------------------------------- homomorphism checks

@dataclass(frozen=True)
class HomResiduals:
    additivity: float
    s1_homogeneity: float
    general_lambda: float
    triple: float
    witnesses: dict = field(default_factory=dict)
    nonconverged: list[dict] = field(default_factory=list)

    def within(self, tol: float) -> bool:
        return not self.nonconverged and max(
            self.additivity, self.s1_homogeneity, self.general_lambda, self.triple) <= tol


class _Tracker:
    def __init__(self):
        self.worst: dict[str, float] = {}
        self.witness: dict[str, dict] = {}
        self.nonconverged: list[dict] = []

    def record(self, kind: str, value: float, **inputs):
        if value > self.worst.get(kind, -1.0):
            self.worst[kind] = value
            self.witness[kind] = {"residual": value, **inputs}

    def guard(self, kind: str, fn, **inputs):
        try:
            self.record(kind, fn(), **inputs)
        except ExtractionFailure as exc:
            self.nonconverged.append({"check": kind, "x": exc.x, "n_used": exc.result.n_used})


def _probes(x: np.ndarray) -> list[np.ndarray]:
    nx = _norm(x)
    if nx == 0:
        return []
    return [t * x / nx for t in (0.3, 0.6, 1.5)]


def verify_hom(T: Evaluator, a: alg.AlgebraDescriptor, trials: int, seed: int, *,
               scale: float = 1.0) -> HomResiduals:
    """Max residuals of additivity, S^1-homogeneity, lambda-action and the triple identity.

    Additivity is also probed on equal pairs ``t x/||x||`` with
    ``t in {0.3, 0.6, 1.5}``, which straddle the unit sphere.
    """
    tr = _Tracker()
    for t in range(trials):
        x, y, z = _sample_triple(a, seed, t, scale)
        for u, v in [(x, y)] + [(p, p) for p in _probes(x)]:
            tr.guard("additivity", lambda: _norm(T(u + v) - T(u) - T(v)), x=u, y=v)
        for mu in MU_SET:
            tr.guard("s1_homogeneity", lambda: _norm(T(mu * x) - mu * T(x)), x=x, mu=mu)
        for lam in LAMBDA_SET:
            tr.guard("general_lambda", lambda: verify_lambda_action(T, lam, x), x=x, lam=lam)
        tr.guard("triple", lambda: _norm(T(mx.triple(z)) - mx.triple(T(z))), z=z)
    w = tr.worst
    return HomResiduals(w.get("additivity", 0.0), w.get("s1_homogeneity", 0.0), w.get("general_lambda", 0.0),
                        w.get("triple", 0.0), tr.witness, tr.nonconverged)


def check_r_homogeneous(T: Evaluator, r: float, trials: int, seed: int, *,
                        algebra: alg.AlgebraDescriptor | None = None, scale: float = 1.0) -> float:
    """Max over samples (and unit-sphere probes) of ``||T(r x) - r T(x)||``."""
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r}")
    a = algebra if algebra is not None else T.domain
    worst = 0.0
    for t in range(trials):
        x = alg.sample(a, derive_seed(seed, t), scale)
        for u in [x] + _probes(x):
            worst = max(worst, _norm(T(r * u) - r * T(u)))
    return worst


def scaled_defect_chain(T: Evaluator, z: np.ndarray, r: float, n_max: int) -> list[float]:
    """``d_n = r^(-3n) ||T((r^n z)(r^n z)*(r^n z)) - T(r^n z) T(r^n z)* T(r^n z)||``, n = 0..n_max."""
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r}")
    nz = _norm(z)
    if nz > 0 and 3 * (n_max * math.log(r) + math.log(nz)) > math.log(OVERFLOW_LIMIT):
        raise ValueError("r^(3 n_max) ||z||^3 overflows the chain guard")
    out = []
    for n in range(n_max + 1):
        s = r**n
        w = s * z
        out.append(_norm(T(mx.triple(w)) - mx.triple(T(w))) / s**3)
    return out


def chain_control_bounds(ctrl: ctl.Control, norm_z: float, r: float, n_max: int) -> list[tuple[float, float]]:
    """Both scalings of the control along the chain: ``(r^-3n phi, r^-n phi)`` at ``r^n z``."""
    out = []
    for n in range(n_max + 1):
        s = r**n
        phi = ctl.eval_phi(ctrl, s * norm_z, s * norm_z, s * norm_z)
        out.append((phi / s**3, phi / s))
    return out


@dataclass(frozen=True)
class RestrictedMuResiduals:
    i_homogeneity: float
    c_linearity: float
    witnesses: dict = field(default_factory=dict)
    nonconverged: list[dict] = field(default_factory=list)


def verify_restricted_mu(h: Evaluator, a: alg.AlgebraDescriptor, trials: int, seed: int, *,
                         scale: float = 1.0, tol: float = DEFAULT_TOL,
                         max_n: int = DEFAULT_MAX_N) -> RestrictedMuResiduals:
    """Extract T from h, then check ``T(ix) = iT(x)`` and ``T((s+it)x) = sT(x) + itT(x)``."""
    T = ExtractedMap(h, tol, max_n)
    tr = _Tracker()
    for t in range(trials):
        x = alg.sample(a, derive_seed(seed, t), scale)
        tr.guard("i_homogeneity", lambda: _norm(T(1j * x) - 1j * T(x)), x=x)
        for s, q in REAL_PAIRS:
            tr.guard("c_linearity", lambda: _norm(T(complex(s, q) * x) - s * T(x) - 1j * q * T(x)),
                     x=x, s=s, t=q)
    return RestrictedMuResiduals(tr.worst.get("i_homogeneity", 0.0), tr.worst.get("c_linearity", 0.0),
                                 tr.witness, tr.nonconverged)


# ---------------------------------------------------------------- full scenario

@dataclass(frozen=True)
class StabilityReport:
    scenario: str
    sup_defect: float
    control: ctl.Control
    samples: int
    bound_margin_min: float
    hom_residuals: HomResiduals
    passed: bool
    hom_tol: float
    hypothesis_margin_min: float | None = None
    defect_witness: dict | None = None
    bound_witness: dict | None = None
    nonconverged: list[dict] = field(default_factory=list)


def assess(scenario: str, h, ctrl: ctl.Control, a: alg.AlgebraDescriptor, *, trials: int, seed: int,
           scale: float = 1.0, tol: float = DEFAULT_TOL, max_n: int = DEFAULT_MAX_N,
           hom_tol: float = 1e-10) -> StabilityReport:
    """Defect scan, bound certification and homomorphism residuals of the extracted map."""
    scan = scan_defects(h, a, MU_SET, trials, scale, derive_seed(seed, 1), ctrl)
    bound = verify_bound(h, ctrl, a, trials, derive_seed(seed, 2), scale=scale, tol=tol, max_n=max_n)
    hom = verify_hom(ExtractedMap(h, tol, max_n), a, trials, derive_seed(seed, 3), scale=scale)
    passed = bound.passed and hom.within(hom_tol)
    return StabilityReport(
        scenario=scenario,
        sup_defect=scan.sup,
        control=ctrl,
        samples=trials,
        bound_margin_min=bound.bound_margin_min,
        hom_residuals=hom,
        passed=passed,
        hom_tol=hom_tol,
        hypothesis_margin_min=scan.hypothesis_margin_min,
        defect_witness=scan.witness,
        bound_witness=bound.witness,
        nonconverged=bound.nonconverged + hom.nonconverged,
    )
