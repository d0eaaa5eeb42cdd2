"""Evaluable maps h: A -> B between matrix J*-algebras.

Exact J*-homomorphisms (``ExactUV``, ``Transpose``, ``Zero``) and two
perturbations of them: truncation outside a ball (``TruncatedBall``) and
bounded-support power noise (``BallNoise``). Every map sends 0 to 0.

Note on the truncation example: its conclusion is sometimes written as
``h(x x* x) = h(x) h(x*) h(x)``; this module always tests the defining
identity ``T(x x* x) = T(x) T(x)* T(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import algebra as alg
from . import matrix as mx
from .rng import SplitMix64, derive_seed

UNITARY_TOL = 1e-12
CODOMAIN_TOL = 1e-10
_SPOT_CHECKS = 3
_DIRECTION_DIGITS = 3


class _Map:
    """Shared evaluation plumbing. Subclasses implement ``_apply``."""

    domain: alg.AlgebraDescriptor
    codomain: alg.AlgebraDescriptor

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return evaluate(self, x)

    @property
    def exact_beyond(self) -> float:
        """Norm beyond which the map coincides with an exact J*-homomorphism."""
        return 0.0

    def _apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def evaluate(h: _Map, x: np.ndarray) -> np.ndarray:
    if x.shape != h.domain.shape:
        raise ValueError(f"dimension mismatch: input {x.shape}, domain {h.domain.shape}")
    return h._apply(x)


def _spot_check_codomain(h: _Map) -> None:
    for t in range(_SPOT_CHECKS):
        x = alg.sample(h.domain, derive_seed(0x5EED, t))
        r = alg.membership_residual(h.codomain, h._apply(x))
        if r > CODOMAIN_TOL:
            raise ValueError(f"map leaves its codomain (residual {r:.3g})")


def _default_codomain(shape: tuple[int, int]) -> alg.AlgebraDescriptor:
    return alg.make_cartan_type1(*shape)


@dataclass(frozen=True, eq=False)
class ExactUV(_Map):
    """x -> U x V with isometric U (U*U = I) and co-isometric V (V V* = I)."""

    U: np.ndarray
    V: np.ndarray
    domain: alg.AlgebraDescriptor
    codomain: alg.AlgebraDescriptor | None = None

    def __post_init__(self):
        U, V = mx.cmatrix(self.U), mx.cmatrix(self.V)
        n, m = self.domain.shape
        if U.shape[1] != n or V.shape[0] != m:
            raise ValueError(f"U {U.shape} and V {V.shape} incompatible with domain {self.domain.shape}")
        if mx.distance(mx.adjoint(U) @ U, mx.identity(U.shape[1])) > UNITARY_TOL:
            raise ValueError("U is not unitary")
        if mx.distance(V @ mx.adjoint(V), mx.identity(V.shape[0])) > UNITARY_TOL:
            raise ValueError("V is not unitary")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)
        if self.codomain is None:
            object.__setattr__(self, "codomain", _default_codomain((U.shape[0], V.shape[1])))
        _spot_check_codomain(self)

    def _apply(self, x):
        return self.U @ x @ self.V


@dataclass(frozen=True, eq=False)
class Transpose(_Map):
    domain: alg.AlgebraDescriptor
    codomain: alg.AlgebraDescriptor | None = None

    def __post_init__(self):
        if self.codomain is None:
            n, m = self.domain.shape
            object.__setattr__(self, "codomain", _default_codomain((m, n)))
        _spot_check_codomain(self)

    def _apply(self, x):
        return x.T.copy()


@dataclass(frozen=True, eq=False)
class Zero(_Map):
    domain: alg.AlgebraDescriptor
    codomain: alg.AlgebraDescriptor | None = None

    def __post_init__(self):
        if self.codomain is None:
            object.__setattr__(self, "codomain", self.domain)

    def _apply(self, x):
        return mx.zeros(*self.codomain.shape)


EXACT_TYPES = (ExactUV, Transpose, Zero)


@dataclass(frozen=True, eq=False)
class TruncatedBall(_Map):
    """``inner(x)`` for ``||x|| < radius``, else 0 (the boundary goes to 0)."""

    inner: _Map
    radius: float
    domain: alg.AlgebraDescriptor = field(init=False)
    codomain: alg.AlgebraDescriptor = field(init=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "domain", self.inner.domain)
        object.__setattr__(self, "codomain", self.inner.codomain)

    @property
    def exact_beyond(self) -> float:
        return max(self.radius, self.inner.exact_beyond)

    def _apply(self, x):
        if mx.spectral_norm(x) < self.radius:
            return self.inner._apply(x)
        return mx.zeros(*self.codomain.shape)


@dataclass(frozen=True, eq=False)
class BallNoise(_Map):
    """``inner(x) + alpha ||x||^p u(x)`` inside the open ball of radius ``support_radius``.

    ``u(x)`` is a unit-norm codomain element keyed by ``seed`` and the
    direction ``x/||x||`` rounded entrywise to 3 decimals, so it is locally
    constant in direction and constant along rays.
    """

    inner: _Map
    alpha: float
    p: float
    support_radius: float
    seed: int = 0
    domain: alg.AlgebraDescriptor = field(init=False)
    codomain: alg.AlgebraDescriptor = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError("alpha must be >= 0")
        if not 0.0 <= self.p < 1.0:
            raise ValueError("p must lie in [0, 1)")
        if not self.support_radius > 0:
            raise ValueError("support_radius must be positive")
        object.__setattr__(self, "domain", self.inner.domain)
        object.__setattr__(self, "codomain", self.inner.codomain)

    @property
    def exact_beyond(self) -> float:
        return max(self.support_radius, self.inner.exact_beyond)

    def direction(self, x: np.ndarray) -> np.ndarray:
        d = x / mx.spectral_norm(x)
        q = np.rint(np.concatenate([d.real.ravel(), d.imag.ravel()]) * 10**_DIRECTION_DIGITS)
        key = derive_seed(self.seed, *(int(v) for v in q))
        return alg.random_unit(self.codomain, key)

    def noise(self, x: np.ndarray) -> np.ndarray:
        nx = mx.spectral_norm(x)
        if nx == 0 or nx >= self.support_radius:
            return mx.zeros(*self.codomain.shape)
        return self.alpha * nx**self.p * self.direction(x)

    def _apply(self, x):
        return self.inner._apply(x) + self.noise(x)


Map = _Map


def identity_map(a: alg.AlgebraDescriptor) -> ExactUV:
    n, m = a.shape
    return ExactUV(mx.identity(n), mx.identity(m), a, a)


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Deterministic Haar-style unitary: QR of a complex Gaussian with phase fix."""
    rng = SplitMix64(seed)
    g = rng.complex_normals(n * n).reshape(n, n)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def make_example23(H: _Map) -> TruncatedBall:
    """Truncate an exact J*-homomorphism to the open unit ball."""
    if not isinstance(H, (ExactUV, Transpose)):
        raise ValueError(f"inner map must be ExactUV or Transpose, got {type(H).__name__}")
    return TruncatedBall(H, 1.0)


@dataclass(frozen=True)
class JStarCheck:
    ok: bool
    max_additivity: float
    max_homogeneity: float
    max_triple: float
    witness: dict | None = None

    def __bool__(self):
        return self.ok


def _pair_probes(x: np.ndarray) -> list[np.ndarray]:
    # equal pairs t*x_hat crossing the unit sphere: catch truncation artifacts
    nx = mx.spectral_norm(x)
    if nx == 0:
        return []
    return [t * x / nx for t in (0.3, 0.6, 1.5)]


def is_exact_jstar_hom(h: Callable, trials: int, tol: float, *, algebra: alg.AlgebraDescriptor | None = None,
                       seed: int = 0, scale: float = 1.0) -> JStarCheck:
    """Sampled test of additivity, complex homogeneity and the triple identity.

    Each defect is compared with ``tol * (1 + ||inputs||^3)``. The first
    violation found is returned as the witness.
    """
    a = algebra if algebra is not None else h.domain
    worst = {"additivity": 0.0, "homogeneity": 0.0, "triple": 0.0}
    witness = None

    def record(kind, value, bound, **inputs):
        nonlocal witness
        worst[kind] = max(worst[kind], value)
        if value > bound and witness is None:
            witness = {"check": kind, "defect": value, "bound": bound, **inputs}

    for t in range(trials):
        x = alg.sample(a, derive_seed(seed, t, 0), scale)
        y = alg.sample(a, derive_seed(seed, t, 1), scale)
        z = alg.sample(a, derive_seed(seed, t, 2), scale)
        lam = SplitMix64.from_labels(seed, t, 3).complex_normal() * 2.0
        pairs = [(x, y)] + [(p, p) for p in _pair_probes(x)]
        for u, v in pairs:
            size = mx.spectral_norm(u) + mx.spectral_norm(v)
            d = mx.distance(h(u + v), h(u) + h(v))
            record("additivity", d, tol * (1 + size**3), x=u, y=v)
        nx = mx.spectral_norm(x)
        d = mx.distance(h(lam * x), lam * h(x))
        record("homogeneity", d, tol * (1 + (abs(lam) * nx) ** 3), x=x, lam=lam)
        hz = h(z)
        d = mx.distance(h(mx.triple(z)), mx.triple(hz))
        record("triple", d, tol * (1 + mx.spectral_norm(z) ** 3), z=z)
    return JStarCheck(witness is None, worst["additivity"], worst["homogeneity"], worst["triple"], witness)


def norm_decreasing_check(h: Callable, trials: int, *, algebra: alg.AlgebraDescriptor | None = None,
                          seed: int = 0, scale: float = 1.0) -> float:
    """Max over samples of ``||h(x)|| - ||x||``."""
    a = algebra if algebra is not None else h.domain
    return max(
        mx.spectral_norm(h(x)) - mx.spectral_norm(x)
        for x in (alg.sample(a, derive_seed(seed, t), scale) for t in range(trials))
    )
