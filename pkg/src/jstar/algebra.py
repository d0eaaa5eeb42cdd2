"""Finite-dimensional J*-algebras as basis-spanned matrix subspaces."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import matrix as mx
from .rng import SplitMix64, derive_seed

INDEPENDENCE_TOL = 1e-10
SELF_ADJOINT_TOL = 1e-12


class Kind(str, enum.Enum):
    FULL = "full"
    CARTAN1 = "cartan1"
    CARTAN4 = "cartan4"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class AlgebraDescriptor:
    kind: Kind
    ambient_rows: int
    ambient_cols: int
    basis: tuple[np.ndarray, ...]
    _q: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.basis:
            raise ValueError("basis must be nonempty")
        shape = (self.ambient_rows, self.ambient_cols)
        frozen = []
        for b in self.basis:
            b = mx.cmatrix(b)
            if b.shape != shape:
                raise ValueError(f"basis element of shape {b.shape}, expected {shape}")
            b.setflags(write=False)
            frozen.append(b)
        object.__setattr__(self, "basis", tuple(frozen))

        stacked = np.stack([b.ravel() for b in frozen], axis=1)
        smin = np.linalg.svd(stacked, compute_uv=False)[-1]
        if smin <= INDEPENDENCE_TOL:
            raise ValueError(f"basis is not linearly independent (smallest singular value {smin:.3g})")
        if self.kind is Kind.CARTAN4:
            if self.ambient_rows != self.ambient_cols:
                raise ValueError("a spin factor lives in a square ambient space")
            for b in frozen:
                if mx.distance(b, mx.adjoint(b)) > SELF_ADJOINT_TOL:
                    raise ValueError("spin factor generators must be self-adjoint")
        q, _ = np.linalg.qr(stacked)
        q.setflags(write=False)
        object.__setattr__(self, "_q", q)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ambient_rows, self.ambient_cols)

    @property
    def dim(self) -> int:
        return len(self.basis)


def _matrix_units(n: int, m: int) -> list[np.ndarray]:
    units = []
    for j in range(n):
        for k in range(m):
            e = mx.zeros(n, m)
            e[j, k] = 1.0
            units.append(e)
    return units


def make_full(n: int) -> AlgebraDescriptor:
    if n < 1:
        raise ValueError("n must be >= 1")
    return AlgebraDescriptor(Kind.FULL, n, n, tuple(_matrix_units(n, n)))


def make_cartan_type1(n: int, m: int) -> AlgebraDescriptor:
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    return AlgebraDescriptor(Kind.CARTAN1, n, m, tuple(_matrix_units(n, m)))


SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def spin_generators(k: int) -> list[np.ndarray]:
    """k pairwise-anticommuting self-adjoint unitaries (1 <= k <= 5)."""
    if not 1 <= k <= 5:
        raise ValueError(f"spin factor size k={k} outside supported range 1..5")
    if k <= 3:
        return [SIGMA1, SIGMA2, SIGMA3][:k]
    gens = [
        np.kron(SIGMA1, SIGMA3),
        np.kron(SIGMA2, SIGMA3),
        np.kron(_I2, SIGMA1),
        np.kron(_I2, SIGMA2),
        np.kron(SIGMA3, SIGMA3),
    ]
    return gens[:k]


def make_cartan_type4(k: int) -> AlgebraDescriptor:
    gens = spin_generators(k)
    n = gens[0].shape[0]
    return AlgebraDescriptor(Kind.CARTAN4, n, n, tuple(gens))


def make_custom(basis: Sequence) -> AlgebraDescriptor:
    basis = [mx.cmatrix(b) for b in basis]
    if not basis:
        raise ValueError("basis must be nonempty")
    rows, cols = basis[0].shape
    return AlgebraDescriptor(Kind.CUSTOM, rows, cols, tuple(basis))


def _check_shape(a: AlgebraDescriptor, x: np.ndarray) -> None:
    if x.shape != a.shape:
        raise ValueError(f"dimension mismatch: element {x.shape}, algebra ambient {a.shape}")


def project(a: AlgebraDescriptor, x: np.ndarray) -> np.ndarray:
    """Frobenius-nearest point of span(basis)."""
    _check_shape(a, x)
    v = x.ravel()
    return (a._q @ (a._q.conj().T @ v)).reshape(a.shape)


def membership_residual(a: AlgebraDescriptor, x: np.ndarray) -> float:
    """Spectral norm of the least-squares remainder of ``x`` against the span."""
    return mx.spectral_norm(x - project(a, x))


def random_combination(a: AlgebraDescriptor, rng: SplitMix64) -> np.ndarray:
    coeffs = rng.complex_normals(a.dim)
    x = mx.zeros(*a.shape)
    for c, b in zip(coeffs, a.basis):
        x = x + c * b
    return x


def random_unit(a: AlgebraDescriptor, seed: int) -> np.ndarray:
    """Deterministic element of spectral norm 1."""
    x = random_combination(a, SplitMix64(seed))
    return x / mx.spectral_norm(x)


def sample(a: AlgebraDescriptor, seed: int, scale: float = 1.0) -> np.ndarray:
    """Deterministic element with spectral norm ``scale * u``, u uniform in (0, 2).

    Coefficients are complex normals drawn first from the stream keyed by
    ``seed``; ``u`` is the next uniform of the same stream.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    rng = SplitMix64(seed)
    x = random_combination(a, rng)
    target = scale * 2.0 * rng.uniform()
    return x * (target / mx.spectral_norm(x))


@dataclass(frozen=True)
class ClosureReport:
    max_residual: float
    passed: bool
    trials: int
    witness: np.ndarray | None = None


def verify_closure(a: AlgebraDescriptor, trials: int, tol: float, *, seed: int = 0, scale: float = 1.0) -> ClosureReport:
    worst, witness = 0.0, None
    for t in range(trials):
        x = sample(a, derive_seed(seed, t), scale)
        r = membership_residual(a, mx.triple(x))
        if witness is None or r > worst:
            worst, witness = r, x
    return ClosureReport(worst, worst <= tol, trials, witness)


def spin_residual(x: np.ndarray) -> float:
    """Distance of ``x^2`` from the scalar ``trace(x^2)/dim`` times the identity."""
    sq = x @ x
    n = x.shape[0]
    return mx.distance(sq, (np.trace(sq) / n) * mx.identity(n))


def verify_spin_property(a: AlgebraDescriptor, trials: int, *, seed: int = 0, scale: float = 1.0) -> float:
    """Max of :func:`spin_residual` over sampled elements of a spin factor."""
    if a.kind is not Kind.CARTAN4:
        raise ValueError(f"spin property applies to cartan4 algebras, not {a.kind.value}")
    return max(spin_residual(sample(a, derive_seed(seed, t), scale)) for t in range(trials))
