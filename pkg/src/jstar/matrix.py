"""Complex rectangular matrix kernels.

Matrices are plain 2-D ``complex128`` numpy arrays. Every function returns a
new array and never writes to its inputs.
"""

from __future__ import annotations

from typing import Any, Sequence

import numpy as np

CMatrix = np.ndarray


def cmatrix(data: Any) -> CMatrix:
    """Coerce ``data`` into a finite 2-D complex matrix (scalars become 1x1)."""
    x = np.array(data, dtype=np.complex128)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("matrix entries must be finite")
    return x


def zeros(rows: int, cols: int) -> CMatrix:
    return np.zeros((rows, cols), dtype=np.complex128)


def identity(n: int) -> CMatrix:
    return np.eye(n, dtype=np.complex128)


def adjoint(x: CMatrix) -> CMatrix:
    return np.conj(x).T.copy()


def triple(x: CMatrix) -> CMatrix:
    """The cube ``x x* x``; an n x m input gives an n x m output."""
    return (x @ np.conj(x).T) @ x


def spectral_norm(x: CMatrix) -> float:
    """Largest singular value (LAPACK SVD). Non-finite input raises OverflowError."""
    if not np.isfinite(x).all():
        raise OverflowError("non-finite matrix entries (overflow)")
    if x.size == 1:
        return float(abs(x.flat[0]))
    if not x.any():
        return 0.0
    return float(np.linalg.svd(x, compute_uv=False)[0])


def frobenius_norm(x: CMatrix) -> float:
    return float(np.linalg.norm(x))


def _same_shape(x: CMatrix, y: CMatrix) -> None:
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")


def add(x: CMatrix, y: CMatrix) -> CMatrix:
    _same_shape(x, y)
    return x + y


def sub(x: CMatrix, y: CMatrix) -> CMatrix:
    _same_shape(x, y)
    return x - y


def scale(lam: complex, x: CMatrix) -> CMatrix:
    return complex(lam) * x


def matmul(x: CMatrix, y: CMatrix) -> CMatrix:
    if x.shape[1] != y.shape[0]:
        raise ValueError(f"cannot multiply {x.shape} by {y.shape}")
    return x @ y


def distance(x: CMatrix, y: CMatrix) -> float:
    return spectral_norm(sub(x, y))


def to_literal(x: CMatrix) -> list:
    """Nested ``[re, im]`` pairs, row-major."""
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(x)]


def from_literal(lit: Sequence) -> CMatrix:
    try:
        arr = np.array(lit, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix literal: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("matrix literal must be a rows x cols array of [re, im] pairs")
    return cmatrix(arr[..., 0] + 1j * arr[..., 1])
