"""Writing a complex scalar as (M/3) times a sum of three unimodular numbers.

For ``lam != 0`` take the smallest integer ``M > 4|lam|``; then
``z = 3 lam / M`` has ``|z| < 3/4`` and is split constructively as

* ``mu1 = z/|z|`` (``1`` when ``z == 0``),
* ``w = z - mu1 = mu1 (|z| - 1)``, so ``|w| = ||z| - 1| <= 2``,
* ``mu2, mu3 = exp(i(arg w +- arccos(|w|/2)))``, whose sum is ``w``.

When ``|z| == 1`` (so ``w == 0``) the pair is ``+i mu1, -i mu1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import matrix as mx

UNIMODULAR_TOL = 1e-12


@dataclass(frozen=True)
class UnimodularTriple:
    mu1: complex
    mu2: complex
    mu3: complex
    target: complex

    def __post_init__(self):
        for mu in (self.mu1, self.mu2, self.mu3):
            if abs(abs(mu) - 1.0) > UNIMODULAR_TOL:
                raise ValueError(f"{mu} is not unimodular")
        if abs(self.total - self.target) > UNIMODULAR_TOL:
            raise ValueError("mu1 + mu2 + mu3 does not reproduce the target")

    @property
    def total(self) -> complex:
        return self.mu1 + self.mu2 + self.mu3


@dataclass(frozen=True)
class Decomposition:
    M: int
    triple: UnimodularTriple
    lam: complex

    @property
    def residual(self) -> float:
        return abs(self.M / 3.0 * self.triple.total - self.lam)


def min_scaling_integer(lam: complex) -> int:
    """Smallest integer strictly greater than ``4|lam|``."""
    r = abs(complex(lam))
    if r == 0:
        raise ValueError("lambda must be nonzero")
    return math.floor(4.0 * r) + 1


def unimodular_triples(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized split of each entry of ``z`` (``|z| <= 3``) into three unimodulars."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    if np.any(r > 3.0):
        raise ValueError("|z| > 3 cannot be a sum of three unimodular numbers")
    theta = np.where(r > 0, np.angle(z), 0.0)
    mu1 = np.exp(1j * theta)
    wabs = np.abs(r - 1.0)
    theta_w = np.where(r >= 1.0, theta, theta + np.pi)
    half = np.arccos(np.minimum(wabs / 2.0, 1.0))
    # |z| == 1 gives half == pi/2 and the pair +-i*mu1, matching the tie-break
    mu2 = np.exp(1j * (theta_w + half))
    mu3 = np.exp(1j * (theta_w - half))
    return mu1, mu2, mu3


def unimodular_triple(z: complex) -> UnimodularTriple:
    z = complex(z)
    if abs(z) > 3.0:
        raise ValueError(f"|z| = {abs(z)} > 3 cannot be a sum of three unimodular numbers")
    mu1, mu2, mu3 = (complex(m[0]) for m in unimodular_triples(np.array([z])))
    if abs(z) == 1.0:
        mu2, mu3 = 1j * mu1, -1j * mu1
    return UnimodularTriple(mu1, mu2, mu3, z)


def decompose_lambda(lam: complex) -> Decomposition:
    lam = complex(lam)
    m = min_scaling_integer(lam)
    return Decomposition(m, unimodular_triple(3.0 * lam / m), lam)


def verify_lambda_action(T: Callable[[np.ndarray], np.ndarray], lam: complex, x: np.ndarray) -> float:
    """``||T(lam x) - (M/3)(T(mu1 x) + T(mu2 x) + T(mu3 x))||``.

    For ``lam == 0`` this is just ``||T(0)||``.
    """
    lam = complex(lam)
    if lam == 0:
        return mx.spectral_norm(T(0.0 * x))
    d = decompose_lambda(lam)
    t = d.triple
    rebuilt = (d.M / 3.0) * (T(t.mu1 * x) + T(t.mu2 * x) + T(t.mu3 * x))
    return mx.distance(T(lam * x), rebuilt)
