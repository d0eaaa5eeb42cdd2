"""Counter-based SplitMix64 generator.

The generator is fully specified here so that any implementation can
reproduce the same streams bit for bit:

* ``GAMMA = 0x9E3779B97F4A7C15``; all arithmetic is modulo 2**64.
* ``mix(z)``::

      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
      z = (z ^ (z >> 27)) * 0x94D049BB133111EB
      return z ^ (z >> 31)

* A stream keyed by ``key`` yields ``mix(key + (i + 1) * GAMMA)`` for the
  counter ``i = 0, 1, 2, ...`` (this is exactly SplitMix64 seeded with ``key``).
* ``derive_seed(seed, *labels)`` folds integer labels into a key:
  ``k = mix(seed mod 2**64)``, then for every label
  ``k = mix(k ^ mix((label mod 2**64) + GAMMA))``.
* Uniforms on the open interval (0, 1): ``((u >> 11) + 0.5) * 2**-53``.
* Standard normals by Box-Muller on two consecutive uniforms ``u1, u2``:
  ``r = sqrt(-2 log u1)``, yielding ``r cos(2 pi u2)`` and ``r sin(2 pi u2)``.
* A standard complex normal uses one Box-Muller pair:
  ``(r cos(2 pi u2) + i r sin(2 pi u2)) / sqrt(2)``.
"""

from __future__ import annotations

import math

import numpy as np

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TWO_PI = 2.0 * math.pi
_INV_2_53 = 2.0**-53


def mix(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, *labels: int) -> int:
    """Fold integer labels (any sign, any size) into a 64-bit stream key."""
    k = mix(seed)
    for label in labels:
        k = mix(k ^ mix((label & MASK) + GAMMA))
    return k


def mix_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def _to_unit(u: int) -> float:
    return ((u >> 11) + 0.5) * _INV_2_53


class SplitMix64:
    """A SplitMix64 stream. Draws advance an internal counter."""

    def __init__(self, key: int):
        self.key = key & MASK
        self.counter = 0

    @classmethod
    def from_labels(cls, seed: int, *labels: int) -> SplitMix64:
        return cls(derive_seed(seed, *labels))

    def next_u64(self) -> int:
        self.counter += 1
        return mix(self.key + self.counter * GAMMA)

    def uniform(self) -> float:
        return _to_unit(self.next_u64())

    def normal_pair(self) -> tuple[float, float]:
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        return r * math.cos(_TWO_PI * u2), r * math.sin(_TWO_PI * u2)

    def complex_normal(self) -> complex:
        a, b = self.normal_pair()
        return complex(a, b) / math.sqrt(2.0)

    def complex_normals(self, n: int) -> np.ndarray:
        return np.array([self.complex_normal() for _ in range(n)], dtype=complex)

    def u64_block(self, n: int) -> np.ndarray:
        """The next ``n`` outputs as a uint64 array (vectorized, same values)."""
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            out = mix_array(np.uint64(self.key) + idx * np.uint64(GAMMA))
        self.counter += n
        return out

    def uniform_block(self, n: int) -> np.ndarray:
        u = self.u64_block(n)
        return ((u >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53
