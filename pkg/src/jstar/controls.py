"""Control functions phi and their doubling series phi~.

Controls act on norms, never on matrices. For a control ``phi`` the
transformed series is

    phi~(a, b, c) = 1/2 * sum_{n>=0} 2^-n * phi(2^n a, 2^n b, 2^n c)

which has the closed forms ``c`` for a constant and
``alpha / (2 - 2^p) * (a^p + b^p + c^p)`` for a power control.

Convention: ``0 ** p == 0`` for every admissible ``p``, including ``p == 0``,
so that ``phi(0, 0, 0) == 0`` for power controls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

_EPS = 2.0**-52


@dataclass(frozen=True)
class Constant:
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c >= 0):
            raise ValueError(f"constant control needs c >= 0, got {self.c}")


@dataclass(frozen=True)
class Power:
    alpha: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"power control needs alpha >= 0, got {self.alpha}")
        _check_exponent(self.p)


@dataclass(frozen=True)
class Sum:
    parts: tuple[Control, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


Control = Union[Constant, Power, Sum]


class SeriesValue(NamedTuple):
    value: float
    tail_bound: float


def _check_exponent(p: float) -> None:
    if not (0.0 <= p < 1.0):
        raise ValueError(f"power exponent must lie in [0, 1), got {p}")


def _pow(t: float, p: float) -> float:
    return 0.0 if t == 0 else t**p


def _power_sum(p: float, nx: float, ny: float, nz: float) -> float:
    return _pow(nx, p) + _pow(ny, p) + _pow(nz, p)


def eval_phi(ctrl: Control, nx: float, ny: float, nz: float) -> float:
    if isinstance(ctrl, Constant):
        return ctrl.c
    if isinstance(ctrl, Power):
        return ctrl.alpha * _power_sum(ctrl.p, nx, ny, nz)
    if isinstance(ctrl, Sum):
        return sum(eval_phi(part, nx, ny, nz) for part in ctrl.parts)
    raise TypeError(f"not a control: {ctrl!r}")


def eval_tilde(ctrl: Control, nx: float, ny: float, nz: float) -> float:
    """Closed form of the doubling series."""
    if isinstance(ctrl, Constant):
        return ctrl.c
    if isinstance(ctrl, Power):
        # revalidate: object.__setattr__ can bypass __post_init__
        _check_exponent(ctrl.p)
        return ctrl.alpha / (2.0 - 2.0**ctrl.p) * _power_sum(ctrl.p, nx, ny, nz)
    if isinstance(ctrl, Sum):
        return sum(eval_tilde(part, nx, ny, nz) for part in ctrl.parts)
    raise TypeError(f"not a control: {ctrl!r}")


def eval_tilde_series(ctrl: Control, nx: float, ny: float, nz: float, n_terms: int) -> SeriesValue:
    """Partial sum of the first ``n_terms`` terms with a rigorous tail bound.

    The bound covers the geometric remainder (ratio 1/2 for constants,
    2^(p-1) for powers) plus a floating-point summation allowance, so the
    exact series value lies in ``[value - allowance, value + tail_bound]``.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    if isinstance(ctrl, Sum):
        parts = [eval_tilde_series(part, nx, ny, nz, n_terms) for part in ctrl.parts]
        return SeriesValue(sum(v for v, _ in parts), sum(t for _, t in parts))

    value = 0.0
    for n in range(n_terms):
        s = 2.0**n
        value += 0.5 / s * eval_phi(ctrl, s * nx, s * ny, s * nz)

    if isinstance(ctrl, Constant):
        tail = ctrl.c * 2.0**-n_terms
    elif isinstance(ctrl, Power):
        _check_exponent(ctrl.p)
        ratio = 2.0 ** (ctrl.p - 1.0)
        first = 0.5 * ctrl.alpha * _power_sum(ctrl.p, nx, ny, nz) * ratio**n_terms
        tail = first / (1.0 - ratio)
    else:
        raise TypeError(f"not a control: {ctrl!r}")
    tail += (n_terms + 4) * _EPS * value
    return SeriesValue(value, tail)


def corollary_bound(alpha: float, p: float, nx: float) -> float:
    """``alpha / (1 - 2^(p-1)) * nx^p``, the bound for a power control on the diagonal."""
    if p >= 1:
        raise ValueError(f"bound requires p < 1, got {p}")
    if alpha < 0 or p < 0:
        raise ValueError("alpha and p must be nonnegative")
    return alpha / (1.0 - 2.0 ** (p - 1.0)) * _pow(nx, p)
