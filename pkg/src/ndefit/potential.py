"""Attractive long-range potential -C6/r^6 - C8/r^8 and derived quantities.

Everything here works in atomic units: energies in hartree, lengths in a0,
masses in electron masses, dispersion coefficients in hartree*a0^n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._validation import check_finite, check_positive
from .units import HARTREE_TO_K

TURNING_POINT_RTOL = 1e-12


@dataclass(frozen=True)
class PotentialParams:
    """Dispersion coefficients c6 (hartree*a0^6) and c8 (hartree*a0^8)."""

    c6: float
    c8: float = 0.0

    def __post_init__(self):
        check_finite("c6", self.c6)
        check_finite("c8", self.c8)
        check_positive("c6", self.c6)
        if self.c8 < 0:
            raise ValueError(f"c8 must be >= 0, got {self.c8}")


@dataclass(frozen=True)
class BarrierInfo:
    """Position and height of a centrifugal barrier for partial wave l."""

    r_barrier: float  # a0
    height: float  # hartree
    l: int

    @property
    def height_uK(self) -> float:
        return self.height * HARTREE_TO_K * 1e6


def evaluate(p: PotentialParams, r):
    """Potential energy -c6/r^6 - c8/r^8 at radius r (a0), in hartree.

    Accepts scalars or arrays; strictly negative and strictly increasing
    on (0, inf).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    v = -p.c6 / r**6 - p.c8 / r**8
    return float(v) if v.ndim == 0 else v


def outer_turning_point(p: PotentialParams, e: float) -> float:
    """Radius where the potential equals the (negative) energy e.

    The root of evaluate(p, r) = e is unique because the potential is
    strictly monotone; it is bracketed starting from the closed-form
    pure-C6 point (c6/|e|)^(1/6) and refined by bisection.
    """
    if not (e < 0):
        raise ValueError(f"turning point requires e < 0, got {e}")
    abs_e = -e
    r6 = (p.c6 / abs_e) ** (1.0 / 6.0)
    if p.c8 == 0.0:
        return r6
    # the c8 term only pushes the turning point outward; (1 + c8/(c6 r6^2))
    # overshoots the shift, giving a guaranteed bracket
    hi = r6 * (1.0 + p.c8 / (p.c6 * r6 * r6)) + 1e-12
    return float(brentq(lambda r: evaluate(p, r) - e, r6, hi, rtol=TURNING_POINT_RTOL))


def effective_potential(p: PotentialParams, mu: float, l: int, r):
    """evaluate(p, r) plus the centrifugal term l(l+1)/(2*mu*r^2)."""
    check_positive("mu", mu)
    if l < 0:
        raise ValueError(f"l must be >= 0, got {l}")
    r = np.asarray(r, dtype=float)
    v = evaluate(p, r) + l * (l + 1) / (2.0 * mu * r**2)
    return float(v) if np.ndim(v) == 0 else v


def centrifugal_barrier(p: PotentialParams, mu: float, l: int) -> BarrierInfo:
    """Stationary maximum of the effective potential for a pure-C6 tail.

    Requires c8 = 0 so the barrier has the closed form
    r_b = (6*c6*mu/(l(l+1)))^(1/4), height = l(l+1)/(3*mu*r_b^2).
    """
    check_positive("mu", mu)
    if l < 1:
        raise ValueError("no centrifugal barrier for l = 0")
    if p.c8 != 0.0:
        raise ValueError("centrifugal_barrier requires a pure-C6 potential (c8 = 0)")
    ll = l * (l + 1)
    r_b = (6.0 * p.c6 * mu / ll) ** 0.25
    height = ll / (3.0 * mu * r_b**2)
    return BarrierInfo(r_barrier=r_b, height=height, l=l)
