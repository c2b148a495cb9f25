"""Near-dissociation expansion over the -C6/r^6 - C8/r^8 tail.

The central quantity is the non-integer number of vibrational levels
between a bound energy E < 0 and the dissociation limit,

    N(E) = sqrt(2 mu)/pi * [ integral_0^rt (sqrt(-V) - sqrt(E-V)) dr
                             + integral_rt^inf sqrt(-V) dr ],

with rt the outer turning point. This is the semiclassical level count
evaluated exactly over the model potential: the two divergent phase
integrals are combined so their difference converges, the inner integrand
is rewritten as |E| / (sqrt(-V) + sqrt(E-V)) to avoid cancellation, the
square-root turning-point behaviour is removed by the substitution
r = rt - t^2, and the tail integral has a closed form. For c8 = 0 the
whole expression collapses to the classic pure-C6 law

    N(E) = G6 * |E|^(1/3),   G6 = (3/2) * I6 * sqrt(2 mu) * c6^(1/6) / pi,

which serves as an independent oracle for the quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from ._validation import check_negative_energy, check_positive
from .potential import PotentialParams, outer_turning_point
from .units import CM1_TO_HARTREE

# I6 = (1/6) Gamma(2/3) Gamma(1/2) / Gamma(7/6) = 0.431185...
I6 = gamma(2.0 / 3.0) * gamma(0.5) / (6.0 * gamma(7.0 / 6.0))

LEVEL_ENERGY_TOL_CM1 = 1e-10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, achieved: float, requested: float):
        self.achieved = achieved
        self.requested = requested
        super().__init__(
            f"quadrature did not converge: achieved {achieved:.3e}, "
            f"requested {requested:.3e}"
        )


def _gl_panel(f, a: float, b: float) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))


def adaptive_quad(f, a: float, b: float, abs_tol: float, max_depth: int) -> float:
    """Adaptive Gauss-Legendre integration of a vectorized integrand.

    Panels are bisected until the two-half refinement of each panel agrees
    with the parent estimate within its length-weighted share of abs_tol.
    Raises QuadratureError when a panel at max_depth still misses its
    share of the tolerance.
    """
    span = b - a
    total = 0.0
    stack = [(a, b, _gl_panel(f, a, b), 0)]
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _gl_panel(f, lo, mid)
        right = _gl_panel(f, mid, hi)
        err = abs(left + right - whole)
        if err <= 0.5 * abs_tol * (hi - lo) / span:
            total += left + right
        elif depth >= max_depth:
            raise QuadratureError(achieved=err, requested=abs_tol)
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total


@dataclass(frozen=True)
class NdeModel:
    """Potential, reduced mass (m_e) and quadrature settings for the NDE."""

    params: PotentialParams
    mu: float
    quad_abs_tol: float = 1e-10
    quad_max_depth: int = 60

    def __post_init__(self):
        check_positive("mu", self.mu)
        check_positive("quad_abs_tol", self.quad_abs_tol)
        if self.quad_max_depth < 1:
            raise ValueError("quad_max_depth must be >= 1")


def pure_c6_coefficient(c6: float, mu: float) -> float:
    """G6 of the analytic pure-C6 law N = G6 |E|^(1/3) (atomic units)."""
    check_positive("c6", c6)
    check_positive("mu", mu)
    return 1.5 * I6 * math.sqrt(2.0 * mu) * c6 ** (1.0 / 6.0) / math.pi


def quantum_defect(model: NdeModel, e: float) -> float:
    """Vibrational count below dissociation for a level at energy e (hartree).

    Strictly positive and strictly decreasing in e. The inner integral is
    evaluated by adaptive quadrature honouring model.quad_abs_tol and
    model.quad_max_depth; the tail integral is closed-form.
    """
    check_negative_energy("e", e)
    c6, c8 = model.params.c6, model.params.c8
    abs_e = -e
    rt = outer_turning_point(model.params, e)

    def head(t):
        # r = rt - t^2 turns the sqrt cusp at the turning point into a
        # smooth function; |E|/(sqrt(-V)+sqrt(E-V)) avoids cancellation
        # of two large terms at small r
        r = rt - t * t
        r = np.where(r <= 0.0, np.finfo(float).tiny, r)
        minus_v = c6 / r**6 + c8 / r**8
        allowed = np.maximum(minus_v - abs_e, 0.0)
        return 2.0 * t * abs_e / (np.sqrt(minus_v) + np.sqrt(allowed))

    head_val = adaptive_quad(
        head, 0.0, math.sqrt(rt), model.quad_abs_tol, model.quad_max_depth
    )
    # closed-form tail ((c6 + c8 w)^(3/2) - c6^(3/2)) / (3 c8), w = 1/rt^2,
    # rewritten via a^(3/2)-b^(3/2) = (a-b)(a + sqrt(ab) + b)/(sqrt(a)+sqrt(b))
    # so it stays exact as c8 -> 0
    w = 1.0 / (rt * rt)
    a = c6 + c8 * w
    tail_val = (
        (w / 3.0) * (a + math.sqrt(a * c6) + c6) / (math.sqrt(a) + math.sqrt(c6))
    )
    return math.sqrt(2.0 * model.mu) / math.pi * (head_val + tail_val)


def level_energy(model: NdeModel, count: float, tol_cm1: float = LEVEL_ENERGY_TOL_CM1) -> float:
    """Invert quantum_defect: the energy (hartree) at a given count > 0.

    The defect is strictly monotone, so the root is unique. Iteration uses
    the pure-C6 power law as the first update rule and switches to a
    secant in (log|E|, N), which converges in a handful of steps because
    N deviates from the |E|^(1/3) law only weakly.
    """
    if not (count > 0):
        raise ValueError(f"count must be positive, got {count}")
    g6 = pure_c6_coefficient(model.params.c6, model.mu)
    abs_e = (count / g6) ** 3
    tol_h = tol_cm1 * CM1_TO_HARTREE
    n_prev = e_prev = None
    achieved = math.inf
    for _ in range(100):
        n = quantum_defect(model, -abs_e)
        # dN/d|E| >= N/(3|E|) for this potential class, so this bounds the
        # energy error of the current iterate from above
        achieved = abs(n - count) * 3.0 * abs_e / count
        if achieved < tol_h:
            return -abs_e
        if n_prev is None or abs(n - n_prev) < 1e-15:
            new = abs_e * (count / n) ** 3
        else:
            slope = (math.log(abs_e) - math.log(e_prev)) / (n - n_prev)
            new = math.exp(math.log(abs_e) + slope * (count - n))
        n_prev, e_prev = n, abs_e
        abs_e = new
    raise QuadratureError(achieved=achieved / CM1_TO_HARTREE, requested=tol_cm1)


def predict_series(
    model: NdeModel, v_d: float, dv_from: int, dv_to: int
) -> list[tuple[int, float]]:
    """Level energies (hartree) for dv = dv_from..dv_to at count v_d + |dv|.

    dv values are the negative indices relative to the last bound level;
    dv_from <= dv_to <= -1 is required.
    """
    if not (0 <= v_d < 1):
        raise ValueError(f"v_d must be in [0, 1), got {v_d}")
    if not (dv_from <= dv_to <= -1):
        raise ValueError(f"need dv_from <= dv_to <= -1, got ({dv_from}, {dv_to})")
    return [
        (dv, level_energy(model, v_d + abs(dv))) for dv in range(dv_from, dv_to + 1)
    ]
