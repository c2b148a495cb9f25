"""Numerov bound states of the long-range potential with an inner hard wall.

The short-range part of the real potential is unknown; a hard wall
(psi = 0) at r_min stands in for it and its position is the single
nuisance parameter, calibrated so that one known level is reproduced.
Eigenvalues come from outward Numerov integration with node counting:
for the Dirichlet problem the number of interior sign changes of the
shooting solution at energy E equals the number of eigenvalues below E,
so bisection on the node count brackets every level in a window without
ever missing one and converges to the eigenvalue itself.

Wavefunctions are assembled from an outward sweep up to a matching point
past the outer turning point and an inward sweep from the box edge, which
keeps both integrations in their numerically stable direction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.optimize import brentq

from ._validation import check_positive
from .potential import PotentialParams, outer_turning_point
from .units import CM1_TO_HARTREE

BISECTION_TOL_CM1 = 1e-10
ANCHOR_TOL_CM1 = 1e-4
RESOLUTION_TOL_CM1 = 1e-4
WALL_RANGE_A0 = (8.0, 12.0)
# half the shortest local de Broglie wavelength bounds the scan step that
# cannot skip a sign change of the boundary defect
WALL_SCAN_STEP_A0 = 0.01


class CalibrationError(RuntimeError):
    """No wall position in range reproduces the anchor level."""


class ResolutionError(RuntimeError):
    """Eigenvalues shift too much under grid refinement."""


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid from the wall at r_min to the box edge."""

    r_min: float
    r_max_grid: float = 400.0
    n_points: int = 40000

    def __post_init__(self):
        check_positive("r_min", self.r_min)
        if not (self.r_min < self.r_max_grid):
            raise ValueError("r_min must be below r_max_grid")
        if self.n_points < 2000:
            raise ValueError("n_points must be >= 2000")

    @property
    def spacing(self) -> float:
        return (self.r_max_grid - self.r_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        return self.r_min + self.spacing * np.arange(self.n_points)


@dataclass(frozen=True)
class BoundState:
    """One eigenstate: energy (hartree), normalized psi on the grid."""

    energy: float
    psi: np.ndarray
    grid: RadialGrid
    nodes: int
    r_eff_wf: float

    def to_csv(self) -> str:
        lines = ["r_a0,psi"]
        for r, p in zip(self.grid.points(), self.psi):
            lines.append(f"{float(r)!r},{float(p)!r}")
        return "\n".join(lines) + "\n"


@njit(cache=True)
def _sweep(r0, h, n, twomu, c6, c8, e):
    """Outward Numerov shot; returns (interior nodes, boundary value).

    The solution is rescaled whenever it grows past 1e250, which
    preserves the node count and the sign of the boundary value.
    """
    c = h * h / 12.0
    psi_prev = 0.0
    psi = 1e-12
    r = r0 + h
    g_prev = twomu * (e + c6 / r0**6 + c8 / r0**8)
    g = twomu * (e + c6 / r**6 + c8 / r**8)
    nodes = 0
    for i in range(2, n):
        r = r0 + i * h
        g_next = twomu * (e + c6 / r**6 + c8 / r**8)
        psi_next = (
            2.0 * psi * (1.0 - 5.0 * c * g) - psi_prev * (1.0 + c * g_prev)
        ) / (1.0 + c * g_next)
        if (psi_next < 0.0 and psi > 0.0) or (psi_next > 0.0 and psi < 0.0):
            nodes += 1
        a = abs(psi_next)
        if a > 1e250:
            psi_next /= a
            psi /= a
        psi_prev = psi
        psi = psi_next
        g_prev = g
        g = g_next
    return nodes, psi


@njit(cache=True)
def _two_sided_psi(r0, h, n, twomu, c6, c8, e, m):
    """Wavefunction from outward (0..m) and inward (n-1..m) sweeps, glued at m."""
    c = h * h / 12.0
    psi = np.zeros(n)
    psi[1] = 1e-12
    for i in range(2, m + 1):
        r2 = r0 + (i - 2) * h
        r1 = r0 + (i - 1) * h
        r = r0 + i * h
        g2 = twomu * (e + c6 / r2**6 + c8 / r2**8)
        g1 = twomu * (e + c6 / r1**6 + c8 / r1**8)
        g0 = twomu * (e + c6 / r**6 + c8 / r**8)
        psi[i] = (2.0 * psi[i - 1] * (1.0 - 5.0 * c * g1) - psi[i - 2] * (1.0 + c * g2)) / (
            1.0 + c * g0
        )
        a = abs(psi[i])
        if a > 1e250:
            for j in range(i + 1):
                psi[j] /= a
    inward = np.zeros(n)
    inward[n - 2] = 1e-12
    for i in range(n - 3, m - 1, -1):
        r2 = r0 + (i + 2) * h
        r1 = r0 + (i + 1) * h
        r = r0 + i * h
        g2 = twomu * (e + c6 / r2**6 + c8 / r2**8)
        g1 = twomu * (e + c6 / r1**6 + c8 / r1**8)
        g0 = twomu * (e + c6 / r**6 + c8 / r**8)
        inward[i] = (
            2.0 * inward[i + 1] * (1.0 - 5.0 * c * g1) - inward[i + 2] * (1.0 + c * g2)
        ) / (1.0 + c * g0)
        a = abs(inward[i])
        if a > 1e250:
            for j in range(i, n):
                inward[j] /= a
    scale = psi[m] / inward[m] if inward[m] != 0.0 else 1.0
    for i in range(m, n):
        psi[i] = inward[i] * scale
    return psi


def _node_count(p: PotentialParams, mu: float, grid: RadialGrid, e_h: float) -> int:
    nodes, _ = _sweep(
        grid.r_min, grid.spacing, grid.n_points, 2.0 * mu, p.c6, p.c8, e_h
    )
    return nodes


def _bisect_level(p, mu, grid, k, e_lo_h, e_hi_h, tol_h) -> float:
    lo, hi = e_lo_h, e_hi_h
    while hi - lo > tol_h:
        mid = 0.5 * (lo + hi)
        if _node_count(p, mu, grid, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def effective_radius(state: BoundState) -> float:
    """Root-mean-square radius sqrt(sum psi^2 r^2 dr) of a normalized state."""
    r = state.grid.points()
    return float(np.sqrt(np.sum(state.psi**2 * r**2) * state.grid.spacing))


def solve_bound(
    p: PotentialParams,
    mu: float,
    grid: RadialGrid,
    energy_window: tuple[float, float],
    check_convergence: bool = False,
) -> list[BoundState]:
    """All eigenstates with energy (hartree) inside the window, ascending.

    The box must extend to at least three times the outer turning point of
    the shallowest level sought. With check_convergence=True the window is
    re-solved on a twice-refined grid and a ResolutionError is raised when
    any eigenvalue moves by more than 1e-4 cm^-1.
    """
    e_lo, e_hi = energy_window
    if not (e_lo < e_hi < 0):
        raise ValueError(f"need e_lo < e_hi < 0, got ({e_lo}, {e_hi})")
    check_positive("mu", mu)
    rt_shallow = outer_turning_point(p, e_hi)
    if grid.r_max_grid < 3.0 * rt_shallow:
        raise ValueError(
            f"r_max_grid={grid.r_max_grid} a0 is below 3x the outer turning "
            f"point {rt_shallow:.1f} a0 of the shallowest level sought"
        )
    tol_h = BISECTION_TOL_CM1 * CM1_TO_HARTREE
    n_lo = _node_count(p, mu, grid, e_lo)
    n_hi = _node_count(p, mu, grid, e_hi)
    energies = [
        _bisect_level(p, mu, grid, k, e_lo, e_hi, tol_h) for k in range(n_lo, n_hi)
    ]
    if check_convergence and energies:
        fine = RadialGrid(grid.r_min, grid.r_max_grid, 2 * grid.n_points)
        refined = [
            _bisect_level(p, mu, fine, k, e_lo, e_hi, tol_h)
            for k in range(n_lo, n_hi)
        ]
        worst = max(
            abs(a - b) / CM1_TO_HARTREE for a, b in zip(energies, refined)
        )
        if worst > RESOLUTION_TOL_CM1:
            raise ResolutionError(
                f"eigenvalues shift by {worst:.2e} cm^-1 under 2x grid "
                f"refinement (limit {RESOLUTION_TOL_CM1:.0e}); grid too coarse"
            )

    states = []
    h = grid.spacing
    for e in energies:
        rt = outer_turning_point(p, e)
        m = int(math.ceil((1.2 * rt - grid.r_min) / h))
        m = min(max(m, 2), grid.n_points - 10)
        psi = _two_sided_psi(
            grid.r_min, h, grid.n_points, 2.0 * mu, p.c6, p.c8, e, m
        )
        psi = psi / math.sqrt(float(np.sum(psi**2)) * h)
        sign = np.signbit(psi[1:-1])
        nodes = int(np.count_nonzero(sign[1:] != sign[:-1]))
        r_eff = float(np.sqrt(np.sum(psi**2 * grid.points() ** 2) * h))
        states.append(
            BoundState(energy=e, psi=psi, grid=grid, nodes=nodes, r_eff_wf=r_eff)
        )
    return states


def calibrate_wall(
    p: PotentialParams,
    mu: float,
    anchor_energy_cm1: float,
    wall_range: tuple[float, float] = WALL_RANGE_A0,
    r_max_grid: float = 400.0,
    n_points: int = 40000,
) -> float:
    """Wall position making the anchor energy an exact eigenvalue.

    The boundary value of the shooting solution at the anchor energy
    oscillates as the wall moves; a scan with a step below half the local
    de Broglie wavelength finds the first sign change going outward from
    the lower end, which keeps the truncated phase space minimal. The
    root is then polished to machine precision in the wall position.
    """
    if not (anchor_energy_cm1 < 0):
        raise ValueError("anchor energy must be negative")
    e_h = anchor_energy_cm1 * CM1_TO_HARTREE
    lo, hi = wall_range
    h = (r_max_grid - lo) / (n_points - 1)

    def defect(rw: float) -> float:
        n = int(math.ceil((r_max_grid - rw) / h)) + 1
        _, boundary = _sweep(rw, h, n, 2.0 * mu, p.c6, p.c8, e_h)
        return boundary

    walls = np.arange(lo, hi, WALL_SCAN_STEP_A0)
    prev = defect(walls[0])
    for rw in walls[1:]:
        cur = defect(rw)
        if prev * cur < 0:
            return float(brentq(defect, rw - WALL_SCAN_STEP_A0, rw, xtol=1e-12))
        prev = cur
    raise CalibrationError(
        f"no wall in [{lo}, {hi}] a0 reproduces the anchor level at "
        f"{anchor_energy_cm1} cm^-1"
    )


def calibrated_levels(
    p: PotentialParams,
    mu: float,
    anchor_dv: int,
    anchor_energy_cm1: float,
    dv_to: int = -1,
    r_max_grid: float = 400.0,
    n_points: int = 40000,
    window_margin: float = 1.15,
) -> list[tuple[int, BoundState]]:
    """Wall-calibrated states labelled by dv relative to the anchor level.

    Solves from just below the anchor up to levels shallower than dv_to
    and assigns consecutive dv labels by level ordering, anchored at the
    state matching the anchor energy (within 1e-4 cm^-1 by construction).
    """
    if anchor_dv > -1 or dv_to > -1 or anchor_dv > dv_to:
        raise ValueError("need anchor_dv <= dv_to <= -1")
    wall = calibrate_wall(
        p, mu, anchor_energy_cm1, r_max_grid=r_max_grid, n_points=n_points
    )
    grid = RadialGrid(r_min=wall, r_max_grid=r_max_grid, n_points=n_points)
    e_lo = anchor_energy_cm1 * window_margin * CM1_TO_HARTREE
    # keep the shallow window edge compatible with the 3x turning-point rule
    e_hi_box = -1.05 * p.c6 / (r_max_grid / 3.0) ** 6
    states = solve_bound(p, mu, grid, (e_lo, min(e_hi_box, -1e-12)))
    if not states:
        raise CalibrationError("calibrated window contains no states")
    anchor_h = anchor_energy_cm1 * CM1_TO_HARTREE
    idx = int(np.argmin([abs(s.energy - anchor_h) for s in states]))
    err_cm1 = abs(states[idx].energy - anchor_h) / CM1_TO_HARTREE
    if err_cm1 > ANCHOR_TOL_CM1:
        raise CalibrationError(
            f"anchor level reproduced only to {err_cm1:.2e} cm^-1"
        )
    labelled = [(anchor_dv + (j - idx), s) for j, s in enumerate(states)]
    out = [(dv, s) for dv, s in labelled if anchor_dv <= dv <= dv_to]
    if out and out[-1][0] < dv_to:
        warnings.warn(
            f"window contains levels only up to dv={out[-1][0]}", stacklevel=2
        )
    return out
