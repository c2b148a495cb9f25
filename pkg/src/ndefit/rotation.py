"""Rotational and hyperfine structure of a photoassociation line.

A vibrational level splits into rotational components R' = 0, 1, 2, ...
at energies B_rot * R'(R'+1); the atomic angular momentum F' coupling to
the nuclear rotation splits each component further into sub-components
labelled m', running from -R' to R' (or -F' to F' when R' > F').
Absolute wavenumbers are referenced to the atomic line at
NU_RES_CM1 = 12578.862 cm^-1.

The fixed-rotor relation used throughout is B = 1/(2 mu r^2) in atomic
units, i.e. r = 1/sqrt(2 mu B), which reproduces every tabulated
(B_rot, r_eff) pair of the bundled dataset.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._validation import check_positive
from .units import CM1_TO_HARTREE, HARTREE_TO_CM1, HARTREE_TO_K

# atomic reference line defining the detuning convention
NU_RES_CM1 = 12578.862

# atomic hyperfine splitting between the F'=1 and F'=2 progressions;
# F'=1 sits below F'=2 by default (sign configurable on RotationalLevel)
HYPERFINE_SPLITTING_CM1 = 0.0273

DEFAULT_BAND_AMPLITUDES = (1.0, 0.6, 0.3)


@dataclass(frozen=True)
class RotationalLevel:
    """Rotational constants of one vibrational level (plain cm^-1)."""

    b_rot: float
    delta_r: float
    f_prime: int = 2
    r_prime_max: int = 2
    band_amplitudes: tuple[float, ...] = DEFAULT_BAND_AMPLITUDES
    hyperfine_sign: int = -1  # -1: F'=1 progression below F'=2

    def __post_init__(self):
        check_positive("b_rot", self.b_rot)
        if self.f_prime not in (1, 2):
            raise ValueError(f"f_prime must be 1 or 2, got {self.f_prime}")
        if self.r_prime_max < 0:
            raise ValueError(f"r_prime_max must be >= 0, got {self.r_prime_max}")
        if self.hyperfine_sign not in (-1, 1):
            raise ValueError("hyperfine_sign must be +1 or -1")
        if len(self.band_amplitudes) < self.r_prime_max + 1:
            raise ValueError("need one band amplitude per R' value")


@dataclass(frozen=True)
class LineComponent:
    """One resolved sub-component at an absolute wavenumber (cm^-1)."""

    wavenumber: float
    r_prime: int
    m_prime: int
    f_prime: int
    rel_amplitude: float


def radius_from_b(b_rot_cm1: float, mu: float) -> float:
    """Effective fixed-rotor radius (a0) from B_rot in cm^-1, mu in m_e."""
    check_positive("b_rot", b_rot_cm1)
    check_positive("mu", mu)
    b_h = b_rot_cm1 * CM1_TO_HARTREE
    return 1.0 / (2.0 * mu * b_h) ** 0.5


def b_from_radius(r: float, mu: float) -> float:
    """Rotational constant (cm^-1) of a fixed rotor of radius r (a0)."""
    check_positive("r", r)
    check_positive("mu", mu)
    return HARTREE_TO_CM1 / (2.0 * mu * r * r)


def components(delta_pa: float, lvl: RotationalLevel) -> list[LineComponent]:
    """Enumerate all sub-components of one vibrational line.

    Component wavenumbers follow
        nu = NU_RES_CM1 + delta_pa + B_rot R'(R'+1) + m' * delta_r,
    plus the hyperfine offset for F'=1 progressions. Within each R' the
    m' components share the band amplitude.
    """
    offset = 0.0
    if lvl.f_prime == 1:
        offset = lvl.hyperfine_sign * HYPERFINE_SPLITTING_CM1
    out = []
    for r_prime in range(lvl.r_prime_max + 1):
        band_center = (
            NU_RES_CM1 + delta_pa + offset + lvl.b_rot * r_prime * (r_prime + 1)
        )
        m_max = min(r_prime, lvl.f_prime)
        for m_prime in range(-m_max, m_max + 1):
            out.append(
                LineComponent(
                    wavenumber=band_center + m_prime * lvl.delta_r,
                    r_prime=r_prime,
                    m_prime=m_prime,
                    f_prime=lvl.f_prime,
                    rel_amplitude=lvl.band_amplitudes[r_prime],
                )
            )
    return out


def max_thermal_r(
    temperature_k: float,
    barrier_by_l: dict[int, float],
    barrier_factor: float = 2.0,
) -> int:
    """Highest partial wave whose centrifugal barrier thermal collisions clear.

    Returns the largest consecutive l (scanning upward from 1) whose
    barrier height (hartree) is below barrier_factor * k_B T; 0 when even
    l = 1 is blocked.
    """
    check_positive("temperature", temperature_k)
    threshold_h = barrier_factor * temperature_k / HARTREE_TO_K
    r_max = 0
    for l in sorted(barrier_by_l):
        if l < 1:
            raise ValueError("barrier_by_l keys must be >= 1")
        if l != r_max + 1:
            break
        if barrier_by_l[l] < threshold_h:
            r_max = l
        else:
            break
    return r_max


def components_to_csv(comps: list[LineComponent]) -> str:
    """Serialize components as CSV (wavenumber_cm1,r_prime,m_prime,f_prime,amplitude)."""
    lines = ["wavenumber_cm1,r_prime,m_prime,f_prime,amplitude"]
    for c in comps:
        lines.append(
            f"{c.wavenumber!r},{c.r_prime},{c.m_prime},{c.f_prime},{c.rel_amplitude!r}"
        )
    return "\n".join(lines) + "\n"
