"""Physical constants and unit conversions.

All other modules compute in atomic units (hbar = m_e = E_h = a0 = 1);
I/O uses the spectroscopic units of the problem domain (cm^-1, a0, amu).
Conversion factors are CODATA values taken from scipy.constants and are
fixed at import time, not configurable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from scipy.constants import physical_constants as _pc

# energy
HARTREE_TO_CM1 = _pc["hartree-inverse meter relationship"][0] / 100.0
CM1_TO_HARTREE = 1.0 / HARTREE_TO_CM1
HARTREE_TO_J = _pc["Hartree energy"][0]
HARTREE_TO_K = _pc["hartree-kelvin relationship"][0]
HARTREE_TO_MHZ = _pc["hartree-hertz relationship"][0] / 1e6

# length
BOHR_TO_M = _pc["Bohr radius"][0]
BOHR_TO_NM = BOHR_TO_M * 1e9

# mass
AMU_TO_ME = _pc["atomic mass constant"][0] / _pc["electron mass"][0]

# dispersion coefficients, atomic units -> SI
C6_AU_TO_J_M6 = HARTREE_TO_J * BOHR_TO_M**6
C8_AU_TO_J_M8 = HARTREE_TO_J * BOHR_TO_M**8


class Unit(enum.Enum):
    """Units handled by :func:`convert`, grouped by dimension."""

    HARTREE = ("energy", 1.0)
    CM1 = ("energy", CM1_TO_HARTREE)
    JOULE = ("energy", 1.0 / HARTREE_TO_J)
    KELVIN = ("energy", 1.0 / HARTREE_TO_K)
    MEGAHERTZ = ("energy", 1.0 / HARTREE_TO_MHZ)
    BOHR = ("length", 1.0)
    METER = ("length", 1.0 / BOHR_TO_M)
    NANOMETER = ("length", 1.0 / BOHR_TO_NM)
    AMU = ("mass", AMU_TO_ME)
    ELECTRON_MASS = ("mass", 1.0)

    def __init__(self, dimension: str, to_atomic: float):
        self.dimension = dimension
        self.to_atomic = to_atomic


@dataclass(frozen=True)
class Quantity:
    """A value tagged with one of the supported units."""

    value: float
    unit: Unit

    def to(self, target: Unit) -> "Quantity":
        return convert(self, target)


def convert(q: Quantity, target: Unit) -> Quantity:
    """Rescale a quantity to another unit of the same dimension.

    Raises ValueError on a dimension mismatch. Round trips close to
    better than 1e-12 relative (single multiplicative factor each way).
    """
    if q.unit.dimension != target.dimension:
        raise ValueError(
            f"cannot convert {q.unit.name} ({q.unit.dimension}) "
            f"to {target.name} ({target.dimension})"
        )
    return Quantity(q.value * q.unit.to_atomic / target.to_atomic, target)


def reduced_mass(m1: float, m2: float) -> float:
    """Two-body reduced mass m1*m2/(m1+m2), in the unit of the inputs."""
    if not (m1 > 0 and m2 > 0):
        raise ValueError(f"masses must be positive, got ({m1}, {m2})")
    return m1 * m2 / (m1 + m2)


def dispersion_to_atomic(
    c6: float,
    c8: float,
    energy_unit: Unit = Unit.HARTREE,
    length_unit: Unit = Unit.BOHR,
) -> tuple[float, float]:
    """Express dispersion coefficients in hartree*a0^6 and hartree*a0^8.

    Input coefficients carry units energy*length^6 and energy*length^8
    built from the given energy and length units.
    """
    if energy_unit.dimension != "energy" or length_unit.dimension != "length":
        raise ValueError("energy_unit/length_unit must be an energy and a length")
    e = energy_unit.to_atomic
    l = length_unit.to_atomic
    return c6 * e * l**6, c8 * e * l**8
