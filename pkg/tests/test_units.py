import math

import pytest
from hypothesis import given, strategies as st

from ndefit import units
from ndefit.units import Quantity, Unit, convert, dispersion_to_atomic, reduced_mass

ENERGY_UNITS = [u for u in Unit if u.dimension == "energy"]
ALL_UNITS = list(Unit)


def test_hartree_to_cm1_defining_constant():
    q = convert(Quantity(1.0, Unit.HARTREE), Unit.CM1)
    assert q.value == pytest.approx(219474.631, abs=1e-3)


def test_zero_converts_to_zero():
    assert convert(Quantity(0.0, Unit.CM1), Unit.HARTREE).value == 0.0


def test_cm1_to_hartree_example():
    q = convert(Quantity(4.897, Unit.CM1), Unit.HARTREE)
    assert q.value == pytest.approx(2.2313e-5, rel=1e-4)


@pytest.mark.parametrize("unit", ALL_UNITS)
def test_round_trip_all_units(unit):
    base = [u for u in Unit if u.dimension == unit.dimension][0]
    q = Quantity(3.7251, unit)
    back = convert(convert(q, base), unit)
    assert back.value == pytest.approx(3.7251, rel=1e-12)


@given(
    value=st.floats(min_value=1e-8, max_value=1e8),
    src=st.sampled_from(ENERGY_UNITS),
    dst=st.sampled_from(ENERGY_UNITS),
)
def test_energy_round_trip_property(value, src, dst):
    q = Quantity(value, src)
    back = convert(convert(q, dst), src)
    assert math.isclose(back.value, value, rel_tol=1e-12)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError, match="cannot convert"):
        convert(Quantity(1.0, Unit.CM1), Unit.BOHR)


def test_reduced_mass_bundled_pair():
    mu = reduced_mass(175.9426, 86.9092)
    assert mu == pytest.approx(58.1737, abs=2e-4)
    assert mu == pytest.approx(175.9426 * 86.9092 / (175.9426 + 86.9092), rel=1e-15)


def test_reduced_mass_equal_masses():
    assert reduced_mass(3.0, 3.0) == pytest.approx(1.5, rel=1e-15)


def test_reduced_mass_isotope_ratio():
    mu176 = reduced_mass(175.9426, 86.9092)
    mu174 = reduced_mass(173.9389, 86.9092)
    assert math.sqrt(mu176 / mu174) == pytest.approx(1.00190, abs=1e-5)


@given(
    m1=st.floats(min_value=1e-3, max_value=1e3),
    m2=st.floats(min_value=1e-3, max_value=1e3),
)
def test_reduced_mass_symmetric_and_bounded(m1, m2):
    mu = reduced_mass(m1, m2)
    assert math.isclose(mu, reduced_mass(m2, m1), rel_tol=1e-14)
    assert mu <= min(m1, m2)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_reduced_mass_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        reduced_mass(bad, 1.0)


def test_dispersion_identity_in_atomic_units():
    assert dispersion_to_atomic(6190.0, 403000.0) == (6190.0, 403000.0)
    assert dispersion_to_atomic(0.0, 0.0) == (0.0, 0.0)


def test_dispersion_si_factor():
    # E_h * a0^6 in J m^6
    assert units.C6_AU_TO_J_M6 == pytest.approx(9.5734e-80, rel=1e-4)
    assert 6190.0 * units.C6_AU_TO_J_M6 == pytest.approx(5.9259e-76, rel=1e-4)


def test_dispersion_from_si_round_trip():
    c6_au, c8_au = dispersion_to_atomic(
        6190.0 * units.C6_AU_TO_J_M6,
        403000.0 * units.C8_AU_TO_J_M8,
        energy_unit=Unit.JOULE,
        length_unit=Unit.METER,
    )
    assert c6_au == pytest.approx(6190.0, rel=1e-12)
    assert c8_au == pytest.approx(403000.0, rel=1e-12)


def test_dispersion_rejects_wrong_dimensions():
    with pytest.raises(ValueError):
        dispersion_to_atomic(1.0, 0.0, energy_unit=Unit.BOHR)
