import numpy as np
import pytest

from ndefit import units
from ndefit.boundstates import (
    BoundState,
    CalibrationError,
    RadialGrid,
    ResolutionError,
    calibrate_wall,
    calibrated_levels,
    effective_radius,
    solve_bound,
)
from ndefit.potential import PotentialParams, outer_turning_point

MU176 = 58.17358 * units.AMU_TO_ME
P = PotentialParams(6328.7, 409201.0)


def window(lo_cm, hi_cm):
    return (lo_cm * units.CM1_TO_HARTREE, hi_cm * units.CM1_TO_HARTREE)


@pytest.fixture(scope="module")
def small_solve():
    grid = RadialGrid(r_min=12.0, r_max_grid=400.0, n_points=40000)
    states = solve_bound(P, MU176, grid, window(-1.0, -0.02))
    assert len(states) >= 4
    return grid, states


def test_grid_validation():
    with pytest.raises(ValueError):
        RadialGrid(r_min=0.0, r_max_grid=400.0)
    with pytest.raises(ValueError):
        RadialGrid(r_min=10.0, r_max_grid=5.0)
    with pytest.raises(ValueError):
        RadialGrid(r_min=10.0, r_max_grid=400.0, n_points=100)


def test_states_ordered_with_consecutive_nodes(small_solve):
    _, states = small_solve
    energies = [s.energy for s in states]
    assert energies == sorted(energies)
    for a, b in zip(states, states[1:]):
        assert b.nodes - a.nodes == 1


def test_states_normalized_with_pinned_boundaries(small_solve):
    grid, states = small_solve
    for s in states:
        assert abs(float(np.sum(s.psi**2)) * grid.spacing - 1.0) < 1e-8
        assert s.psi[0] == 0.0
        assert abs(s.psi[-1]) < 1e-6


def test_states_orthogonal(small_solve):
    grid, states = small_solve
    for i, a in enumerate(states):
        for b in states[i + 1:]:
            assert abs(float(np.sum(a.psi * b.psi)) * grid.spacing) < 1e-6


def test_effective_radius_below_turning_point(small_solve):
    _, states = small_solve
    for s in states:
        assert 0 < s.r_eff_wf < outer_turning_point(P, s.energy)


def test_effective_radius_narrow_peak_limit(small_solve):
    grid, _ = small_solve
    r = grid.points()
    r0 = 60.0
    for width in (2.0, 0.5):
        psi = np.exp(-0.5 * ((r - r0) / width) ** 2)
        psi /= np.sqrt(np.sum(psi**2) * grid.spacing)
        state = BoundState(energy=-1e-5, psi=psi, grid=grid, nodes=0, r_eff_wf=0.0)
        assert effective_radius(state) == pytest.approx(r0, abs=width**2 / r0 + 1e-6)


def test_empty_window_gives_empty_list(small_solve):
    grid, _ = small_solve
    assert solve_bound(P, MU176, grid, window(-0.0199, -0.0198)) == []


def test_window_validation(small_solve):
    grid, _ = small_solve
    with pytest.raises(ValueError):
        solve_bound(P, MU176, grid, window(-0.02, -1.0))
    # shallow window whose turning point breaks the 3x box rule
    with pytest.raises(ValueError, match="turning"):
        solve_bound(P, MU176, grid, window(-1.0, -1e-4))


def test_coarse_grid_raises_resolution_error():
    grid = RadialGrid(r_min=8.0, r_max_grid=400.0, n_points=2000)
    with pytest.raises(ResolutionError):
        solve_bound(P, MU176, grid, window(-5.0, -3.0), check_convergence=True)


def test_grid_convergence_under_refinement():
    g1 = RadialGrid(12.0, 400.0, 160000)
    g2 = RadialGrid(12.0, 400.0, 320000)
    s1 = solve_bound(P, MU176, g1, window(-0.6, -0.02))
    s2 = solve_bound(P, MU176, g2, window(-0.6, -0.02))
    assert len(s1) == len(s2) >= 3
    for a, b in zip(s1, s2):
        assert abs(a.energy - b.energy) * units.HARTREE_TO_CM1 <= 1e-6


def test_calibrate_wall_reproduces_anchor():
    wall = calibrate_wall(P, MU176, -4.897, n_points=40000)
    assert 8.0 <= wall <= 12.0
    grid = RadialGrid(r_min=wall, r_max_grid=400.0, n_points=40000)
    states = solve_bound(P, MU176, grid, window(-4.95, -4.85))
    assert len(states) == 1
    assert abs(states[0].energy * units.HARTREE_TO_CM1 + 4.897) < 1e-4


def test_calibrate_wall_failure_mode():
    with pytest.raises(CalibrationError):
        # a wall scan that cannot bracket any root
        calibrate_wall(P, MU176, -4.897, wall_range=(8.0, 8.001), n_points=40000)


def test_calibrated_levels_labelling():
    labelled = calibrated_levels(
        P, MU176, anchor_dv=-8, anchor_energy_cm1=-1.938, dv_to=-5, n_points=40000
    )
    dvs = [dv for dv, _ in labelled]
    assert dvs == [-8, -7, -6, -5]
    anchor_state = labelled[0][1]
    assert abs(anchor_state.energy * units.HARTREE_TO_CM1 + 1.938) < 1e-4


def test_wall_sensitivity_larger_for_deep_levels():
    # moving the wall shifts deep levels more than near-threshold ones;
    # levels are identified across wall positions by their node count
    def levels_at(wall):
        grid = RadialGrid(r_min=wall, r_max_grid=400.0, n_points=40000)
        states = solve_bound(P, MU176, grid, window(-5.0, -0.02))
        return {s.nodes: s.energy for s in states}

    e1, e2 = levels_at(10.0), levels_at(10.005)
    common = sorted(set(e1) & set(e2))
    assert len(common) >= 5
    shifts = [abs(e2[n] - e1[n]) * units.HARTREE_TO_CM1 for n in common]
    assert shifts[0] > 10 * shifts[-1]


def test_wavefunction_csv_round_trip(small_solve):
    _, states = small_solve
    text = states[0].to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "r_a0,psi"
    r, psi = zip(*(map(float, row.split(",")) for row in lines[1:]))
    assert np.allclose(psi, states[0].psi)
    assert np.allclose(r, states[0].grid.points())
