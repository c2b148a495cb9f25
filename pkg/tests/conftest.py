import time

import numpy as np
import pytest

from ndefit import dataio, fitter, nde, potential, units


@pytest.fixture(scope="session")
def bundled_isotopologues():
    return dataio.load_bundled_isotopologues()


@pytest.fixture(scope="session")
def bundled_records():
    return dataio.load_bundled_table1()


@pytest.fixture(scope="session")
def mu_by_iso(bundled_isotopologues):
    return {s.id: s.reduced_mass_amu * units.AMU_TO_ME for s in bundled_isotopologues}


@pytest.fixture(scope="session")
def table1_fit(bundled_records, bundled_isotopologues):
    """The joint fit of the bundled dataset, with its wall-clock time."""
    problem = fitter.problem_from_records(bundled_records, bundled_isotopologues)
    t0 = time.perf_counter()
    result = fitter.fit_nde(problem)
    elapsed = time.perf_counter() - t0
    return result, problem, elapsed


@pytest.fixture(scope="session")
def synthetic_recovery():
    """Noise-free two-isotopologue problem and its fit, for recovery checks."""
    specs = dataio.load_bundled_isotopologues()
    truth = {"c6": 6000.0, "c8": 3.0e5, "v_d": {"176Yb87Rb": 0.42, "174Yb87Rb": 0.77}}
    lines = []
    for spec in specs:
        model = nde.NdeModel(
            params=potential.PotentialParams(truth["c6"], truth["c8"]),
            mu=spec.reduced_mass_amu * units.AMU_TO_ME,
        )
        for dv in range(-12, -2):
            e_cm = (
                nde.level_energy(model, truth["v_d"][spec.id] + abs(dv))
                * units.HARTREE_TO_CM1
            )
            lines.append((spec.id, dv, e_cm))
    problem = fitter.FitProblem(lines=lines, isotopologues=specs)
    result = fitter.fit_nde(problem)
    return truth, problem, result
