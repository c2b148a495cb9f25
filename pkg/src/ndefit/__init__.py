"""ndefit: long-range molecular potentials from photoassociation line lists.

The package reconstructs the -C6/r^6 - C8/r^8 tail of an excited diatomic
potential from measured near-dissociation vibrational level positions,
predicts rovibrational structure, and cross-checks the semiclassical fit
against exact bound states of the same potential.

Modules
-------
units        physical constants, unit conversions, reduced mass
dataio       line-list CSV schema, validation, bundled dataset
potential    the dispersion potential, turning points, centrifugal barriers
nde          near-dissociation level-count integral and its inversion
fitter       sklearn-style joint fit of (c6, c8, v_d per isotopologue)
boundstates  Numerov eigensolver with a calibrated inner hard wall
rotation     rotational/hyperfine line components, fixed-rotor radii
spectra      trap-loss spectrum synthesis and peak recovery
cli          command-line pipeline (fit, predict, levels, spectrum, barrier)
"""

from .boundstates import BoundState, RadialGrid, calibrate_wall, solve_bound
from .dataio import (
    IsotopologueSpec,
    LineRecord,
    load_bundled_isotopologues,
    load_bundled_table1,
    parse_line_list,
    write_line_list,
)
from .fitter import FitProblem, FitResult, NdeLevelFitter, auto_assign, fit_nde
from .nde import NdeModel, level_energy, predict_series, quantum_defect
from .potential import BarrierInfo, PotentialParams, centrifugal_barrier, evaluate, outer_turning_point
from .rotation import LineComponent, RotationalLevel, components, radius_from_b
from .spectra import Spectrum, SpectrumConfig, find_peaks, synthesize
from .units import Quantity, Unit, convert, reduced_mass

__version__ = "0.1.0"

__all__ = [
    "BarrierInfo",
    "BoundState",
    "FitProblem",
    "FitResult",
    "IsotopologueSpec",
    "LineComponent",
    "LineRecord",
    "NdeLevelFitter",
    "NdeModel",
    "PotentialParams",
    "Quantity",
    "RadialGrid",
    "RotationalLevel",
    "Spectrum",
    "SpectrumConfig",
    "Unit",
    "auto_assign",
    "calibrate_wall",
    "centrifugal_barrier",
    "components",
    "convert",
    "evaluate",
    "find_peaks",
    "fit_nde",
    "level_energy",
    "load_bundled_isotopologues",
    "load_bundled_table1",
    "outer_turning_point",
    "parse_line_list",
    "predict_series",
    "quantum_defect",
    "radius_from_b",
    "reduced_mass",
    "solve_bound",
    "synthesize",
    "write_line_list",
]
