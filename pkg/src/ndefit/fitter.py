"""Joint least-squares fit of the long-range potential to line positions.

The estimator follows the scikit-learn protocol: hyperparameters in
__init__, data in fit(X, y), learned attributes with trailing
underscores. A feature row is (reduced_mass_amu, dv) and the target is
the line detuning in cm^-1; the dispersion coefficients c6 and c8 are
shared across isotopologues while the non-integer dissociation quantum
number v_d is learned per reduced mass, so one model jointly describes
several mass-scaled level series.

Internally the optimizer works on (log c6, log1p(c8/c8_scale), v_d...)
to keep the two coefficients, which differ by orders of magnitude,
comparably conditioned and automatically positive. The damped
least-squares solve itself is delegated to scipy's trust-region
reflective method with a central finite-difference Jacobian. Because the
cost surface has a shallow secondary valley at c8 = 0, fit() runs a
short deterministic multi-start schedule: a pure-C6 stage first, then
releases of c8 from a few seed values, keeping the lowest cost.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from sklearn.base import BaseEstimator, RegressorMixin

from ._validation import as_float_array
from .dataio import IsotopologueSpec, LineRecord
from .nde import NdeModel, level_energy, pure_c6_coefficient, quantum_defect
from .potential import PotentialParams
from .units import AMU_TO_ME, CM1_TO_HARTREE, HARTREE_TO_CM1

# v_d lives in [0, 1); keep the optimizer strictly inside the open end
V_D_UPPER = 1.0 - 1e-9


class IdentifiabilityError(ValueError):
    """Fewer lines than free parameters, or a degenerate design."""


class AssignmentError(ValueError):
    """Vibrational assignment is ambiguous for the given model."""


class NdeLevelFitter(RegressorMixin, BaseEstimator):
    """Fit shared (c6, c8) and per-isotopologue v_d to observed detunings.

    Parameters
    ----------
    fix_c8 : bool
        Freeze c8 at 0 and fit only c6 and the v_d offsets.
    c8_scale : float
        Scale of the log1p reparameterization of c8 (hartree*a0^8).
    c8_seeds : tuple of float
        Starting c8 values for the release stage of the multi-start.
    initial_c6 : float or None
        Optional c6 seed; default is a pure-C6 regression of count^3
        against binding energy on the largest series.
    initial_v_d : float
        v_d seed used for all isotopologues.
    max_iter : int
        Cap on objective evaluations per optimizer run.
    xtol, ftol : float
        Relative parameter-change and cost-change stopping tolerances.
    diff_step : float
        Relative step of the central finite-difference Jacobian.
    level_tol_cm1 : float
        Tolerance of the inner level-energy inversion.
    quad_abs_tol, quad_max_depth : float, int
        Quadrature settings passed through to the level-count integral.

    Attributes (after fit)
    ----------------------
    c6_, c8_ : float
        Dispersion coefficients in hartree*a0^6 / hartree*a0^8.
    masses_ : ndarray
        Distinct reduced masses (amu) in first-appearance order.
    v_d_ : ndarray
        Fitted v_d per entry of masses_.
    residuals_ : ndarray
        observed - predicted per input row, cm^-1.
    rms_ : float
        Root-mean-square of residuals_.
    covariance_ : ndarray
        Covariance of (c6, c8, v_d...) from the Jacobian at the optimum.
    condition_number_ : float
        Condition number of the scaled Jacobian at the optimum.
    converged_ : bool
        Stopping tolerances met within the iteration cap.
    n_iter_ : int
        Objective evaluations spent by the winning optimizer run.
    active_bounds_ : list of str
        Parameters pinned at a bound by the optimizer, if any.
    """

    def __init__(
        self,
        fix_c8: bool = False,
        c8_scale: float = 1e5,
        c8_seeds: tuple = (1e5, 1e6),
        initial_c6: float | None = None,
        initial_v_d: float = 0.5,
        max_iter: int = 500,
        xtol: float = 1e-8,
        ftol: float = 1e-10,
        diff_step: float = 1e-6,
        level_tol_cm1: float = 1e-10,
        quad_abs_tol: float = 1e-10,
        quad_max_depth: int = 60,
    ):
        self.fix_c8 = fix_c8
        self.c8_scale = c8_scale
        self.c8_seeds = c8_seeds
        self.initial_c6 = initial_c6
        self.initial_v_d = initial_v_d
        self.max_iter = max_iter
        self.xtol = xtol
        self.ftol = ftol
        self.diff_step = diff_step
        self.level_tol_cm1 = level_tol_cm1
        self.quad_abs_tol = quad_abs_tol
        self.quad_max_depth = quad_max_depth

    # -- data plumbing ---------------------------------------------------

    def _validate_xy(self, X, y):
        X = as_float_array("X", X, ndim=2)
        y = as_float_array("y", y, ndim=1)
        if X.shape[1] != 2:
            raise ValueError("X must have two columns: (reduced_mass_amu, dv)")
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y length mismatch")
        if np.any(X[:, 0] <= 0):
            raise ValueError("reduced masses must be positive")
        dv = X[:, 1]
        if np.any(dv != np.round(dv)) or np.any(dv > -1):
            raise ValueError("dv must be integers <= -1")
        if np.any(y >= 0):
            raise ValueError("detunings must be negative (bound levels)")
        return X, y

    def _mass_index(self, masses_amu: np.ndarray) -> np.ndarray:
        idx = np.empty(len(masses_amu), dtype=int)
        for i, m in enumerate(masses_amu):
            j = np.nonzero(np.isclose(self.masses_, m, rtol=1e-12, atol=0.0))[0]
            if len(j) == 0:
                raise ValueError(f"reduced mass {m} amu was not seen during fit")
            idx[i] = j[0]
        return idx

    def _model(self, c6: float, c8: float, mu_amu: float) -> NdeModel:
        return NdeModel(
            params=PotentialParams(c6=c6, c8=c8),
            mu=mu_amu * AMU_TO_ME,
            quad_abs_tol=self.quad_abs_tol,
            quad_max_depth=self.quad_max_depth,
        )

    def _predict_cm1(self, c6, c8, v_d, dv, mass_idx) -> np.ndarray:
        out = np.empty(len(dv))
        models = {i: self._model(c6, c8, m) for i, m in enumerate(self.masses_)}
        for k in range(len(dv)):
            model = models[mass_idx[k]]
            count = v_d[mass_idx[k]] + abs(dv[k])
            out[k] = level_energy(model, count, tol_cm1=self.level_tol_cm1) * HARTREE_TO_CM1
        return out

    # -- seeding ---------------------------------------------------------

    def _seed_c6(self, y, mass_idx, dv) -> float:
        if self.initial_c6 is not None:
            return float(self.initial_c6)
        # pure-C6 linearization: |E| = (v_d + |dv|)^3 / G6^3, regressed
        # through the origin on the best-populated series
        ref = np.argmax(np.bincount(mass_idx))
        sel = mass_idx == ref
        counts = self.initial_v_d + np.abs(dv[sel])
        abs_e = np.abs(y[sel]) * CM1_TO_HARTREE
        slope = float(np.sum(counts**3 * abs_e) / np.sum(counts**6))
        g6 = slope ** (-1.0 / 3.0)
        mu = self.masses_[ref] * AMU_TO_ME
        # invert G6 = (3/2) I6 sqrt(2 mu) c6^(1/6) / pi for c6
        span = g6 / (pure_c6_coefficient(1.0, mu))
        return span**6

    # -- fitting ---------------------------------------------------------

    def fit(self, X, y, sample_weight=None):
        X, y = self._validate_xy(X, y)
        weights = (
            np.ones_like(y)
            if sample_weight is None
            else as_float_array("sample_weight", sample_weight, ndim=1)
        )
        if np.any(weights < 0):
            raise ValueError("sample_weight must be non-negative")

        # canonical internal ordering makes the optimization path
        # independent of input row order
        masses_amu = X[:, 0]
        dv = X[:, 1].astype(int)
        self.masses_ = np.array(sorted(set(masses_amu.tolist()), reverse=True))
        mass_idx = self._mass_index(masses_amu)
        order = np.lexsort((dv, mass_idx))
        s_idx, s_dv, s_y, s_w = mass_idx[order], dv[order], y[order], weights[order]

        n_iso = len(self.masses_)
        n_params = (1 if self.fix_c8 else 2) + n_iso
        if len(s_y) < n_params:
            raise IdentifiabilityError(
                f"{len(s_y)} lines cannot determine {n_params} parameters"
            )

        sqrt_w = np.sqrt(s_w)

        def theta_residuals(theta):
            c6 = np.exp(theta[0])
            c8 = 0.0 if self.fix_c8 else self.c8_scale * np.expm1(theta[1])
            v_d = theta[1 if self.fix_c8 else 2:]
            pred = self._predict_cm1(c6, c8, v_d, s_dv, s_idx)
            return sqrt_w * (s_y - pred)

        c6_seed = self._seed_c6(s_y, s_idx, s_dv)
        vd0 = np.full(n_iso, float(self.initial_v_d))
        lo = np.concatenate(([-np.inf] if self.fix_c8 else [-np.inf, 0.0], np.zeros(n_iso)))
        hi = np.concatenate(
            ([np.inf] if self.fix_c8 else [np.inf, np.inf], np.full(n_iso, V_D_UPPER))
        )

        def solve(theta0):
            return least_squares(
                theta_residuals,
                theta0,
                jac="3-point",
                diff_step=self.diff_step,
                bounds=(lo, hi),
                xtol=self.xtol,
                ftol=self.ftol,
                gtol=1e-14,
                max_nfev=self.max_iter,
            )

        # stage 1: pure-C6 fit pins c6 and the v_d offsets
        if self.fix_c8:
            theta0 = np.concatenate(([np.log(c6_seed)], vd0))
            best = solve(theta0)
        else:
            stage1 = solve(np.concatenate(([np.log(c6_seed), 0.0], vd0)))
            # stage 2: release c8 from each seed; the c8 = 0 valley is a
            # local minimum for structured data, so keep the best cost
            best = stage1
            for c8_seed in self.c8_seeds:
                theta0 = stage1.x.copy()
                theta0[1] = np.log1p(c8_seed / self.c8_scale)
                cand = solve(theta0)
                if cand.cost < best.cost:
                    best = cand

        self.c6_ = float(np.exp(best.x[0]))
        self.c8_ = 0.0 if self.fix_c8 else float(self.c8_scale * np.expm1(best.x[1]))
        self.v_d_ = np.array(best.x[1 if self.fix_c8 else 2:])
        self.converged_ = bool(best.status > 0)
        self.n_iter_ = int(best.nfev)

        eps = 1e-7
        self.active_bounds_ = []
        if not self.fix_c8 and best.x[1] <= eps:
            self.active_bounds_.append("c8")
        for i, v in enumerate(self.v_d_):
            if v <= eps or v >= V_D_UPPER - eps:
                self.active_bounds_.append(f"v_d[{i}]")

        pred = self._predict_cm1(self.c6_, self.c8_, self.v_d_, dv, mass_idx)
        self.residuals_ = y - pred
        self.rms_ = float(np.sqrt(np.mean(self.residuals_**2)))
        self._covariance(s_y, s_dv, s_idx, sqrt_w)
        return self

    def _covariance(self, y, dv, mass_idx, sqrt_w):
        """Covariance of the physical parameters from a central-difference Jacobian."""
        params = np.concatenate(([self.c6_, self.c8_], self.v_d_))
        steps = np.where(np.abs(params) > 1e-12, np.abs(params) * 1e-6, 1e-6)

        def resid(p):
            pred = self._predict_cm1(p[0], max(p[1], 0.0), p[2:], dv, mass_idx)
            return sqrt_w * (y - pred)

        n, m = len(y), len(params)
        jac = np.empty((n, m))
        for j in range(m):
            up, dn = params.copy(), params.copy()
            up[j] += steps[j]
            dn[j] -= steps[j]
            jac[:, j] = (resid(up) - resid(dn)) / (2.0 * steps[j])
        if self.fix_c8:
            jac = np.delete(jac, 1, axis=1)
            m -= 1
        col_norm = np.linalg.norm(jac, axis=0)
        col_norm[col_norm == 0] = 1.0
        self.condition_number_ = float(np.linalg.cond(jac / col_norm))
        r = resid(params)
        dof = n - m
        if self.condition_number_ > 1e8 or dof == 0:
            warnings.warn(
                f"weakly identifiable fit: condition number "
                f"{self.condition_number_:.2e}, {dof} degrees of freedom; "
                "the covariance estimate is unreliable",
                stacklevel=3,
            )
        sigma2 = float(r @ r) / dof if dof > 0 else float("nan")
        jtj_inv = np.linalg.pinv(jac.T @ jac)
        cov = sigma2 * jtj_inv
        if self.fix_c8:
            full = np.full((m + 1, m + 1), np.nan)
            keep = [0] + list(range(2, m + 1))
            full[np.ix_(keep, keep)] = cov
            cov = full
        self.covariance_ = cov

    def predict(self, X):
        """Predicted detunings (cm^-1) for rows of (reduced_mass_amu, dv)."""
        X = as_float_array("X", X, ndim=2)
        mass_idx = self._mass_index(X[:, 0])
        return self._predict_cm1(
            self.c6_, self.c8_, self.v_d_, X[:, 1].astype(int), mass_idx
        )


# -- problem/result wrappers around the estimator ------------------------


@dataclass(frozen=True)
class FitProblem:
    """Observed lines plus isotopologue data and fit configuration."""

    lines: list  # (isotopologue_id, dv, energy_cm1) triples
    isotopologues: list[IsotopologueSpec]
    weights: list | None = None
    fix_c8: bool = False
    initial_c6: float | None = None
    initial_v_d: float = 0.5

    def __post_init__(self):
        ids = {s.id for s in self.isotopologues}
        for iso, dv, e in self.lines:
            if iso not in ids:
                raise ValueError(f"line references unknown isotopologue {iso!r}")
            if int(dv) != dv or dv > -1:
                raise ValueError(f"line dv must be an integer <= -1, got {dv}")
            if not (e < 0):
                raise ValueError(f"line energy must be negative, got {e}")
        if self.weights is not None and len(self.weights) != len(self.lines):
            raise ValueError("weights length must match lines")


@dataclass(frozen=True)
class FitResult:
    """Fitted potential, per-isotopologue v_d and fit diagnostics."""

    c6: float
    c8: float
    v_d: dict[str, float]
    residuals: list[dict]
    rms: float
    covariance: list[list[float]]
    condition_number: float
    converged: bool
    iterations: int
    active_bounds: list[str]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "c6_au": self.c6,
            "c8_au": self.c8,
            "v_d": dict(self.v_d),
            "rms_cm1": self.rms,
            "residuals": self.residuals,
            "covariance": self.covariance,
            "condition_number": self.condition_number,
            "converged": self.converged,
            "iterations": self.iterations,
            "active_bounds": list(self.active_bounds),
        }


def problem_from_records(
    records: list[LineRecord],
    isotopologues: list[IsotopologueSpec],
    f_prime: int = 2,
    **kwargs,
) -> FitProblem:
    """Build a FitProblem from observed, assigned records of one F' series."""
    lines = [
        (r.isotopologue, r.dv, r.delta_pa)
        for r in records
        if r.observed and r.dv is not None and r.delta_pa is not None
        and r.f_prime == f_prime
    ]
    return FitProblem(lines=lines, isotopologues=isotopologues, **kwargs)


def fit_nde(problem: FitProblem, estimator: NdeLevelFitter | None = None) -> FitResult:
    """Run the joint fit on a FitProblem and package a FitResult."""
    if estimator is None:
        estimator = NdeLevelFitter(
            fix_c8=problem.fix_c8,
            initial_c6=problem.initial_c6,
            initial_v_d=problem.initial_v_d,
        )
    spec_by_id = {s.id: s for s in problem.isotopologues}
    X = np.array(
        [[spec_by_id[iso].reduced_mass_amu, dv] for iso, dv, _ in problem.lines]
    )
    y = np.array([e for _, _, e in problem.lines])
    w = None if problem.weights is None else np.asarray(problem.weights, dtype=float)
    estimator.fit(X, y, sample_weight=w)

    v_d = {}
    iso_by_index = {}
    for iso in sorted({iso for iso, _, _ in problem.lines}):
        mu = spec_by_id[iso].reduced_mass_amu
        (j,) = np.nonzero(np.isclose(estimator.masses_, mu, rtol=1e-12, atol=0.0))
        v_d[iso] = float(estimator.v_d_[j[0]])
        iso_by_index[j[0]] = iso
    active_bounds = [
        f"v_d[{iso_by_index[int(b[4:-1])]}]" if b.startswith("v_d[") else b
        for b in estimator.active_bounds_
    ]

    pred = estimator.predict(X)
    residuals = [
        {
            "isotopologue": iso,
            "dv": int(dv),
            "observed_cm1": float(e),
            "predicted_cm1": float(p),
            "residual_cm1": float(e - p),
        }
        for (iso, dv, e), p in sorted(
            zip(problem.lines, pred), key=lambda t: (t[0][0], -t[0][1])
        )
    ]
    return FitResult(
        c6=estimator.c6_,
        c8=estimator.c8_,
        v_d=v_d,
        residuals=residuals,
        rms=estimator.rms_,
        covariance=np.asarray(estimator.covariance_).tolist(),
        condition_number=estimator.condition_number_,
        converged=estimator.converged_,
        iterations=estimator.n_iter_,
        active_bounds=active_bounds,
    )


def auto_assign(
    energies_cm1: list[float], model: NdeModel, v_d_guess: float
) -> list[int]:
    """Assign relative vibrational numbers to a decreasing energy list.

    Counts from quantum_defect anchor the first line at
    round(v_d_guess - count); subsequent lines step by the rounded count
    difference, so missing levels appear as gaps > 1 (reported via a
    warning). Spacings rounding outside (0.5, 3.5) raise AssignmentError.
    """
    if len(energies_cm1) == 0:
        return []
    e = np.asarray(energies_cm1, dtype=float)
    if np.any(np.diff(e) >= 0):
        raise ValueError("energies must be strictly decreasing")
    counts = np.array([quantum_defect(model, ei * CM1_TO_HARTREE) for ei in e])
    first = int(round(v_d_guess - counts[0]))
    if first > -1:
        warnings.warn(
            f"first assignment rounded to dv={first}; clamping to -1", stacklevel=2
        )
        first = -1
    if len(e) == 1:
        warnings.warn("single line: assignment is an unanchored guess", stacklevel=2)
        return [first]
    dvs = [first]
    for i in range(1, len(e)):
        spacing = counts[i] - counts[i - 1]
        if not (0.5 < spacing < 3.5):
            raise AssignmentError(
                f"count spacing {spacing:.3f} between lines at {e[i-1]} and "
                f"{e[i]} cm^-1 is outside (0.5, 3.5)"
            )
        step = int(round(spacing))
        if step > 1:
            warnings.warn(
                f"gap of {step - 1} unobserved level(s) between {e[i-1]} and "
                f"{e[i]} cm^-1",
                stacklevel=2,
            )
        dvs.append(dvs[-1] - step)
    return dvs


def residual_report(result: FitResult, problem: FitProblem) -> str:
    """Per-line residual table as CSV, with the mass-scaled count column.

    The scaled count is (v_d + |dv|) * sqrt(mu_ref/mu), mapping every
    isotopologue onto the level-count axis of the reference one (the
    isotopologue with the most lines).
    """
    spec_by_id = {s.id: s for s in problem.isotopologues}
    counts: dict[str, int] = {}
    for iso, _, _ in problem.lines:
        counts[iso] = counts.get(iso, 0) + 1
    ref = max(sorted(counts), key=lambda k: counts[k])
    mu_ref = spec_by_id[ref].reduced_mass_amu

    lines = ["isotopologue,dv,observed_cm1,predicted_cm1,residual_cm1,scaled_count"]
    for row in result.residuals:
        iso = row["isotopologue"]
        scale = float(np.sqrt(mu_ref / spec_by_id[iso].reduced_mass_amu))
        scaled = (result.v_d[iso] + abs(row["dv"])) * scale
        lines.append(
            f"{iso},{row['dv']},{row['observed_cm1']!r},{row['predicted_cm1']!r},"
            f"{row['residual_cm1']!r},{scaled!r}"
        )
    return "\n".join(lines) + "\n"
