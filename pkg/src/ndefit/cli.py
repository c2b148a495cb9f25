"""Command-line front end: fit, predict, levels, spectrum, barrier.

Exit codes: 0 success, 1 input or validation error, 2 numerical
non-convergence (best-effort output is still written). All I/O uses
cm^-1, a0, amu, atomic-unit dispersion coefficients and uK.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import boundstates, dataio, fitter, nde, potential, rotation, spectra
from .units import AMU_TO_ME, CM1_TO_HARTREE, HARTREE_TO_CM1

SCHEMA_VERSION = 1


class UsageError(ValueError):
    pass


def _write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _read_fit_json(path: str) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("schema_version") != SCHEMA_VERSION:
        raise UsageError(f"unsupported fit schema_version in {path}")
    return data


def _load_isotopologues(path: str | None):
    if path is None:
        return dataio.load_bundled_isotopologues()
    return dataio.parse_isotopologues(Path(path).read_text(encoding="utf-8"))


def _mu_me(fit_data: dict, iso: str, isotopologues) -> float:
    by_id = {s.id: s for s in isotopologues}
    if iso not in by_id:
        raise UsageError(f"unknown isotopologue {iso!r}")
    if iso not in fit_data["v_d"]:
        raise UsageError(f"fit result carries no v_d for {iso!r}")
    return by_id[iso].reduced_mass_amu * AMU_TO_ME


def cmd_fit(args) -> int:
    if args.lines is None:
        records = dataio.load_bundled_table1()
        specs = dataio.load_bundled_isotopologues()
    else:
        specs = _load_isotopologues(args.isotopologues)
        records, specs = dataio.parse_line_list(
            Path(args.lines).read_text(encoding="utf-8"), specs
        )
    problem = fitter.problem_from_records(
        records, specs, fix_c8=args.fix_c8, initial_v_d=args.initial_v_d
    )
    if len(problem.lines) < 4:
        raise UsageError("need at least 4 assigned observed lines to fit")
    result = fitter.fit_nde(problem)
    _write_output(json.dumps(result.to_json_dict(), indent=2) + "\n", args.out)
    if args.residuals is not None:
        Path(args.residuals).write_text(
            fitter.residual_report(result, problem), encoding="utf-8"
        )
    if not args.quiet:
        print(
            f"# c6={result.c6:.1f} a.u.  c8={result.c8:.0f} a.u.  "
            f"rms={result.rms:.4f} cm^-1  converged={result.converged}",
            file=sys.stderr,
        )
    return 0 if result.converged else 2


def cmd_predict(args) -> int:
    if args.dv_from > args.dv_to or args.dv_to > -1:
        raise UsageError("need dv_from <= dv_to <= -1")
    fit_data = _read_fit_json(args.fit)
    specs = _load_isotopologues(args.isotopologues)
    mu = _mu_me(fit_data, args.isotopologue, specs)
    model = nde.NdeModel(
        params=potential.PotentialParams(fit_data["c6_au"], fit_data["c8_au"]), mu=mu
    )
    series = nde.predict_series(
        model, fit_data["v_d"][args.isotopologue], args.dv_from, args.dv_to
    )
    lines = ["isotopologue,dv,delta_pa_cm1"]
    for dv, e_h in series:
        lines.append(f"{args.isotopologue},{dv},{e_h * HARTREE_TO_CM1!r}")
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def cmd_levels(args) -> int:
    fit_data = _read_fit_json(args.fit)
    specs = _load_isotopologues(args.isotopologues)
    mu = _mu_me(fit_data, args.isotopologue, specs)
    params = potential.PotentialParams(fit_data["c6_au"], fit_data["c8_au"])
    if args.anchor_energy is not None:
        anchor_e = args.anchor_energy
    else:
        model = nde.NdeModel(params=params, mu=mu)
        anchor_e = (
            nde.level_energy(
                model, fit_data["v_d"][args.isotopologue] + abs(args.anchor_dv)
            )
            * HARTREE_TO_CM1
        )
    try:
        labelled = boundstates.calibrated_levels(
            params,
            mu,
            anchor_dv=args.anchor_dv,
            anchor_energy_cm1=anchor_e,
            dv_to=args.dv_to,
            n_points=args.n_points,
        )
    except boundstates.CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    lines = ["dv,energy_cm1,r_eff_wf_a0,r_turning_a0"]
    for dv, state in labelled:
        rt = potential.outer_turning_point(params, state.energy)
        lines.append(
            f"{dv},{state.energy * HARTREE_TO_CM1!r},{state.r_eff_wf!r},{rt!r}"
        )
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def cmd_spectrum(args) -> int:
    lvl = rotation.RotationalLevel(
        b_rot=args.b_rot * 1e-3,
        delta_r=args.delta_r * 1e-3,
        f_prime=args.f_prime,
        r_prime_max=args.r_prime_max,
        band_amplitudes=tuple(args.band_amplitudes),
        hyperfine_sign=args.hyperfine_sign,
    )
    comps = rotation.components(args.delta_pa, lvl)
    start = args.grid_start if args.grid_start is not None else args.delta_pa - 10 * args.fwhm
    stop = (
        args.grid_stop
        if args.grid_stop is not None
        else args.delta_pa + args.b_rot * 1e-3 * args.r_prime_max * (args.r_prime_max + 1)
        + args.delta_r * 1e-3 * args.f_prime + 10 * args.fwhm
    )
    cfg = spectra.SpectrumConfig(
        grid_start=start,
        grid_stop=stop,
        grid_step=args.grid_step,
        line_fwhm=args.fwhm,
        line_shape=args.line_shape,
        noise_rms=args.noise_rms,
    )
    spec = spectra.synthesize(comps, cfg, depth_scale=args.depth, seed=args.seed)
    if args.format == "svg":
        _write_output(_spectrum_svg(spec), args.out)
    else:
        _write_output(spec.to_csv(), args.out)
    return 0


def _spectrum_svg(spec: spectra.Spectrum, width: int = 800, height: int = 300) -> str:
    """Minimal standalone polyline plot; deterministic byte output."""
    d = spec.delta_pa
    s = spec.signal
    x = (d - d[0]) / (d[-1] - d[0]) * (width - 40) + 30
    smin, smax = float(np.min(s)), float(np.max(s))
    span = smax - smin if smax > smin else 1.0
    y = height - 20 - (s - smin) / span * (height - 40)
    pts = " ".join(f"{xi:.2f},{yi:.2f}" for xi, yi in zip(x, y))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1"/>\n'
        f'<text x="{width // 2}" y="{height - 4}" font-size="12" text-anchor="middle">'
        f"delta_pa from {d[0]:.6g} to {d[-1]:.6g} cm^-1</text>\n"
        "</svg>\n"
    )


def cmd_barrier(args) -> int:
    if args.l < 1:
        raise UsageError("barrier requires l >= 1")
    info = potential.centrifugal_barrier(
        potential.PotentialParams(args.c6, 0.0), args.mu * AMU_TO_ME, args.l
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "l": info.l,
        "r_b_a0": info.r_barrier,
        "height_uK": info.height_uK,
        "height_hartree": info.height,
    }
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndefit",
        description="Long-range potential reconstruction from photoassociation line lists",
    )
    parser.add_argument("--quiet", action="store_true", help="suppress progress chatter")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="joint NDE fit of a line list")
    p_fit.add_argument("--lines", help="line-list CSV (default: bundled dataset)")
    p_fit.add_argument("--isotopologues", help="isotopologue CSV (default: bundled)")
    p_fit.add_argument("--out", help="fit result JSON path (default: stdout)")
    p_fit.add_argument("--residuals", help="also write a residual-report CSV here")
    p_fit.add_argument("--fix-c8", action="store_true", help="freeze c8 at 0")
    p_fit.add_argument("--initial-v-d", type=float, default=0.5)
    p_fit.set_defaults(func=cmd_fit)

    p_pred = sub.add_parser("predict", help="predict level detunings from a fit")
    p_pred.add_argument("--fit", required=True, help="fit result JSON")
    p_pred.add_argument("--isotopologue", required=True)
    p_pred.add_argument("--isotopologues", help="isotopologue CSV (default: bundled)")
    p_pred.add_argument("--dv-from", type=int, required=True)
    p_pred.add_argument("--dv-to", type=int, required=True)
    p_pred.add_argument("--out")
    p_pred.set_defaults(func=cmd_predict)

    p_lev = sub.add_parser("levels", help="wall-calibrated bound states")
    p_lev.add_argument("--fit", required=True, help="fit result JSON")
    p_lev.add_argument("--isotopologue", required=True)
    p_lev.add_argument("--isotopologues", help="isotopologue CSV (default: bundled)")
    p_lev.add_argument("--anchor-dv", type=int, required=True)
    p_lev.add_argument(
        "--anchor-energy",
        type=float,
        help="anchor detuning cm^-1 (default: the fit prediction at anchor-dv)",
    )
    p_lev.add_argument("--dv-to", type=int, default=-1)
    p_lev.add_argument("--n-points", type=int, default=40000)
    p_lev.add_argument("--out")
    p_lev.set_defaults(func=cmd_levels)

    p_spec = sub.add_parser("spectrum", help="synthesize a rotational line spectrum")
    p_spec.add_argument("--delta-pa", type=float, required=True, help="line detuning cm^-1")
    p_spec.add_argument("--b-rot", type=float, required=True, help="B_rot in 1e-3 cm^-1")
    p_spec.add_argument("--delta-r", type=float, required=True, help="Delta_R in 1e-3 cm^-1")
    p_spec.add_argument("--f-prime", type=int, default=2, choices=(1, 2))
    p_spec.add_argument("--r-prime-max", type=int, default=2)
    p_spec.add_argument("--depth", type=float, default=0.2, help="R'=0 dip depth")
    p_spec.add_argument(
        "--band-amplitudes", type=float, nargs="+",
        default=list(rotation.DEFAULT_BAND_AMPLITUDES),
    )
    p_spec.add_argument("--hyperfine-sign", type=int, default=-1, choices=(-1, 1))
    p_spec.add_argument("--grid-start", type=float)
    p_spec.add_argument("--grid-stop", type=float)
    p_spec.add_argument("--grid-step", type=float, default=2e-5)
    p_spec.add_argument("--fwhm", type=float, default=spectra.DEFAULT_LINE_FWHM_CM1)
    p_spec.add_argument("--line-shape", default="gaussian", choices=("gaussian", "lorentzian"))
    p_spec.add_argument("--noise-rms", type=float, default=0.0)
    p_spec.add_argument("--seed", type=int, default=None)
    p_spec.add_argument("--format", default="csv", choices=("csv", "svg"))
    p_spec.add_argument("--out")
    p_spec.set_defaults(func=cmd_spectrum)

    p_bar = sub.add_parser("barrier", help="centrifugal barrier of a pure-C6 potential")
    p_bar.add_argument("--c6", type=float, required=True, help="C6 in a.u.")
    p_bar.add_argument("--mu", type=float, required=True, help="reduced mass in amu")
    p_bar.add_argument("--l", type=int, required=True, help="partial wave")
    p_bar.add_argument("--out")
    p_bar.set_defaults(func=cmd_barrier)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        UsageError,
        ValueError,
        OSError,
        dataio.LineListError,
        fitter.IdentifiabilityError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (nde.QuadratureError, boundstates.ResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
