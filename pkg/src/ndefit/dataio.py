"""Photoassociation line-list parsing, validation and serialization.

Line lists are UTF-8 CSV with one header row:

    isotopologue,delta_pa_cm1,dv,f_prime,rel_depth,b_rot_mcm1,delta_r1_mcm1,observed

Rotational columns are in 10^-3 cm^-1. Empty cells mean "not measured" or
"not assigned" and are never written as 0; a leading "<" on delta_r1_mcm1
marks an unresolved upper bound, which is kept as a flag so such entries
can be excluded from fits. The bundled dataset covers the two measured
isotopologue series (data/table1_lines.csv, data/isotopologues.csv).
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from importlib import resources

from .units import reduced_mass

LINE_COLUMNS = [
    "isotopologue",
    "delta_pa_cm1",
    "dv",
    "f_prime",
    "rel_depth",
    "b_rot_mcm1",
    "delta_r1_mcm1",
    "observed",
]

ISOTOPOLOGUE_COLUMNS = ["id", "mass_a_amu", "mass_b_amu"]

# lines closer to the atomic resonance than this could not be observed
OBSERVABLE_DETUNING_CM1 = -0.38


class LineListError(ValueError):
    """Malformed or invariant-violating line-list content."""


@dataclass(frozen=True)
class IsotopologueSpec:
    """Atomic masses (amu) of one isotopologue and its reduced mass."""

    id: str
    mass_a: float
    mass_b: float

    @property
    def reduced_mass_amu(self) -> float:
        return reduced_mass(self.mass_a, self.mass_b)


@dataclass(frozen=True)
class LineRecord:
    """One observed (or predicted-but-unobserved) photoassociation line.

    delta_pa is the detuning of the R'=0 component of the F'=2 progression
    in cm^-1; dv is the vibrational index relative to the last bound level
    (None when unassigned); b_rot and delta_r1 are in 10^-3 cm^-1 and may
    be absent; delta_r1_is_upper_bound marks "not resolved" entries.
    """

    isotopologue: str
    delta_pa: float | None
    dv: int | None
    f_prime: int
    rel_depth: float | None = None
    b_rot: float | None = None
    delta_r1: float | None = None
    delta_r1_is_upper_bound: bool = False
    observed: bool = True

    def __post_init__(self):
        if self.f_prime not in (1, 2):
            raise LineListError(f"f_prime must be 1 or 2, got {self.f_prime}")
        if self.observed and self.delta_pa is None:
            raise LineListError("observed lines must carry delta_pa")
        if self.delta_pa is not None and not (self.delta_pa < 0):
            raise LineListError(f"delta_pa must be negative, got {self.delta_pa}")
        if self.dv is not None and self.dv > -1:
            raise LineListError(f"dv must be <= -1, got {self.dv}")
        if self.rel_depth is not None and not (0.0 <= self.rel_depth <= 1.0):
            raise LineListError(f"rel_depth must lie in [0, 1], got {self.rel_depth}")
        if self.b_rot is not None and not (self.b_rot > 0):
            raise LineListError(f"b_rot must be positive, got {self.b_rot}")


def _parse_optional_float(cell: str, field: str, lineno: int) -> float | None:
    cell = cell.strip()
    if cell == "":
        return None
    try:
        return float(cell)
    except ValueError:
        raise LineListError(f"line {lineno}: bad {field} value {cell!r}") from None


def _parse_bool(cell: str, field: str, lineno: int) -> bool:
    cell = cell.strip().lower()
    if cell in ("true", "1", "yes"):
        return True
    if cell in ("false", "0", "no"):
        return False
    raise LineListError(f"line {lineno}: bad {field} value {cell!r}")


def parse_isotopologues(text: str) -> list[IsotopologueSpec]:
    """Parse the isotopologue table CSV (id,mass_a_amu,mass_b_amu)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise LineListError("empty isotopologue table") from None
    if [h.strip() for h in header] != ISOTOPOLOGUE_COLUMNS:
        raise LineListError(f"bad isotopologue header: {header}")
    specs = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(c.strip() == "" for c in row):
            continue
        if len(row) != 3:
            raise LineListError(f"line {lineno}: expected 3 fields, got {len(row)}")
        mass_a = _parse_optional_float(row[1], "mass_a_amu", lineno)
        mass_b = _parse_optional_float(row[2], "mass_b_amu", lineno)
        if mass_a is None or mass_b is None or mass_a <= 0 or mass_b <= 0:
            raise LineListError(f"line {lineno}: masses must be positive")
        specs.append(IsotopologueSpec(id=row[0].strip(), mass_a=mass_a, mass_b=mass_b))
    return specs


def _check_series_ordering(records: list[LineRecord]) -> None:
    # within one (isotopologue, F') series, assigned dv must strictly
    # decrease as delta_pa decreases
    series: dict[tuple[str, int], list[LineRecord]] = {}
    for rec in records:
        if rec.delta_pa is not None and rec.dv is not None:
            series.setdefault((rec.isotopologue, rec.f_prime), []).append(rec)
    for key, recs in series.items():
        recs = sorted(recs, key=lambda r: -r.delta_pa)
        for a, b in zip(recs, recs[1:]):
            if not (b.dv < a.dv):
                raise LineListError(
                    f"series {key}: dv must strictly decrease with delta_pa "
                    f"(dv={a.dv} at {a.delta_pa} vs dv={b.dv} at {b.delta_pa})"
                )


def parse_line_list(
    text: str, isotopologues: list[IsotopologueSpec] | None = None
) -> tuple[list[LineRecord], list[IsotopologueSpec]]:
    """Parse and validate a line-list CSV.

    Records are checked against the type invariants; empty cells stay
    None. Returns the records together with the IsotopologueSpec entries
    they reference, resolved against `isotopologues` (default: the bundled
    table). Unknown isotopologue ids raise LineListError; detunings above
    the observability threshold only warn.
    """
    known = {s.id: s for s in (isotopologues if isotopologues is not None
                               else load_bundled_isotopologues())}
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise LineListError("empty line list") from None
    if [h.strip() for h in header] != LINE_COLUMNS:
        raise LineListError(f"bad line-list header: {header}")

    records: list[LineRecord] = []
    used: list[str] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(c.strip() == "" for c in row):
            continue
        if len(row) != len(LINE_COLUMNS):
            raise LineListError(
                f"line {lineno}: expected {len(LINE_COLUMNS)} fields, got {len(row)}"
            )
        iso = row[0].strip()
        if iso not in known:
            raise LineListError(f"line {lineno}: unknown isotopologue {iso!r}")
        if iso not in used:
            used.append(iso)
        delta_r1_cell = row[6].strip()
        is_bound = delta_r1_cell.startswith("<")
        delta_r1 = _parse_optional_float(
            delta_r1_cell[1:] if is_bound else delta_r1_cell, "delta_r1_mcm1", lineno
        )
        dv_cell = row[2].strip()
        try:
            dv = int(dv_cell) if dv_cell else None
        except ValueError:
            raise LineListError(f"line {lineno}: bad dv value {dv_cell!r}") from None
        f_cell = row[3].strip()
        try:
            f_prime = int(f_cell)
        except ValueError:
            raise LineListError(f"line {lineno}: bad f_prime value {f_cell!r}") from None
        try:
            rec = LineRecord(
                isotopologue=iso,
                delta_pa=_parse_optional_float(row[1], "delta_pa_cm1", lineno),
                dv=dv,
                f_prime=f_prime,
                rel_depth=_parse_optional_float(row[4], "rel_depth", lineno),
                b_rot=_parse_optional_float(row[5], "b_rot_mcm1", lineno),
                delta_r1=delta_r1,
                delta_r1_is_upper_bound=is_bound,
                observed=_parse_bool(row[7], "observed", lineno),
            )
        except LineListError as exc:
            raise LineListError(f"line {lineno}: {exc}") from None
        if rec.observed and rec.delta_pa is not None and rec.delta_pa >= OBSERVABLE_DETUNING_CM1:
            warnings.warn(
                f"line {lineno}: observed line at delta_pa={rec.delta_pa} cm^-1 is "
                f"above the observability threshold {OBSERVABLE_DETUNING_CM1} cm^-1",
                stacklevel=2,
            )
        records.append(rec)
    _check_series_ordering(records)
    return records, [known[i] for i in used]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_line_list(records: list[LineRecord]) -> str:
    """Serialize records to CSV; parse_line_list inverts this exactly."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(LINE_COLUMNS)
    for rec in records:
        delta_r1 = _fmt(rec.delta_r1)
        if rec.delta_r1_is_upper_bound and delta_r1:
            delta_r1 = "<" + delta_r1
        writer.writerow(
            [
                rec.isotopologue,
                _fmt(rec.delta_pa),
                _fmt(rec.dv),
                rec.f_prime,
                _fmt(rec.rel_depth),
                _fmt(rec.b_rot),
                delta_r1,
                "true" if rec.observed else "false",
            ]
        )
    return out.getvalue()


def write_isotopologues(specs: list[IsotopologueSpec]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(ISOTOPOLOGUE_COLUMNS)
    for s in specs:
        writer.writerow([s.id, _fmt(s.mass_a), _fmt(s.mass_b)])
    return out.getvalue()


def _bundled(name: str) -> str:
    return resources.files("ndefit.data").joinpath(name).read_text(encoding="utf-8")


def load_bundled_isotopologues() -> list[IsotopologueSpec]:
    """The two measured isotopologues with standard isotope masses."""
    return parse_isotopologues(_bundled("isotopologues.csv"))


def load_bundled_table1() -> list[LineRecord]:
    """The bundled dataset of measured lines for both isotopologues.

    20 records: 14 for 176Yb87Rb (including the unobserved dv=-12
    placeholder) and 6 for 174Yb87Rb, all F'=2.
    """
    records, _ = parse_line_list(_bundled("table1_lines.csv"))
    return records
