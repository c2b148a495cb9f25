"""Forward synthesis of trap-loss spectra and peak recovery.

Lines appear as dips in the normalized fluorescence signal: each
component subtracts a unit-peak profile scaled by its depth, and the
result is clamped to [0, 1] (fluorescence cannot go negative). The
default linewidth is the apparatus resolution of 1.6e-4 cm^-1, which is
close to the Doppler width at the ~450 uK effective temperature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rotation import NU_RES_CM1, LineComponent

DEFAULT_LINE_FWHM_CM1 = 1.6e-4


@dataclass(frozen=True)
class SpectrumConfig:
    """Grid and line-shape settings, all wavenumbers in the detuning convention."""

    grid_start: float
    grid_stop: float
    grid_step: float = 2e-5
    line_fwhm: float = DEFAULT_LINE_FWHM_CM1
    line_shape: str = "gaussian"
    noise_rms: float = 0.0

    def __post_init__(self):
        if not (self.grid_start < self.grid_stop):
            raise ValueError("grid_start must be below grid_stop")
        if not (self.grid_step > 0 and self.grid_step < self.line_fwhm / 4):
            raise ValueError("grid_step must be positive and < line_fwhm/4")
        if self.line_shape not in ("gaussian", "lorentzian"):
            raise ValueError(f"unknown line_shape {self.line_shape!r}")
        if self.noise_rms < 0:
            raise ValueError("noise_rms must be >= 0")

    def grid(self) -> np.ndarray:
        n = int(np.floor((self.grid_stop - self.grid_start) / self.grid_step)) + 1
        return self.grid_start + self.grid_step * np.arange(n)


@dataclass(frozen=True)
class Spectrum:
    """Sampled signal (relative fluorescence) over a detuning grid."""

    delta_pa: np.ndarray
    signal: np.ndarray

    def to_csv(self) -> str:
        lines = ["delta_pa_cm1,signal"]
        for d, s in zip(self.delta_pa, self.signal):
            lines.append(f"{float(d)!r},{float(s)!r}")
        return "\n".join(lines) + "\n"


def _profile(u: np.ndarray, shape: str) -> np.ndarray:
    # unit peak, FWHM = 1 in the scaled coordinate u
    if shape == "gaussian":
        return np.exp(-4.0 * np.log(2.0) * u * u)
    return 1.0 / (1.0 + 4.0 * u * u)


def synthesize(
    components: list[LineComponent],
    cfg: SpectrumConfig,
    depth_scale: float = 1.0,
    seed: int | None = None,
) -> Spectrum:
    """Superimpose dips for all components onto a flat unit signal.

    Component depth is rel_amplitude * depth_scale and must land in
    [0, 1]. Positions are the component wavenumbers converted to the
    detuning convention. Gaussian noise of rms cfg.noise_rms is added
    after clamping when requested (fixed seed gives a fixed spectrum).
    """
    grid = cfg.grid()
    dip = np.zeros_like(grid)
    for comp in components:
        depth = comp.rel_amplitude * depth_scale
        if not (0.0 <= depth <= 1.0):
            raise ValueError(f"component depth {depth} outside [0, 1]")
        center = comp.wavenumber - NU_RES_CM1
        dip += depth * _profile((grid - center) / cfg.line_fwhm, cfg.line_shape)
    signal = np.clip(1.0 - dip, 0.0, 1.0)
    if cfg.noise_rms > 0:
        rng = np.random.default_rng(seed)
        signal = signal + rng.normal(0.0, cfg.noise_rms, size=signal.shape)
    return Spectrum(delta_pa=grid, signal=signal)


def find_peaks(spectrum: Spectrum, min_depth: float) -> list[tuple[float, float]]:
    """Locate dips deeper than min_depth in a noise-free or smoothed spectrum.

    Strict local minima of the signal below 1 - min_depth are refined by
    a parabola through the minimum and its two neighbours. Returns
    (delta_pa, depth) pairs in grid order.
    """
    d = spectrum.delta_pa
    s = spectrum.signal
    peaks = []
    for i in range(1, len(s) - 1):
        if s[i] < s[i - 1] and s[i] <= s[i + 1] and s[i] < 1.0 - min_depth:
            denom = s[i - 1] - 2.0 * s[i] + s[i + 1]
            shift = 0.0
            if denom > 0:
                shift = 0.5 * (s[i - 1] - s[i + 1]) / denom
                shift = float(np.clip(shift, -0.5, 0.5))
            step = d[i + 1] - d[i]
            depth = 1.0 - (s[i] - 0.25 * (s[i - 1] - s[i + 1]) * shift)
            peaks.append((float(d[i] + shift * step), float(depth)))
    return peaks
