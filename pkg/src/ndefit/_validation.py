"""Small input-validation helpers shared across modules."""

from __future__ import annotations

import math

import numpy as np


def check_positive(name: str, value: float) -> float:
    if not (value > 0):
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def check_finite(name: str, value: float) -> float:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


def check_negative_energy(name: str, value: float) -> float:
    if not (value < 0):
        raise ValueError(f"{name} must be a bound-state energy (< 0), got {value!r}")
    return value


def as_float_array(name: str, values, ndim: int | None = None) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr
