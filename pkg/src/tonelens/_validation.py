"""Small input-validation helpers shared across estimators and functions."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import ParameterError


def as_float_1d(values: Iterable[float], name: str = "values") -> np.ndarray:
    """Coerce to a contiguous 1-D float64 array, rejecting non-finite input."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ParameterError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite values")
    return np.ascontiguousarray(arr)


def check_positive(value: float, name: str) -> float:
    if not value > 0:
        raise ParameterError(f"{name} must be positive, got {value!r}")
    return float(value)


def check_fraction(value: float, name: str) -> float:
    """Validate a fraction in [0, 1)."""
    if not (0.0 <= value < 1.0):
        raise ParameterError(f"{name} must be in [0, 1), got {value!r}")
    return float(value)


def check_band(floor: float, ceil: float, sample_rate: float) -> None:
    """Validate a pitch search band against Nyquist."""
    if not (0 < floor < ceil < sample_rate / 2):
        raise ParameterError(
            f"need 0 < floor < ceil < rate/2, got floor={floor}, ceil={ceil}, "
            f"rate={sample_rate}"
        )
