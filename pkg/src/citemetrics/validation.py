"""Input validation helpers shared across the package."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def check_count_vector(values, name: str = "X") -> np.ndarray:
    """Coerce *values* to a 1-d float array of finite, non-negative counts.

    Accepts a flat sequence or a single-column 2-d array (the sklearn
    convention), returns a fresh 1-d ``float64`` array.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-d or a single column, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(arr < 0):
        raise ValueError(f"{name} contains negative counts")
    return arr.copy()


def check_year_window(window, name: str = "window") -> tuple[int, int]:
    """Validate an inclusive (start, end) year range."""
    try:
        start, end = window
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a (start_year, end_year) pair") from None
    start, end = int(start), int(end)
    if start > end:
        raise ValueError(f"{name} start {start} after end {end}")
    return start, end


def check_counting_mode(counting: str) -> str:
    """Validate a citation counting mode."""
    if counting not in ("whole", "fractional"):
        raise ValueError(f"counting must be 'whole' or 'fractional', got {counting!r}")
    return counting


def check_equal_lengths(x: Sequence, y: Sequence, minimum: int = 1) -> int:
    """Check paired samples have equal length >= *minimum*; return it."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < minimum:
        raise ValueError(f"need at least {minimum} paired values, got {len(x)}")
    return len(x)
