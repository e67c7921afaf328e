"""Significance tests and correlation measures for indicator comparisons.

Everything reports two-sided p-values from the standard normal distribution;
one-sided views are derivable by the caller. The normal tail is evaluated
through the C library's ``erfc`` (an erf-family rational/continued-fraction
implementation correct to within a few ulps), so p-values are accurate to far
better than 1e-10 over the tested |z| <= 8 range without pulling in a
statistics dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .validation import check_equal_lengths

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TestResult:
    """A test statistic with its two-sided p-value and significance flags."""

    statistic: float
    p_value: float
    significant_01: bool
    significant_05: bool

    @classmethod
    def from_z(cls, z: float) -> "TestResult":
        p = normal_two_sided_p(z)
        return cls(
            statistic=z,
            p_value=p,
            significant_01=p < 0.01,
            significant_05=p < 0.05,
        )


def normal_two_sided_p(z: float) -> float:
    """Two-sided tail probability of the standard normal: P(|Z| >= |z|)."""
    return math.erfc(abs(z) / _SQRT2)


# ---------------------------------------------------------------------------
# Proportion tests
# ---------------------------------------------------------------------------


def two_proportion_z(x1: float, n1: int, x2: float, n2: int) -> TestResult:
    """Pooled z-test for two independent proportions x1/n1 vs x2/n2.

    z is positive when the first proportion is larger; swapping the samples
    negates z and leaves p unchanged.
    """
    for x, n, side in ((x1, n1, "first"), (x2, n2, "second")):
        if n < 1:
            raise ValueError(f"{side} sample has no trials")
        if not 0 <= x <= n:
            raise ValueError(f"{side} sample: successes {x} outside [0, {n}]")
    pooled = (x1 + x2) / (n1 + n2)
    if pooled == 0.0 or pooled == 1.0:
        raise ValueError("degenerate pooled proportion")
    z = (x1 / n1 - x2 / n2) / math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    return TestResult.from_z(z)


def expectation_test(
    unit_value: float, unit_n: int, total_value: float, total_n: int
) -> TestResult:
    """Test a unit's share of a value total against its share of papers.

    The unit's observed share (``unit_value`` out of ``total_value``) is
    compared with its expected share (``unit_n`` papers out of ``total_n``)
    in the two-proportion framework; positive z means above expectation.
    Value totals are real (integrated impact scores), so they are rounded to
    the nearest integer trial counts — callers should record that rounding
    when reporting. A unit equal to the whole set leaves no complement to
    compare and errors out (degenerate pooled proportion).
    """
    if not 0 <= unit_value <= total_value:
        raise ValueError(f"unit value {unit_value} outside [0, {total_value}]")
    if not 1 <= unit_n <= total_n:
        raise ValueError(f"unit size {unit_n} outside [1, {total_n}]")
    x = round(unit_value)
    n = round(total_value)
    if n < 1:
        raise ValueError("total value rounds to zero trials")
    return two_proportion_z(min(x, n), n, unit_n, total_n)


# ---------------------------------------------------------------------------
# Mean comparisons from summary statistics
# ---------------------------------------------------------------------------


def mean_diff_from_summary(
    mean1: float, sem1: float, mean2: float, sem2: float
) -> TestResult:
    """z-test for a difference of two means given only their SEMs.

    Means of citation counts can be taken as normally distributed, so
    z = (mean2 - mean1) / sqrt(sem1^2 + sem2^2) against the standard normal.
    """
    if sem1 < 0 or sem2 < 0:
        raise ValueError("negative standard error")
    if sem1 == 0 and sem2 == 0:
        raise ValueError("both standard errors are zero")
    z = (mean2 - mean1) / math.hypot(sem1, sem2)
    return TestResult.from_z(z)


def sem(values: Sequence[float]) -> float:
    """Standard error of the mean: sample standard deviation / sqrt(n)."""
    n = len(values)
    if n < 2:
        raise ValueError(f"SEM needs at least 2 values, got {n}")
    arr = np.asarray(values, dtype=float)
    return float(arr.std(ddof=1) / math.sqrt(n))


# ---------------------------------------------------------------------------
# Correlations
# ---------------------------------------------------------------------------


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation of two equally long samples (n >= 3)."""
    check_equal_lengths(x, y, minimum=3)
    ax = np.asarray(x, dtype=float)
    ay = np.asarray(y, dtype=float)
    dx = ax - ax.mean()
    dy = ay - ay.mean()
    ssx = float(dx @ dx)
    ssy = float(dy @ dy)
    if ssx == 0.0 or ssy == 0.0:
        raise ValueError("zero variance")
    return float((dx @ dy) / math.sqrt(ssx * ssy))


def midranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties averaged (mid-ranks)."""
    arr = np.asarray(values, dtype=float)
    ordered = np.sort(arr)
    below = np.searchsorted(ordered, arr, side="left")
    below_or_tied = np.searchsorted(ordered, arr, side="right")
    return (below + below_or_tied + 1) / 2.0


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank-order correlation: Pearson's r over mid-ranks.

    Invariant under strictly monotone transforms of either argument.
    """
    check_equal_lengths(x, y, minimum=3)
    return pearson_r(midranks(x), midranks(y))
