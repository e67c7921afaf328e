"""Percentile-rank statistics over a reference population.

Citation distributions are highly skewed, so averages misrepresent them.
This module ranks each paper inside its reference set instead: a paper with
``L`` members strictly below its citation count and ``T`` members tied with
it (itself included) receives the mid-rank quantile

    q = 100 * (L + 0.5 * T) / N

which lies strictly inside (0, 100) and makes the set mean exactly 50
regardless of ties. Quantiles aggregate into the integrated impact score
(the sum of quantile values, I3), into class-weighted scores under a
pluggable evaluation scheme (the six-rank PR6 by default), and into top-k%
excellence proportions.

:class:`PercentileRanker` packages the ranking as a scikit-learn style
estimator: ``fit`` freezes the reference population, ``transform`` scores
counts against it, so the ranking composes with sklearn pipelines and
``get_params``-driven tooling.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Collection, Iterable, Mapping

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .records import ReferenceSet
from .validation import check_count_vector

__all__ = [
    "PR6Class",
    "EvaluationScheme",
    "SIX_CLASS_SCHEME",
    "PercentileRanker",
    "PercentileAssignment",
    "PercentileDistribution",
    "quantile_ranks",
    "classify",
    "i3",
    "i3_share",
    "top_k_proportion",
]


class PR6Class(IntEnum):
    """The six default percentile rank classes, weakest first."""

    BOTTOM_50 = 1
    TOP_50 = 2
    TOP_25 = 3
    TOP_10 = 4
    TOP_5 = 5
    TOP_1 = 6


@dataclass(frozen=True)
class EvaluationScheme:
    """Class boundaries and normative weights for aggregating quantiles.

    ``boundaries`` are lower quantile bounds, strictly increasing, starting
    at 0 and all below 100; class ``i`` (1-based) covers quantiles from
    ``boundaries[i-1]`` inclusive up to the next boundary. Boundary
    inclusivity means a tie group straddles no class: top-10% reads as
    "quantile >= 90".
    """

    boundaries: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "boundaries", tuple(float(b) for b in self.boundaries))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.boundaries) != len(self.weights):
            raise ValueError("boundaries and weights must align")
        if not self.boundaries:
            raise ValueError("scheme needs at least one class")
        if self.boundaries[0] != 0:
            raise ValueError("first class boundary must be 0")
        if any(b >= c for b, c in zip(self.boundaries, self.boundaries[1:])):
            raise ValueError("boundaries must be strictly increasing")
        if self.boundaries[-1] >= 100:
            raise ValueError("boundaries must stay below 100")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")

    @property
    def n_classes(self) -> int:
        return len(self.boundaries)

    def classify(self, quantile: float) -> int:
        """1-based index of the highest class whose lower bound <= quantile."""
        return bisect_right(self.boundaries, quantile)

    def weight_of(self, rank_class: int) -> float:
        return self.weights[rank_class - 1]

    @classmethod
    def from_text(cls, text: str) -> "EvaluationScheme":
        """Parse ``lower_bound,weight`` lines ('#' comments allowed)."""
        boundaries: list[float] = []
        weights: list[float] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split(",")
            if len(parts) != 2:
                raise ValueError(f"scheme line {lineno}: expected 'lower_bound,weight'")
            boundaries.append(float(parts[0]))
            weights.append(float(parts[1]))
        return cls(boundaries=tuple(boundaries), weights=tuple(weights))

    @classmethod
    def from_file(cls, path: str | Path) -> "EvaluationScheme":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


#: Six-class scheme used by the US Science and Engineering Indicators:
#: bottom-50%, top-50%, top-25%, top-10%, top-5%, top-1%, linearly weighted.
SIX_CLASS_SCHEME = EvaluationScheme(
    boundaries=(0, 50, 75, 90, 95, 99),
    weights=(1, 2, 3, 4, 5, 6),
)


# ---------------------------------------------------------------------------
# Estimator
# ---------------------------------------------------------------------------


class PercentileRanker(BaseEstimator, TransformerMixin):
    """Score citation counts as mid-rank quantiles of a fitted population.

    Parameters
    ----------
    scheme:
        Evaluation scheme used by :meth:`predict` to map quantiles to rank
        classes. Defaults to the six-class scheme.

    Fitting stores the sorted reference counts; ``transform`` returns the
    quantile in (0, 100) of each input count relative to that population,
    and ``predict`` returns the 1-based rank class. Transforming the fitted
    counts themselves reproduces the within-set ranking, where each paper's
    tie group includes itself.
    """

    def __init__(self, scheme: EvaluationScheme | None = None):
        self.scheme = scheme

    def fit(self, X, y=None) -> "PercentileRanker":
        counts = check_count_vector(X, "reference counts")
        self.reference_counts_ = np.sort(counts)
        self.n_reference_ = int(counts.size)
        self.scheme_ = self.scheme if self.scheme is not None else SIX_CLASS_SCHEME
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "reference_counts_"):
            raise RuntimeError("PercentileRanker is not fitted; call fit first")

    def transform(self, X) -> np.ndarray:
        """Mid-rank quantiles of *X* within the fitted population."""
        self._check_fitted()
        counts = check_count_vector(X, "X")
        below = np.searchsorted(self.reference_counts_, counts, side="left")
        below_or_tied = np.searchsorted(self.reference_counts_, counts, side="right")
        # q = 100*(L + T/2)/N computed as (L + R)*50/N: one rounding per value
        return (below + below_or_tied) * 50.0 / self.n_reference_

    def predict(self, X) -> np.ndarray:
        """1-based rank class of each count under the active scheme."""
        quantiles = self.transform(X)
        boundaries = np.asarray(self.scheme_.boundaries)
        return np.searchsorted(boundaries, quantiles, side="right").astype(int)


# ---------------------------------------------------------------------------
# Distributions over reference sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PercentileAssignment:
    """One paper's quantile and rank class within its reference set."""

    paper_id: str
    citations: float
    quantile: float
    pr6_class: int


@dataclass(frozen=True)
class PercentileDistribution:
    """All percentile assignments for one reference set."""

    assignments: tuple[PercentileAssignment, ...]
    class_counts: Mapping[int, int]
    scheme: EvaluationScheme
    _by_id: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "class_counts", dict(self.class_counts))
        object.__setattr__(self, "_by_id", {a.paper_id: a for a in self.assignments})

    @property
    def size(self) -> int:
        return len(self.assignments)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self._by_id

    def assignment(self, paper_id: str) -> PercentileAssignment:
        try:
            return self._by_id[paper_id]
        except KeyError:
            raise ValueError(f"paper {paper_id} not in reference set") from None

    def subset(self, paper_ids: Iterable[str]) -> list[PercentileAssignment]:
        """Assignments for *paper_ids*, erroring on non-members."""
        return [self.assignment(pid) for pid in sorted(set(paper_ids))]


def quantile_ranks(
    reference_set: ReferenceSet,
    counts: Mapping[str, float],
    scheme: EvaluationScheme | None = None,
) -> PercentileDistribution:
    """Rank every reference-set member by its citation count.

    *counts* maps member id to the citation count used for ranking (whole or
    fractional, the ranking is agnostic). Every member must have a count.
    """
    members = reference_set.sorted_members()
    missing = [pid for pid in members if pid not in counts]
    if missing:
        raise ValueError(f"no citation count for paper {missing[0]}")
    ranker = PercentileRanker(scheme=scheme)
    values = [float(counts[pid]) for pid in members]
    quantiles = ranker.fit(values).transform(values)
    classes = ranker.predict(values)
    assignments = tuple(
        PercentileAssignment(
            paper_id=pid,
            citations=value,
            quantile=float(q),
            pr6_class=int(c),
        )
        for pid, value, q, c in zip(members, values, quantiles, classes)
    )
    class_counts = {cls: 0 for cls in range(1, ranker.scheme_.n_classes + 1)}
    for a in assignments:
        class_counts[a.pr6_class] += 1
    return PercentileDistribution(
        assignments=assignments,
        class_counts=class_counts,
        scheme=ranker.scheme_,
    )


def classify(quantile: float, scheme: EvaluationScheme | None = None) -> int:
    """Rank class (1-based) of a quantile under *scheme*."""
    if not 0 < quantile < 100:
        raise ValueError(f"quantile must lie in (0, 100), got {quantile}")
    return (scheme or SIX_CLASS_SCHEME).classify(quantile)


# ---------------------------------------------------------------------------
# Aggregations
# ---------------------------------------------------------------------------

_AGGREGATIONS = ("quantiles", "pr6")


def _check_aggregation(scheme: str) -> str:
    if scheme not in _AGGREGATIONS:
        raise ValueError(f"aggregation scheme must be one of {_AGGREGATIONS}, got {scheme!r}")
    return scheme


def i3(
    distribution: PercentileDistribution,
    scheme: str = "quantiles",
    subset: Iterable[str] | None = None,
) -> float:
    """Integrated impact: sum of quantile values, or of class weights.

    With ``scheme="quantiles"`` every paper contributes its quantile value
    (integrating the citation curve instead of averaging it); with
    ``scheme="pr6"`` papers contribute their rank-class weight. Restricting
    to *subset* sums only those members' contributions.
    """
    _check_aggregation(scheme)
    assignments = (
        distribution.assignments if subset is None else distribution.subset(subset)
    )
    if scheme == "quantiles":
        return math.fsum(a.quantile for a in assignments)
    return math.fsum(distribution.scheme.weight_of(a.pr6_class) for a in assignments)


def i3_share(
    subset: Iterable[str],
    distribution: PercentileDistribution,
    scheme: str = "quantiles",
) -> float:
    """Percentage of the reference set's integrated impact held by *subset*.

    Shares over a partition of the reference set sum to 100.
    """
    _check_aggregation(scheme)
    total = i3(distribution, scheme)
    part = i3(distribution, scheme, subset=subset)
    return 100.0 * part / total


def top_k_proportion(
    subset: Collection[str],
    distribution: PercentileDistribution,
    k: float,
) -> float:
    """Fraction of *subset* papers ranked in the reference set's top k%.

    A paper is in the top k% when its quantile is at least ``100 - k``. Note
    the tie hazard: if every count in the set is tied, all quantiles are 50
    and no paper reaches any top class.
    """
    if not 0 < k < 100:
        raise ValueError(f"k must lie in (0, 100), got {k}")
    assignments = distribution.subset(subset)
    if not assignments:
        raise ValueError("empty unit of assessment")
    threshold = 100.0 - k
    in_top = sum(1 for a in assignments if a.quantile >= threshold)
    return in_top / len(assignments)
