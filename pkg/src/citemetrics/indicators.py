"""Central-tendency citation indicators for journals and document sets.

The two-year impact factor aggregates citations received in year ``t`` to
items published in ``t-1`` and ``t-2`` and divides by the number of citable
items in those years. The moving-average variant normalizes each year
separately before averaging; the two agree exactly when both years have the
same number of citable items, and can diverge wildly otherwise because the
underlying citation distributions are skewed.

All functions are pure and accumulate in a fixed order (ascending paper id),
so results are bit-identical across runs and across parallel schedules.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from statistics import fmean, stdev
from typing import Collection, Iterable, Mapping, Sequence

from .records import CitationGraph, DocType, PaperRecord, index_papers
from .validation import check_counting_mode, check_year_window


@dataclass(frozen=True)
class CitationWindowCounts:
    """Citations and citable-item counts for a two-year window.

    ``c1``/``p1`` refer to items published one year before the census year,
    ``c2``/``p2`` to items published two years before. Citation totals are
    real-valued so fractional counting composes with the same formulas.
    """

    c1: float
    c2: float
    p1: int
    p2: int

    def __post_init__(self) -> None:
        if min(self.c1, self.c2, self.p1, self.p2) < 0:
            raise ValueError("window counts must be non-negative")
        if self.p1 == 0 and self.c1 != 0:
            raise ValueError("citations to a year with no citable items (c1 > 0, p1 = 0)")
        if self.p2 == 0 and self.c2 != 0:
            raise ValueError("citations to a year with no citable items (c2 > 0, p2 = 0)")


@dataclass(frozen=True)
class RelativeRates:
    """Per-paper observed citation counts paired with expected rates.

    The means are derived, never supplied: ``mocr`` is the mean of the
    observed counts, ``mecr`` the mean of the expected rates.
    """

    observed: tuple[float, ...]
    expected: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "observed", tuple(float(v) for v in self.observed))
        object.__setattr__(self, "expected", tuple(float(v) for v in self.expected))
        if len(self.observed) != len(self.expected):
            raise ValueError(
                f"observed/expected length mismatch: "
                f"{len(self.observed)} vs {len(self.expected)}"
            )
        if not self.observed:
            raise ValueError("empty rate lists")

    @property
    def mocr(self) -> float:
        return fmean(self.observed)

    @property
    def mecr(self) -> float:
        return fmean(self.expected)


# ---------------------------------------------------------------------------
# Window counting
# ---------------------------------------------------------------------------


def _citation_weight(citing: PaperRecord, counting: str) -> float:
    if counting == "whole":
        return 1.0
    # n_refs >= len(refs) >= 1 whenever the paper cites anything at all
    return 1.0 / citing.n_refs


def window_counts_for_items(
    item_ids: Collection[str],
    year: int,
    graph: CitationGraph,
    papers: Iterable[PaperRecord],
    citable_types: Collection[DocType] | None = None,
    counting: str = "whole",
) -> CitationWindowCounts:
    """Two-year window counts for an explicit set of candidate items.

    Items published in ``year-1``/``year-2`` whose doc_type passes the filter
    are counted as citable; citations are weighted 1 (whole) or 1/NRef of the
    citing paper (fractional) and must originate from papers published in
    ``year``.
    """
    check_counting_mode(counting)
    by_id = index_papers(papers)
    allowed = set(citable_types) if citable_types is not None else None
    year_1: set[str] = set()
    year_2: set[str] = set()
    for pid in item_ids:
        paper = by_id.get(pid)
        if paper is None:
            raise ValueError(f"unknown paper_id {pid}")
        if allowed is not None and paper.doc_type not in allowed:
            continue
        if paper.pub_year == year - 1:
            year_1.add(pid)
        elif paper.pub_year == year - 2:
            year_2.add(pid)
    c1 = 0.0
    c2 = 0.0
    for citing_id, cited_id in graph.edges:  # edges are pre-sorted ascending
        if by_id[citing_id].pub_year != year:
            continue
        if cited_id in year_1:
            c1 += _citation_weight(by_id[citing_id], counting)
        elif cited_id in year_2:
            c2 += _citation_weight(by_id[citing_id], counting)
    return CitationWindowCounts(c1=c1, c2=c2, p1=len(year_1), p2=len(year_2))


def window_counts(
    journal_id: str,
    year: int,
    graph: CitationGraph,
    papers: Iterable[PaperRecord],
    citable_types: Collection[DocType] | None = None,
    counting: str = "whole",
) -> CitationWindowCounts:
    """Two-year impact-factor window counts for one journal."""
    papers = list(papers)
    journal_items = [p.paper_id for p in papers if p.journal_id == journal_id]
    if not journal_items:
        raise ValueError(f"unknown journal_id {journal_id}")
    return window_counts_for_items(
        journal_items, year, graph, papers, citable_types, counting
    )


# ---------------------------------------------------------------------------
# Impact factor variants
# ---------------------------------------------------------------------------
# Both variants round exactly once (exact rational arithmetic, then one float
# conversion) so that the algebraic identity IF == moving-average-IF at
# p1 == p2 holds bit-for-bit, which plain float evaluation does not guarantee.


def impact_factor(w: CitationWindowCounts) -> float:
    """Classic two-year impact factor: (c1 + c2) / (p1 + p2)."""
    if w.p1 + w.p2 == 0:
        raise ValueError("no citable items")
    return float((Fraction(w.c1) + Fraction(w.c2)) / (w.p1 + w.p2))


def moving_average_if(w: CitationWindowCounts) -> float:
    """Two-year moving average: (c1/p1 + c2/p2) / 2.

    Refuses years with zero citable items rather than skipping them; callers
    that prefer the classic formula in that case must fall back explicitly
    (the CLI exposes ``--fallback-if`` for this).
    """
    if w.p1 == 0 or w.p2 == 0:
        raise ValueError("year with zero citable items")
    return float((Fraction(w.c1) / w.p1 + Fraction(w.c2) / w.p2) / 2)


# ---------------------------------------------------------------------------
# Relative citation rates
# ---------------------------------------------------------------------------


def rcr(rates: RelativeRates) -> float:
    """Relative citation rate: the quotient of the two means, MOCR/MECR.

    A ratio of means carries no standard error, so reports must not attach a
    significance test to this value; the observed set is a subset of the
    reference set, making the two distributions dependent.
    """
    mecr = rates.mecr
    if mecr == 0:
        raise ValueError("MECR is zero")
    return rates.mocr / mecr


def mean_ocr_ecr(rates: RelativeRates) -> tuple[float, float]:
    """Mean of per-paper observed/expected ratios, with its sample sd.

    Dividing first and averaging second respects the order of operations and
    yields a normal average with a standard deviation, unlike ``rcr``. The sd
    is 0.0 for a single paper.
    """
    for i, e in enumerate(rates.expected):
        if e == 0:
            raise ValueError(f"expected rate is zero at index {i}")
    ratios = [o / e for o, e in zip(rates.observed, rates.expected)]
    mean = fmean(ratios)
    sd = stdev(ratios) if len(ratios) > 1 else 0.0
    return mean, sd


def expected_citation_rates(
    unit_ids: Sequence[str],
    member_counts: Mapping[str, float],
    papers: Iterable[PaperRecord],
    match_doc_type: bool = False,
) -> list[float]:
    """Expected rate per unit paper, derived from the reference population.

    The expectation for a paper is the mean citation count of reference-set
    members sharing its publication year (and document type when
    ``match_doc_type`` is set). This is the single place that fixes the
    expectation recipe; swap it here to change the baseline everywhere.
    """
    by_id = index_papers(papers)
    groups: dict[tuple, list[float]] = {}
    for pid, count in member_counts.items():
        paper = by_id[pid]
        key = (paper.pub_year, paper.doc_type) if match_doc_type else (paper.pub_year,)
        groups.setdefault(key, []).append(float(count))
    rates: list[float] = []
    for pid in unit_ids:
        if pid not in member_counts:
            raise ValueError(f"paper {pid} is not a reference-set member")
        paper = by_id[pid]
        key = (paper.pub_year, paper.doc_type) if match_doc_type else (paper.pub_year,)
        rates.append(fmean(groups[key]))
    return rates


# ---------------------------------------------------------------------------
# Totals
# ---------------------------------------------------------------------------


def total_citations(
    paper_ids: Collection[str],
    graph: CitationGraph,
    papers: Iterable[PaperRecord],
    cite_window: tuple[int, int],
    counting: str = "whole",
) -> float:
    """Sum of citation weights received by *paper_ids* within the window.

    Whole counting yields the in-window edge count into the set; fractional
    counting weights each citation by 1/NRef of the citing paper. An empty id
    set totals 0.
    """
    check_counting_mode(counting)
    start, end = check_year_window(cite_window, "cite_window")
    by_id = index_papers(papers)
    targets = set(paper_ids)
    for pid in targets:
        if pid not in by_id:
            raise ValueError(f"unknown paper_id {pid}")
    total = 0.0
    for citing_id, cited_id in graph.edges:
        if cited_id not in targets:
            continue
        citing = by_id[citing_id]
        if start <= citing.pub_year <= end:
            total += _citation_weight(citing, counting)
    return total


def citation_counts(
    reference_members: Collection[str],
    graph: CitationGraph,
    papers: Iterable[PaperRecord],
    cite_window: tuple[int, int],
    counting: str = "whole",
) -> dict[str, float]:
    """Per-paper citation totals for every reference-set member.

    One pass over the edges; members never cited get an explicit 0.0 so the
    result always covers the whole population.
    """
    check_counting_mode(counting)
    start, end = check_year_window(cite_window, "cite_window")
    by_id = index_papers(papers)
    members = set(reference_members)
    counts = {pid: 0.0 for pid in sorted(members)}
    for citing_id, cited_id in graph.edges:
        if cited_id not in members:
            continue
        citing = by_id[citing_id]
        if start <= citing.pub_year <= end:
            counts[cited_id] += _citation_weight(citing, counting)
    return counts
