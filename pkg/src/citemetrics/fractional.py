"""Source-normalized citation counting.

Citation potentials differ across fields because citing authors in some
fields write much longer reference lists than in others. Weighting every
citation as one over the total number of references of the *citing* paper
corrects for this on the citing side, which makes citation tallies comparable
across fields without any a-priori journal classification.

The weight denominator is always the citing paper's full declared reference
count, not just the references that resolve inside the corpus: out-of-database
("non-source") references still dilute each citation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Iterable, Mapping

from .indicators import impact_factor, window_counts
from .records import CitationGraph, DocType, PaperRecord, index_papers
from .validation import check_year_window


@dataclass(frozen=True)
class FractionalTally:
    """Accumulated fractional citations per cited paper.

    ``distributed_total`` is the sum over citing papers of
    (resolved in-window references) / NRef; it equals the number of citing
    papers exactly when every reference resolves inside the window, because a
    fully resolved citer distributes exactly 1. ``skipped_zero_ref_citers``
    counts in-window papers whose declared NRef is zero; the weight is
    undefined for them and they contribute nothing.
    """

    per_cited: Mapping[str, float]
    distributed_total: float
    skipped_zero_ref_citers: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_cited", dict(self.per_cited))


def fractional_weight(citing: PaperRecord) -> float:
    """Weight of one citation from *citing*: 1/NRef."""
    if citing.n_refs == 0:
        raise ValueError(f"citing paper {citing.paper_id} with zero references")
    return 1.0 / citing.n_refs


def fractional_tally(
    graph: CitationGraph,
    papers: Iterable[PaperRecord],
    cite_window: tuple[int, int],
    target_pub_window: tuple[int, int],
) -> FractionalTally:
    """Distribute fractional citation weights over the cited population.

    Every edge whose citing paper was published in ``cite_window`` and whose
    cited paper was published in ``target_pub_window`` adds 1/NRef of the
    citing paper to the cited paper's tally. Accumulation order is fixed
    (edges ascend by citing id, then cited id), so tallies are
    bit-reproducible.
    """
    cite_start, cite_end = check_year_window(cite_window, "cite_window")
    pub_start, pub_end = check_year_window(target_pub_window, "target_pub_window")
    by_id = index_papers(papers)

    per_cited: dict[str, float] = {}
    resolved_per_citer: dict[str, int] = {}
    for citing_id, cited_id in graph.edges:
        citing = by_id[citing_id]
        if not cite_start <= citing.pub_year <= cite_end:
            continue
        if not pub_start <= by_id[cited_id].pub_year <= pub_end:
            continue
        weight = fractional_weight(citing)
        per_cited[cited_id] = per_cited.get(cited_id, 0.0) + weight
        resolved_per_citer[citing_id] = resolved_per_citer.get(citing_id, 0) + 1

    # One division per citer keeps the conservation identity exact: a fully
    # resolved citer contributes n_refs/n_refs == 1.0 with no rounding.
    distributed_total = 0.0
    for citing_id in sorted(resolved_per_citer):
        distributed_total += resolved_per_citer[citing_id] / by_id[citing_id].n_refs

    skipped = sum(
        1
        for p in by_id.values()
        if p.n_refs == 0 and cite_start <= p.pub_year <= cite_end
    )
    return FractionalTally(
        per_cited=per_cited,
        distributed_total=distributed_total,
        skipped_zero_ref_citers=skipped,
    )


def quasi_if_fractional(
    journal_id: str,
    year: int,
    graph: CitationGraph,
    papers: Iterable[PaperRecord],
    citable_types: Collection[DocType] | None = None,
) -> float:
    """Fractionally counted quasi impact factor for one journal.

    The classic two-year formula applied to fractional window counts: each
    citation from a year-``year`` paper to the journal's items of the two
    previous years is weighted 1/NRef of the citing paper.
    """
    counts = window_counts(
        journal_id, year, graph, papers, citable_types, counting="fractional"
    )
    return impact_factor(counts)
