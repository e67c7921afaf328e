"""Core domain records: papers, journals, citation links, and reference sets.

All records are immutable once constructed, so a parsed corpus can be shared
freely across threads and repeated computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable


class DocType(str, Enum):
    """Document type of a publication."""

    ARTICLE = "article"
    REVIEW = "review"
    LETTER = "letter"
    OTHER = "other"

    @classmethod
    def coerce(cls, value: str) -> "DocType":
        """Map a raw string to a known type, falling back to OTHER."""
        try:
            return cls(value.strip().lower())
        except ValueError:
            return cls.OTHER


@dataclass(frozen=True)
class PaperRecord:
    """One publication.

    ``n_refs`` is the paper's *total* number of cited references, including
    references that point outside the ingested corpus; ``refs`` lists only the
    reference strings present in the input file. Hence ``n_refs >= len(refs)``.
    """

    paper_id: str
    journal_id: str
    pub_year: int
    doc_type: DocType
    n_refs: int
    refs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "refs", tuple(self.refs))
        if not self.paper_id:
            raise ValueError("empty paper_id")
        if self.n_refs < 0:
            raise ValueError(f"negative n_refs for paper {self.paper_id}")
        if self.n_refs < len(self.refs):
            raise ValueError(
                f"paper {self.paper_id}: n_refs={self.n_refs} smaller than "
                f"{len(self.refs)} listed references"
            )


@dataclass(frozen=True)
class JournalRecord:
    """One journal, optionally attributed to several subject categories."""

    journal_id: str
    name: str
    categories: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "categories", frozenset(self.categories))
        if not self.journal_id:
            raise ValueError("empty journal_id")


@dataclass(frozen=True)
class CitationGraph:
    """Resolved citing -> cited links over an ingested corpus.

    ``edges`` holds each (citing_id, cited_id) pair once, sorted ascending.
    ``unresolved_count`` counts reference strings with no matching paper in
    the corpus; those references are data, not errors, and they still count
    toward the citing paper's ``n_refs``. ``duplicate_count`` counts resolved
    references that were collapsed because the pair already existed.
    """

    edges: tuple[tuple[str, str], ...]
    unresolved_count: int = 0
    duplicate_count: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        if self.unresolved_count < 0 or self.duplicate_count < 0:
            raise ValueError("negative diagnostic counter")


@dataclass(frozen=True)
class ReferenceSet:
    """The comparison population for percentile and expectation statistics.

    ``pub_window`` is the inclusive year range of member publications;
    ``cite_window`` the inclusive year range in which citations to them are
    counted.
    """

    member_ids: frozenset[str]
    pub_window: tuple[int, int]
    cite_window: tuple[int, int]
    label: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "member_ids", frozenset(self.member_ids))
        object.__setattr__(self, "pub_window", tuple(self.pub_window))
        object.__setattr__(self, "cite_window", tuple(self.cite_window))
        if not self.member_ids:
            raise ValueError("empty reference set")

    @property
    def size(self) -> int:
        return len(self.member_ids)

    def sorted_members(self) -> list[str]:
        """Member ids in ascending order (the fixed iteration order)."""
        return sorted(self.member_ids)


def index_papers(papers: Iterable[PaperRecord]) -> dict[str, PaperRecord]:
    """Index papers by id, rejecting duplicates."""
    by_id: dict[str, PaperRecord] = {}
    for paper in papers:
        if paper.paper_id in by_id:
            raise ValueError(f"duplicate paper_id {paper.paper_id}")
        by_id[paper.paper_id] = paper
    return by_id
