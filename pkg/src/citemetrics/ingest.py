"""Flat-file corpus ingestion: parsing, serialization, and citation resolution.

Papers and journals arrive as UTF-8 csv or jsonl files. Lines starting with
``#`` are comments; blank lines are ignored. The csv header rows are fixed:

    paper_id,journal_id,pub_year,doc_type,n_refs,refs      (refs ';'-separated)
    journal_id,name,categories                             (categories ';'-separated)

jsonl files carry one object per line with the same field names.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence, Union

from .records import (
    CitationGraph,
    DocType,
    JournalRecord,
    PaperRecord,
    ReferenceSet,
    index_papers,
)
from .validation import check_year_window

logger = logging.getLogger(__name__)

PAPER_FIELDS = ("paper_id", "journal_id", "pub_year", "doc_type", "n_refs", "refs")
JOURNAL_FIELDS = ("journal_id", "name", "categories")

Source = Union[str, bytes, IO]


class ParseError(ValueError):
    """A malformed input row; carries the 1-based source line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Line plumbing
# ---------------------------------------------------------------------------


def _iter_lines(source: Source) -> Iterator[tuple[int, str]]:
    """Yield (line_number, content) pairs, skipping comments and blanks.

    *source* may be str/bytes content or an open text/binary stream; strings
    are treated as file content, never as paths.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, line


def _split_csv_row(line: str, lineno: int) -> list[str]:
    try:
        rows = list(csv.reader([line]))
    except csv.Error as exc:
        raise ParseError(f"malformed csv row ({exc})", lineno) from exc
    return rows[0] if rows else []


def _parse_int(raw: str, what: str, lineno: int) -> int:
    try:
        return int(raw.strip())
    except ValueError:
        raise ParseError(f"{what} is not an integer: {raw!r}", lineno) from None


# ---------------------------------------------------------------------------
# Papers
# ---------------------------------------------------------------------------


def parse_papers(source: Source, fmt: str = "csv") -> list[PaperRecord]:
    """Parse paper records from csv or jsonl content, preserving row order.

    Raises :class:`ParseError` with the offending line number on malformed
    rows, duplicate paper ids, or negative ``n_refs``. Unknown document types
    are coerced to ``other`` with a logged warning.
    """
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown papers format {fmt!r}")
    papers: list[PaperRecord] = []
    seen: set[str] = set()
    unknown_types: dict[str, int] = {}
    lines = _iter_lines(source)

    if fmt == "csv":
        try:
            header_no, header = next(lines)
        except StopIteration:
            raise ParseError("missing header row") from None
        if tuple(f.strip() for f in _split_csv_row(header, header_no)) != PAPER_FIELDS:
            raise ParseError(
                f"bad papers header, expected {','.join(PAPER_FIELDS)}", header_no
            )

    for lineno, line in lines:
        if fmt == "csv":
            row = _split_csv_row(line, lineno)
            if len(row) != len(PAPER_FIELDS):
                raise ParseError(
                    f"expected {len(PAPER_FIELDS)} fields, got {len(row)}", lineno
                )
            values = dict(zip(PAPER_FIELDS, (cell.strip() for cell in row)))
            refs = [r for r in values["refs"].split(";") if r.strip()]
        else:
            try:
                values = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"malformed json ({exc.msg})", lineno) from exc
            missing = [f for f in PAPER_FIELDS if f not in values]
            if missing:
                raise ParseError(f"missing fields: {', '.join(missing)}", lineno)
            if not isinstance(values["refs"], list):
                raise ParseError("refs must be a list", lineno)
            refs = list(values["refs"])

        paper_id = str(values["paper_id"])
        if paper_id in seen:
            raise ParseError(f"duplicate paper_id {paper_id}", lineno)
        seen.add(paper_id)

        n_refs = _parse_int(str(values["n_refs"]), "n_refs", lineno)
        if n_refs < 0:
            raise ParseError("negative n_refs", lineno)
        pub_year = _parse_int(str(values["pub_year"]), "pub_year", lineno)

        raw_type = str(values["doc_type"])
        doc_type = DocType.coerce(raw_type)
        if doc_type is DocType.OTHER and raw_type.strip().lower() != DocType.OTHER.value:
            unknown_types[raw_type] = unknown_types.get(raw_type, 0) + 1

        try:
            papers.append(
                PaperRecord(
                    paper_id=paper_id,
                    journal_id=str(values["journal_id"]),
                    pub_year=pub_year,
                    doc_type=doc_type,
                    n_refs=n_refs,
                    refs=tuple(str(r).strip() for r in refs),
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from exc

    for raw_type, count in sorted(unknown_types.items()):
        logger.warning(
            "unknown doc_type %r mapped to 'other' (%d occurrence%s)",
            raw_type,
            count,
            "" if count == 1 else "s",
        )
    return papers


def dumps_papers(papers: Sequence[PaperRecord], fmt: str = "csv") -> str:
    """Serialize papers back into the ingest format (round-trip safe)."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(PAPER_FIELDS)
        for p in papers:
            writer.writerow(
                [p.paper_id, p.journal_id, p.pub_year, p.doc_type.value,
                 p.n_refs, ";".join(p.refs)]
            )
        return buf.getvalue()
    if fmt == "jsonl":
        lines = []
        for p in papers:
            lines.append(
                json.dumps(
                    {
                        "paper_id": p.paper_id,
                        "journal_id": p.journal_id,
                        "pub_year": p.pub_year,
                        "doc_type": p.doc_type.value,
                        "n_refs": p.n_refs,
                        "refs": list(p.refs),
                    },
                    ensure_ascii=False,
                )
            )
        return "\n".join(lines) + ("\n" if lines else "")
    raise ValueError(f"unknown papers format {fmt!r}")


# ---------------------------------------------------------------------------
# Journals
# ---------------------------------------------------------------------------


def parse_journals(source: Source) -> list[JournalRecord]:
    """Parse journal records from csv content; categories split on ';'."""
    journals: list[JournalRecord] = []
    seen: set[str] = set()
    lines = _iter_lines(source)
    try:
        header_no, header = next(lines)
    except StopIteration:
        raise ParseError("missing header row") from None
    if tuple(f.strip() for f in _split_csv_row(header, header_no)) != JOURNAL_FIELDS:
        raise ParseError(
            f"bad journals header, expected {','.join(JOURNAL_FIELDS)}", header_no
        )
    for lineno, line in lines:
        row = _split_csv_row(line, lineno)
        if len(row) != len(JOURNAL_FIELDS):
            raise ParseError(
                f"expected {len(JOURNAL_FIELDS)} fields, got {len(row)}", lineno
            )
        journal_id, name, raw_categories = (cell.strip() for cell in row)
        if journal_id in seen:
            raise ParseError(f"duplicate journal_id {journal_id}", lineno)
        seen.add(journal_id)
        categories = frozenset(c.strip() for c in raw_categories.split(";") if c.strip())
        journals.append(JournalRecord(journal_id, name, categories))
    return journals


def dumps_journals(journals: Sequence[JournalRecord]) -> str:
    """Serialize journal records to csv."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(JOURNAL_FIELDS)
    for j in journals:
        writer.writerow([j.journal_id, j.name, ";".join(sorted(j.categories))])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# File convenience wrappers
# ---------------------------------------------------------------------------


def load_papers(path: str | Path, fmt: str | None = None) -> list[PaperRecord]:
    """Read a papers file; format inferred from the suffix unless given."""
    path = Path(path)
    if fmt is None:
        fmt = "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv"
    return parse_papers(path.read_bytes(), fmt)


def load_journals(path: str | Path) -> list[JournalRecord]:
    return parse_journals(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# Citation resolution
# ---------------------------------------------------------------------------


def resolve_citations(papers: Iterable[PaperRecord]) -> CitationGraph:
    """Resolve reference strings into a deduplicated citation graph.

    References with no matching paper id are counted, not dropped silently:
    they stay in the citing paper's ``n_refs`` (which keeps fractional weights
    honest) but produce no edge. Repeated references to the same paper
    collapse to one edge and increment ``duplicate_count``.
    """
    by_id = index_papers(papers)
    edges: set[tuple[str, str]] = set()
    unresolved = 0
    duplicates = 0
    for paper in by_id.values():
        for ref in paper.refs:
            if ref not in by_id:
                unresolved += 1
                continue
            edge = (paper.paper_id, ref)
            if edge in edges:
                duplicates += 1
            else:
                edges.add(edge)
    return CitationGraph(
        edges=tuple(sorted(edges)),
        unresolved_count=unresolved,
        duplicate_count=duplicates,
    )


# ---------------------------------------------------------------------------
# Reference sets
# ---------------------------------------------------------------------------


class Selector:
    """Base class for reference-set member selection."""

    def matches(self, paper: PaperRecord, categories: dict[str, frozenset[str]]) -> bool:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


class ByCategory(Selector):
    def __init__(self, code: str):
        self.code = code

    def matches(self, paper, categories):
        return self.code in categories.get(paper.journal_id, frozenset())

    def describe(self) -> str:
        return f"category:{self.code}"


class ByJournals(Selector):
    def __init__(self, journal_ids: Iterable[str]):
        self.journal_ids = frozenset(journal_ids)

    def matches(self, paper, categories):
        return paper.journal_id in self.journal_ids

    def describe(self) -> str:
        return "journals:" + ";".join(sorted(self.journal_ids))


class ByIds(Selector):
    def __init__(self, paper_ids: Iterable[str]):
        self.paper_ids = frozenset(paper_ids)

    def matches(self, paper, categories):
        return paper.paper_id in self.paper_ids

    def describe(self) -> str:
        return f"ids({len(self.paper_ids)})"


class AllPapers(Selector):
    def matches(self, paper, categories):
        return True

    def describe(self) -> str:
        return "all"


def by_category(code: str) -> ByCategory:
    return ByCategory(code)


def by_journals(journal_ids: Iterable[str]) -> ByJournals:
    return ByJournals(journal_ids)


def by_ids(paper_ids: Iterable[str]) -> ByIds:
    return ByIds(paper_ids)


def all_papers() -> AllPapers:
    return AllPapers()


def build_reference_set(
    papers: Iterable[PaperRecord],
    selector: Selector,
    pub_window: tuple[int, int],
    cite_window: tuple[int, int],
    *,
    journals: Iterable[JournalRecord] | None = None,
    exclude_ids: Iterable[str] = (),
    label: str | None = None,
) -> ReferenceSet:
    """Select the comparison population for percentile statistics.

    ``exclude_ids`` removes papers after selection, which is how disjoint
    comparison groups are carved out of overlapping categories. Raises
    ``ValueError`` when nothing matches.
    """
    pub_window = check_year_window(pub_window, "pub_window")
    cite_window = check_year_window(cite_window, "cite_window")
    if isinstance(selector, ByCategory) and journals is None:
        raise ValueError("category selection requires journal records")
    categories = (
        {j.journal_id: j.categories for j in journals} if journals is not None else {}
    )
    excluded = frozenset(exclude_ids)
    members = {
        p.paper_id
        for p in papers
        if pub_window[0] <= p.pub_year <= pub_window[1]
        and p.paper_id not in excluded
        and selector.matches(p, categories)
    }
    if not members:
        raise ValueError("empty reference set")
    if label is None:
        label = f"{selector.describe()} {pub_window[0]}-{pub_window[1]}"
    return ReferenceSet(
        member_ids=frozenset(members),
        pub_window=pub_window,
        cite_window=cite_window,
        label=label,
    )
