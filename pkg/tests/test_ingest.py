"""Parsing, serialization, citation resolution, and reference-set tests."""

from __future__ import annotations

import random

import pytest

from citemetrics import (
    DocType,
    PaperRecord,
    build_reference_set,
    by_category,
    by_ids,
    by_journals,
    dumps_journals,
    dumps_papers,
    parse_journals,
    parse_papers,
    resolve_citations,
)
from citemetrics.ingest import ParseError

PAPERS_CSV = """\
paper_id,journal_id,pub_year,doc_type,n_refs,refs
P1,J1,2008,article,20,P2;P3
P2,J1,2007,article,5,
P3,J2,2007,review,3,P2
"""


def test_parse_well_formed_row():
    papers = parse_papers(PAPERS_CSV)
    assert papers[0] == PaperRecord("P1", "J1", 2008, DocType.ARTICLE, 20, ("P2", "P3"))
    assert [p.paper_id for p in papers] == ["P1", "P2", "P3"]  # row order kept


def test_parse_empty_refs_field():
    papers = parse_papers(PAPERS_CSV)
    assert papers[1].refs == ()
    assert papers[1].n_refs == 5


def test_negative_n_refs_rejected_with_line_number():
    text = "paper_id,journal_id,pub_year,doc_type,n_refs,refs\nP1,J1,2008,article,-1,\n"
    with pytest.raises(ParseError, match="negative n_refs") as exc:
        parse_papers(text)
    assert exc.value.line == 2
    assert "line 2" in str(exc.value)


def test_duplicate_paper_id_rejected():
    text = PAPERS_CSV + "P1,J9,2009,article,0,\n"
    with pytest.raises(ParseError, match="duplicate paper_id P1"):
        parse_papers(text)


def test_malformed_row_names_line():
    text = "paper_id,journal_id,pub_year,doc_type,n_refs,refs\nP1,J1,2008\n"
    with pytest.raises(ParseError, match="line 2"):
        parse_papers(text)


def test_n_refs_below_listed_refs_rejected():
    text = "paper_id,journal_id,pub_year,doc_type,n_refs,refs\nP1,J1,2008,article,1,A;B;C\n"
    with pytest.raises(ParseError, match="smaller than"):
        parse_papers(text)


def test_unknown_doc_type_maps_to_other(caplog):
    text = "paper_id,journal_id,pub_year,doc_type,n_refs,refs\nP1,J1,2008,editorial,0,\n"
    with caplog.at_level("WARNING"):
        papers = parse_papers(text)
    assert papers[0].doc_type is DocType.OTHER
    assert "editorial" in caplog.text


def test_comment_and_blank_lines_skipped():
    text = "# corpus\n\npaper_id,journal_id,pub_year,doc_type,n_refs,refs\n# mid comment\nP1,J1,2008,article,0,\n"
    assert len(parse_papers(text)) == 1


def test_bad_header_rejected():
    with pytest.raises(ParseError, match="header"):
        parse_papers("id,journal\nP1,J1\n")


def test_csv_round_trip():
    papers = parse_papers(PAPERS_CSV)
    assert parse_papers(dumps_papers(papers, "csv"), "csv") == papers


def test_jsonl_round_trip():
    papers = parse_papers(PAPERS_CSV)
    assert parse_papers(dumps_papers(papers, "jsonl"), "jsonl") == papers


def test_jsonl_missing_field_rejected():
    line = '{"paper_id": "P1", "journal_id": "J1", "pub_year": 2008}'
    with pytest.raises(ParseError, match="missing fields"):
        parse_papers(line, "jsonl")


def test_jsonl_refs_must_be_a_list():
    line = (
        '{"paper_id": "P1", "journal_id": "J1", "pub_year": 2008,'
        ' "doc_type": "article", "n_refs": 2, "refs": "P2"}'
    )
    with pytest.raises(ParseError, match="refs must be a list"):
        parse_papers(line, "jsonl")


def test_jsonl_bad_field_type_names_line():
    line = (
        '{"paper_id": "P1", "journal_id": "J1", "pub_year": 2008,'
        ' "doc_type": "article", "n_refs": "many", "refs": []}'
    )
    with pytest.raises(ParseError, match="line 1.*n_refs"):
        parse_papers(line, "jsonl")


def test_parse_accepts_bytes_and_streams(tmp_path):
    papers = parse_papers(PAPERS_CSV.encode("utf-8"))
    assert len(papers) == 3
    path = tmp_path / "papers.csv"
    path.write_text(PAPERS_CSV, encoding="utf-8")
    with open(path, "rb") as fh:
        assert parse_papers(fh) == papers


# ---------------------------------------------------------------------------
# Journals
# ---------------------------------------------------------------------------


def test_parse_journals_round_trip():
    text = "journal_id,name,categories\nJ1,Scientometrics,NU;XA\nJ2,Nature,\n"
    journals = parse_journals(text)
    assert journals[0].categories == frozenset({"NU", "XA"})
    assert journals[1].categories == frozenset()
    assert parse_journals(dumps_journals(journals)) == journals


def test_duplicate_journal_id_rejected():
    text = "journal_id,name,categories\nJ1,A,\nJ1,B,\n"
    with pytest.raises(ParseError, match="duplicate journal_id J1"):
        parse_journals(text)


# ---------------------------------------------------------------------------
# Citation resolution
# ---------------------------------------------------------------------------


def _paper(pid, refs=(), n_refs=None, journal="J1", year=2008, doc=DocType.ARTICLE):
    return PaperRecord(pid, journal, year, doc, len(refs) if n_refs is None else n_refs, tuple(refs))


def test_resolve_one_hit_one_miss():
    papers = [_paper("P1", ["P2", "X9"]), _paper("P2")]
    graph = resolve_citations(papers)
    assert graph.edges == (("P1", "P2"),)
    assert graph.unresolved_count == 1
    assert graph.duplicate_count == 0


def test_resolve_no_references():
    graph = resolve_citations([_paper("P1"), _paper("P2")])
    assert graph.edges == ()
    assert graph.unresolved_count == 0


def test_resolve_collapses_duplicates():
    papers = [_paper("P1", ["P2", "P2"]), _paper("P2")]
    graph = resolve_citations(papers)
    assert graph.edges == (("P1", "P2"),)
    assert graph.duplicate_count == 1


def test_resolve_order_independent():
    rng = random.Random(7)
    papers = [_paper("P1", ["P2", "P3"]), _paper("P2", ["P3"]), _paper("P3"), _paper("P4", ["X"])]
    baseline = resolve_citations(papers)
    for _ in range(5):
        shuffled = papers[:]
        rng.shuffle(shuffled)
        assert resolve_citations(shuffled) == baseline


def test_resolve_conservation_on_random_corpora():
    # resolved edges + unresolved refs + collapsed duplicates == len(refs), per citer
    rng = random.Random(11)
    for _ in range(30):
        ids = [f"P{i}" for i in range(rng.randint(2, 30))]
        papers = []
        for pid in ids:
            pool = ids + ["X1", "X2"]
            refs = [rng.choice(pool) for _ in range(rng.randint(0, 8))]
            papers.append(_paper(pid, refs, n_refs=len(refs) + rng.randint(0, 3)))
        graph = resolve_citations(papers)
        out_edges = {}
        for citing, _ in graph.edges:
            out_edges[citing] = out_edges.get(citing, 0) + 1
        corpus = set(ids)
        total_unresolved = total_duplicates = 0
        for p in papers:
            # per-paper: edges are exactly the unique resolvable references
            resolved_unique = {r for r in p.refs if r in corpus}
            assert out_edges.get(p.paper_id, 0) == len(resolved_unique)
            unresolved = sum(1 for r in p.refs if r not in corpus)
            duplicates = len(p.refs) - unresolved - len(resolved_unique)
            assert len(resolved_unique) + unresolved + duplicates == len(p.refs)
            total_unresolved += unresolved
            total_duplicates += duplicates
        assert graph.unresolved_count == total_unresolved
        assert graph.duplicate_count == total_duplicates


def test_resolve_rejects_duplicate_ids():
    with pytest.raises(ValueError, match="duplicate paper_id"):
        resolve_citations([_paper("P1"), _paper("P1")])


# ---------------------------------------------------------------------------
# Reference sets
# ---------------------------------------------------------------------------


def _corpus():
    papers = [
        _paper("P1", journal="J1", year=2007),
        _paper("P2", journal="J1", year=2008),
        _paper("P3", journal="J2", year=2008),
        _paper("P4", journal="J2", year=2005),
        _paper("P5", journal="J3", year=2008),
    ]
    journals = parse_journals(
        "journal_id,name,categories\nJ1,One,XA\nJ2,Two,XA;NU\nJ3,Three,VI\n"
    )
    return papers, journals


def test_by_category_filters_journal_categories():
    papers, journals = _corpus()
    rs = build_reference_set(papers, by_category("XA"), (2007, 2008), (2009, 2009), journals=journals)
    assert rs.member_ids == {"P1", "P2", "P3"}


def test_by_ids_respects_window():
    papers, _ = _corpus()
    with pytest.raises(ValueError, match="empty reference set"):
        build_reference_set(papers, by_ids(["P4"]), (2007, 2008), (2009, 2009))


def test_by_journals_union_law():
    papers, _ = _corpus()
    both = build_reference_set(papers, by_journals(["J1", "J2"]), (2005, 2008), (2009, 2009))
    j1 = build_reference_set(papers, by_journals(["J1"]), (2005, 2008), (2009, 2009))
    j2 = build_reference_set(papers, by_journals(["J2"]), (2005, 2008), (2009, 2009))
    assert both.member_ids == j1.member_ids | j2.member_ids


def test_exclude_ids_carves_out_overlap():
    papers, journals = _corpus()
    rs = build_reference_set(
        papers, by_category("XA"), (2007, 2008), (2009, 2009),
        journals=journals, exclude_ids=["P3"],
    )
    assert rs.member_ids == {"P1", "P2"}


def test_by_category_requires_journals():
    papers, _ = _corpus()
    with pytest.raises(ValueError, match="journal records"):
        build_reference_set(papers, by_category("XA"), (2007, 2008), (2009, 2009))


def test_reference_set_rejects_bad_window():
    papers, _ = _corpus()
    with pytest.raises(ValueError, match="start"):
        build_reference_set(papers, by_ids(["P1"]), (2009, 2007), (2009, 2009))
