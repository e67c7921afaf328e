"""Report assembly: units, ranks, uncertainty fields, and share identities."""

from __future__ import annotations

import math

import pytest

from citemetrics import DocType, PaperRecord, resolve_citations
from citemetrics.cli import build_parser
from citemetrics.ingest import by_journals
from citemetrics.report import (
    CSV_COLUMNS,
    EngineConfig,
    ReportContext,
    compare_report,
    compute_report,
    render_report_csv,
    _dense_ranks,
)


def _paper(pid, journal, year, refs=(), n_refs=None, doc=DocType.ARTICLE):
    return PaperRecord(
        pid, journal, year, doc, len(refs) if n_refs is None else n_refs, tuple(refs)
    )


def _three_journal_context(**config_kwargs):
    papers = []
    cite_plan = {"JA": 3, "JB": 5, "JC": 1}  # base citations per paper
    citations = {}
    for j, size in (("JA", 6), ("JB", 4), ("JC", 2)):
        for i in range(size):
            papers.append(_paper(f"{j}{i}", j, 2009 if i % 2 else 2008))
            citations[f"{j}{i}"] = cite_plan[j] + (i % 2)  # within-journal spread
    c = 0
    for p in list(papers):
        for _ in range(citations[p.paper_id]):
            papers.append(_paper(f"C{c:03d}", "SRC", 2010, [p.paper_id]))
            c += 1
    graph = resolve_citations(papers)
    config = EngineConfig(year=2010, reference=by_journals(["JA", "JB", "JC"]), **config_kwargs)
    return ReportContext.build(papers, None, graph, config)


def test_dense_ranks_share_smaller_rank():
    ranks = _dense_ranks({"a": 5.0, "b": 5.0, "c": 3.0, "d": 7.0, "e": None})
    assert ranks == {"d": 1, "a": 2, "b": 2, "c": 3, "e": None}


def test_units_are_journals_in_reference_set():
    ctx = _three_journal_context()
    assert sorted(ctx.units) == ["JA", "JB", "JC"]  # SRC publishes outside the window


def test_report_ranks_and_shares():
    ctx = _three_journal_context()
    report = compute_report(ctx)
    by_unit = {u.unit: u for u in report.units}
    assert by_unit["JB"].rank_if == 1  # 5 cites/paper
    assert by_unit["JA"].rank_if == 2
    assert by_unit["JC"].rank_if == 3
    assert [by_unit[u].rank_i3 for u in ("JA", "JB", "JC")] == [2, 1, 3]
    total_share = math.fsum(u.pct_i3 for u in report.units)
    assert total_share == pytest.approx(100.0, abs=1e-9)
    total_pr6 = math.fsum(u.pct_pr6 for u in report.units)
    assert total_pr6 == pytest.approx(100.0, abs=1e-9)


def test_uncertainty_fields_always_populated():
    ctx = _three_journal_context()
    for unit in compute_report(ctx).units:
        assert (unit.if_sem is not None) or unit.if_sem_reason
        assert (unit.quasi_if_sem is not None) or unit.quasi_if_sem_reason


def test_expectation_flags_plausible():
    ctx = _three_journal_context()
    report = compute_report(ctx)
    by_unit = {u.unit: u for u in report.units}
    assert by_unit["JB"].z_expect > 0  # most-cited journal sits above expectation
    assert by_unit["JC"].z_expect < 0


def test_citable_filter_changes_if_but_not_membership():
    papers = [
        _paper("A0", "JA", 2009, doc=DocType.ARTICLE),
        _paper("A1", "JA", 2009, doc=DocType.LETTER),
        _paper("C0", "SRC", 2010, ["A0"]),
        _paper("C1", "SRC", 2010, ["A1"]),
        _paper("C2", "SRC", 2010, ["A1"]),
    ]
    graph = resolve_citations(papers)
    plain = ReportContext.build(
        papers, None, graph, EngineConfig(year=2010, reference=by_journals(["JA"]))
    )
    filtered = ReportContext.build(
        papers, None, graph,
        EngineConfig(
            year=2010, reference=by_journals(["JA"]),
            citable_types=frozenset({DocType.ARTICLE}),
        ),
    )
    plain_unit = compute_report(plain).units[0]
    filtered_unit = compute_report(filtered).units[0]
    assert plain_unit.n_pubs == filtered_unit.n_pubs == 2  # ranking keeps the letter
    assert plain_unit.if_classic == pytest.approx(1.5)  # 3 citations / 2 items
    assert filtered_unit.if_classic == pytest.approx(1.0)  # only the article counts


def test_csv_header_matches_declared_columns():
    ctx = _three_journal_context()
    text = render_report_csv(compute_report(ctx))
    assert text.splitlines()[0] == CSV_COLUMNS


def test_compute_help_documents_columns():
    parser = build_parser()
    sub = next(
        a for a in parser._actions if a.__class__.__name__ == "_SubParsersAction"
    )
    help_text = sub.choices["compute"].format_help()
    assert CSV_COLUMNS in help_text


def test_declared_paper_set_units():
    ctx = _three_journal_context()
    ids = list(ctx.units["JA"])[:2] + list(ctx.units["JB"])[:1]
    config = EngineConfig(
        year=2010, reference=by_journals(["JA", "JB", "JC"]),
        paper_sets={"mixed": tuple(ids)},
    )
    ctx2 = ReportContext.build(ctx.papers, None, ctx.graph, config)
    report = compute_report(ctx2)
    assert "mixed" in {u.unit for u in report.units}
    mixed = next(u for u in report.units if u.unit == "mixed")
    assert mixed.n_pubs == 3


def test_declared_set_outside_reference_rejected():
    ctx = _three_journal_context()
    config = EngineConfig(
        year=2010, reference=by_journals(["JA"]), paper_sets={"bad": ("JB0",)}
    )
    with pytest.raises(ValueError, match="not in the reference set"):
        ReportContext.build(ctx.papers, None, ctx.graph, config)


def test_compare_requires_known_units():
    ctx = _three_journal_context()
    with pytest.raises(ValueError, match="unknown unit"):
        compare_report(ctx, "JA", "MYSTERY")


def test_compare_rcr_has_note_and_no_test():
    ctx = _three_journal_context()
    report = compare_report(ctx, "JA", "JB")
    rcr_row = next(r for r in report.rows if r.indicator == "rcr")
    assert rcr_row.test is None
    assert "not testable" in rcr_row.note
    assert rcr_row.value_1 is not None and rcr_row.value_2 is not None


def test_integrated_impact_correlates_with_both_size_and_citations():
    # across units, the integrated impact tracks publication counts and
    # citation totals more closely than those two track each other, because
    # it is built from their product structure (directional, synthetic data)
    import random

    from citemetrics import JournalLayout, LogNormal, SynthSpec, generate_corpus
    from citemetrics import pearson_r, spearman_rho

    rng = random.Random(42)
    layouts = []
    for i in range(14):
        n = rng.randint(15, 90)
        mu = rng.uniform(0.0, 1.6)  # citedness varies independently of size
        sigma = rng.uniform(0.8, 1.4)
        layouts.append(JournalLayout(f"J{i:02d}", n, LogNormal(mu, sigma)))
    spec = SynthSpec(
        n_papers=0, distribution=LogNormal(0, 1.2), seed=42,
        journal_layout=tuple(layouts),
    )
    papers, graph = generate_corpus(spec)
    config = EngineConfig(
        year=2010, reference=by_journals([l.journal_id for l in layouts])
    )
    report = compute_report(ReportContext.build(papers, None, graph, config))
    impact = [u.i3_q for u in report.units]
    pubs = [float(u.n_pubs) for u in report.units]
    cites = [u.total_cit for u in report.units]
    for corr in (spearman_rho, pearson_r):
        baseline = corr(pubs, cites)
        assert corr(impact, pubs) > baseline
        assert corr(impact, cites) > baseline


def test_compare_mean_ratio_is_testable():
    # unlike the ratio of means, the mean of ratios carries standard errors
    ctx = _three_journal_context()
    report = compare_report(ctx, "JA", "JB")
    row = next(r for r in report.rows if r.indicator == "m_ocr_ecr")
    assert row.test is not None
    assert row.test.statistic < 0  # JB is cited more per expectation than JA
    identical = compare_report(ctx, "JA", "JA")
    same = next(r for r in identical.rows if r.indicator == "m_ocr_ecr")
    assert same.test.statistic == 0.0
