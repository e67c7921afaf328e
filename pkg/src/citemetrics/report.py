"""Per-unit indicator reports and unit-vs-unit comparisons.

A *unit* is either a journal (papers sharing a journal id inside the
reference set) or a declared paper set. Every unit gets the full indicator
bundle; mean-family values carry an uncertainty field (SEM, or a reason why
none exists) because a bare average of a skewed distribution is not an
acceptable report line.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .indicators import (
    RelativeRates,
    citation_counts,
    expected_citation_rates,
    impact_factor,
    mean_ocr_ecr,
    moving_average_if,
    rcr,
    window_counts_for_items,
)
from .ingest import AllPapers, Selector, build_reference_set
from .percentiles import (
    SIX_CLASS_SCHEME,
    EvaluationScheme,
    PercentileDistribution,
    i3,
    i3_share,
    quantile_ranks,
    top_k_proportion,
)
from .records import CitationGraph, DocType, JournalRecord, PaperRecord, ReferenceSet
from .stats import (
    TestResult,
    expectation_test,
    mean_diff_from_summary,
    sem,
    two_proportion_z,
)
from .validation import check_counting_mode

CSV_COLUMNS = (
    "unit,n_pubs,total_cit,total_cit_frac,if,if_moving,quasi_if,"
    "i3_q,i3_pr6,pct_i3,pct_pr6,top10,top25,z_expect,sig01,sig05,rank_if,rank_i3"
)

EXPECTATION_NOTE = (
    "expectation z computed from value totals rounded to nearest integer trials"
)
RCR_NOTE = "not testable: dependent distributions"


@dataclass
class EngineConfig:
    """Run settings collected from the config file and CLI flags."""

    counting: str = "whole"
    citable_types: frozenset[DocType] | None = None
    scheme: EvaluationScheme | None = None
    year: int | None = None
    pub_window: tuple[int, int] | None = None
    cite_window: tuple[int, int] | None = None
    top_k: tuple[float, ...] = (10.0, 25.0)
    reference: Selector = field(default_factory=AllPapers)
    paper_sets: dict[str, tuple[str, ...]] = field(default_factory=dict)
    fallback_if: bool = False
    jobs: int = 1

    def __post_init__(self) -> None:
        check_counting_mode(self.counting)
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        ks = tuple(float(k) for k in self.top_k)
        for k in (10.0, 25.0):
            if k not in ks:
                ks = ks + (k,)
        self.top_k = tuple(sorted(ks))


@dataclass
class UnitReport:
    """Indicator bundle for one unit."""

    unit: str
    n_pubs: int
    total_cit: float
    total_cit_frac: float
    if_classic: float | None
    if_sem: float | None
    if_sem_reason: str | None
    if_moving: float | None
    if_moving_fallback: bool
    quasi_if: float | None
    quasi_if_sem: float | None
    quasi_if_sem_reason: str | None
    i3_q: float
    i3_pr6: float
    pct_i3: float
    pct_pr6: float
    top_k: dict[float, float]
    z_expect: float | None
    p_expect: float | None
    sig01: bool | None
    sig05: bool | None
    rank_if: int | None = None
    rank_i3: int | None = None
    notes: tuple[str, ...] = ()


@dataclass
class IndicatorReport:
    reference: ReferenceSet
    year: int
    counting: str
    scheme: EvaluationScheme
    top_k: tuple[float, ...]
    units: list[UnitReport]
    notes: tuple[str, ...]


@dataclass
class CompareRow:
    indicator: str
    value_1: float | None
    value_2: float | None
    test: TestResult | None = None
    note: str | None = None


@dataclass
class ComparisonReport:
    unit_1: str
    unit_2: str
    reference: ReferenceSet
    rows: list[CompareRow]
    notes: tuple[str, ...]


# ---------------------------------------------------------------------------
# Shared computation context
# ---------------------------------------------------------------------------


@dataclass
class ReportContext:
    """Everything assembled once per run: corpus, reference set, rankings."""

    papers: list[PaperRecord]
    graph: CitationGraph
    config: EngineConfig
    reference: ReferenceSet
    year: int
    ranking_counts: dict[str, float]
    whole_counts: dict[str, float]
    fractional_counts: dict[str, float]
    distribution: PercentileDistribution
    units: dict[str, tuple[str, ...]]

    @classmethod
    def build(
        cls,
        papers: Sequence[PaperRecord],
        journals: Sequence[JournalRecord] | None,
        graph: CitationGraph,
        config: EngineConfig,
    ) -> "ReportContext":
        if config.year is None:
            raise ValueError("config must set the census year")
        year = int(config.year)
        pub_window = config.pub_window or (year - 2, year - 1)
        cite_window = config.cite_window or (year, year)
        papers = list(papers)
        reference = build_reference_set(
            papers, config.reference, pub_window, cite_window, journals=journals
        )
        whole = citation_counts(reference.member_ids, graph, papers, cite_window, "whole")
        fractional = citation_counts(
            reference.member_ids, graph, papers, cite_window, "fractional"
        )
        ranking = whole if config.counting == "whole" else fractional
        distribution = quantile_ranks(
            reference, ranking, scheme=config.scheme or SIX_CLASS_SCHEME
        )

        by_id = {p.paper_id: p for p in papers}
        units: dict[str, tuple[str, ...]] = {}
        journal_members: dict[str, list[str]] = {}
        for pid in reference.sorted_members():
            journal_members.setdefault(by_id[pid].journal_id, []).append(pid)
        for journal_id, ids in sorted(journal_members.items()):
            units[journal_id] = tuple(ids)
        for label, ids in sorted(config.paper_sets.items()):
            outside = sorted(set(ids) - reference.member_ids)
            if outside:
                raise ValueError(
                    f"paper set {label}: {outside[0]} is not in the reference set"
                )
            if label in units:
                raise ValueError(f"paper set label {label} collides with a journal id")
            units[label] = tuple(sorted(set(ids)))
        return cls(
            papers=papers,
            graph=graph,
            config=config,
            reference=reference,
            year=year,
            ranking_counts=ranking,
            whole_counts=whole,
            fractional_counts=fractional,
            distribution=distribution,
            units=units,
        )

    def unit_ids(self, unit: str) -> tuple[str, ...]:
        try:
            return self.units[unit]
        except KeyError:
            known = ", ".join(sorted(self.units))
            raise ValueError(f"unknown unit {unit!r} (have: {known})") from None


# ---------------------------------------------------------------------------
# Per-unit computation
# ---------------------------------------------------------------------------


def _unit_report(ctx: ReportContext, unit: str) -> UnitReport:
    ids = ctx.unit_ids(unit)
    cfg = ctx.config
    notes: list[str] = []

    total_cit = math.fsum(ctx.whole_counts[pid] for pid in ids)
    total_cit_frac = math.fsum(ctx.fractional_counts[pid] for pid in ids)

    window = window_counts_for_items(
        ids, ctx.year, ctx.graph, ctx.papers, cfg.citable_types, "whole"
    )
    if_classic: float | None = None
    if_sem: float | None = None
    if_sem_reason: str | None = None
    if window.p1 + window.p2 > 0:
        if_classic = impact_factor(window)
        item_counts = _per_item_window_citations(ctx, ids, "whole")
        if len(item_counts) >= 2:
            if_sem = sem(item_counts)
        else:
            if_sem_reason = "single citable item"
    else:
        if_sem_reason = "no citable items"
        notes.append("impact factor undefined: no citable items in window")

    if_moving: float | None = None
    fallback = False
    try:
        if_moving = moving_average_if(window)
    except ValueError:
        if cfg.fallback_if and if_classic is not None:
            if_moving = if_classic
            fallback = True
            notes.append("if_moving: fell back to classic IF (zero-publication year)")
        else:
            notes.append("if_moving undefined: year with zero citable items")

    quasi_if: float | None = None
    quasi_if_sem: float | None = None
    quasi_if_sem_reason: str | None = None
    if window.p1 + window.p2 > 0:
        quasi_if = impact_factor(
            window_counts_for_items(
                ids, ctx.year, ctx.graph, ctx.papers, cfg.citable_types, "fractional"
            )
        )
        frac_item_counts = _per_item_window_citations(ctx, ids, "fractional")
        if len(frac_item_counts) >= 2:
            quasi_if_sem = sem(frac_item_counts)
        else:
            quasi_if_sem_reason = "single citable item"
    else:
        quasi_if_sem_reason = "no citable items"

    i3_q = i3(ctx.distribution, "quantiles", subset=ids)
    i3_pr6 = i3(ctx.distribution, "pr6", subset=ids)
    pct_i3 = i3_share(ids, ctx.distribution, "quantiles")
    pct_pr6 = i3_share(ids, ctx.distribution, "pr6")
    top_k = {k: top_k_proportion(ids, ctx.distribution, k) for k in cfg.top_k}

    z_expect = p_expect = None
    sig01 = sig05 = None
    try:
        result = expectation_test(
            i3_q, len(ids), i3(ctx.distribution, "quantiles"), ctx.distribution.size
        )
        z_expect, p_expect = result.statistic, result.p_value
        sig01, sig05 = result.significant_01, result.significant_05
    except ValueError as exc:
        notes.append(f"expectation test unavailable: {exc}")

    return UnitReport(
        unit=unit,
        n_pubs=len(ids),
        total_cit=total_cit,
        total_cit_frac=total_cit_frac,
        if_classic=if_classic,
        if_sem=if_sem,
        if_sem_reason=if_sem_reason,
        if_moving=if_moving,
        if_moving_fallback=fallback,
        quasi_if=quasi_if,
        quasi_if_sem=quasi_if_sem,
        quasi_if_sem_reason=quasi_if_sem_reason,
        i3_q=i3_q,
        i3_pr6=i3_pr6,
        pct_i3=pct_i3,
        pct_pr6=pct_pr6,
        top_k=top_k,
        z_expect=z_expect,
        p_expect=p_expect,
        sig01=sig01,
        sig05=sig05,
        notes=tuple(notes),
    )


def _per_item_window_citations(
    ctx: ReportContext, ids: Iterable[str], counting: str
) -> list[float]:
    """Year-t citation counts of the unit's citable window items."""
    by_id = {p.paper_id: p for p in ctx.papers}
    allowed = ctx.config.citable_types
    items = [
        pid
        for pid in ids
        if by_id[pid].pub_year in (ctx.year - 1, ctx.year - 2)
        and (allowed is None or by_id[pid].doc_type in allowed)
    ]
    counts = citation_counts(items, ctx.graph, ctx.papers, (ctx.year, ctx.year), counting)
    return [counts[pid] for pid in sorted(items)]


def _dense_ranks(values: Mapping[str, float | None]) -> dict[str, int | None]:
    """Dense descending ranks (1-based); ties share the smaller rank."""
    defined = sorted(
        {v for v in values.values() if v is not None}, reverse=True
    )
    rank_of = {v: i + 1 for i, v in enumerate(defined)}
    return {
        unit: (rank_of[v] if v is not None else None) for unit, v in values.items()
    }


def compute_report(ctx: ReportContext) -> IndicatorReport:
    """Compute the full indicator table for every unit.

    With ``config.jobs > 1`` the per-unit work runs on a thread pool; the
    merge order is fixed (sorted unit names) so parallel and sequential runs
    produce identical reports.
    """
    names = sorted(ctx.units)
    if ctx.config.jobs > 1:
        with ThreadPoolExecutor(max_workers=ctx.config.jobs) as pool:
            units = list(pool.map(lambda u: _unit_report(ctx, u), names))
    else:
        units = [_unit_report(ctx, u) for u in names]

    rank_if = _dense_ranks({u.unit: u.if_classic for u in units})
    rank_i3 = _dense_ranks({u.unit: u.i3_q for u in units})
    for unit in units:
        unit.rank_if = rank_if[unit.unit]
        unit.rank_i3 = rank_i3[unit.unit]

    return IndicatorReport(
        reference=ctx.reference,
        year=ctx.year,
        counting=ctx.config.counting,
        scheme=ctx.distribution.scheme,
        top_k=ctx.config.top_k,
        units=units,
        notes=(EXPECTATION_NOTE,),
    )


# ---------------------------------------------------------------------------
# Comparisons
# ---------------------------------------------------------------------------


def compare_report(ctx: ReportContext, unit_1: str, unit_2: str) -> ComparisonReport:
    """Side-by-side indicators with significance tests where they are valid.

    Proportion-based indicators (class memberships, integrated-impact shares)
    get two-proportion z-tests; the relative citation rate is printed without
    a test because the unit's papers are a subset of the reference set.
    """
    r1 = _unit_report(ctx, unit_1)
    r2 = _unit_report(ctx, unit_2)
    ids_1, ids_2 = ctx.unit_ids(unit_1), ctx.unit_ids(unit_2)
    rows: list[CompareRow] = [
        CompareRow("n_pubs", r1.n_pubs, r2.n_pubs),
        CompareRow("total_cit", r1.total_cit, r2.total_cit),
        CompareRow("total_cit_frac", r1.total_cit_frac, r2.total_cit_frac),
        CompareRow("if", r1.if_classic, r2.if_classic),
        CompareRow("if_moving", r1.if_moving, r2.if_moving),
        CompareRow("quasi_if", r1.quasi_if, r2.quasi_if),
        CompareRow("i3_q", r1.i3_q, r2.i3_q),
        CompareRow("i3_pr6", r1.i3_pr6, r2.i3_pr6),
    ]

    total_q = i3(ctx.distribution, "quantiles")
    total_pr6 = i3(ctx.distribution, "pr6")
    rows.append(
        _share_test_row("pct_i3", r1.pct_i3, r2.pct_i3, r1.i3_q, r2.i3_q, total_q)
    )
    rows.append(
        _share_test_row("pct_pr6", r1.pct_pr6, r2.pct_pr6, r1.i3_pr6, r2.i3_pr6, total_pr6)
    )
    for k in ctx.config.top_k:
        name = f"top{k:g}"
        x1 = round(r1.top_k[k] * r1.n_pubs)
        x2 = round(r2.top_k[k] * r2.n_pubs)
        rows.append(
            _tested_row(name, r1.top_k[k], r2.top_k[k], x1, r1.n_pubs, x2, r2.n_pubs)
        )

    for label, report in ((unit_1, r1), (unit_2, r2)):
        if report.z_expect is not None:
            test = TestResult(
                statistic=report.z_expect,
                p_value=report.p_expect,
                significant_01=report.sig01,
                significant_05=report.sig05,
            )
            rows.append(CompareRow(f"z_expect[{label}]", report.z_expect, None, test))
        else:
            note = "; ".join(n for n in report.notes if "expectation" in n) or None
            rows.append(CompareRow(f"z_expect[{label}]", None, None, note=note))

    rows.append(_rcr_row(ctx, unit_1, unit_2, ids_1, ids_2))
    rows.append(_mean_ratio_row(ctx, ids_1, ids_2))
    return ComparisonReport(
        unit_1=unit_1,
        unit_2=unit_2,
        reference=ctx.reference,
        rows=rows,
        notes=(EXPECTATION_NOTE,),
    )


def _share_test_row(
    name: str,
    share_1: float,
    share_2: float,
    value_1: float,
    value_2: float,
    total: float,
) -> CompareRow:
    n = round(total)
    try:
        test = two_proportion_z(min(round(value_1), n), n, min(round(value_2), n), n)
        return CompareRow(name, share_1, share_2, test)
    except ValueError as exc:
        return CompareRow(name, share_1, share_2, note=str(exc))


def _tested_row(
    name: str,
    value_1: float,
    value_2: float,
    x1: int,
    n1: int,
    x2: int,
    n2: int,
) -> CompareRow:
    try:
        return CompareRow(name, value_1, value_2, two_proportion_z(x1, n1, x2, n2))
    except ValueError as exc:
        return CompareRow(name, value_1, value_2, note=str(exc))


def _rcr_row(
    ctx: ReportContext,
    unit_1: str,
    unit_2: str,
    ids_1: tuple[str, ...],
    ids_2: tuple[str, ...],
) -> CompareRow:
    values = []
    for ids in (ids_1, ids_2):
        try:
            values.append(rcr(_rates_for(ctx, ids)))
        except ValueError:
            values.append(None)
    return CompareRow("rcr", values[0], values[1], note=RCR_NOTE)


def _mean_ratio_row(
    ctx: ReportContext, ids_1: tuple[str, ...], ids_2: tuple[str, ...]
) -> CompareRow:
    """Mean observed/expected ratio per unit, tested via its standard errors.

    Unlike the ratio of means, the mean of per-paper ratios is a normal
    average with a standard deviation, so a summary-statistics z-test between
    the two units is legitimate. Positive z means the first unit is higher.
    """
    stats = []
    for ids in (ids_1, ids_2):
        try:
            rates = _rates_for(ctx, ids)
            mean, sd = mean_ocr_ecr(rates)
            stats.append((mean, sd / math.sqrt(len(ids))))
        except ValueError:
            stats.append((None, None))
    (m1, se1), (m2, se2) = stats
    if m1 is None or m2 is None:
        return CompareRow("m_ocr_ecr", m1, m2, note="expected rates unavailable")
    try:
        test = mean_diff_from_summary(m2, se2, m1, se1)  # z > 0: first unit higher
        return CompareRow("m_ocr_ecr", m1, m2, test)
    except ValueError as exc:
        return CompareRow("m_ocr_ecr", m1, m2, note=str(exc))


def _rates_for(ctx: ReportContext, ids: tuple[str, ...]) -> RelativeRates:
    ordered = sorted(ids)
    expected = expected_citation_rates(
        ordered,
        ctx.whole_counts,
        ctx.papers,
        match_doc_type=ctx.config.citable_types is not None,
    )
    observed = [ctx.whole_counts[pid] for pid in ordered]
    return RelativeRates(tuple(observed), tuple(expected))


def unit_relative_rates(ctx: ReportContext, unit: str) -> RelativeRates:
    """Observed counts and reference-derived expected rates for one unit."""
    return _rates_for(ctx, ctx.unit_ids(unit))


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _fmt(value: float | None, decimals: int) -> str:
    return "" if value is None else f"{value:.{decimals}f}"


def _fmt_int(value: int | None) -> str:
    return "" if value is None else str(value)


def _fmt_bool(value: bool | None) -> str:
    return "" if value is None else ("true" if value else "false")


def render_report_csv(report: IndicatorReport) -> str:
    """Fixed-schema csv: indicators at 3 decimals, shares/proportions at 2."""
    lines = [CSV_COLUMNS]
    for u in report.units:
        lines.append(
            ",".join(
                [
                    u.unit,
                    str(u.n_pubs),
                    _fmt(u.total_cit, 0),
                    _fmt(u.total_cit_frac, 3),
                    _fmt(u.if_classic, 3),
                    _fmt(u.if_moving, 3),
                    _fmt(u.quasi_if, 3),
                    _fmt(u.i3_q, 3),
                    _fmt(u.i3_pr6, 3),
                    _fmt(u.pct_i3, 2),
                    _fmt(u.pct_pr6, 2),
                    _fmt(u.top_k[10.0], 2),
                    _fmt(u.top_k[25.0], 2),
                    _fmt(u.z_expect, 3),
                    _fmt_bool(u.sig01),
                    _fmt_bool(u.sig05),
                    _fmt_int(u.rank_if),
                    _fmt_int(u.rank_i3),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _unit_dict(u: UnitReport) -> dict:
    return {
        "unit": u.unit,
        "n_pubs": u.n_pubs,
        "total_cit": u.total_cit,
        "total_cit_frac": u.total_cit_frac,
        "if": u.if_classic,
        "if_sem": u.if_sem,
        "if_sem_reason": u.if_sem_reason,
        "if_moving": u.if_moving,
        "if_moving_fallback": u.if_moving_fallback,
        "if_moving_sem": None,
        "if_moving_sem_reason": "two-year moving average of dependent ratios",
        "quasi_if": u.quasi_if,
        "quasi_if_sem": u.quasi_if_sem,
        "quasi_if_sem_reason": u.quasi_if_sem_reason,
        "i3_q": u.i3_q,
        "i3_pr6": u.i3_pr6,
        "pct_i3": u.pct_i3,
        "pct_pr6": u.pct_pr6,
        "top_k": {f"{k:g}": v for k, v in sorted(u.top_k.items())},
        "z_expect": u.z_expect,
        "p_expect": u.p_expect,
        "sig01": u.sig01,
        "sig05": u.sig05,
        "rank_if": u.rank_if,
        "rank_i3": u.rank_i3,
        "notes": list(u.notes),
    }


def render_report_json(report: IndicatorReport) -> str:
    """Full-precision json rendering of the report."""
    payload = {
        "reference_set": {
            "label": report.reference.label,
            "size": report.reference.size,
            "pub_window": list(report.reference.pub_window),
            "cite_window": list(report.reference.cite_window),
        },
        "settings": {
            "year": report.year,
            "counting": report.counting,
            "scheme": {
                "boundaries": list(report.scheme.boundaries),
                "weights": list(report.scheme.weights),
            },
            "top_k": [f"{k:g}" for k in report.top_k],
        },
        "columns": CSV_COLUMNS.split(","),
        "units": [_unit_dict(u) for u in report.units],
        "notes": list(report.notes),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def compare_decimals(indicator: str) -> int:
    """Rendering precision per indicator family (counts, shares, indicators)."""
    if indicator in ("n_pubs", "total_cit"):
        return 0
    if indicator.startswith(("pct_", "top")):
        return 2
    return 3


def render_compare_csv(report: ComparisonReport) -> str:
    lines = ["indicator,value_1,value_2,z,p_value,sig01,sig05,note"]
    for row in report.rows:
        test = row.test
        decimals = compare_decimals(row.indicator)
        lines.append(
            ",".join(
                [
                    row.indicator,
                    _fmt(row.value_1, decimals) if row.value_1 is not None else "",
                    _fmt(row.value_2, decimals) if row.value_2 is not None else "",
                    _fmt(test.statistic, 3) if test else "",
                    _fmt(test.p_value, 4) if test else "",
                    _fmt_bool(test.significant_01 if test else None),
                    _fmt_bool(test.significant_05 if test else None),
                    f'"{row.note}"' if row.note else "",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def render_compare_json(report: ComparisonReport) -> str:
    payload = {
        "unit_1": report.unit_1,
        "unit_2": report.unit_2,
        "reference_set": {
            "label": report.reference.label,
            "size": report.reference.size,
        },
        "rows": [
            {
                "indicator": row.indicator,
                "value_1": row.value_1,
                "value_2": row.value_2,
                "z": row.test.statistic if row.test else None,
                "p_value": row.test.p_value if row.test else None,
                "sig01": row.test.significant_01 if row.test else None,
                "sig05": row.test.significant_05 if row.test else None,
                "note": row.note,
            }
            for row in report.rows
        ],
        "notes": list(report.notes),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
