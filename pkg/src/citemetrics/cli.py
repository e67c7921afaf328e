"""Command-line front end.

Subcommands: ``ingest-check``, ``compute``, ``rank``, ``compare``, ``synth``.
Global flags ``--config``, ``--out-dir``, ``--format`` come before the
subcommand. Exit codes: 0 success, 1 computation error, 2 usage/input error.

The config file is plain ``key = value`` text ('#' comments allowed):

    counting = whole | fractional     # metric feeding the percentile ranking
    citable_types = article;review    # empty/absent: every doc type counts
    scheme_file = path/to/scheme.txt  # lines 'lower_bound,weight'
    year = 2009                       # census year t (or pass --year)
    pub_window = 2007-2008            # default: t-2 .. t-1
    cite_window = 2009-2009           # default: t .. t
    top_k = 10,25                     # top-k% proportions to report
    reference = all | category:XA | journals:J1;J2
    set.LABEL = P1;P2;P3              # declared paper-set unit (repeatable)
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .ingest import (
    ParseError,
    all_papers,
    by_category,
    by_journals,
    dumps_journals,
    dumps_papers,
    load_journals,
    load_papers,
    resolve_citations,
)
from .percentiles import EvaluationScheme
from .records import DocType, JournalRecord, PaperRecord
from .report import (
    CSV_COLUMNS,
    EngineConfig,
    ReportContext,
    compare_decimals,
    compare_report,
    compute_report,
    render_compare_csv,
    render_compare_json,
    render_report_csv,
    render_report_json,
)
from .synth import generate_corpus, journal_records_for, parse_synth_spec

RANK_CHOICES = (
    "if",
    "if_moving",
    "quasi_if",
    "i3_q",
    "i3_pr6",
    "pct_i3",
    "pct_pr6",
    "top10",
    "top25",
    "total_cit",
    "total_cit_frac",
    "n_pubs",
)

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_INPUT = 2


class ConfigError(ValueError):
    """Malformed config file."""


class InputError(Exception):
    """Unusable inputs (bad spec, unresolvable reference set, unknown unit)."""


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------


def _parse_window(raw: str, key: str) -> tuple[int, int]:
    parts = raw.split("-")
    if len(parts) != 2:
        raise ConfigError(f"{key} must look like 2007-2008, got {raw!r}")
    return int(parts[0]), int(parts[1])


def parse_config(text: str, base_dir: Path | None = None) -> EngineConfig:
    """Parse the key=value config format into an :class:`EngineConfig`."""
    values: dict[str, str] = {}
    paper_sets: dict[str, tuple[str, ...]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key.startswith("set."):
            label = key[4:]
            if not label:
                raise ConfigError(f"config line {lineno}: empty set label")
            paper_sets[label] = tuple(p.strip() for p in raw.split(";") if p.strip())
        else:
            values[key] = raw

    known = {
        "counting", "citable_types", "scheme_file", "year",
        "pub_window", "cite_window", "top_k", "reference",
    }
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")

    citable: frozenset[DocType] | None = None
    if values.get("citable_types"):
        citable = frozenset(
            DocType.coerce(t) for t in values["citable_types"].split(";") if t.strip()
        )

    scheme = None
    if values.get("scheme_file"):
        scheme_path = Path(values["scheme_file"])
        if base_dir is not None and not scheme_path.is_absolute():
            scheme_path = base_dir / scheme_path
        if not scheme_path.exists():
            raise ConfigError(f"no such scheme file: {scheme_path}")
        scheme = EvaluationScheme.from_file(scheme_path)

    reference = all_papers()
    raw_ref = values.get("reference", "all")
    if raw_ref != "all":
        kind, _, arg = raw_ref.partition(":")
        if kind == "category" and arg:
            reference = by_category(arg)
        elif kind == "journals" and arg:
            reference = by_journals(j.strip() for j in arg.split(";") if j.strip())
        else:
            raise ConfigError(f"bad reference selector {raw_ref!r}")

    top_k: tuple[float, ...] = (10.0, 25.0)
    if values.get("top_k"):
        top_k = tuple(float(k) for k in values["top_k"].split(",") if k.strip())

    try:
        return EngineConfig(
            counting=values.get("counting", "whole"),
            citable_types=citable,
            scheme=scheme,
            year=int(values["year"]) if "year" in values else None,
            pub_window=_parse_window(values["pub_window"], "pub_window")
            if "pub_window" in values
            else None,
            cite_window=_parse_window(values["cite_window"], "cite_window")
            if "cite_window" in values
            else None,
            top_k=top_k,
            reference=reference,
            paper_sets=paper_sets,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Input plumbing
# ---------------------------------------------------------------------------


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such input: {path}")
    return p


def _load_config(args: argparse.Namespace) -> EngineConfig:
    if args.config:
        path = _require_file(args.config)
        config = parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)
    else:
        config = EngineConfig()
    if getattr(args, "year", None) is not None:
        config.year = args.year
    if getattr(args, "fallback_if", False):
        config.fallback_if = True
    if getattr(args, "jobs", None):
        config.jobs = args.jobs
    return config


def _load_corpus(
    args: argparse.Namespace,
) -> tuple[list[PaperRecord], list[JournalRecord] | None]:
    papers = load_papers(_require_file(args.papers))
    journals = None
    if getattr(args, "journals", None):
        journals = load_journals(_require_file(args.journals))
    return papers, journals


def _write_outputs(out_dir: Path, outputs: dict[str, str]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, content in outputs.items():
        (out_dir / name).write_text(content, encoding="utf-8")
        print(f"wrote {out_dir / name}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_ingest_check(args: argparse.Namespace) -> int:
    papers, journals = _load_corpus(args)
    graph = resolve_citations(papers)
    listed_refs = sum(len(p.refs) for p in papers)
    print(f"papers: {len(papers)}")
    if journals is not None:
        print(f"journals: {len(journals)}")
    print(f"listed references: {listed_refs}")
    print(f"resolved edges: {len(graph.edges)}")
    print(f"unresolved references: {graph.unresolved_count}")
    print(f"collapsed duplicate references: {graph.duplicate_count}")
    years = sorted({p.pub_year for p in papers})
    if years:
        print(f"publication years: {years[0]}..{years[-1]}")
    return EXIT_OK


def _build_context(args: argparse.Namespace) -> ReportContext:
    """Input phase shared by compute/rank/compare; failures are input errors."""
    papers, journals = _load_corpus(args)
    config = _load_config(args)
    graph = resolve_citations(papers)
    try:
        return ReportContext.build(papers, journals, graph, config)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _cmd_compute(args: argparse.Namespace) -> tuple[int, dict[str, str]]:
    ctx = _build_context(args)
    report = compute_report(ctx)
    outputs: dict[str, str] = {}
    if args.format in (None, "csv"):
        outputs["report.csv"] = render_report_csv(report)
    if args.format in (None, "json"):
        outputs["report.json"] = render_report_json(report)
    return EXIT_OK, outputs


def _cmd_rank(args: argparse.Namespace) -> tuple[int, dict[str, str]]:
    ctx = _build_context(args)
    report = compute_report(ctx)

    def value_of(u):
        if args.by == "top10":
            return u.top_k[10.0]
        if args.by == "top25":
            return u.top_k[25.0]
        attr = {"if": "if_classic"}.get(args.by, args.by)
        return getattr(u, attr)

    values = {u.unit: value_of(u) for u in report.units}
    defined = sorted({v for v in values.values() if v is not None}, reverse=True)
    rank_of = {v: i + 1 for i, v in enumerate(defined)}
    rows = sorted(
        values.items(), key=lambda kv: (kv[1] is None, -kv[1] if kv[1] is not None else 0, kv[0])
    )
    lines = ["unit,value,rank"]
    for unit, value in rows:
        rank = rank_of.get(value, "")
        rendered = "" if value is None else f"{value:.3f}"
        lines.append(f"{unit},{rendered},{rank}")
        print(f"{rank or '-':>4}  {unit:<24} {rendered}")
    outputs = {}
    if args.format in (None, "csv"):
        outputs[f"rank_{args.by}.csv"] = "\n".join(lines) + "\n"
    if args.format in (None, "json"):
        payload = [
            {"unit": unit, "value": value, "rank": rank_of.get(value)}
            for unit, value in rows
        ]
        outputs[f"rank_{args.by}.json"] = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    return EXIT_OK, outputs


def _cmd_compare(args: argparse.Namespace) -> tuple[int, dict[str, str]]:
    ctx = _build_context(args)
    try:
        ctx.unit_ids(args.unit_1)
        ctx.unit_ids(args.unit_2)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    report = compare_report(ctx, args.unit_1, args.unit_2)
    for row in report.rows:
        decimals = compare_decimals(row.indicator)
        v1 = "" if row.value_1 is None else f"{row.value_1:.{decimals}f}"
        v2 = "" if row.value_2 is None else f"{row.value_2:.{decimals}f}"
        z = f"z={row.test.statistic:+.3f} p={row.test.p_value:.4f}" if row.test else ""
        note = f"[{row.note}]" if row.note else ""
        print(f"{row.indicator:<22} {v1:>12} {v2:>12}  {z} {note}".rstrip())
    outputs = {}
    if args.format in (None, "csv"):
        outputs["compare.csv"] = render_compare_csv(report)
    if args.format in (None, "json"):
        outputs["compare.json"] = render_compare_json(report)
    return EXIT_OK, outputs


def _cmd_synth(args: argparse.Namespace) -> tuple[int, dict[str, str]]:
    spec_path = _require_file(args.spec)
    try:
        spec = parse_synth_spec(spec_path.read_text(encoding="utf-8"))
        papers, graph = generate_corpus(spec)
    except ValueError as exc:
        raise InputError(f"invalid synthesis spec: {exc}") from exc
    journals = journal_records_for(papers)
    corpus_fmt = "jsonl" if args.format == "json" else "csv"
    corpus_name = "papers.jsonl" if corpus_fmt == "jsonl" else "papers.csv"
    manifest = {
        "seed": spec.seed,
        "base_year": spec.base_year,
        "distribution": spec.distribution.describe(),
        "citer_n_refs": spec.citer_n_refs,
        "journals": [
            {
                "journal_id": layout.journal_id,
                "n_papers": layout.n_papers,
                "distribution": (layout.distribution or spec.distribution).describe(),
                "citer_n_refs": layout.citer_n_refs or spec.citer_n_refs,
            }
            for layout in spec.layouts()
        ],
        "n_papers_total": len(papers),
        "n_edges": len(graph.edges),
        "files": [corpus_name, "journals.csv"],
    }
    outputs = {
        corpus_name: dumps_papers(papers, corpus_fmt),
        "journals.csv": dumps_journals(journals),
        "manifest.json": json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    }
    return EXIT_OK, outputs


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citemetrics",
        description="Citation indicator engine: impact factors, percentile ranks, "
        "fractional counting, and significance tests.",
    )
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--out-dir", default=".", help="directory for report files")
    parser.add_argument(
        "--format",
        choices=("csv", "json"),
        help="restrict output to one format (default: write both)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_corpus_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--papers", required=True, help="papers file (csv or jsonl)")
        p.add_argument("--journals", help="journals csv file")
        p.add_argument("--year", type=int, help="census year t (overrides config)")

    p_check = sub.add_parser("ingest-check", help="parse inputs and print diagnostics")
    p_check.add_argument("--papers", required=True)
    p_check.add_argument("--journals")

    p_compute = sub.add_parser(
        "compute",
        help="compute the full indicator report",
        description="Compute the indicator table for every unit in the reference set.",
        epilog=f"report columns (in order):\n  {CSV_COLUMNS}",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    add_corpus_args(p_compute)
    p_compute.add_argument(
        "--fallback-if",
        action="store_true",
        help="substitute the classic IF when the moving average is undefined",
    )
    p_compute.add_argument("--jobs", type=int, default=1, help="parallel unit workers")

    p_rank = sub.add_parser("rank", help="rank units by one indicator")
    add_corpus_args(p_rank)
    p_rank.add_argument("--by", choices=RANK_CHOICES, default="i3_q")
    p_rank.add_argument("--jobs", type=int, default=1)

    p_compare = sub.add_parser("compare", help="compare two units side by side")
    add_corpus_args(p_compare)
    p_compare.add_argument("unit_1")
    p_compare.add_argument("unit_2")

    p_synth = sub.add_parser("synth", help="generate a synthetic corpus")
    p_synth.add_argument("--spec", required=True, help="synthesis spec file")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == "ingest-check":
            return _cmd_ingest_check(args)
        if args.command == "compute":
            code, outputs = _cmd_compute(args)
        elif args.command == "rank":
            code, outputs = _cmd_rank(args)
        elif args.command == "compare":
            code, outputs = _cmd_compare(args)
        else:
            code, outputs = _cmd_synth(args)
    except (FileNotFoundError, ParseError, ConfigError, InputError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE

    _write_outputs(Path(args.out_dir), outputs)
    return code


if __name__ == "__main__":
    sys.exit(main())
