"""Synthetic corpus generation and the engine-verified dominance scenario."""

from __future__ import annotations

import math
import random
import statistics

import pytest

from citemetrics import (
    Constant,
    JournalLayout,
    LogNormal,
    Pareto,
    SynthSpec,
    citation_counts,
    dominance_scenario,
    dumps_papers,
    generate_corpus,
    i3,
    impact_factor,
    parse_synth_spec,
    quantile_ranks,
    window_counts,
)
from citemetrics.synth import parse_distribution, quantize


def test_constant_distribution_cites_everyone_equally():
    spec = SynthSpec(n_papers=10, distribution=Constant(2), seed=1)
    papers, graph = generate_corpus(spec)
    received = {}
    for _, cited in graph.edges:
        received[cited] = received.get(cited, 0) + 1
    targets = [p for p in papers if p.journal_id == "J1"]
    assert len(targets) == 10
    assert all(received.get(t.paper_id, 0) == 2 for t in targets)


def test_same_spec_same_corpus():
    spec = SynthSpec(n_papers=50, distribution=LogNormal(0, 1.2), seed=99)
    papers_a, graph_a = generate_corpus(spec)
    papers_b, graph_b = generate_corpus(spec)
    assert papers_a == papers_b
    assert graph_a == graph_b
    assert dumps_papers(papers_a) == dumps_papers(papers_b)


def test_different_seed_differs():
    base = dict(n_papers=50, distribution=LogNormal(0, 1.2))
    a, _ = generate_corpus(SynthSpec(seed=1, **base))
    b, _ = generate_corpus(SynthSpec(seed=2, **base))
    assert a != b


def test_lognormal_sample_mean_matches_analytic_moment():
    mu, sigma, n = 0.0, 1.2, 100_000
    rng = random.Random(123)
    dist = LogNormal(mu, sigma)
    draws = [dist.sample(rng) for _ in range(n)]
    analytic_mean = math.exp(mu + sigma**2 / 2)
    analytic_var = (math.exp(sigma**2) - 1) * math.exp(2 * mu + sigma**2)
    se = math.sqrt(analytic_var / n)
    assert abs(statistics.fmean(draws) - analytic_mean) < 3 * se


def test_skewed_defaults_have_mean_above_median():
    for dist in (LogNormal(), Pareto()):
        spec = SynthSpec(n_papers=2000, distribution=dist, seed=7)
        papers, graph = generate_corpus(spec)
        counts = citation_counts(
            [p.paper_id for p in papers if p.journal_id == "J1"],
            graph, papers, (spec.base_year, spec.base_year),
        )
        values = sorted(counts.values())
        assert statistics.fmean(values) > statistics.median(values)


def test_parameter_validation():
    with pytest.raises(ValueError, match="sigma"):
        LogNormal(0, 0)
    with pytest.raises(ValueError, match="alpha"):
        Pareto(1.0, 1)
    with pytest.raises(ValueError, match="xmin"):
        Pareto(2.0, 0.5)
    with pytest.raises(ValueError, match="constant"):
        Constant(-1)
    with pytest.raises(ValueError, match="n_papers"):
        SynthSpec(n_papers=0, distribution=Constant(1), seed=1)
    with pytest.raises(ValueError, match="citer_n_refs"):
        SynthSpec(n_papers=1, distribution=Constant(1), seed=1, citer_n_refs=0)
    with pytest.raises(ValueError, match="duplicate journal"):
        SynthSpec(
            n_papers=0, distribution=Constant(1), seed=1,
            journal_layout=(JournalLayout("J", 1), JournalLayout("J", 2)),
        )


def test_quantize_floors_and_clips():
    assert quantize(2.9) == 2
    assert quantize(0.4) == 0
    assert quantize(-1.0) == 0


def test_parse_distribution_tokens():
    assert parse_distribution("lognormal:0:1.2") == LogNormal(0, 1.2)
    assert parse_distribution("pareto:2.5:1") == Pareto(2.5, 1)
    assert parse_distribution("constant:3") == Constant(3)
    with pytest.raises(ValueError, match="unknown distribution"):
        parse_distribution("zipf:2")
    with pytest.raises(ValueError, match="sigma"):
        parse_distribution("lognormal:0:-1")


def test_parse_synth_spec_with_journals():
    spec = parse_synth_spec(
        """
        # demo corpus
        seed = 9
        base_year = 2011
        journal = JA 20 dist=constant:2 citer_n_refs=30
        journal = JB 10
        distribution = pareto:3:1
        """
    )
    assert spec.seed == 9
    assert spec.base_year == 2011
    assert spec.journal_layout[0] == JournalLayout("JA", 20, Constant(2), 30)
    assert spec.journal_layout[1] == JournalLayout("JB", 10, None, None)
    assert spec.distribution == Pareto(3, 1)


def test_parse_synth_spec_requires_seed():
    with pytest.raises(ValueError, match="seed"):
        parse_synth_spec("n_papers = 10\n")


def test_parse_synth_spec_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown key"):
        parse_synth_spec("seed = 1\nn_paper = 10\n")


def test_per_journal_citer_nref_override():
    spec = SynthSpec(
        n_papers=0,
        distribution=Constant(1),
        seed=4,
        journal_layout=(
            JournalLayout("JA", 5, citer_n_refs=30),
            JournalLayout("JB", 5),
        ),
        citer_n_refs=2,
    )
    papers, graph = generate_corpus(spec)
    by_id = {p.paper_id: p for p in papers}
    for citing, cited in graph.edges:
        expected = 30 if cited.startswith("JA") else 2
        assert by_id[citing].n_refs == expected


def test_generated_years_alternate_before_base_year():
    spec = SynthSpec(n_papers=10, distribution=Constant(0), seed=3, base_year=2020)
    papers, _ = generate_corpus(spec)
    years = {p.pub_year for p in papers if p.journal_id == "J1"}
    assert years == {2018, 2019}


# ---------------------------------------------------------------------------
# Dominance scenario
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def scenario():
    return dominance_scenario()


def test_scenario_class_dominance(scenario):
    counts = citation_counts(
        scenario.reference_set.member_ids,
        scenario.graph,
        scenario.papers,
        scenario.reference_set.cite_window,
    )
    dist = quantile_ranks(scenario.reference_set, counts)
    census_a = {c: 0 for c in dist.class_counts}
    census_b = {c: 0 for c in dist.class_counts}
    for paper in scenario.papers:
        if paper.journal_id == scenario.journal_a:
            census_a[dist.assignment(paper.paper_id).pr6_class] += 1
        elif paper.journal_id == scenario.journal_b:
            census_b[dist.assignment(paper.paper_id).pr6_class] += 1
    for cls in census_a:
        assert census_a[cls] >= census_b[cls]
    assert sum(census_a.values()) > sum(census_b.values())


def test_scenario_mean_rates_reversed(scenario):
    counts = citation_counts(
        scenario.reference_set.member_ids,
        scenario.graph,
        scenario.papers,
        scenario.reference_set.cite_window,
    )
    means = {}
    for journal in (scenario.journal_a, scenario.journal_b):
        ids = [p.paper_id for p in scenario.papers if p.journal_id == journal]
        means[journal] = statistics.fmean(counts[pid] for pid in ids)
    assert means[scenario.journal_a] < means[scenario.journal_b]


def test_scenario_integrated_impact_and_if_rank_reversal(scenario):
    counts = citation_counts(
        scenario.reference_set.member_ids,
        scenario.graph,
        scenario.papers,
        scenario.reference_set.cite_window,
    )
    dist = quantile_ranks(scenario.reference_set, counts)
    ids_a = [p.paper_id for p in scenario.papers if p.journal_id == scenario.journal_a]
    ids_b = [p.paper_id for p in scenario.papers if p.journal_id == scenario.journal_b]
    impact_a = impact_factor(window_counts(scenario.journal_a, scenario.year, scenario.graph, scenario.papers))
    impact_b = impact_factor(window_counts(scenario.journal_b, scenario.year, scenario.graph, scenario.papers))
    score_a = i3(dist, subset=ids_a)
    score_b = i3(dist, subset=ids_b)
    assert impact_b > impact_a
    assert score_a > score_b  # the two indicators order the journals oppositely
