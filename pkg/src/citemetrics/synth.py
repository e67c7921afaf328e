"""Seeded synthetic corpora for demonstrations and oracle tests.

Citation counts are drawn from a configurable skewed distribution, quantized
to integers, and then *realized* as explicit citing papers (one citing paper
per citation, with configurable NRef), so whole and fractional counting are
both exercisable on the generated data. Generation is single-threaded and
fully determined by the seed: the same spec yields the same corpus, bit for
bit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Union

from .indicators import citation_counts, impact_factor, window_counts
from .ingest import build_reference_set, by_journals, resolve_citations
from .percentiles import i3, quantile_ranks
from .records import CitationGraph, DocType, JournalRecord, PaperRecord, ReferenceSet

CITING_JOURNAL = "SRC"


# ---------------------------------------------------------------------------
# Count distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogNormal:
    """Log-normal citation counts; visibly skewed at the default sigma."""

    mu: float = 0.0
    sigma: float = 1.2

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def sample(self, rng: random.Random) -> float:
        return rng.lognormvariate(self.mu, self.sigma)

    def describe(self) -> str:
        return f"lognormal:{self.mu}:{self.sigma}"


@dataclass(frozen=True)
class Pareto:
    """Pareto-tailed citation counts starting at ``xmin``."""

    alpha: float = 2.5
    xmin: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha <= 1:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")
        if self.xmin < 1:
            raise ValueError(f"xmin must be >= 1, got {self.xmin}")

    def sample(self, rng: random.Random) -> float:
        return self.xmin * rng.paretovariate(self.alpha)

    def describe(self) -> str:
        return f"pareto:{self.alpha}:{self.xmin}"


@dataclass(frozen=True)
class Constant:
    """Every paper cited exactly ``value`` times."""

    value: int = 1

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError(f"constant count must be >= 0, got {self.value}")

    def sample(self, rng: random.Random) -> float:
        return float(self.value)

    def describe(self) -> str:
        return f"constant:{self.value}"


Distribution = Union[LogNormal, Pareto, Constant]


def parse_distribution(token: str) -> Distribution:
    """Parse ``lognormal:mu:sigma`` / ``pareto:alpha:xmin`` / ``constant:c``."""
    parts = token.strip().split(":")
    kind, args = parts[0].lower(), parts[1:]
    try:
        if kind == "lognormal":
            return LogNormal(*(float(a) for a in args))
        if kind == "pareto":
            return Pareto(*(float(a) for a in args))
        if kind == "constant":
            return Constant(*(int(a) for a in args))
    except TypeError:
        raise ValueError(f"wrong number of parameters in distribution {token!r}") from None
    raise ValueError(f"unknown distribution {token!r}")


def quantize(value: float) -> int:
    """Integer citation count for a raw draw (floor, clipped at zero)."""
    return max(0, int(value))


# ---------------------------------------------------------------------------
# Corpus specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JournalLayout:
    """Per-journal overrides inside a :class:`SynthSpec`."""

    journal_id: str
    n_papers: int
    distribution: Distribution | None = None
    citer_n_refs: int | None = None

    def __post_init__(self) -> None:
        if self.n_papers < 1:
            raise ValueError(f"journal {self.journal_id}: n_papers must be >= 1")
        if self.citer_n_refs is not None and self.citer_n_refs < 1:
            raise ValueError(f"journal {self.journal_id}: citer_n_refs must be >= 1")


@dataclass(frozen=True)
class SynthSpec:
    """A deterministic recipe for a synthetic corpus.

    Without a journal layout, ``n_papers`` cited papers appear in a single
    journal ``J1``. Layout entries add journals with their own sizes and,
    optionally, their own count distribution and citing-side NRef — larger
    NRef per field is what makes fractional counting bite.
    """

    n_papers: int
    distribution: Distribution
    seed: int
    journal_layout: tuple[JournalLayout, ...] = ()
    base_year: int = 2010
    citer_n_refs: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "journal_layout", tuple(self.journal_layout))
        if not self.journal_layout and self.n_papers < 1:
            raise ValueError("n_papers must be >= 1")
        if self.citer_n_refs < 1:
            raise ValueError("citer_n_refs must be >= 1")
        ids = [j.journal_id for j in self.journal_layout]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate journal ids in layout")

    def layouts(self) -> tuple[JournalLayout, ...]:
        if self.journal_layout:
            return self.journal_layout
        return (JournalLayout("J1", self.n_papers),)


def parse_synth_spec(text: str) -> SynthSpec:
    """Parse the key=value spec format used by the ``synth`` command.

    Recognized keys: ``n_papers``, ``distribution``, ``seed``, ``base_year``,
    ``citer_n_refs``, and repeatable ``journal`` lines of the form
    ``journal = ID N [dist=<spec>] [citer_n_refs=<int>]``.
    """
    values: dict[str, str] = {}
    layouts: list[JournalLayout] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"spec line {lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key == "journal":
            tokens = raw.split()
            if len(tokens) < 2:
                raise ValueError(f"spec line {lineno}: journal needs 'ID N [options]'")
            dist: Distribution | None = None
            nrefs: int | None = None
            for token in tokens[2:]:
                opt, _, val = token.partition("=")
                if opt == "dist":
                    dist = parse_distribution(val)
                elif opt == "citer_n_refs":
                    nrefs = int(val)
                else:
                    raise ValueError(f"spec line {lineno}: unknown journal option {opt!r}")
            layouts.append(
                JournalLayout(tokens[0], int(tokens[1]), distribution=dist, citer_n_refs=nrefs)
            )
        else:
            if key not in ("n_papers", "distribution", "seed", "base_year", "citer_n_refs"):
                raise ValueError(f"spec line {lineno}: unknown key {key!r}")
            values[key] = raw
    if "seed" not in values:
        raise ValueError("spec is missing 'seed'")
    return SynthSpec(
        n_papers=int(values.get("n_papers", "0" if layouts else "100")),
        distribution=parse_distribution(values.get("distribution", "lognormal:0:1.2")),
        seed=int(values["seed"]),
        journal_layout=tuple(layouts),
        base_year=int(values.get("base_year", "2010")),
        citer_n_refs=int(values.get("citer_n_refs", "1")),
    )


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def _realize(
    targets: list[PaperRecord],
    counts: list[int],
    citer_n_refs: list[int],
    year: int,
    start_index: int = 1,
) -> list[PaperRecord]:
    """Create one citing paper per citation, in target order."""
    citers: list[PaperRecord] = []
    index = start_index
    for target, count, n_refs in zip(targets, counts, citer_n_refs):
        for _ in range(count):
            citers.append(
                PaperRecord(
                    paper_id=f"C{index:07d}",
                    journal_id=CITING_JOURNAL,
                    pub_year=year,
                    doc_type=DocType.ARTICLE,
                    n_refs=n_refs,
                    refs=(target.paper_id,),
                )
            )
            index += 1
    return citers


def generate_corpus(spec: SynthSpec) -> tuple[list[PaperRecord], CitationGraph]:
    """Generate papers and their resolved citation graph from *spec*.

    Cited papers alternate between the two years preceding ``base_year``;
    every citation comes from a distinct ``base_year`` paper in the shared
    citing journal.
    """
    rng = random.Random(spec.seed)
    targets: list[PaperRecord] = []
    counts: list[int] = []
    nrefs: list[int] = []
    for layout in spec.layouts():
        dist = layout.distribution or spec.distribution
        citer_n_refs = layout.citer_n_refs or spec.citer_n_refs
        for i in range(layout.n_papers):
            targets.append(
                PaperRecord(
                    paper_id=f"{layout.journal_id}-{i:05d}",
                    journal_id=layout.journal_id,
                    pub_year=spec.base_year - 1 - (i % 2),
                    doc_type=DocType.ARTICLE,
                    n_refs=0,
                    refs=(),
                )
            )
            counts.append(quantize(dist.sample(rng)))
            nrefs.append(citer_n_refs)
    citers = _realize(targets, counts, nrefs, spec.base_year)
    papers = targets + citers
    return papers, resolve_citations(papers)


def journal_records_for(papers: list[PaperRecord]) -> list[JournalRecord]:
    """Minimal journal records covering every journal id in *papers*."""
    seen = sorted({p.journal_id for p in papers})
    return [JournalRecord(jid, jid, frozenset()) for jid in seen]


# ---------------------------------------------------------------------------
# The dominance scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DominanceScenario:
    """Two journals whose impact-factor and integrated-impact orders reverse.

    ``journal_a`` is broad: a long low-cited tail, a mid band, and a highly
    cited head. ``journal_b`` is small with uniformly moderate citation
    counts. A matches or beats B in every rank class and holds the larger
    integrated impact, yet B's mean citation rate — and therefore its impact
    factor — is higher. Averages and integrals order these journals
    differently.
    """

    papers: tuple[PaperRecord, ...]
    graph: CitationGraph
    reference_set: ReferenceSet
    journal_a: str
    journal_b: str
    year: int


# Citation counts per paper of each journal. The tail/mid/head structure of A
# keeps its mean below B's 9 while its rank-class census dominates B's.
_SCENARIO_A = {0: 240, 12: 120, 13: 120}
_SCENARIO_A_HEAD = range(14, 54)  # 40 distinct head counts
_SCENARIO_B = {9: 40}


def dominance_scenario(year: int = 2010) -> DominanceScenario:
    """Build and engine-verify the rank-reversal demonstration corpus."""
    journal_a, journal_b = "JBROAD", "JPEAK"
    targets: list[PaperRecord] = []
    counts: list[int] = []

    def add_journal(journal_id: str, per_count: dict[int, int]) -> None:
        i = 0
        for count in sorted(per_count):
            for _ in range(per_count[count]):
                targets.append(
                    PaperRecord(
                        paper_id=f"{journal_id}-{i:05d}",
                        journal_id=journal_id,
                        pub_year=year - 1 - (i % 2),
                        doc_type=DocType.ARTICLE,
                        n_refs=0,
                        refs=(),
                    )
                )
                counts.append(count)
                i += 1

    head = {count: 1 for count in _SCENARIO_A_HEAD}
    add_journal(journal_a, {**_SCENARIO_A, **head})
    add_journal(journal_b, dict(_SCENARIO_B))

    citers = _realize(targets, counts, [1] * len(targets), year)
    papers = targets + citers
    graph = resolve_citations(papers)
    reference_set = build_reference_set(
        papers,
        by_journals([journal_a, journal_b]),
        pub_window=(year - 2, year - 1),
        cite_window=(year, year),
        label="dominance scenario",
    )
    _verify_dominance(papers, graph, reference_set, journal_a, journal_b, year)
    return DominanceScenario(
        papers=tuple(papers),
        graph=graph,
        reference_set=reference_set,
        journal_a=journal_a,
        journal_b=journal_b,
        year=year,
    )


def _verify_dominance(
    papers, graph, reference_set, journal_a: str, journal_b: str, year: int
) -> None:
    """Engine-side validation of the scenario's three guarantees."""
    counts = citation_counts(reference_set.member_ids, graph, papers, reference_set.cite_window)
    distribution = quantile_ranks(reference_set, counts)
    ids_a = [p.paper_id for p in papers if p.journal_id == journal_a]
    ids_b = [p.paper_id for p in papers if p.journal_id == journal_b]

    census_a = {cls: 0 for cls in distribution.class_counts}
    census_b = {cls: 0 for cls in distribution.class_counts}
    for pid in ids_a:
        census_a[distribution.assignment(pid).pr6_class] += 1
    for pid in ids_b:
        census_b[distribution.assignment(pid).pr6_class] += 1
    if not all(census_a[cls] >= census_b[cls] for cls in census_a):
        raise RuntimeError(f"class dominance violated: {census_a} vs {census_b}")

    mean_a = sum(counts[pid] for pid in ids_a) / len(ids_a)
    mean_b = sum(counts[pid] for pid in ids_b) / len(ids_b)
    if not mean_a < mean_b:
        raise RuntimeError(f"mean citation rates not reversed: {mean_a} vs {mean_b}")

    score_a = i3(distribution, subset=ids_a)
    score_b = i3(distribution, subset=ids_b)
    if not score_a > score_b:
        raise RuntimeError(f"integrated impact not dominant: {score_a} vs {score_b}")

    if_a = impact_factor(window_counts(journal_a, year, graph, papers))
    if_b = impact_factor(window_counts(journal_b, year, graph, papers))
    if not if_b > if_a:
        raise RuntimeError(f"impact factors not reversed: {if_a} vs {if_b}")
