"""citemetrics: citation indicators, percentile ranks, and their statistics.

Ingests paper/journal/citation records and computes journal and document-set
impact indicators — classic and moving-average impact factors, fractionally
counted quasi impact factors, integrated impact (I3) and percentile-rank
scores, top-k% excellence proportions — together with the significance tests
needed to compare them.
"""

from .fractional import FractionalTally, fractional_tally, fractional_weight, quasi_if_fractional
from .indicators import (
    CitationWindowCounts,
    RelativeRates,
    citation_counts,
    expected_citation_rates,
    impact_factor,
    mean_ocr_ecr,
    moving_average_if,
    rcr,
    total_citations,
    window_counts,
)
from .ingest import (
    ParseError,
    all_papers,
    build_reference_set,
    by_category,
    by_ids,
    by_journals,
    dumps_journals,
    dumps_papers,
    load_journals,
    load_papers,
    parse_journals,
    parse_papers,
    resolve_citations,
)
from .percentiles import (
    SIX_CLASS_SCHEME,
    EvaluationScheme,
    PercentileAssignment,
    PercentileDistribution,
    PercentileRanker,
    PR6Class,
    classify,
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
    midranks,
    normal_two_sided_p,
    pearson_r,
    sem,
    spearman_rho,
    two_proportion_z,
)
from .synth import (
    Constant,
    DominanceScenario,
    JournalLayout,
    LogNormal,
    Pareto,
    SynthSpec,
    dominance_scenario,
    generate_corpus,
    parse_synth_spec,
)

__version__ = "0.1.0"
