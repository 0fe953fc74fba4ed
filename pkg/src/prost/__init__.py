"""Probabilistic term rewriting analysis toolkit.

Checks syntactic criteria of PTRSs, decides which strategy-transfer and
modularity theorems apply, and gathers numeric evidence (exact bounded
exploration and Monte Carlo) for almost-sure termination and expected
derivation lengths.
"""

from .analyzer import (
    AnalysisReport,
    AnalyzeOptions,
    Claim,
    Decomposition,
    analyze,
    applicable_theorems,
    decompose,
)
from .criteria import (
    Overlap,
    PropertyReport,
    check_linearities,
    check_no_os_or,
    check_spare,
    check_wcr_bounded,
    critical_overlaps,
    run_criteria,
)
from .errors import ProstError
from .explore import (
    AdversarialBounds,
    McEstimate,
    Metrics,
    Rst,
    adversarial_bounds,
    build_rst,
    conv_prefix,
    edl_prefix,
    export_rst,
    import_rst,
    monte_carlo,
)
from .parser import parse_ptrs, parse_term, render_ptrs
from .ptrs import (
    MultiDistribution,
    ProbRule,
    Ptrs,
    classify_symbols,
    embed_trs,
    enumerate_basic_terms,
    is_basic,
    is_normal_form,
    make_ptrs,
)
from .rewriting import (
    Redex,
    SchedulerPolicy,
    Strategy,
    apply_redex,
    enumerate_redexes,
    make_policy,
    schedule,
)
from .terms import (
    App,
    Position,
    Symbol,
    Term,
    Var,
    apply_subst,
    compare_positions,
    match_term,
    replace_at,
    subterm_at,
    unify,
)
from .transforms import (
    GeneratorExtension,
    SplitWitness,
    basic_variant,
    constructor_variant,
    decoded_variant,
    detect_infinite_splits,
    disjoint_abstraction,
    generator_rules,
    variants,
)

__version__ = "0.1.0"
