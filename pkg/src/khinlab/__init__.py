"""Exact verification of weighted Khintchine inequalities for Rademacher sums."""
from .constants import (
    EULER_GAMMA,
    euler_limit,
    gamma_fn,
    haagerup_Bq,
    khintchine_upper_constant,
    l0_tail_threshold_classic,
    l0_tail_threshold_refined,
    pz_lower_bound,
    zero_mass_threshold,
)
from .errors import (
    BelowThreshold,
    DimensionTooLarge,
    DomainError,
    KhinlabError,
    MalformedWeight,
    NoValidDelta,
    ParseError,
)
from .montecarlo import McConfig, mc_moment, mc_tail
from .rademacher import (
    CoefficientVector,
    MomentReport,
    exact_distribution,
    exact_moment,
    exact_tail,
    prob_zero,
)
from .verifier import (
    CaseGenerator,
    SuiteReport,
    check_fourth_moment,
    check_l0_proposition,
    check_paley_zygmund,
    check_sandwich,
    check_zero_mass_bound,
    counterexample_demo,
    run_suite,
)
from .weighted import ConstantsReport, ThresholdMode, comparability_factors, extract_constants
from .weights import WeightSpec, delta0, weight_stats

__version__ = "0.1.0"
