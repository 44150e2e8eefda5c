"""Statistically validated networks.

Disparity-filter backbones of weighted networks, hypergeometric validation
of bipartite projections, multiple-test corrections, and community cores
with partition-agreement scores on noisy benchmarks.
"""

__version__ = "0.1.0"

from .graph import (
    BipartiteNetwork,
    FormatError,
    ProjectedNetwork,
    WeightedNetwork,
    degrees_strengths,
    load_bipartite,
    load_weighted,
    project,
)
from .pvalues import (
    HypergeomParams,
    PValueRecord,
    binom_tail_at_least,
    fwer_at_least_one,
    hypergeom_pmf,
    log_choose,
    pvalue_disparity,
    pvalue_over,
    pvalue_under,
)
from .corrections import CorrectionResult, TestBattery, bonferroni, correct, fdr
from .disparity import Backbone, disparity_backbone, disparity_pvalues
from .svn import ValidatedNetwork, validate_one_tail, validate_two_tail
from .community import (
    MetricUndefinedError,
    Partition,
    adjusted_rand,
    adjusted_wallace,
    community_cores,
    louvain,
    modularity,
)
from .benchmark import BenchmarkSpec, RewirePlan, generate, rewire, robustness_experiment
