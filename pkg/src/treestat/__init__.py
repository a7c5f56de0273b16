"""Statistical inference for random rooted trees."""

from .errors import (
    ArityMismatch,
    ArityViolation,
    CLTUnsafe,
    DepthExceeded,
    EmptySample,
    EnumerationTooLarge,
    InvalidVertex,
    OrphanVertex,
    ParseError,
    TreeStatError,
    UnsupportedModel,
)
from .inference import (
    NullDistribution,
    TestReport,
    clt_covariance_check,
    critical_value,
    p_value,
    simulate_null,
    test_one_sample,
    test_two_sample,
)
from .io import format_tree, parse_tree, read_null, read_sample, write_null, write_sample
from .mean import MeanInterval, brute_force_mean, empirical_mean, mean_from_marginals
from .metric import MetricParams, distance, distance_otter_neveu, g_empirical, g_from_marginals, phi
from .sampling import (
    GWModel,
    MarginalProfile,
    PointMass,
    RngSpec,
    exact_cov,
    joint_presence,
    marginal_profile,
    sample_indicators,
    sample_tree,
    sample_trees,
)
from .statistic import (
    DeltaProfile,
    SupResult,
    brute_force_sup,
    empirical_marginals,
    one_sample_statistic,
    sup_deviation,
    truncation_bound,
    two_sample_statistic,
)
from .tree_core import (
    Tree,
    TreeSample,
    Vertex,
    depth,
    enumerate_trees,
    from_terminals,
    terminals,
    validate,
)

__version__ = "0.1.0"
