"""Moments of the sample variance under general, i.i.d., AR(1) and normal
sampling, with Monte Carlo and characteristic-function diagnostics."""

__version__ = "0.1.0"

from .errors import DomainError, InputError, RangeError, VarMomentsError
from .symsum import (
    PowerSums,
    SymmetricMoments,
    batch_symmetric_moments,
    brute_force_symmetric_moments,
    pair_moments,
    power_sums,
    symmetric_moments,
)
from .moments import (
    Ar1Spec,
    CrossMomentModel,
    ExpectedSymmetricMoments,
    IidMomentModel,
    bias_decomposition,
    expected_s2_ar1,
    expected_s2_general,
    expected_s4,
    geometric_weighted_sum,
    s4_coefficients,
    var_s2_general,
    var_s2_iid,
    var_s2_normal,
)
from .samplestats import (
    VarianceBreakdown,
    sample_mean,
    sample_variance,
    sample_variance_pairs,
    sample_variance_ustat,
    variance_breakdown,
)
from .stochastic import (
    DistributionSpec,
    ReplicationReport,
    draw_sample,
    replication_rng,
    run_replications,
    simulate_ar1,
)
from .diagnostics import (
    DependenceSummary,
    EcfCurve,
    IndependenceReport,
    Thresholds,
    dependence_summary,
    distance_correlation,
    ecf_curvature,
    normality_independence_report,
)
from .verify import run_verification

_SUBMODULES = {"cli", "diagnostics", "errors", "moments", "samplestats", "stochastic", "symsum", "verify"}
__all__ = sorted(name for name in dir() if not name.startswith("_") and name not in _SUBMODULES)
