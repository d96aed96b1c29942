"""Diagnostics for nested sampling calculations.

Quantifies implementation-specific errors (errors beyond the intrinsic
stochasticity of the nested sampling algorithm), runs statistical
consistency tests between runs, and builds the data behind two diagnostic
diagrams.  Ships a perfect nested sampler (exact constrained sampling for
the spherical Gaussian) and a deliberately imperfect slice-sampling one, so
every diagnostic can be exercised end to end.
"""

from ._kernels import backend_name
from .diagnostics import (
    DiagnosticReport,
    ErrorBudget,
    PairTestResult,
    bootstrap_distance,
    error_budget,
    error_budgets,
    holm_bonferroni,
    imp_fraction,
    ks_pvalue,
    ks_statistic,
    pairwise_bootstrap_distances,
    pairwise_thread_tests,
    sigma_combined,
    sigma_imp,
    sigma_imp_rmse,
    thread_estimates,
    thread_ks_test,
)
from .errors import (
    BirthChainAmbiguous,
    BirthContourMissing,
    FormatVersionError,
    SliceBracketError,
)
from .estimators import (
    EstimatorSpec,
    ParamFunction,
    estimate,
    importance_weights,
    log_evidence,
    parse_estimator,
)
from .io import (
    load_run,
    parse_dead_birth,
    read_native,
    save_run,
    write_dead_birth,
    write_native,
)
from .plotdata import (
    ContourBand,
    LogXDiagram,
    logx_diagram,
    posterior_mass_curve,
    posterior_uncertainty_band,
    thread_trace,
)
from .resample import (
    BootstrapSample,
    DensityCurve,
    bootstrap_run,
    bootstrap_std,
    bootstrap_values,
    weighted_kde,
)
from .runs import (
    NSRun,
    SamplePoint,
    Thread,
    combine_runs,
    decompose_threads,
    live_point_counts,
    logx_expected,
    simulate_logx,
    validate_run,
)
from .samplers import (
    LikelihoodSpec,
    SamplerSettings,
    gaussian_loglike,
    generate_runs,
    loggamma_logpdf,
    loggamma_mix_loglike,
    perfect_ns_gaussian,
    slice_ns,
    true_logz,
)

__version__ = "0.1.0"
