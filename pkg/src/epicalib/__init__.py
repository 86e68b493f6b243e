"""Bayesian calibration engine for compartmental and cohort disease models.

Random-walk Metropolis-Hastings with block updates, Gaussian calibration
targets with a chi-square goodness of fit, informative priors, and
non-identifiability diagnostics (Gelman-Rubin, ridge correlations, flat
posteriors, likelihood profiling). Ships two case studies: a three-parameter
SIS compartmental model and a 26-parameter HPV cohort microsimulation.
"""

from .targets import (
    Target,
    TargetSet,
    chi_square_p_value,
    gof_total,
    hpv_target_set,
    load_target_set,
    log_likelihood,
)
from .priors import (
    Gamma,
    ImproperUniform,
    JointPrior,
    Normal,
    Uniform,
    joint_log_prior,
    log_prior_density,
    sample_prior,
)
from .sampler import (
    Chain,
    ChainSet,
    ProposalSpec,
    SamplerOptions,
    acceptance_probability,
    log_posterior,
    make_posterior,
    propose,
    run_chain,
    run_chains,
)
from .sis import (
    SisParameters,
    SisSimConfig,
    make_sis_model,
    simulate_sis,
    simulate_sis_trajectory,
    sis_case_study_targets,
    sis_equilibrium_analytic,
)
from .hpv import (
    CohortConfig,
    CohortResult,
    HealthState,
    Strain,
    apply_multipliers,
    identity_multipliers,
    load_baseline_table,
    make_hpv_model,
    shipped_baseline_table,
    simulate_cohort,
    state_census,
)
from .diagnostics import (
    DiagnosticThresholds,
    GelmanRubinResult,
    NonIdentifiabilityReport,
    autocorrelation,
    cross_correlation,
    detect_nonidentifiability,
    gelman_rubin,
    prior_posterior_summary,
    profile_likelihood,
)

__version__ = "0.1.0"
