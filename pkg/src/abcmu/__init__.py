"""Likelihood-free Bayesian inference that keeps the errors.

Samplers target the joint distribution of model parameters and per-summary
signed discrepancies, so a fit and its criticism come out of the same run:
marginal error densities concentrated away from zero flag which features of
the data a model cannot reproduce.
"""

from .accel import NUMBA_ENV_FLAG, using_numba
from .core import (
    AbcKernel,
    Dataset,
    DiscrepancyPipeline,
    ErrorVector,
    GenerativeModel,
    KernelValidationReport,
    ParameterVector,
    PriorSpec,
    SummaryVector,
    compute_errors,
    compute_summaries,
    kernel_weight,
    validate_kernel,
)
from .diagnostics import (
    ConvergenceSummary,
    DensityEstimate1D,
    ErrorDensityReport,
    HeatGrid2D,
    convergence_and_ess,
    distribution_distance,
    error_density_report,
    estimate_density_1d,
    heat_grid_2d,
    lattice_pmf,
    posterior_mean_error,
    weighted_quantile,
    zero_inclusion,
)
from .errors import (
    AbcmuError,
    BudgetExhaustedError,
    ConfigurationError,
    DegenerateWeightsError,
    InputError,
    InsufficientSampleError,
    InvariantBreachError,
    NumericalFaultError,
    TailMassError,
)
from .models import (
    ExponentialDataSource,
    M3Hyper,
    PRESETS,
    Preset,
    builtin_summary,
    get_preset,
    make_gaussian_location_model,
    make_gaussian_two_param_model,
    make_observed_dataset,
    make_pipeline,
    make_poisson_grid_model,
    make_poisson_model,
    prior_density_m3,
)
from .oracles import (
    DiscretePmf,
    GaussianErrorLaw,
    approx_bayes_factor,
    gaussian_fitted_posterior_error,
    gaussian_prior_predictive_error,
    poisson_bruteforce_target,
    poisson_marginal_likelihood,
    poisson_posterior_error,
    shifted_poisson_xi,
)
from .rng import make_rng, next_seed, spawn_seeds
from .samplers import (
    Chain,
    ChainState,
    ProposalSpec,
    RunConfig,
    WeightedSample,
    default_proposal,
    mh_ratio,
    run_app,
    run_mcmc,
    run_mcmc_chains,
    run_prior_predictive,
    run_rejection,
    run_wapp,
)

__all__ = [
    "AbcKernel",
    "AbcmuError",
    "BudgetExhaustedError",
    "Chain",
    "ChainState",
    "ConfigurationError",
    "ConvergenceSummary",
    "Dataset",
    "DegenerateWeightsError",
    "DensityEstimate1D",
    "DiscrepancyPipeline",
    "DiscretePmf",
    "ErrorDensityReport",
    "ErrorVector",
    "ExponentialDataSource",
    "GaussianErrorLaw",
    "GenerativeModel",
    "HeatGrid2D",
    "InputError",
    "InsufficientSampleError",
    "InvariantBreachError",
    "KernelValidationReport",
    "M3Hyper",
    "NUMBA_ENV_FLAG",
    "NumericalFaultError",
    "PRESETS",
    "ParameterVector",
    "Preset",
    "PriorSpec",
    "ProposalSpec",
    "RunConfig",
    "SummaryVector",
    "TailMassError",
    "WeightedSample",
    "approx_bayes_factor",
    "builtin_summary",
    "compute_errors",
    "compute_summaries",
    "convergence_and_ess",
    "default_proposal",
    "distribution_distance",
    "error_density_report",
    "estimate_density_1d",
    "gaussian_fitted_posterior_error",
    "gaussian_prior_predictive_error",
    "get_preset",
    "heat_grid_2d",
    "kernel_weight",
    "lattice_pmf",
    "make_gaussian_location_model",
    "make_gaussian_two_param_model",
    "make_observed_dataset",
    "make_pipeline",
    "make_poisson_grid_model",
    "make_poisson_model",
    "make_rng",
    "mh_ratio",
    "next_seed",
    "poisson_bruteforce_target",
    "poisson_marginal_likelihood",
    "poisson_posterior_error",
    "posterior_mean_error",
    "prior_density_m3",
    "run_app",
    "run_mcmc",
    "run_mcmc_chains",
    "run_prior_predictive",
    "run_rejection",
    "run_wapp",
    "shifted_poisson_xi",
    "spawn_seeds",
    "using_numba",
    "validate_kernel",
    "weighted_quantile",
    "zero_inclusion",
]
