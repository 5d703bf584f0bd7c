"""Mutual information, Fisher information and MMSE for parametric channels."""

from .bounds import (
    DiagonalGaussianMimo,
    bound_threshold_zero_bias,
    build_report,
    equivocation_upper_bound,
    gaussian_mi_snr_derivative_check,
    mi_lower_bound,
    mimo_mi_lower_bound,
)
from .channels import gaussian_closed_forms, poisson_marginal, poisson_mi, poisson_mmse
from .core import (
    BracketError,
    ConfigurationError,
    DegenerateEvidenceError,
    DiscretePrior,
    DivergenceError,
    DomainError,
    GaussianLinear,
    GaussianPrior,
    InfoboundError,
    InfoReport,
    NegExpPrior,
    PoissonLinear,
    QuadConfig,
    QuadratureError,
    SeriesError,
    TabulatedPrior,
    channel_logpdf,
    channel_score,
    prior_density,
)
from .estimate import PosteriorSummary, mmse, mmse_two_measurements, posterior_mean, posterior_variance_profile
from .info import (
    chapman_robbins_K,
    differential_entropy,
    fi_profile,
    fisher_information,
    mi_second_order,
    mi_second_order_mimo,
    mi_upper_bound_discrete,
    mutual_information_exact,
)
from .mc import McConfig, McEstimate, mc_mi, mc_mmse
from .nuisance import (
    NuisanceGaussianParams,
    fi_block_matrix,
    fi_marginalized_vs_conditional,
    mi_with_nuisance,
    mi_without_nuisance,
    mmse_estimators,
    mmse_with_without_nuisance,
)

__version__ = "0.1.0"
