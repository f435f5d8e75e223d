"""Bayesian nonparametric assessment of multivariate normality.

The m-variate sample is reduced to squared Mahalanobis distances, a Dirichlet
process prior is placed on their distribution, and the concentration of the
Anderson-Darling distance to the chi-square(m) law is compared between prior
and posterior through a relative belief ratio with strength calibration.
"""
from .dirichlet import (
    ChiSquareBase,
    DPApproximation,
    PosteriorMixture,
    StdNormalBase,
    UniformBase,
    sample_base,
    sample_dp,
)
from .distance import ad_distance, ad_prior_mean, ad_prior_variance, cvm_distance
from .errors import (
    BnpNormalityError,
    DegenerateGrid,
    DegenerateWeights,
    DomainError,
    EmptyInput,
    IllConditionedCovarianceWarning,
    InvalidSpec,
    ParseError,
    SingularCovariance,
)
from .mahalanobis import sample_covariance, sample_mean, squared_mahalanobis
from .rbtest import (
    DistanceSample,
    RBReport,
    TestConfig,
    prior_quantile_grid,
    rb_estimate,
    run_test,
)
from .rng import RngStream, derive_seed
from .simgen import AlternativeSpec, generate, table1_family
from .special import (
    chi2_cdf,
    chi2_cdf_fn,
    chi2_quantile,
    gamma_upper_quantile,
    reg_lower_incomplete_gamma,
)

__version__ = "0.1.0"
