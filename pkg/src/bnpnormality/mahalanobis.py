"""Reduction of an m-variate sample to squared Mahalanobis distances.

The distances d_i^2 = (y_i - ybar)^T S^-1 (y_i - ybar) are computed through a
Cholesky solve of the sample covariance S (never an explicit inverse).  A
non-positive-definite S raises SingularCovariance: in that case the
chi-square approximation underlying the test is meaningless and silently
regularizing would corrupt it.
"""
import warnings

import numpy as np

from .errors import IllConditionedCovarianceWarning, SingularCovariance

__all__ = [
    "as_data_matrix",
    "sample_mean",
    "sample_covariance",
    "squared_mahalanobis",
]

# warn when (max diag / min diag)^2 of the Cholesky factor exceeds this
_CONDITION_LIMIT = 1e12
# declare rank deficiency when a pivot explains less than ~10 eps of its column
_RANK_EPS = 10.0 * np.finfo(np.float64).eps


def as_data_matrix(data):
    """Validate and return an (n, m) float64 data matrix: n >= 2, finite entries."""
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"data must be a 2-D matrix, got ndim={x.ndim}")
    n, m = x.shape
    if n < 2:
        raise ValueError(f"need at least 2 observations, got n={n}")
    if m < 1:
        raise ValueError("need at least 1 variable")
    if not np.all(np.isfinite(x)):
        raise ValueError("data contains non-finite entries")
    return x


def sample_mean(data):
    """Column means of the data matrix."""
    return as_data_matrix(data).mean(axis=0)


def sample_covariance(data):
    """Unbiased (n-1 divisor) sample covariance matrix, exactly symmetric."""
    x = as_data_matrix(data)
    xc = x - x.mean(axis=0)
    s = xc.T @ xc / (x.shape[0] - 1)
    return (s + s.T) / 2.0


def squared_mahalanobis(data):
    """Squared sample Mahalanobis distance of every observation to the mean.

    Raises SingularCovariance when the covariance factorization fails
    (n <= m or collinear columns); warns when it is close to singular.
    The entries always satisfy sum(d^2) = m (n - 1).
    """
    x = as_data_matrix(data)
    xc = x - x.mean(axis=0)
    s = xc.T @ xc / (x.shape[0] - 1)
    s = (s + s.T) / 2.0
    try:
        chol = np.linalg.cholesky(s)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance(
            f"sample covariance is not positive definite (n={x.shape[0]}, m={x.shape[1]})"
        ) from exc
    diag = np.diagonal(chol)
    # rounding can let an exactly rank-deficient matrix through dpotrf; the
    # per-pivot unexplained-variance fraction is then pure noise at eps scale
    with np.errstate(invalid="ignore", divide="ignore"):
        unexplained = diag ** 2 / np.diagonal(s)
    if not np.all(np.isfinite(unexplained)) or np.any(unexplained <= _RANK_EPS):
        raise SingularCovariance(
            f"sample covariance is numerically rank deficient "
            f"(n={x.shape[0]}, m={x.shape[1]})"
        )
    ratio = (diag.max() / diag.min()) ** 2
    if ratio > _CONDITION_LIMIT:
        warnings.warn(
            f"sample covariance is ill-conditioned (diagonal ratio {ratio:.3e}); "
            "squared distances may be unstable",
            IllConditionedCovarianceWarning,
            stacklevel=2,
        )
    z = np.linalg.solve(chol, xc.T)
    return np.einsum("ij,ij->j", z, z)
