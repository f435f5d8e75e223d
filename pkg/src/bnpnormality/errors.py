"""Exception and warning types shared across the package."""


class BnpNormalityError(Exception):
    """Base class for package-specific failures."""


class SingularCovariance(BnpNormalityError):
    """Sample covariance is not positive definite; the test cannot proceed."""


class DegenerateWeights(BnpNormalityError):
    """Every raw Dirichlet-process weight underflowed to zero.

    Signals that the truncation level N is far too large for the chosen
    concentration a (a/N so small that even the largest gamma quantile is
    below the smallest positive double).
    """


class DegenerateGrid(BnpNormalityError):
    """The prior quantile grid collapsed (too many coincident grid points)."""


class DomainError(BnpNormalityError, ValueError):
    """A cdf evaluator produced non-monotone values on a sorted atom grid."""


class InvalidSpec(BnpNormalityError, ValueError):
    """A sample-generator specification is invalid (e.g. non-SPD covariance)."""


class ParseError(BnpNormalityError):
    """A CSV cell could not be parsed as a number."""

    def __init__(self, line, column, message):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class EmptyInput(BnpNormalityError):
    """The input file contains no data rows."""


class IllConditionedCovarianceWarning(UserWarning):
    """Sample covariance is numerically close to singular; distances may be unstable."""
