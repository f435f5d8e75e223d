"""Seeded generators for the null and alternative sampling distributions of
the simulation study: correlated normals, heavy-tailed products, spherical
laws, lognormals, multivariate t, and a two-component normal mixture.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .rng import RngStream

__all__ = [
    "Normal", "Exponential", "Cauchy", "StudentT", "LogNormal", "ChiSquare",
    "PearsonVII",
    "MvNormal", "MvT", "MvLogNormal", "Spherical", "PearsonVIIProduct",
    "ProductMarginals", "NormalMixture",
    "AlternativeSpec", "generate",
    "equicorrelated", "a_matrix", "b_matrix", "table1_family", "FAMILY_BUILDERS",
]


# ---------------------------------------------------------------- univariate

@dataclass(frozen=True)
class Normal:
    mean: float = 0.0
    sd: float = 1.0

    def sample(self, rng, size):
        return self.mean + self.sd * rng.standard_normal(size)


@dataclass(frozen=True)
class Exponential:
    rate: float

    def sample(self, rng, size):
        return rng.exponential(scale=1.0 / self.rate, size=size)


@dataclass(frozen=True)
class Cauchy:
    loc: float = 0.0
    scale: float = 1.0

    def sample(self, rng, size):
        return self.loc + self.scale * rng.standard_cauchy(size)


@dataclass(frozen=True)
class StudentT:
    df: float

    def sample(self, rng, size):
        return rng.standard_t(self.df, size=size)


@dataclass(frozen=True)
class LogNormal:
    meanlog: float = 0.0
    sdlog: float = 1.0

    def sample(self, rng, size):
        return rng.lognormal(mean=self.meanlog, sigma=self.sdlog, size=size)


@dataclass(frozen=True)
class ChiSquare:
    df: float

    def sample(self, rng, size):
        return rng.chisquare(self.df, size=size)


@dataclass(frozen=True)
class PearsonVII:
    """Pearson type VII, i.e. a location-scale Student t."""

    loc: float
    scale: float
    df: float

    def sample(self, rng, size):
        return self.loc + self.scale * rng.standard_t(self.df, size=size)


# -------------------------------------------------------------- multivariate

def _spd_cholesky(cov, what):
    cov = np.asarray(cov, dtype=np.float64)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise InvalidSpec(f"{what} must be a square matrix")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12):
        raise InvalidSpec(f"{what} must be symmetric")
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise InvalidSpec(f"{what} must be positive definite") from exc


@dataclass(frozen=True)
class MvNormal:
    mean: tuple
    cov: tuple

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        chol = _spd_cholesky(self.cov, "covariance")
        if mean.shape != (chol.shape[0],):
            raise InvalidSpec("mean length must match covariance dimension")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", np.asarray(self.cov, dtype=np.float64))
        object.__setattr__(self, "_chol", chol)

    @property
    def dim(self):
        return self.mean.size

    def sample(self, rng, n):
        z = rng.standard_normal((n, self.dim))
        return self.mean + z @ self._chol.T


@dataclass(frozen=True)
class MvT:
    """Multivariate t: loc + L z / sqrt(w / df), w ~ chi-square(df)."""

    df: float
    loc: tuple
    scale: tuple

    def __post_init__(self):
        if not self.df > 0:
            raise InvalidSpec("df must be positive")
        loc = np.asarray(self.loc, dtype=np.float64)
        chol = _spd_cholesky(self.scale, "scale matrix")
        if loc.shape != (chol.shape[0],):
            raise InvalidSpec("location length must match scale dimension")
        object.__setattr__(self, "loc", loc)
        object.__setattr__(self, "_chol", chol)

    @property
    def dim(self):
        return self.loc.size

    def sample(self, rng, n):
        z = rng.standard_normal((n, self.dim))
        w = rng.chisquare(self.df, size=n)
        return self.loc + (z @ self._chol.T) / np.sqrt(w / self.df)[:, None]


@dataclass(frozen=True)
class MvLogNormal:
    """exp of a multivariate normal; mean/cov parameterize the underlying normal."""

    mean: tuple
    cov: tuple

    def __post_init__(self):
        object.__setattr__(self, "_normal", MvNormal(self.mean, self.cov))

    @property
    def dim(self):
        return self._normal.dim

    def sample(self, rng, n):
        return np.exp(self._normal.sample(rng, n))


@dataclass(frozen=True)
class Spherical:
    """Radius drawn from `radial` (the law of the Euclidean norm) times a
    uniformly random unit direction."""

    radial: object
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidSpec("dimension must be >= 1")

    def sample(self, rng, n):
        z = rng.standard_normal((n, self.dim))
        norms = np.linalg.norm(z, axis=1)
        # resample the (probability-zero) degenerate rows rather than dividing by 0
        while np.any(norms == 0.0):
            bad = norms == 0.0
            z[bad] = rng.standard_normal((int(bad.sum()), self.dim))
            norms = np.linalg.norm(z, axis=1)
        r = np.asarray(self.radial.sample(rng, n), dtype=np.float64)
        return z * (r / norms)[:, None]


@dataclass(frozen=True)
class PearsonVIIProduct:
    """m iid Pearson VII (location-scale t) marginals."""

    df: float
    dim: int
    loc: float = 1.0
    scale: float = 1.0

    def sample(self, rng, n):
        return self.loc + self.scale * rng.standard_t(self.df, size=(n, self.dim))


@dataclass(frozen=True)
class ProductMarginals:
    """Independent, possibly different, univariate marginals."""

    laws: tuple

    def __post_init__(self):
        if len(self.laws) < 1:
            raise InvalidSpec("need at least one marginal")
        object.__setattr__(self, "laws", tuple(self.laws))

    @property
    def dim(self):
        return len(self.laws)

    def sample(self, rng, n):
        cols = [law.sample(rng, n) for law in self.laws]
        return np.column_stack(cols)


@dataclass(frozen=True)
class NormalMixture:
    """w N(mean1, cov1) + (1 - w) N(mean2, cov2), Bernoulli component choice."""

    w: float
    mean1: tuple
    cov1: tuple
    mean2: tuple
    cov2: tuple

    def __post_init__(self):
        if not 0.0 < self.w < 1.0:
            raise InvalidSpec(f"mixture weight must be in (0, 1), got {self.w}")
        c1 = MvNormal(self.mean1, self.cov1)
        c2 = MvNormal(self.mean2, self.cov2)
        if c1.dim != c2.dim:
            raise InvalidSpec("mixture components must share a dimension")
        object.__setattr__(self, "_c1", c1)
        object.__setattr__(self, "_c2", c2)

    @property
    def dim(self):
        return self._c1.dim

    def sample(self, rng, n):
        pick = rng.random(n) < self.w
        out = np.empty((n, self.dim))
        k = int(pick.sum())
        if k:
            out[pick] = self._c1.sample(rng, k)
        if n - k:
            out[~pick] = self._c2.sample(rng, n - k)
        return out


@dataclass(frozen=True)
class AlternativeSpec:
    """A sampling law plus the number of observations to draw from it."""

    family: object
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidSpec(f"sample size must be >= 2, got {self.n}")

    @property
    def m(self):
        return self.family.dim


def generate(spec, rng_stream):
    """Draw spec.n iid rows from spec.family; deterministic per RngStream."""
    rng = rng_stream.generator() if isinstance(rng_stream, RngStream) else rng_stream
    x = np.asarray(spec.family.sample(rng, spec.n), dtype=np.float64)
    if x.shape != (spec.n, spec.m):
        raise InvalidSpec(f"family produced shape {x.shape}, expected {(spec.n, spec.m)}")
    return x


# ----------------------------------------------------- named study families

def equicorrelated(m, diag, off):
    return np.full((m, m), off) + np.eye(m) * (diag - off)


def a_matrix(m):
    """1's on the diagonal, 0.1 elsewhere."""
    return equicorrelated(m, 1.0, 0.1)


def b_matrix(m):
    """0.25 on the diagonal, 0.2 elsewhere."""
    return equicorrelated(m, 0.25, 0.2)


FAMILY_BUILDERS = {
    # null
    "normal-A": lambda m: MvNormal(np.zeros(m), a_matrix(m)),
    "pearson7-10": lambda m: PearsonVIIProduct(10.0, m),
    # alternatives
    "exp-cauchy": lambda m: ProductMarginals(
        (Exponential(0.5),) + tuple(Cauchy() for _ in range(m - 1))),
    "normal-t1": lambda m: ProductMarginals(
        (Normal(),) + tuple(StudentT(1.0) for _ in range(m - 1))),
    "pearson7-1": lambda m: PearsonVIIProduct(1.0, m),
    "spherical-lognormal": lambda m: Spherical(LogNormal(0.0, 0.25), m),
    "spherical-chi5": lambda m: Spherical(ChiSquare(5.0), m),
    "lognormal-B": lambda m: MvLogNormal(np.zeros(m), b_matrix(m)),
    "t3": lambda m: MvT(3.0, np.zeros(m), np.eye(m)),
    "nmix": lambda m: NormalMixture(
        0.9, np.full(m, 5.0), a_matrix(m), np.full(m, -5.0), a_matrix(m)),
}


def table1_family(name, m):
    """Named simulation-study family of dimension m."""
    try:
        builder = FAMILY_BUILDERS[name]
    except KeyError:
        raise InvalidSpec(
            f"unknown family {name!r}; known: {', '.join(sorted(FAMILY_BUILDERS))}"
        ) from None
    if m < 1 or (name in ("exp-cauchy", "normal-t1") and m < 2):
        raise InvalidSpec(f"dimension m={m} invalid for family {name!r}")
    return builder(int(m))
