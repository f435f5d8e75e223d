"""Finite approximations of Dirichlet processes.

A draw is built from N base-measure atoms paired with gamma-quantile weights:
with E_1..E_{N+1} iid exponential(1) and Gamma_i = E_1 + ... + E_i, the raw
weight of atom i is the upper gamma(a/N, 1) quantile at Gamma_i / Gamma_{N+1};
normalized weights are monotone nonincreasing before the atom sort.  The same
machinery serves the prior (chi-square base) and the posterior, whose base is
the convex mixture a/(a+n) * prior + n/(a+n) * empirical.
"""
from dataclasses import dataclass, field

import numpy as np

from . import special
from .errors import DegenerateWeights
from .rng import RngStream

__all__ = [
    "ChiSquareBase",
    "UniformBase",
    "StdNormalBase",
    "PosteriorMixture",
    "DPApproximation",
    "sample_base",
    "sample_dp",
]


@dataclass(frozen=True)
class ChiSquareBase:
    """Chi-square(m) base measure, sampled by inverse cdf."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"degrees of freedom must be >= 1, got {self.m}")

    def draw(self, rng, size):
        u = rng.random(size)
        return special._chi2_quantile_many(u, self.m)

    def cdf(self, x):
        return special._chi2_cdf_many(np.atleast_1d(np.asarray(x, dtype=np.float64)), self.m)


@dataclass(frozen=True)
class UniformBase:
    """Uniform(0, 1) base measure; handy because the prior distance law is base-free."""

    def draw(self, rng, size):
        return rng.random(size)

    def cdf(self, x):
        return np.clip(np.atleast_1d(np.asarray(x, dtype=np.float64)), 0.0, 1.0)


@dataclass(frozen=True)
class StdNormalBase:
    """Standard-normal base measure.

    Deliberately mismatched to nonnegative distance data; exists to reproduce
    the prior-data-conflict pathology where the test saturates.
    """

    def draw(self, rng, size):
        return rng.standard_normal(size)


@dataclass(frozen=True)
class PosteriorMixture:
    """Posterior base measure: prior component with probability a/(a+n), else
    a uniformly random observed distance (with replacement)."""

    a: float
    distances: np.ndarray
    component: object = None  # prior base; defaults to chi-square via run_test

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=np.float64)
        if d.ndim != 1 or d.size == 0:
            raise ValueError("distances must be a nonempty 1-D array")
        if not self.a > 0:
            raise ValueError(f"concentration must be positive, got {self.a}")
        object.__setattr__(self, "distances", d)

    @property
    def prior_weight(self):
        return self.a / (self.a + self.distances.size)

    def draw(self, rng, size):
        pick_prior = rng.random(size) < self.prior_weight
        out = np.empty(size, dtype=np.float64)
        k = int(pick_prior.sum())
        if k:
            out[pick_prior] = self.component.draw(rng, k)
        idx = rng.integers(0, self.distances.size, size=size - k)
        out[~pick_prior] = self.distances[idx]
        return out


@dataclass(frozen=True)
class DPApproximation:
    """One draw P_N = sum_i J_i delta_{Y_i}: sorted atoms with co-permuted jumps."""

    atoms: np.ndarray
    jumps: np.ndarray
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=np.float64)
        jumps = np.asarray(self.jumps, dtype=np.float64)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "jumps", jumps)
        if not self.validate:
            return
        if atoms.ndim != 1 or atoms.shape != jumps.shape or atoms.size == 0:
            raise ValueError("atoms and jumps must be matching nonempty 1-D arrays")
        if np.any(np.diff(atoms) < 0.0):
            raise ValueError("atoms must be sorted nondecreasing")
        if np.any(jumps < 0.0):
            raise ValueError("jumps must be nonnegative")
        if abs(jumps.sum() - 1.0) > 1e-12:
            raise ValueError(f"jumps must sum to 1, got {jumps.sum()!r}")

    @property
    def size(self):
        return self.atoms.size


def sample_base(base, rng):
    """One draw from a base measure; rng is an RngStream or numpy Generator."""
    if isinstance(rng, RngStream):
        rng = rng.generator()
    return float(base.draw(rng, 1)[0])


def _raw_dp_draw(a, base, N, rng):
    """Atoms in draw order plus raw (unnormalized, nonincreasing) weights."""
    atoms = np.asarray(base.draw(rng, N), dtype=np.float64)
    e = rng.standard_exponential(N + 1)
    gammas = np.cumsum(e)
    ratios = gammas[:N] / gammas[N]
    raw = special._gamma_upper_quantiles_sorted(a / N, ratios)
    return atoms, raw


def sample_dp(a, base, N, rng_stream):
    """Approximate draw from DP(a, base) with N atoms.

    Individual underflowed weights are kept at zero (the atom contributes
    nothing); only an all-zero weight vector raises DegenerateWeights.
    """
    if not a > 0:
        raise ValueError(f"concentration must be positive, got {a}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    rng = rng_stream.generator() if isinstance(rng_stream, RngStream) else rng_stream
    atoms, raw = _raw_dp_draw(a, base, N, rng)
    total = raw.sum()
    if not total > 0.0:
        raise DegenerateWeights(
            f"all {N} raw weights underflowed to zero (a={a}, a/N={a / N:.3e}); "
            "reduce N or increase a"
        )
    jumps = raw / total
    order = np.argsort(atoms, kind="stable")
    return DPApproximation(atoms[order], jumps[order], validate=False)
