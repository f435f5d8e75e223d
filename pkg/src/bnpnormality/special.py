"""Self-contained gamma / chi-square special-function kernel.

Regularized incomplete gamma via the classical split: rising series below
x = shape + 1, modified Lentz continued fraction above it, plus a complement
series for the (small shape, x < 1.5) corner where Q = 1 - P would cancel.
Quantiles are found by safeguarded Newton iteration in log-x space so that
the tiny-shape gamma quantiles required by the Dirichlet-process weight
construction stay meaningful all the way down to the underflow floor
(quantiles below the smallest positive double are reported as 0.0,
consistently).

No external special-function library is used; numba only compiles the loops.
"""
import math

import numpy as np
from numba import njit

__all__ = [
    "reg_lower_incomplete_gamma",
    "chi2_cdf",
    "chi2_quantile",
    "gamma_upper_quantile",
    "chi2_cdf_fn",
]

_MAX_ITER = 2000
_TINY = 1e-300
# log of the smallest positive (subnormal) double; quantiles below it underflow
_LOG_FLOOR = math.log(5e-324)
_UNDERFLOW_T = -800.0  # sentinel in log space; exp() of it is exactly 0.0


@njit(cache=True, nogil=True)
def _pq_t(shape, x, t, lg):
    """(P, Q) regularized incomplete gamma pair; t = log(x), lg = lgamma(shape).

    Each branch computes its numerically small member directly, so both
    components carry full relative accuracy away from 1.
    """
    if x <= 0.0:
        return 0.0, 1.0
    lpre = shape * t - x - lg
    if x < shape + 1.0:
        llead = shape * t - lg - math.log(shape)  # log of x^s / Gamma(s+1)
        if x < 1.5 and llead > -0.7:
            # complement series: Q = -expm1(llead) - x^s/Gamma(s) * S,
            # S = sum_{n>=1} (-x)^n / (n! (s+n)); accurate where Q is small
            s = 0.0
            fac = 1.0
            n = 1
            while n < _MAX_ITER:
                fac *= -x / n
                term = fac / (shape + n)
                s += term
                if abs(term) <= 1e-17 * (abs(s) + 1e-30):
                    break
                n += 1
            q = -math.expm1(llead) - math.exp(shape * t - lg) * s
            if q <= 0.0:
                return 1.0, 0.0
            if q >= 1.0:
                return 0.0, 1.0
            return 1.0 - q, q
        # rising series: P = x^s e^-x / Gamma(s) * sum_k x^k / (s (s+1)...(s+k))
        term = 1.0 / shape
        total = term
        k = 1
        while k < _MAX_ITER:
            term *= x / (shape + k)
            total += term
            if term <= total * 1e-17:
                break
            k += 1
        if lpre > -700.0:
            p = math.exp(lpre) * total
        else:
            p = math.exp(lpre + math.log(total))
        if p >= 1.0:
            p = 1.0
        return p, 1.0 - p
    # modified Lentz continued fraction for Q
    b = x + 1.0 - shape
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    i = 1
    while i < _MAX_ITER:
        an = -i * (i - shape)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= 1e-16:
            break
        i += 1
    if h <= 0.0:
        return 1.0, 0.0
    if lpre > -700.0:
        q = math.exp(lpre) * h
    else:
        q = math.exp(lpre + math.log(h))
    if q >= 1.0:
        q = 1.0
    return 1.0 - q, q


@njit(cache=True, nogil=True)
def _pq(shape, x, lg):
    if x <= 0.0:
        return 0.0, 1.0
    return _pq_t(shape, x, math.log(x), lg)


@njit(cache=True, nogil=True)
def _norm_ppf(p):
    """Acklam rational approximation of the standard normal quantile.

    Relative error below 1.2e-9 -- used only to seed Newton iterations.
    """
    if p <= 0.0:
        return -38.0
    if p >= 1.0:
        return 38.0
    plow = 0.02425
    if p < plow:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((-7.784894002430293e-03 * q - 3.223964580411365e-01) * q
                   - 2.400758277161838e+00) * q - 2.549732539343734e+00) * q
                 + 4.374664141464968e+00) * q + 2.938163982698783e+00) / \
               ((((7.784695709041462e-03 * q + 3.224671290700398e-01) * q
                  + 2.445134137142996e+00) * q + 3.754408661907416e+00) * q + 1.0)
    if p > 1.0 - plow:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((-7.784894002430293e-03 * q - 3.223964580411365e-01) * q
                    - 2.400758277161838e+00) * q - 2.549732539343734e+00) * q
                  + 4.374664141464968e+00) * q + 2.938163982698783e+00) / \
               ((((7.784695709041462e-03 * q + 3.224671290700398e-01) * q
                  + 2.445134137142996e+00) * q + 3.754408661907416e+00) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((-3.969683028665376e+01 * r + 2.209460984245205e+02) * r
               - 2.759285104469687e+02) * r + 1.383577518672690e+02) * r
             - 3.066479806614716e+01) * r + 2.506628277459239e+00) * q / \
           (((((-5.447609879822406e+01 * r + 1.615858368580409e+02) * r
               - 1.556989798598866e+02) * r + 6.680131188771972e+01) * r
             - 1.328068155288572e+01) * r + 1.0)


@njit(cache=True, nogil=True)
def _initial_t(shape, p, lg):
    """Starting point (in t = log x) for the quantile iteration at P = p."""
    if shape > 1.0:
        # Wilson-Hilferty
        z = _norm_ppf(p)
        c = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * math.sqrt(shape))
        if c > 0.0:
            return math.log(shape) + 3.0 * math.log(c)
        return math.log(shape * 1e-4)
    # small-x power law: P ~ x^s / Gamma(s+1)
    t = (math.log(p) + lg + math.log(shape)) / shape
    cap = math.log(shape + 1.0)
    if t > cap:
        t = cap
    return t


@njit(cache=True, nogil=True)
def _refine_t(shape, plower, qupper, lg, t, lo, hi, tol):
    """Safeguarded Newton in t = log x solving P(shape, e^t) = plower.

    (plower, qupper) is the exact target pair; the residual is formed on the
    numerically small side.  Bracket invariant: root in [lo, hi].
    """
    if t < lo or t > hi:
        t = 0.5 * (lo + hi)
    small_side = plower <= 0.5
    for _ in range(200):
        x = math.exp(t)
        pp, qq = _pq_t(shape, x, t, lg)
        if small_side:
            g = pp - plower
        else:
            g = qupper - qq
        if g > 0.0:
            hi = t
        elif g < 0.0:
            lo = t
        else:
            return t
        if hi - lo <= tol * (1.0 + abs(t)):
            return 0.5 * (lo + hi)
        ld = shape * t - x - lg  # log of dP/dt = x * pdf(x)
        tn = 0.5 * (lo + hi)
        if ld > -700.0:
            cand = t - g * math.exp(-ld)
            if lo < cand < hi:
                tn = cand
        if abs(tn - t) <= tol * (1.0 + abs(tn)):
            return tn
        t = tn
    return t


@njit(cache=True, nogil=True)
def _lower_quantile_t(shape, plower, qupper, lg):
    """log-space gamma quantile; returns the underflow sentinel when x < 5e-324."""
    p_floor, _ = _pq(shape, 5e-324, lg)
    if plower <= p_floor:
        return _UNDERFLOW_T
    t_hi = math.log(shape + 40.0 * math.sqrt(shape) + 40.0)
    t0 = _initial_t(shape, plower, lg)
    return _refine_t(shape, plower, qupper, lg, t0, _LOG_FLOOR, t_hi, 1e-15)


@njit(cache=True, nogil=True)
def _gamma_lower_quantile(shape, p):
    lg = math.lgamma(shape)
    return math.exp(_lower_quantile_t(shape, p, 1.0 - p, lg))


@njit(cache=True, nogil=True)
def _gamma_upper_quantile(shape, p):
    lg = math.lgamma(shape)
    return math.exp(_lower_quantile_t(shape, 1.0 - p, p, lg))


@njit(cache=True, nogil=True)
def _gamma_upper_quantiles_sorted(shape, ps):
    """Upper-tail gamma quantiles at an increasing probability vector.

    Solutions decrease with i, so each solve is bracketed above by the
    previous one and warm-started by secant extrapolation.  Underflowed
    quantiles are 0.0 and, once hit, stay 0.0 for the rest of the vector.
    """
    n = ps.shape[0]
    out = np.empty(n)
    lg = math.lgamma(shape)
    p_floor, _ = _pq(shape, 5e-324, lg)
    t_hi = math.log(shape + 40.0 * math.sqrt(shape) + 40.0)
    t_prev = t_hi
    p_prev = 0.0
    slope = 0.0
    have_prev = False
    have_slope = False
    for i in range(n):
        plower = 1.0 - ps[i]
        if plower <= p_floor:
            for j in range(i, n):
                out[j] = 0.0
            return out
        if have_slope and ps[i] > p_prev:
            t0 = t_prev + slope * (ps[i] - p_prev)
        elif have_prev:
            t0 = t_prev
        else:
            t0 = _initial_t(shape, plower, lg)
        hi = t_prev if have_prev else t_hi
        t = _refine_t(shape, plower, ps[i], lg, t0, _LOG_FLOOR, hi, 1e-13)
        out[i] = math.exp(t)
        if have_prev and ps[i] > p_prev:
            slope = (t - t_prev) / (ps[i] - p_prev)
            have_slope = True
        t_prev = t
        p_prev = ps[i]
        have_prev = True
    return out


@njit(cache=True, nogil=True)
def _chi2_cdf_many(xs, m):
    shape = 0.5 * m
    lg = math.lgamma(shape)
    out = np.empty(xs.shape[0])
    for i in range(xs.shape[0]):
        out[i] = _pq(shape, 0.5 * xs[i], lg)[0]
    return out


@njit(cache=True, nogil=True)
def _chi2_quantile_many(ps, m):
    """Chi-square quantiles of a uniform vector; p = 0.0 maps to the exact limit 0.0."""
    shape = 0.5 * m
    lg = math.lgamma(shape)
    out = np.empty(ps.shape[0])
    for i in range(ps.shape[0]):
        p = ps[i]
        if p <= 0.0:
            out[i] = 0.0
        else:
            out[i] = 2.0 * math.exp(_lower_quantile_t(shape, p, 1.0 - p, lg))
    return out


def reg_lower_incomplete_gamma(shape, x):
    """P(shape, x) = gamma(shape, x) / Gamma(shape)."""
    shape = float(shape)
    x = float(x)
    if not shape > 0.0:
        raise ValueError(f"shape must be positive, got {shape}")
    if not x >= 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return float(_pq(shape, x, math.lgamma(shape))[0])


def chi2_cdf(x, m):
    """Chi-square(m) cdf: reg_lower_incomplete_gamma(m/2, x/2)."""
    x = float(x)
    m = int(m)
    if m < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {m}")
    if not x >= 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return float(_pq(0.5 * m, 0.5 * x, math.lgamma(0.5 * m))[0])


def chi2_quantile(p, m):
    """Inverse chi-square(m) cdf at p in (0, 1)."""
    p = float(p)
    m = int(m)
    if m < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {m}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    return float(2.0 * _gamma_lower_quantile(0.5 * m, p))


def gamma_upper_quantile(shape, p):
    """The (1-p)-th quantile of gamma(shape, 1): x with Q(shape, x) = p.

    Stays meaningful for shapes as small as ~1e-4; quantiles smaller than the
    tiniest positive double consistently underflow to 0.0.
    """
    shape = float(shape)
    p = float(p)
    if not shape > 0.0:
        raise ValueError(f"shape must be positive, got {shape}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    return float(_gamma_upper_quantile(shape, p))


def chi2_cdf_fn(m):
    """Vectorized chi-square(m) cdf evaluator, e.g. the reference cdf of the test."""
    m = int(m)
    if m < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {m}")

    def cdf(x):
        arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return _chi2_cdf_many(arr, m)

    return cdf
