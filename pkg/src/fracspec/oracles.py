"""Closed-form references for validating the spectral operators.

Gaussian and algebraically decaying profiles have known images under the
fractional Laplacian in terms of confluent and Gauss hypergeometric
functions.  This module evaluates those references in double precision with
explicit convergence reporting, plus brute-force quadrature oracles for the
two scalar integral identities that underpin the operator construction:

    resolvent form:  integral_0^inf  mu * t**(s-1) / (t - mu) dt
                       = -pi / sin(pi*s) * (-mu)**s,
    semigroup form:  integral_0^inf  (exp(mu*t) - 1) / t**(1+s) dt
                       = Gamma(-s) * (-mu)**s,

both for mu < 0 and 0 < s < 1.

Series evaluation strategy.  For the confluent function with z <= 0 the
direct Taylor series alternates destructively, so the Kummer transform
1F1(a;b;z) = e^z 1F1(b-a;b;-z) is summed instead (single-signed tail).
Beyond -z = 50 the series is abandoned for the large-argument expansion
Gamma(b)/Gamma(b-a) * (-z)**-a * sum_k (a)_k (a-b+1)_k / (k! (-z)**k),
truncated at its smallest term.  The Gauss function uses the Pfaff transform
onto z/(z-1) in [0, 1); beyond -z = 50 that argument is too close to 1 and
the standard two-term large-argument connection takes over, which requires
a - b away from integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NoConvergence, PoleError, QuadratureError

# convergence declared when the running term drops below this fraction of
# the partial sum
_SERIES_TOL = 1e-15
# relative error estimate an asymptotic tail must reach
_ASYMP_TOL = 1e-10
# where the Kummer / Pfaff series hand over to large-argument expansions
_BIG_Z = 50.0
_MAX_TERMS_1F1 = 2000
_MAX_TERMS_2F1 = 40000
_POLE_TOL = 1e-12
# connection formula breaks down when a - b approaches an integer
_DEGENERATE_TOL = 1e-8


@dataclass(frozen=True)
class HypergeometricResult:
    """Value of a hypergeometric evaluation plus how it converged.

    ``value`` is a float for scalar input and an ndarray for array input.
    ``terms_used`` is the longest series length any element needed and
    ``converged`` reports whether every element met its bound.
    """

    value: float | np.ndarray
    terms_used: int
    converged: bool


class IntegralCheck(NamedTuple):
    """Quadrature value next to the closed form it should reproduce."""

    numeric: float
    closed: float


def gamma_fn(x: float) -> float:
    """Gamma function for real x, at least 13 significant digits on [-10, 30].

    Raises PoleError when x is within 1e-12 of a nonpositive integer.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    nearest = round(x)
    if nearest <= 0 and abs(x - nearest) <= _POLE_TOL:
        raise PoleError(f"gamma pole at nonpositive integer, x = {x!r}")
    return math.gamma(x)


def _rgamma(x: float) -> float:
    """1/Gamma(x), zero at the poles."""
    nearest = round(x)
    if nearest <= 0 and x == nearest:
        return 0.0
    return 1.0 / math.gamma(x)


def _series_1f1(a: float, b: float, w: np.ndarray) -> tuple[np.ndarray, int, bool]:
    # sum_k (a)_k / (b)_k * w**k / k!  for w >= 0
    term = np.ones_like(w)
    total = np.ones_like(w)
    for k in range(_MAX_TERMS_1F1):
        term = term * ((a + k) / ((b + k) * (k + 1.0))) * w
        total = total + term
        if np.all(np.abs(term) <= _SERIES_TOL * np.abs(total)):
            return total, k + 2, True
    return total, _MAX_TERMS_1F1, False


def _asymp_1f1(a: float, b: float, w: np.ndarray) -> tuple[np.ndarray, int, bool]:
    # Gamma(b)/Gamma(b-a) * w**-a * sum_k (a)_k (a-b+1)_k / (k! w**k),
    # each element truncated at its smallest term
    coeff = math.gamma(b) * _rgamma(b - a)
    term = np.ones_like(w)
    total = np.ones_like(w)
    last = np.abs(term)
    estimate = np.full_like(w, np.inf)
    active = np.ones(w.shape, dtype=bool)
    used = 1
    for k in range(200):
        term = term * ((a + k) * (a - b + 1.0 + k) / ((k + 1.0) * w))
        mag = np.abs(term)
        grew = mag >= last
        tiny = mag <= 1e-17 * np.abs(total)
        stopping = active & (grew | tiny)
        estimate[stopping] = mag[stopping]
        keep = active & ~grew
        total[keep] += term[keep]
        active = keep & ~tiny
        last = mag
        used = k + 2
        if not active.any():
            break
    estimate[active] = last[active]
    ok = bool(np.all(estimate <= _ASYMP_TOL * np.abs(total)))
    return coeff * w ** (-a) * total, used, ok


def hyp1f1(a: float, b: float, z: float | np.ndarray) -> HypergeometricResult:
    """Confluent hypergeometric 1F1(a; b; z) for b > 0 and z <= 0.

    z may be a scalar or an ndarray.  Raises NoConvergence if any element
    fails its convergence bound.
    """
    a = float(a)
    b = float(b)
    if not b > 0:
        raise ValueError(f"b must be positive, got {b!r}")
    z_in = np.asarray(z, dtype=float)
    if z_in.size and float(np.max(z_in)) > 0:
        raise ValueError("z must be nonpositive")
    scalar = z_in.ndim == 0
    zf = np.atleast_1d(z_in).ravel()
    value = np.empty_like(zf)
    if a == b:
        # 1F1(a; a; z) is exp(z) exactly
        out = np.exp(zf)
        return HypergeometricResult(float(out[0]) if scalar else out.reshape(z_in.shape), 1, True)
    w = -zf
    near = w <= _BIG_Z
    used = 1
    converged = True
    if near.any():
        s, k, ok = _series_1f1(b - a, b, w[near])
        value[near] = np.exp(-w[near]) * s
        used = max(used, k)
        converged &= ok
    far = ~near
    if far.any():
        v, k, ok = _asymp_1f1(a, b, w[far])
        value[far] = v
        used = max(used, k)
        converged &= ok
    if not converged:
        raise NoConvergence(f"1F1({a}, {b}, z) failed its convergence bound within {used} terms")
    out = float(value[0]) if scalar else value.reshape(z_in.shape)
    return HypergeometricResult(out, used, converged)


def _series_2f1(a: float, b: float, c: float, x: np.ndarray, cap: int) -> tuple[np.ndarray, int, bool]:
    # sum_k (a)_k (b)_k / ((c)_k k!) * x**k  for |x| < 1
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(cap):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1.0))) * x
        total = total + term
        if np.all(np.abs(term) <= _SERIES_TOL * np.abs(total)):
            return total, k + 2, True
    return total, cap, False


def hyp2f1(a: float, b: float, c: float, z: float | np.ndarray) -> HypergeometricResult:
    """Gauss hypergeometric 2F1(a, b; c; z) for c > 0 and z <= 0.

    z may be a scalar or an ndarray.  Large negative arguments use the
    two-term connection formula, which needs a - b away from integers;
    violations raise NoConvergence.
    """
    a = float(a)
    b = float(b)
    c = float(c)
    if not c > 0:
        raise ValueError(f"c must be positive, got {c!r}")
    z_in = np.asarray(z, dtype=float)
    if z_in.size and float(np.max(z_in)) > 0:
        raise ValueError("z must be nonpositive")
    scalar = z_in.ndim == 0
    zf = np.atleast_1d(z_in).ravel()
    if b == c:
        out = (1.0 - zf) ** (-a)
        return HypergeometricResult(float(out[0]) if scalar else out.reshape(z_in.shape), 1, True)
    if a == c:
        out = (1.0 - zf) ** (-b)
        return HypergeometricResult(float(out[0]) if scalar else out.reshape(z_in.shape), 1, True)
    value = np.empty_like(zf)
    near = zf >= -_BIG_Z
    used = 1
    converged = True
    if near.any():
        zeta = zf[near] / (zf[near] - 1.0)
        s, k, ok = _series_2f1(a, c - b, c, zeta, _MAX_TERMS_2F1)
        value[near] = (1.0 - zf[near]) ** (-a) * s
        used = max(used, k)
        converged &= ok
    far = ~near
    if far.any():
        diff = a - b
        if abs(diff - round(diff)) <= _DEGENERATE_TOL:
            raise NoConvergence(
                f"a - b = {diff!r} is within {_DEGENERATE_TOL:g} of an integer; "
                "the large-argument connection formula is degenerate"
            )
        w = -zf[far]
        inv = 1.0 / zf[far]
        c1 = math.gamma(c) * math.gamma(b - a) * _rgamma(b) * _rgamma(c - a)
        c2 = math.gamma(c) * math.gamma(a - b) * _rgamma(a) * _rgamma(c - b)
        s1, k1, ok1 = _series_2f1(a, a - c + 1.0, a - b + 1.0, inv, 400)
        s2, k2, ok2 = _series_2f1(b, b - c + 1.0, b - a + 1.0, inv, 400)
        value[far] = c1 * w ** (-a) * s1 + c2 * w ** (-b) * s2
        used = max(used, k1, k2)
        converged &= ok1 and ok2
    if not converged:
        raise NoConvergence(f"2F1({a}, {b}; {c}; z) failed its convergence bound within {used} terms")
    out = float(value[0]) if scalar else value.reshape(z_in.shape)
    return HypergeometricResult(out, used, converged)


def exact_fraclap_gaussian(s: float, n: int, r2: float | np.ndarray) -> float | np.ndarray:
    """Fractional Laplacian of order s of exp(-|x|^2) in n dimensions.

    Evaluated at squared radius r2:

        2**(2s) * Gamma(s + n/2) / Gamma(n/2) * 1F1(s + n/2; n/2; -r2).
    """
    s, n = _checked_order(s, n)
    r2 = _checked_radius(r2)
    pref = 2.0 ** (2.0 * s) * math.gamma(s + 0.5 * n) / math.gamma(0.5 * n)
    return pref * hyp1f1(s + 0.5 * n, 0.5 * n, -r2).value


def exact_fraclap_algebraic(s: float, r: float, n: int, r2: float | np.ndarray) -> float | np.ndarray:
    """Fractional Laplacian of order s of (1 + |x|^2)**-r in n dimensions.

        2**(2s) * Gamma(s+r) Gamma(s+n/2) / (Gamma(r) Gamma(n/2))
            * 2F1(s+r, s+n/2; n/2; -r2).
    """
    s, n = _checked_order(s, n)
    r = float(r)
    if not r > 0:
        raise ValueError(f"r must be positive, got {r!r}")
    r2 = _checked_radius(r2)
    pref = (
        2.0 ** (2.0 * s)
        * math.gamma(s + r)
        * math.gamma(s + 0.5 * n)
        / (math.gamma(r) * math.gamma(0.5 * n))
    )
    return pref * hyp2f1(s + r, s + 0.5 * n, 0.5 * n, -r2).value


def _checked_order(s: float, n: int) -> tuple[float, int]:
    s = float(s)
    if not 0.0 <= s < 1.0:
        raise ValueError(f"s must lie in [0, 1), got {s!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return s, int(n)


def _checked_radius(r2):
    r2 = np.asarray(r2, dtype=float)
    if r2.size and float(np.min(r2)) < 0:
        raise ValueError("r2 must be nonnegative")
    return float(r2) if r2.ndim == 0 else r2


def _checked_mu_s(mu: float, s: float) -> tuple[float, float]:
    mu = float(mu)
    s = float(s)
    if not mu < 0:
        raise ValueError(f"mu must be negative, got {mu!r}")
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s!r}")
    return mu, s


def _graded_edges(levels: int, panels: int) -> np.ndarray:
    # panel edges on (0, 1/4], dyadically refined toward 0
    blocks = [
        np.linspace(0.25 * 2.0 ** -(m + 1), 0.25 * 2.0**-m, panels + 1)
        for m in range(levels)
    ]
    return np.unique(np.concatenate(blocks))


def _midpoint_sum(f, edges: np.ndarray) -> float:
    mids = 0.5 * (edges[1:] + edges[:-1])
    return float(np.sum(f(mids) * np.diff(edges)))


def _resolvent_quad(mu: float, s: float, levels: int, panels: int) -> float:
    # integral over t in (0, inf) via x = t/(1+t); the piece near x = 1 is
    # evaluated in the variable y = 1 - x so the grading survives rounding
    def f(t):
        return mu * t ** (s - 1.0) / (t - mu)

    graded = _graded_edges(levels, panels)
    left = _midpoint_sum(lambda x: f(x / (1.0 - x)) / (1.0 - x) ** 2, graded)
    middle_edges = np.linspace(0.25, 0.75, 4 * panels + 1)
    middle = _midpoint_sum(lambda x: f(x / (1.0 - x)) / (1.0 - x) ** 2, middle_edges)
    right = _midpoint_sum(lambda y: f((1.0 - y) / y) / y**2, graded)
    return left + middle + right


def resolvent_integral_oracle(mu: float, s: float) -> IntegralCheck:
    """Brute-force check of the resolvent-power integral identity.

    Returns the midpoint-quadrature value of
    integral_0^inf mu * t**(s-1) / (t - mu) dt next to the closed form
    -pi / sin(pi*s) * (-mu)**s.  The substitution t = x/(1-x) maps the path
    to (0, 1); panels are dyadically refined toward both endpoints, where
    the integrand has integrable algebraic singularities.
    """
    mu, s = _checked_mu_s(mu, s)
    coarse = _resolvent_quad(mu, s, levels=320, panels=512)
    fine = _resolvent_quad(mu, s, levels=320, panels=1024)
    if abs(fine - coarse) > 5e-7 * abs(fine):
        raise QuadratureError(
            f"resolvent quadrature self-check failed: {coarse!r} vs {fine!r}"
        )
    closed = -math.pi / math.sin(math.pi * s) * (-mu) ** s
    return IntegralCheck(numeric=fine, closed=closed)


def _semigroup_tail(mu: float, s: float, panels: int) -> float:
    # integral_1^inf exp(mu t) t**(-1-s) dt, truncated where exp(mu t) dies
    span = 60.0 / abs(mu)
    h = span / panels
    t = 1.0 + (np.arange(panels) + 0.5) * h
    return float(np.sum(np.exp(mu * t) * t ** (-1.0 - s)) * h)


def semigroup_integral_oracle(mu: float, s: float) -> IntegralCheck:
    """Brute-force check of the semigroup-difference integral identity.

    Returns the quadrature value of
    integral_0^inf (exp(mu t) - 1) / t**(1+s) dt next to the closed form
    Gamma(-s) * (-mu)**s.  The integral is split at t = 1: on (0, 1] the
    exponential is expanded termwise (the t -> 0 singularity integrates
    exactly against each power), on [1, inf) the -1 part integrates in
    closed form and the remainder falls to midpoint quadrature.
    """
    mu, s = _checked_mu_s(mu, s)
    head = 0.0
    term = 1.0
    for k in range(1, 400):
        term *= mu / k
        head += term / (k - s)
        if abs(term / (k - s)) <= 1e-18 * max(abs(head), 1e-300):
            break
    else:
        raise QuadratureError("series for the (0,1] piece did not converge")
    coarse = _semigroup_tail(mu, s, panels=400_000)
    fine = _semigroup_tail(mu, s, panels=800_000)
    scale = abs(head) + abs(fine) + 1.0 / s
    if abs(fine - coarse) > 1e-7 * scale:
        raise QuadratureError(
            f"semigroup tail quadrature self-check failed: {coarse!r} vs {fine!r}"
        )
    numeric = head + fine - 1.0 / s
    closed = math.gamma(-s) * (-mu) ** s
    return IntegralCheck(numeric=numeric, closed=closed)
