"""First and second moments of inverse stable clocks and of processes they time-change.

Clock moments enter the covariance formulas as an explicit record
(``ClockMoments``) so that dependent clocks can be described either in
closed form or by Monte Carlo estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

from .samplers import _check_index


@dataclass(frozen=True)
class MarginalMoments:
    mean: float
    variance: float
    cross_cov: dict = field(default_factory=dict)  # {(s, t): Cov(L(s), L(t))}

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be non-negative")
        for (s, t), v in list(self.cross_cov.items()):
            self.cross_cov.setdefault((t, s), v)


@dataclass(frozen=True)
class OuterMoments:
    """Moments of Y(1) = (Y1(1), Y2(1)); cross12 is E Y1(1) Y2(1)."""

    mean1: float
    mean2: float
    var1: float
    var2: float
    cross12: float

    def __post_init__(self):
        if self.var1 < 0 or self.var2 < 0:
            raise ValueError("variances must be non-negative")

    @classmethod
    def independent_poisson(cls, rate1: float, rate2: float):
        return cls(rate1, rate2, rate1, rate2, rate1 * rate2)

    def mean(self, i: int) -> float:
        return self.mean1 if i == 1 else self.mean2

    def var(self, i: int) -> float:
        return self.var1 if i == 1 else self.var2


@dataclass(frozen=True)
class ClockMoments:
    """Moments of a bivariate clock (L1, L2).

    ``mean(i, t)`` is E L_i(t); ``cov(i, s, j, t)`` is Cov(L_i(s), L_j(t)).
    """

    mean: Callable[[int, float], float]
    cov: Callable[[int, float, int, float], float]

    @classmethod
    def inverse_stable(cls, beta1: float, beta2: float | None = None, common: bool = False):
        """Independent inverse stable clocks, or one clock L1 = L2 when ``common``."""
        beta2 = beta1 if beta2 is None else beta2
        if common and beta1 != beta2:
            raise ValueError("a common clock needs beta1 == beta2")
        betas = {1: beta1, 2: beta2}

        def mean(i, t):
            return inverse_stable_mean(betas[i], t)

        def cov(i, s, j, t):
            if i == j or common:
                return inverse_stable_cov(betas[i], s, t)
            return 0.0

        return cls(mean, cov)

    @classmethod
    def from_table(cls, means: dict, covs: dict):
        """Clock moments from lookup tables, e.g. Monte Carlo estimates.

        means: {(i, t): value}; covs: {(i, s, j, t): value}, symmetric entries filled in.
        """
        covs = dict(covs)
        for (i, s, j, t), v in list(covs.items()):
            covs.setdefault((j, t, i, s), v)
        return cls(lambda i, t: means[(i, t)], lambda i, s, j, t: covs[(i, s, j, t)])


# -- inverse stable clock ----------------------------------------------------

def inverse_stable_mean(beta: float, t: float) -> float:
    return t ** beta / math.gamma(beta + 1)


def inverse_stable_variance(beta: float, t: float) -> float:
    return t ** (2 * beta) * (2 / math.gamma(2 * beta + 1) - 1 / math.gamma(beta + 1) ** 2)


def inverse_stable_second_moment(beta: float, s: float, t: float) -> float:
    """E L(s) L(t).

    int_0^min ((t - x)^b + (s - x)^b) x^(b-1) dx / (Gamma(b+1) Gamma(b)); with
    x = u^(1/b) the x^(b-1) dx factor becomes du/b and the integrand is bounded.
    """
    beta = _check_index(beta, "beta")
    s, t = min(s, t), max(s, t)
    if s == 0:
        return 0.0
    if beta == 1:
        return s * t
    ub = s ** beta

    def f(u):
        x = min(u ** (1 / beta), s)
        return (t - x) ** beta + (s - x) ** beta

    val, err = integrate.quad(f, 0.0, ub, limit=200, epsabs=0.0, epsrel=1e-12)
    return val / (beta * math.gamma(beta + 1) * math.gamma(beta))


def inverse_stable_cov(beta: float, s: float, t: float) -> float:
    if beta == 1:
        return 0.0
    return inverse_stable_second_moment(beta, s, t) - inverse_stable_mean(beta, s) * inverse_stable_mean(beta, t)


def inverse_stable_moments(beta: float, s: float, t: float) -> MarginalMoments:
    """Mean and variance of L_b(t) and Cov(L_b(s), L_b(t))."""
    beta = _check_index(beta, "beta")
    if s < 0 or t < 0:
        raise ValueError("times must be non-negative")
    s, t = min(s, t), max(s, t)
    if beta == 1:
        return MarginalMoments(t, 0.0, {(s, t): 0.0})
    return MarginalMoments(inverse_stable_mean(beta, t), inverse_stable_variance(beta, t),
                           {(s, t): inverse_stable_cov(beta, s, t)})


def trapezoid_cov_oracle(beta: float, s: float, t: float, panels: int = 10_000) -> float:
    """Fixed-order trapezoid version of ``inverse_stable_cov``.

    Runs on u = x^b with u = s^b (1 - (1 - v)^4) so the (s - x)^b edge is smooth in v.
    """
    s, t = min(s, t), max(s, t)
    v = np.linspace(0.0, 1.0, panels + 1)
    u = s ** beta * (1 - (1 - v) ** 4)
    du = s ** beta * 4 * (1 - v) ** 3
    x = np.minimum(u ** (1 / beta), s)
    f = ((t - x) ** beta + (s - x) ** beta) * du
    m2 = integrate.trapezoid(f, v) / (beta * math.gamma(beta + 1) * math.gamma(beta))
    return m2 - inverse_stable_mean(beta, s) * inverse_stable_mean(beta, t)


# -- time-changed bivariate Levy process ------------------------------------

def tclp_cov_matrix(outer: OuterMoments, clocks: ClockMoments, t1: float, t2: float) -> np.ndarray:
    """Covariance matrix of (Y1(L1(t1)), Y2(L2(t2)))."""
    ts = {1: t1, 2: t2}
    out = np.empty((2, 2))
    for j in (1, 2):
        out[j - 1, j - 1] = (clocks.mean(j, ts[j]) * outer.var(j)
                             + clocks.cov(j, ts[j], j, ts[j]) * outer.mean(j) ** 2)
    out[0, 1] = out[1, 0] = outer.cross12 * clocks.cov(1, t1, 2, t2)
    return out


def tclp_autocov(outer: OuterMoments, clocks: ClockMoments, i: int, j: int, s: float, t: float) -> float:
    """Cov(Y_i(L_i(s)), Y_j(L_j(t)))."""
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError("i, j must be 1 or 2")
    if i == j:
        return clocks.cov(j, s, j, t) * outer.mean(j) ** 2 + clocks.mean(j, min(s, t)) * outer.var(j)
    return outer.cross12 * clocks.cov(i, s, j, t)


# -- two-parameter Levy process under two clocks -----------------------------

@dataclass(frozen=True)
class ProductClockMoments:
    """Moments of P(u) = L1(u1) L2(u2) at u = s and u = t."""

    mean_s: float
    mean_t: float
    var_s: float
    var_t: float
    cov_st: float


@dataclass(frozen=True)
class FieldMoments:
    mean: float
    variance: float
    autocov: float
    variance_s: float = math.nan

    @property
    def autocorrelation(self) -> float:
        return self.autocov / math.sqrt(self.variance_s * self.variance)


def independent_product_moments(beta1: float, beta2: float, s1: float, s2: float,
                                t1: float, t2: float) -> ProductClockMoments:
    """Product-clock moments for independent inverse stable clocks."""
    m1s, m1t = inverse_stable_mean(beta1, s1), inverse_stable_mean(beta1, t1)
    m2s, m2t = inverse_stable_mean(beta2, s2), inverse_stable_mean(beta2, t2)
    e1 = lambda a, b: inverse_stable_second_moment(beta1, a, b)
    e2 = lambda a, b: inverse_stable_second_moment(beta2, a, b)
    return ProductClockMoments(
        mean_s=m1s * m2s,
        mean_t=m1t * m2t,
        var_s=e1(s1, s1) * e2(s2, s2) - (m1s * m2s) ** 2,
        var_t=e1(t1, t1) * e2(t2, t2) - (m1t * m2t) ** 2,
        cov_st=e1(s1, t1) * e2(s2, t2) - m1s * m2s * m1t * m2t,
    )


def tp_tc_levy_moments(outer_mean: float, outer_var: float, clocks: ProductClockMoments) -> FieldMoments:
    """Mean, variance and autocovariance of Y(L1(t1), L2(t2)) for s before t.

    Y is a two-parameter Levy process whose law at (u1, u2) depends on u1 u2
    and which has independent rectangular increments.
    """
    if outer_var < 0:
        raise ValueError("outer_var must be non-negative")
    mean = clocks.mean_t * outer_mean
    var = clocks.mean_t * outer_var + clocks.var_t * outer_mean ** 2
    var_s = clocks.mean_s * outer_var + clocks.var_s * outer_mean ** 2
    autocov = clocks.mean_s * outer_var + clocks.cov_st * outer_mean ** 2
    return FieldMoments(mean, var, autocov, var_s)


def fprf_moments(lam: float, beta1: float, beta2: float, s1: float, s2: float,
                 t1: float, t2: float) -> FieldMoments:
    """Moments of N(L1(t1), L2(t2)) with independent inverse stable clocks."""
    if not (s1 <= t1 and s2 <= t2):
        raise ValueError("need (s1, s2) <= (t1, t2) coordinatewise")
    return tp_tc_levy_moments(lam, lam, independent_product_moments(beta1, beta2, s1, s2, t1, t2))


# -- Laplace transform of the covariance -------------------------------------

def cov_laplace_tclp(B1: Callable, B2: Callable, B: Callable, m12: float, z1: float, z2: float) -> float:
    """m12 (B1 + B2 - B) / (z1 z2 B1 B2 B), exponents evaluated at (z1, z2)."""
    b1, b2, b = B1(z1), B2(z2), B(z1, z2)
    den = z1 * z2 * b1 * b2 * b
    if den == 0:
        raise ZeroDivisionError("degenerate Laplace exponent")
    return m12 * (b1 + b2 - b) / den


def cov_laplace_numeric(cov: Callable[[float, float], float], z1: float, z2: float) -> float:
    """int int exp(-z1 t1 - z2 t2) cov(t1, t2) dt1 dt2 by tensor Gauss-Laguerre."""
    x, w = special.roots_laguerre(48)
    tot = 0.0
    for xi, wi in zip(x, w):
        row = np.array([cov(xi / z1, xj / z2) for xj in x])
        tot += wi * (w @ row)
    return float(tot / (z1 * z2))
