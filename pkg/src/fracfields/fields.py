"""Poisson random fields, time-changed and drifted variants.

The plain field counts points of a planar Poisson process of intensity
``lam`` in [0, t1] x [0, t2].  Replacing (t1, t2) by random clocks gives
the time-changed fields; adding ``a * T1 * T2`` gives the drifted ones.
Given both clocks the count is Poisson(lam * T1 * T2), so every pmf here
is a Poisson mixture and every Laplace transform is a mixture of
exp(-(lam (1 - e^-eta) + a eta) T1 T2).

Series forms are evaluated with the shared stopping rule.  Where a series
diverges or cancels badly the same quantity is computed by quadrature
over the clock laws, and the result records which branch was used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np
from scipy import signal, special, stats

from . import samplers as smp
from .samplers import TimeChangeSpec
from .specfun import (DEFAULT_CONTROL, SeriesControl, SeriesDivergenceError, SeriesError, WrightParams,
                      generalized_wright, log_gamma, mittag_leffler, sum_series)

Array = np.ndarray

# counts above this mean are drawn as their mean (relative spread < 1e-6)
_POISSON_CAP = 1e12


@dataclass(frozen=True)
class FieldModel:
    lam: float
    clock1: TimeChangeSpec = field(default_factory=TimeChangeSpec.identity)
    clock2: TimeChangeSpec = field(default_factory=TimeChangeSpec.identity)
    drift_a: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.drift_a < 0:
            raise ValueError("drift_a must be non-negative")


@dataclass(frozen=True)
class Rectangle:
    """(s1, t1] x (s2, t2]."""

    s1: float
    t1: float
    s2: float
    t2: float

    def __post_init__(self):
        if not (0 <= self.s1 <= self.t1 and 0 <= self.s2 <= self.t2):
            raise ValueError("need 0 <= s1 <= t1 and 0 <= s2 <= t2")

    @property
    def area(self) -> float:
        return (self.t1 - self.s1) * (self.t2 - self.s2)


@dataclass
class PointPattern:
    window: Rectangle
    points: Array  # shape (n, 2)

    def count(self, rect: Rectangle) -> int:
        p = self.points
        inside = (p[:, 0] > rect.s1) & (p[:, 0] <= rect.t1) & (p[:, 1] > rect.s2) & (p[:, 1] <= rect.t2)
        return int(inside.sum())


@dataclass(frozen=True)
class DriftedAtomDistribution:
    """Atoms at offset + k with the given weights, k = 0, 1, ..."""

    offset: float
    weights: Array

    def laplace(self, eta: float) -> float:
        k = np.arange(self.weights.size)
        return float(math.fsum(self.weights * np.exp(-eta * (self.offset + k))))


@dataclass(frozen=True)
class BranchValue:
    value: float
    branch: str  # 'series' or 'quadrature'

    def __float__(self):
        return self.value


def _lam(model) -> float:
    return model.lam if isinstance(model, FieldModel) else float(model)


# -- plain and drifted field -------------------------------------------------

def prf_pmf(model, n: int, t1: float, t2: float) -> float:
    """P(N(t1, t2) = n) = exp(-lam t1 t2) (lam t1 t2)^n / n!."""
    return float(stats.poisson.pmf(n, _lam(model) * t1 * t2))


def sample_prf_points(lam: float, window: Rectangle, rng: np.random.Generator) -> PointPattern:
    n = rng.poisson(lam * window.area) if window.area > 0 else 0
    x = rng.uniform(window.s1, window.t1, n)
    y = rng.uniform(window.s2, window.t2, n)
    return PointPattern(window, np.column_stack([x, y]))


_CORNER_KEYS = ("t1t2", "s1t2", "t1s2", "s1s2")


def rectangle_increment(counts) -> int:
    """N(t1,t2) - N(s1,t2) - N(t1,s2) + N(s1,s2).

    ``counts`` is a mapping with keys t1t2, s1t2, t1s2, s1s2 or a sequence
    in that order.  Works elementwise on arrays.
    """
    if isinstance(counts, Mapping):
        counts = [counts[k] for k in _CORNER_KEYS]
    a, b, c, d = counts
    return a - b - c + d


def drifted_prf_dist(model, t1: float, t2: float, a: float | None = None,
                     tail: float = 1e-12) -> DriftedAtomDistribution:
    """Law of N(t1, t2) + a t1 t2 as atoms at a t1 t2 + k."""
    lam = _lam(model)
    a = (model.drift_a if isinstance(model, FieldModel) else 0.0) if a is None else a
    mu = lam * t1 * t2
    if mu == 0:
        return DriftedAtomDistribution(a * t1 * t2, np.array([1.0]))
    kmax = int(stats.poisson.isf(tail, mu)) + 1
    w = stats.poisson.pmf(np.arange(kmax + 1), mu)
    return DriftedAtomDistribution(a * t1 * t2, w)


def drifted_laplace(lam: float, a: float, eta: float, t1: float, t2: float) -> float:
    """E exp(-eta (N(t1,t2) + a t1 t2))."""
    return math.exp(-eta * a * t1 * t2 - lam * t1 * t2 * (-math.expm1(-eta)))


def drifted_laplace_residual(lam: float, a: float, eta: float, t1: float, t2: float,
                             axis: int = 1, h: float = 1e-5) -> float:
    """d_{t_i} w + a eta t_j w + lam t_j (1 - e^-eta) w with a central difference."""
    if axis == 1:
        d = (drifted_laplace(lam, a, eta, t1 + h, t2) - drifted_laplace(lam, a, eta, t1 - h, t2)) / (2 * h)
        other = t2
    else:
        d = (drifted_laplace(lam, a, eta, t1, t2 + h) - drifted_laplace(lam, a, eta, t1, t2 - h)) / (2 * h)
        other = t1
    w = drifted_laplace(lam, a, eta, t1, t2)
    return d + a * eta * other * w + lam * other * (-math.expm1(-eta)) * w


# -- series helpers ----------------------------------------------------------

def _log_abs_binom(x: float, n: int) -> tuple[float, int]:
    """log|binom(x, n)| and its sign, x >= 0 real; sign 0 if it vanishes."""
    g = x - n + 1
    if g <= 0 and g == math.floor(g):
        return -math.inf, 0
    lg, sg = log_gamma(g)
    return math.lgamma(x + 1) - math.lgamma(n + 1) - lg, sg


def tc_prf_pmf(lam: float, alpha1: float, beta1: float, n: int, t1: float, t2: float,
               ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P(N(H(t1), t2) = n) with H = S_alpha1(L_beta1).

    sum_k (-1)^{k+n} binom(alpha1 k, n) c^k / Gamma(k beta1 + 1), c = t1^beta1 (lam t2)^alpha1.
    """
    smp._check_index(alpha1)
    smp._check_index(beta1, "beta1")
    if n < 0:
        return 0.0
    c = t1 ** beta1 * (lam * t2) ** alpha1
    if c == 0:
        return 1.0 if n == 0 else 0.0
    lc = math.log(c)

    def term(k):
        lb, sb = _log_abs_binom(alpha1 * k, n)
        if sb == 0:
            return 0.0
        sign = sb * (-1) ** (k + n)
        return sign * math.exp(lb + k * lc - math.lgamma(k * beta1 + 1))

    # binom(k, n) = 0 for k < n when alpha1 = 1
    try:
        res = sum_series(term, ctl, start=n if alpha1 == 1 else 0)
        if not res.precision_loss:
            return res.value
    except SeriesError:
        pass
    # cancellation ate the series: given L = l, N is Poisson(lam t2 S_alpha1(l))
    l, wl = _clock_rule("inverse_stable", beta1, t1)
    return float(math.fsum(wi * _stable_poisson_pmf(alpha1, n, lam * t2, li) for li, wi in zip(l, wl)))


def tc_prf_pmf_swapped(lam: float, alpha2: float, beta2: float, n: int, t1: float, t2: float,
                       ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Same field with the composition clock on the second axis: N(t1, H(t2))."""
    return tc_prf_pmf(lam, alpha2, beta2, n, t2, t1, ctl)


def tc_prf_pgf(lam: float, alpha1: float, beta1: float, u: float, t1: float, t2: float,
               ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """E u^N = E_beta1(-lam^alpha1 t2^alpha1 (1 - u)^alpha1 t1^beta1)."""
    x = (lam * t2) ** alpha1 * (1 - u) ** alpha1 * t1 ** beta1
    return smp.inverse_stable_laplace(beta1, x, 1.0, ctl)


def _double_series(lam, beta1, beta2, n, t1, t2, ctl):
    x = lam * t1 ** beta1 * t2 ** beta2
    if x == 0:
        return 1.0 if n == 0 else 0.0
    lx = math.log(x)
    ln_fact = math.lgamma(n + 1)

    def term(k):
        # (k)_{k-n} (k)_n = k!^2 / (n! (k-n)!)
        lc = 2 * math.lgamma(k + 1) - ln_fact - math.lgamma(k - n + 1)
        return (-1) ** (k - n) * math.exp(lc + k * lx - math.lgamma(k * beta1 + 1) - math.lgamma(k * beta2 + 1))

    p = WrightParams(((1, 1), (1, 1)), ((1, beta1), (1, beta2)))
    if p.delta <= 0:
        radius = beta1 ** beta1 * beta2 ** beta2
        if p.delta < 0 or x >= radius:
            raise SeriesDivergenceError("double fractional series diverges here")
    res = sum_series(term, ctl, start=n, detect_divergence=p.delta <= 0)
    if res.precision_loss:
        raise SeriesDivergenceError("double fractional series lost precision")
    return res.value


def _clock_rule(spec_tag: str, index: float, t: float):
    if spec_tag == "identity" or index == 1:
        return np.array([float(t)]), np.array([1.0])
    return smp.inverse_stable_rule(index, t)


def double_fractional_pmf(lam: float, beta1: float, beta2: float, n: int, t1: float, t2: float,
                          ctl: SeriesControl = DEFAULT_CONTROL, info: bool = False,
                          branch: str | None = None):
    """P(N(L_beta1(t1), L_beta2(t2)) = n).

    Series branch when it converges, else double quadrature over the two
    inverse stable densities.  ``branch`` forces one of the two.
    """
    smp._check_index(beta1, "beta1")
    smp._check_index(beta2, "beta2")
    if n < 0:
        return BranchValue(0.0, "series") if info else 0.0
    out = None
    if branch in (None, "series"):
        try:
            out = BranchValue(_double_series(lam, beta1, beta2, n, t1, t2, ctl), "series")
        except SeriesDivergenceError:
            if branch == "series":
                raise
    if out is None:
        x, wx = _clock_rule("inverse_stable", beta1, t1)
        y, wy = _clock_rule("inverse_stable", beta2, t2)
        mu = lam * x[:, None] * y[None, :]
        val = float(wx @ stats.poisson.pmf(n, mu) @ wy)
        out = BranchValue(val, "quadrature")
    return out if info else out.value


def stable_inverse_pmf(lam: float, alpha1: float, beta2: float, n: int, t1: float, t2: float,
                       ctl: SeriesControl = DEFAULT_CONTROL, info: bool = False):
    """P(N(S_alpha1(t1), L_beta2(t2)) = n) from the termwise-differentiated 1Psi1 series."""
    smp._check_index(alpha1)
    smp._check_index(beta2, "beta2")
    if n < 0:
        return BranchValue(0.0, "series") if info else 0.0
    x = t1 * t2 ** (alpha1 * beta2) * lam ** alpha1
    if x == 0:
        v = 1.0 if n == 0 else 0.0
        return BranchValue(v, "series") if info else v
    lx = math.log(x)

    def term(k):
        lb, sb = _log_abs_binom(alpha1 * k, n)
        if sb == 0:
            return 0.0
        sign = sb * (-1) ** (k + n)
        return sign * math.exp(lb + math.lgamma(alpha1 * k + 1) + k * lx - math.lgamma(k + 1)
                               - math.lgamma(alpha1 * beta2 * k + 1))

    try:
        res = sum_series(term, ctl, start=n if alpha1 == 1 else 0)
        if not res.precision_loss:
            out = BranchValue(res.value, "series")
            return out if info else out.value
    except SeriesDivergenceError:
        pass
    # quadrature: given L = l, N is Poisson(lam S_alpha1(t1) l); S by its pmf mixture
    l, wl = _clock_rule("inverse_stable", beta2, t2)
    val = 0.0
    for li, wi in zip(l, wl):
        val += wi * _stable_poisson_pmf(alpha1, n, lam * li, t1)
    out = BranchValue(float(val), "quadrature")
    return out if info else out.value


def _stable_poisson_pmf(alpha: float, n: int, rate: float, t: float) -> float:
    """E pmf(n; rate S_alpha(t)) by quadrature over the stable density."""
    from scipy import integrate
    if alpha == 1:
        return float(stats.poisson.pmf(n, rate * t))
    f = lambda s: smp.stable_density(alpha, s, t) * stats.poisson.pmf(n, rate * s)
    centre = max(n, 1) / rate
    a = integrate.quad(f, 0, centre, limit=200)[0]
    b = integrate.quad(f, centre, np.inf, limit=200)[0]
    return a + b


# -- heavy-tail bookkeeping --------------------------------------------------

@lru_cache(maxsize=None)
def _gamma_rule(m: int, order: int = 96):
    """Nodes/weights for E h(G), G ~ Gamma(m + 1)."""
    k = m + 1
    lo, hi = stats.gamma.ppf(1e-16, k), stats.gamma.isf(1e-16, k)
    u, w = np.polynomial.legendre.leggauss(order)
    g = (lo + hi) / 2 + (hi - lo) / 2 * u
    return g, (hi - lo) / 2 * w * stats.gamma.pdf(g, k)


def mixed_poisson_tail(m: int, scale_nodes: Array, scale_weights: Array, v_sf) -> float:
    """P(N > m) for N ~ Poisson(s V), s from a quadrature rule, V with survival v_sf.

    Uses P(Poisson(mu) > m) = P(G <= mu) with G ~ Gamma(m + 1), so the tail
    is E_s E_G P(V > G / s).
    """
    g, wg = _gamma_rule(int(m))
    s = np.asarray(scale_nodes, float)
    arg = g[:, None] / s[None, :]
    return float(wg @ v_sf(arg) @ scale_weights)


def tc_prf_tail(lam: float, alpha1: float, beta1: float, m: int, t1: float, t2: float) -> float:
    """P(N(H(t1), t2) > m) by quadrature over the clock laws."""
    if alpha1 == 1 and beta1 == 1:
        return float(stats.poisson.sf(m, lam * t1 * t2))
    if alpha1 == 1:
        # N = Poisson(lam t2 L), V = L_beta1(t1)
        return mixed_poisson_tail(m, np.array([lam * t2]), np.array([1.0]),
                                  lambda x: 1.0 - smp.inverse_stable_cdf(beta1, x, t1))
    l, wl = _clock_rule("inverse_stable", beta1, t1)
    # H = L^{1/alpha} S_alpha(1)
    return mixed_poisson_tail(m, lam * t2 * l ** (1 / alpha1), wl, lambda x: smp.stable_sf(alpha1, x))


def double_fractional_tail(lam: float, beta1: float, beta2: float, m: int, t1: float, t2: float) -> float:
    y, wy = _clock_rule("inverse_stable", beta2, t2)
    if beta1 == 1:
        return float(wy @ stats.poisson.sf(m, lam * t1 * y))
    return mixed_poisson_tail(m, lam * y, wy, lambda x: 1.0 - smp.inverse_stable_cdf(beta1, x, t1))


def stable_inverse_tail(lam: float, alpha1: float, beta2: float, m: int, t1: float, t2: float) -> float:
    l, wl = _clock_rule("inverse_stable", beta2, t2)
    if alpha1 == 1:
        return float(wl @ stats.poisson.sf(m, lam * t1 * l))
    return mixed_poisson_tail(m, lam * l, wl, lambda x: smp.stable_sf(alpha1, x, t1))


# -- random-drift Laplace transforms ----------------------------------------

def _kappa(lam: float, a: float, eta: float) -> float:
    return lam * (-math.expm1(-eta)) + a * eta


def typeI_laplace(lam: float, a: float, beta1: float, beta2: float, eta: float, t1: float, t2: float,
                  ctl: SeriesControl = DEFAULT_CONTROL, info: bool = False):
    """E exp(-eta (N(L1(t1), L2(t2)) + a L1 L2)), the 2Psi2 series or its quadrature."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    kap = _kappa(lam, a, eta)
    x = -kap * t1 ** beta1 * t2 ** beta2
    p = WrightParams(((1, 1), (1, 1)), ((1, beta1), (1, beta2)))
    try:
        res = generalized_wright(p, x, ctl, info=True)
        if not res.precision_loss:
            out = BranchValue(res.value, "series")
            return out if info else out.value
    except SeriesDivergenceError:
        pass
    u, wu = _clock_rule("inverse_stable", beta1, t1)
    v, wv = _clock_rule("inverse_stable", beta2, t2)
    out = BranchValue(float(wu @ np.exp(-kap * u[:, None] * v[None, :]) @ wv), "quadrature")
    return out if info else out.value


def typeII_laplace(lam: float, a: float, alpha: float, beta: float, eta: float, t1: float, t2: float,
                   ctl: SeriesControl = DEFAULT_CONTROL, info: bool = False):
    """E exp(-eta (N(S_alpha(t1), L_beta(t2)) + a S L)), the 1Psi1 series or its quadrature."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    kap = _kappa(lam, a, eta)
    x = -t1 * t2 ** (alpha * beta) * kap ** alpha
    p = WrightParams(((1, alpha),), ((1, alpha * beta),))
    try:
        res = generalized_wright(p, x, ctl, info=True)
        if not res.precision_loss:
            out = BranchValue(res.value, "series")
            return out if info else out.value
    except SeriesDivergenceError:
        pass
    l, wl = _clock_rule("inverse_stable", beta, t2)
    out = BranchValue(float(wl @ np.exp(-t1 * (kap * l) ** alpha)), "quadrature")
    return out if info else out.value


def typeIII_laplace(lam: float, a: float, gamma_idx: float, alpha: float, beta: float, eta: float,
                    t1: float, t2: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """E_beta(-((lam t2)^g (1 - e^-eta)^g + (eta a t2)^alpha) t1^beta)."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    x = (lam * t2) ** gamma_idx * (-math.expm1(-eta)) ** gamma_idx + (eta * a * t2) ** alpha
    return smp.inverse_stable_laplace(beta, x, t1, ctl)


# -- Type III density --------------------------------------------------------

def _graded_rule(smax: float, n_geo: int = 10, n_lin: int = 16, order: int = 12):
    """Gauss-Legendre panels, geometric towards 0 then uniform up to smax."""
    first = smax / n_lin
    geo = first * np.logspace(-n_geo, 0, n_geo + 1)
    edges = np.concatenate([[0.0], geo, np.linspace(first, smax, n_lin + 1)[1:]])
    u, w = np.polynomial.legendre.leggauss(order)
    nodes = np.concatenate([(a + b) / 2 + (b - a) / 2 * u for a, b in zip(edges[:-1], edges[1:])])
    weights = np.concatenate([(b - a) / 2 * w for a, b in zip(edges[:-1], edges[1:])])
    return nodes, weights


def poisson_mixture_weights(gamma_idx: float, nu, n_max: int) -> Array:
    """w_n = P(N(S_g(s), t2) = n) with nu = s (lam t2)^g, n = 0..n_max; shape (len(nu), n_max+1).

    Power series in nu with fsum-free matrix summation; for nu > 25 the
    cancellation is too strong and a quadrature over the stable law is used.
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    out = np.zeros((nu.size, n_max + 1))
    if gamma_idx == 1:
        return stats.poisson.pmf(np.arange(n_max + 1)[None, :], nu[:, None])
    ok = nu <= 25.0
    if np.any(ok):
        jmax = int(np.ceil(max(nu[ok].max(), 1.0) * math.e + 60))
        j = np.arange(jmax + 1)
        n = np.arange(n_max + 1)
        x = gamma_idx * j[:, None]
        g = x - n[None, :] + 1
        pole = (g <= 0) & (g == np.floor(g))
        gs = np.where(pole, 0.5, g)
        lb = special.gammaln(x + 1) - special.gammaln(n[None, :] + 1) - special.gammaln(gs)
        sb = np.where(pole, 0.0, special.gammasgn(gs))
        # (-nu)^j / j! * (-1)^n binom(g j, n)
        coef = sb * np.exp(lb - special.gammaln(j[:, None] + 1)) * ((-1.0) ** n)[None, :]
        pw = np.power(-nu[ok][:, None], j[None, :])
        out[ok] = pw @ coef
    for i in np.nonzero(~ok)[0]:
        for n in range(n_max + 1):
            out[i, n] = _stable_poisson_pmf(gamma_idx, n, nu[i] ** (1 / gamma_idx), 1.0)
    return np.clip(out, 0.0, 1.0)


@lru_cache(maxsize=None)
def _log_graded_unit(decades: int = 18, per_decade: int = 8, order: int = 10):
    """Gauss-Legendre on (0, 1] with geometric panels, per_decade per factor 10."""
    u, w = np.polynomial.legendre.leggauss(order)
    edges = np.concatenate([[0.0], np.logspace(-decades, 0, decades * per_decade + 1)])
    nodes = np.concatenate([(a + b) / 2 + (b - a) / 2 * u for a, b in zip(edges[:-1], edges[1:])])
    weights = np.concatenate([(b - a) / 2 * w for a, b in zip(edges[:-1], edges[1:])])
    return nodes, weights


class TypeIIIDensity:
    """Density of N(H^{g,b}(t1), t2) + a t2 H^{a,b}(t1) with one shared L_b(t1).

    r(x) = sum_n int w_n(s) g_alpha(x - n, (a t2)^alpha s) f_beta(s, t1) ds.
    Evaluation shares the s-rule and the weights w_n across points.
    """

    def __init__(self, lam: float, a: float, gamma_idx: float, alpha: float, beta: float,
                 t1: float, t2: float):
        for v, nm in ((gamma_idx, "gamma"), (alpha, "alpha"), (beta, "beta")):
            smp._check_index(v, nm)
            if v == 1:
                raise ValueError(f"Type III density needs {nm} < 1")
        if not a > 0:
            raise ValueError("Type III density needs a > 0")
        self.lam, self.a, self.g, self.alpha, self.beta = lam, a, gamma_idx, alpha, beta
        self.t1, self.t2 = t1, t2
        zmax = smp._m_wright_rule(beta)[0][-1]
        s, ws = _graded_rule(zmax * t1 ** beta)
        self.s = s
        self.ws = ws * smp.inverse_stable_density(beta, s, t1)
        self.tau = (a * t2) ** alpha * s
        self.nu = s * (lam * t2) ** gamma_idx
        self._w = np.zeros((s.size, 0))

    def _weights(self, n_max: int) -> Array:
        if self._w.shape[1] <= n_max:
            self._w = poisson_mixture_weights(self.g, self.nu, n_max)
        return self._w[:, : n_max + 1]

    def _g(self, y: Array) -> Array:
        """g_alpha(y, tau_s) on a (len(y), len(s)) grid, y > 0."""
        y = np.asarray(y, float)
        # S(tau) =d tau^{1/alpha} S(1)
        scale = self.tau ** (-1 / self.alpha)
        arg = y[:, None] * scale[None, :]
        return smp.stable_density(self.alpha, arg) * scale[None, :]

    def __call__(self, x) -> Array:
        x = np.atleast_1d(np.asarray(x, float))
        out = np.zeros(x.shape)
        pos = x > 0
        if not np.any(pos):
            return out
        n_max = int(np.floor(x[pos].max()))
        w = self._weights(n_max)
        for i in np.nonzero(pos)[0]:
            ns = np.arange(int(np.ceil(x[i])))  # n < x
            y = x[i] - ns
            G = self._g(y)  # (len(ns), S)
            out[i] = np.sum(G * w[:, : ns.size].T * self.ws[None, :])
        return out

    def unit_interval_integrals(self, n_cells: int, order: int = 24, weight=None) -> Array:
        """int over (m, m+1] of r(x) * weight(x) dx for m = 0..n_cells-1.

        The term with n = m puts g(y; tau_s) right after the integer, where
        it is a spike of width ~tau_s^(1/alpha) for small s; that part uses
        a log-graded y rule.  Terms with n < m see g at arguments >= 1 and
        use plain Gauss-Legendre per cell.
        """
        u, wv = np.polynomial.legendre.leggauss(order)
        y = (u + 1) / 2
        wy = wv / 2
        k = np.arange(1, n_cells)
        W = self._weights(n_cells)[:, :n_cells]  # (S, n)
        ones = lambda x: np.ones_like(x)
        weight = ones if weight is None else weight
        out = np.zeros(n_cells)
        if n_cells > 1:
            # G[k-1, q, s] = g(k + y_q; tau_s), k >= 1
            pts = (k[:, None] + y[None, :]).reshape(-1)
            G = self._g(pts).reshape(n_cells - 1, order, -1)
            Gz = np.concatenate([np.zeros((1,) + G.shape[1:]), G], axis=0)
            conv = signal.fftconvolve(W.T[:, None, :], Gz, axes=0)[:n_cells]  # (m, q, s)
            r = np.maximum(np.einsum("mqs,s->mq", conv, self.ws), 0.0)
            xs = np.arange(n_cells)[:, None] + y[None, :]
            out += (r * weight(xs)) @ wy
        yf, wf = _log_graded_unit()
        G0 = self._g(yf) * self.ws[None, :]  # (F, S)
        same = np.einsum("fs,sm->mf", G0, W)  # sum_s ws W[s, m] g(y_f; tau_s)
        xs = np.arange(n_cells)[:, None] + yf[None, :]
        out += (same * weight(xs)) @ wf
        return out

    def mass(self, x_max: int) -> float:
        return float(math.fsum(self.unit_interval_integrals(int(x_max))))

    def laplace(self, eta: float, x_max: int = 60) -> float:
        return float(math.fsum(self.unit_interval_integrals(int(x_max), weight=lambda x: np.exp(-eta * x))))


def typeIII_density(lam: float, a: float, gamma_idx: float, alpha: float, beta: float,
                    x, t1: float, t2: float):
    out = TypeIIIDensity(lam, a, gamma_idx, alpha, beta, t1, t2)(x)
    return out if np.ndim(x) else float(out[0])


# -- governing-equation residuals -------------------------------------------

def _tc_caputo_lhs(lam, alpha1, beta1, n, t1, t2, ctl):
    # term k: C_k t1^{k b}/Gamma(k b + 1) -> C_k t1^{(k-1) b}/Gamma((k-1) b + 1), k >= 1
    c = (lam * t2) ** alpha1
    if c == 0:
        return 0.0
    lc, lt = math.log(c), math.log(t1)

    def term(i):
        k = i + 1
        lb, sb = _log_abs_binom(alpha1 * k, n)
        if sb == 0:
            return 0.0
        return sb * (-1) ** (k + n) * math.exp(lb + k * lc + (k - 1) * beta1 * lt
                                                - math.lgamma((k - 1) * beta1 + 1))

    # binom(k, n) = 0 for k < n when alpha1 = 1
    return sum_series(term, ctl, start=max(n - 1, 0) if alpha1 == 1 else 0).value


def caputo_fde_residual(lam: float, alpha1: float, beta1: float, n: int, t1: float, t2: float,
                        ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """D^beta1_{t1} p(n) + (lam t2)^alpha1 sum_r (-1)^r binom(alpha1, r) p(n - r)."""
    if t1 <= 0:
        raise ValueError("t1 must be positive")
    lhs = _tc_caputo_lhs(lam, alpha1, beta1, n, t1, t2, ctl)
    rhs_sum = math.fsum((-1) ** r * special.binom(alpha1, r) * tc_prf_pmf(lam, alpha1, beta1, n - r, t1, t2, ctl)
                        for r in range(n + 1))
    return lhs + (lam * t2) ** alpha1 * rhs_sum


def pgf_ode_residual(lam: float, alpha1: float, beta1: float, u: float, t1: float, t2: float,
                     ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """D^beta1_{t1} G + lam^alpha1 t2^alpha1 (1-u)^alpha1 G, Caputo taken termwise."""
    if not -1 < u < 1:
        raise ValueError("need |u| < 1")
    c = (lam * t2) ** alpha1 * (1 - u) ** alpha1
    G = mittag_leffler(beta1, 1.0, -c * t1 ** beta1, ctl)
    if c == 0:
        return 0.0
    lc, lt = math.log(c), math.log(t1)

    def term(i):
        k = i + 1
        return (-1) ** k * math.exp(k * lc + (k - 1) * beta1 * lt - math.lgamma((k - 1) * beta1 + 1))

    lhs = sum_series(term, ctl).value
    return lhs + c * G


def double_caputo_recursion_residual(lam: float, beta1: float, beta2: float, n: int, t1: float, t2: float,
                                     ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """D^beta2_{t2} D^beta1_{t1} p(n) - lam ((n+1) p(n+1) - (2n+1) p(n) + n p(n-1))."""
    if t1 <= 0 or t2 <= 0:
        raise ValueError("t1, t2 must be positive")
    x = lam * t1 ** beta1 * t2 ** beta2
    lx = math.log(x)
    lt = beta1 * math.log(t1) + beta2 * math.log(t2)
    ln_fact = math.lgamma(n + 1)

    def term(i):
        k = max(n, 1) + i
        lc = 2 * math.lgamma(k + 1) - ln_fact - math.lgamma(k - n + 1)
        return (-1) ** (k - n) * math.exp(lc + k * lx - lt - math.lgamma((k - 1) * beta1 + 1)
                                          - math.lgamma((k - 1) * beta2 + 1))

    p = WrightParams(((1, 1), (1, 1)), ((1, beta1), (1, beta2)))
    if p.delta <= 0:
        raise SeriesDivergenceError("double Caputo residual needs the convergent series branch")
    lhs = sum_series(term, ctl).value
    pm = lambda k: double_fractional_pmf(lam, beta1, beta2, k, t1, t2, ctl, branch="series") if k >= 0 else 0.0
    rhs = lam * ((n + 1) * pm(n + 1) - (2 * n + 1) * pm(n) + n * pm(n - 1))
    return lhs - rhs


# -- samplers ---------------------------------------------------------------

def poisson_counts(mu: Array, rng: np.random.Generator) -> Array:
    mu = np.asarray(mu, float)
    big = mu > _POISSON_CAP
    out = rng.poisson(np.where(big, 0.0, mu)).astype(float)
    out[big] = np.round(mu[big])
    return out


def sample_field(model: FieldModel, t1: float, t2: float, rng: np.random.Generator, size: int) -> Array:
    """N(T1(t1), T2(t2)) + a T1 T2 with independent clocks."""
    T1 = np.atleast_1d(smp.sample_clock(model.clock1, t1, rng, size))
    T2 = np.atleast_1d(smp.sample_clock(model.clock2, t2, rng, size))
    area = T1 * T2
    return poisson_counts(model.lam * area, rng) + model.drift_a * area


def sample_typeIII(lam: float, a: float, gamma_idx: float, alpha: float, beta: float,
                   t1: float, t2: float, rng: np.random.Generator, size: int) -> Array:
    """N(H^{g,b}(t1), t2) + a H^{a,b}(t1) t2 with one shared L_b(t1)."""
    L = np.atleast_1d(smp.sample_inverse_stable(beta, t1, rng, size))
    Hg = L ** (1 / gamma_idx) * (smp._kanter_draw(gamma_idx, rng, size) if gamma_idx < 1 else 1.0)
    Ha = L ** (1 / alpha) * (smp._kanter_draw(alpha, rng, size) if alpha < 1 else 1.0)
    return poisson_counts(lam * Hg * t2, rng) + a * Ha * t2


def sample_corner_counts(lam: float, s: tuple[float, float], h: float, k: float,
                         rng: np.random.Generator, size: int) -> Array:
    """Corner counts of one field realization per replicate; shape (size, 4).

    Columns follow N(t1,t2), N(s1,t2), N(t1,s2), N(s1,s2) with t = s + (h, k).
    """
    s1, s2 = s
    # cells of the window [0,t1]x[0,t2] split at s1, s2 are independent Poisson
    a_ll = rng.poisson(lam * s1 * s2, size)
    a_lr = rng.poisson(lam * h * s2, size)
    a_ul = rng.poisson(lam * s1 * k, size)
    a_ur = rng.poisson(lam * h * k, size)
    n_tt = a_ll + a_lr + a_ul + a_ur
    n_st = a_ll + a_ul
    n_ts = a_ll + a_lr
    n_ss = a_ll
    return np.column_stack([n_tt, n_st, n_ts, n_ss])


def sample_corner_counts_points(lam: float, s: tuple[float, float], h: float, k: float,
                                rng: np.random.Generator, size: int) -> Array:
    """As ``sample_corner_counts`` but from explicit point patterns (slower)."""
    s1, s2 = s
    t1, t2 = s1 + h, s2 + k
    n = rng.poisson(lam * t1 * t2, size)
    rep = np.repeat(np.arange(size), n)
    x = rng.uniform(0, t1, n.sum())
    y = rng.uniform(0, t2, n.sum())
    n_st = np.bincount(rep, weights=(x <= s1), minlength=size)
    n_ts = np.bincount(rep, weights=(y <= s2), minlength=size)
    n_ss = np.bincount(rep, weights=(x <= s1) & (y <= s2), minlength=size)
    return np.column_stack([n, n_st, n_ts, n_ss]).astype(np.int64)


def drifted_increment_chisquare(lam: float, a: float, anchor: tuple[float, float], h: float, k: float,
                                rng: np.random.Generator, size: int, points: bool = True):
    """Chi-square test of the drifted rectangle increment against N(h,k) + a h k.

    Returns (statistic, p_value, dof).
    """
    cc = (sample_corner_counts_points if points else sample_corner_counts)(lam, anchor, h, k, rng, size)
    s1, s2 = anchor
    t1, t2 = s1 + h, s2 + k
    drift = a * (t1 * t2 - s1 * t2 - t1 * s2 + s1 * s2)
    inc = rectangle_increment(cc.T) + drift
    counts = np.rint(inc - a * h * k).astype(int)
    if np.any(np.abs(inc - a * h * k - counts) > 1e-9):
        raise AssertionError("drifted increment is not on the shifted lattice")
    mu = lam * h * k
    kmax = max(int(counts.max()), int(stats.poisson.isf(1e-9, mu)))
    obs = np.bincount(counts, minlength=kmax + 1).astype(float)
    exp = stats.poisson.pmf(np.arange(kmax + 1), mu)
    exp[-1] += stats.poisson.sf(kmax, mu)
    exp *= size
    obs, exp = _pool(obs, exp)
    stat, p = stats.chisquare(obs, exp)
    return float(stat), float(p), obs.size - 1


def _pool(obs: Array, exp: Array, min_expected: float = 5.0):
    """Merge adjacent bins until each expected count is at least min_expected."""
    o, e = [], []
    acc_o = acc_e = 0.0
    for a, b in zip(obs, exp):
        acc_o += a
        acc_e += b
        if acc_e >= min_expected:
            o.append(acc_o)
            e.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        o[-1] += acc_o
        e[-1] += acc_e
    return np.array(o), np.array(e)
