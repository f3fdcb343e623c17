"""Stable and inverse stable subordinators, their composition, bivariate clocks.

Sampling uses Kanter's representation of a one-sided stable variable,

    S_a(1) = (A(theta) / E)^((1-a)/a),  theta ~ U(0, pi),  E ~ Exp(1),

and the same representation gives the distribution function and density
as smooth integrals over theta.  Densities use the Wright series when the
argument is small and the theta integral otherwise, so neither route has
to fight cancellation.

Joint values of one inverse stable path at several times come from an
exact first-passage construction (undershoot, overshoot, passage time),
not from the scaling L(t) = (t/S(1))^b, which only has the right marginals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .specfun import DEFAULT_CONTROL, SeriesControl, mittag_leffler

Array = np.ndarray


# -- clock descriptions -----------------------------------------------------

def _check_index(a: float, name: str = "alpha") -> float:
    a = float(a)
    if not 0 < a <= 1:
        raise ValueError(f"{name} must lie in (0, 1], got {a}")
    return a


@dataclass(frozen=True)
class TimeChangeSpec:
    """A one-axis random clock.

    tag is one of 'identity', 'stable', 'inverse_stable', 'composition'.
    ``alpha`` is the stable index, ``beta`` the inverse stable index.
    """

    tag: str = "identity"
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.tag not in ("identity", "stable", "inverse_stable", "composition"):
            raise ValueError(f"unknown clock tag {self.tag!r}")
        _check_index(self.alpha, "alpha")
        _check_index(self.beta, "beta")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def stable(cls, alpha):
        return cls("stable", alpha=alpha)

    @classmethod
    def inverse_stable(cls, beta):
        return cls("inverse_stable", beta=beta)

    @classmethod
    def composition(cls, alpha, beta):
        return cls("composition", alpha=alpha, beta=beta)

    def laplace_exponent(self, eta):
        """Bernstein function of the stable part (identity clock: eta)."""
        a = self.alpha if self.tag in ("stable", "composition") else 1.0
        return np.asarray(eta, dtype=float) ** a


@dataclass(frozen=True)
class BivariatePairSpec:
    """'independent' uses two unrelated clocks; 'common' drives both axes by one."""

    tag: str
    spec1: TimeChangeSpec
    spec2: TimeChangeSpec | None = None

    def __post_init__(self):
        if self.tag == "independent":
            if self.spec2 is None:
                raise ValueError("independent pair needs two clocks")
        elif self.tag == "common":
            if self.spec2 is not None and self.spec2 != self.spec1:
                raise ValueError("common pair uses a single clock")
        else:
            raise ValueError(f"unknown pair tag {self.tag!r}")

    @classmethod
    def independent(cls, spec1, spec2):
        return cls("independent", spec1, spec2)

    @classmethod
    def common(cls, spec):
        return cls("common", spec)


def make_rng(seed: int = 0) -> np.random.Generator:
    """Counter-based generator; identical seed gives an identical stream."""
    return np.random.Generator(np.random.Philox(key=int(seed) % 2**64))


_M64 = 2**64 - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def split_rng(rng: np.random.Generator, n: int) -> list[np.random.Generator]:
    """n independent child generators keyed by draws from the parent."""
    return [make_rng(mix_seed(int(k), i)) for i, k in enumerate(rng.integers(0, 2**63, n))]


def mix_seed(*parts: int) -> int:
    """Avalanche-mix integers into one 64-bit key (splitmix64 chained)."""
    h = 0
    for p in parts:
        h = _splitmix64(h ^ (int(p) & _M64))
    return h


# -- Kanter function --------------------------------------------------------

def kanter_log_a(theta, alpha: float):
    """log A(theta) for theta in (0, pi)."""
    a = alpha
    theta = np.asarray(theta, dtype=float)
    return (a / (1 - a) * np.log(np.sin(a * theta)) + np.log(np.sin((1 - a) * theta))
            - np.log(np.sin(theta)) / (1 - a))


def kanter_a0(alpha: float) -> float:
    """A(0+) = alpha^(alpha/(1-alpha)) (1-alpha), the minimum of A."""
    return alpha ** (alpha / (1 - alpha)) * (1 - alpha)


@lru_cache(maxsize=None)
def _theta_rule(n: int = 256):
    u, w = np.polynomial.legendre.leggauss(n)
    return np.pi * (u + 1) / 2, w * np.pi / 2


@lru_cache(maxsize=64)
def _theta_a(alpha: float, n: int = 256):
    th, w = _theta_rule(n)
    return np.exp(kanter_log_a(th, alpha)), w / np.pi


def _kanter_avg(alpha: float, c: Array, fn: Callable[[Array], Array], n: int = 256) -> Array:
    """(1/pi) int_0^pi fn(A(theta) c) dtheta, vectorized over c."""
    A, w = _theta_a(alpha, n)
    c = np.asarray(c, dtype=float)
    flat = c.reshape(-1)
    out = np.empty(flat.shape)
    step = max(1, 2**20 // len(A))
    for i in range(0, flat.size, step):
        with np.errstate(over="ignore"):
            blk = flat[i:i + step, None] * A[None, :]
        out[i:i + step] = fn(blk) @ w
    return out.reshape(c.shape)


# -- densities and distribution functions ----------------------------------

_SERIES_Z = 1.0  # series below this Wright argument, theta integral above


@lru_cache(maxsize=256)
def _wright_coefs(sigma: float, rho: float, zmax: float, skip0: bool = False):
    """Log-magnitudes and signs of 1/(k! Gamma(k sigma + rho)), enough for |x| <= zmax."""
    logs, signs = [], []
    lz = math.log(zmax)
    quiet = 0
    for k in range(5000):
        g = k * sigma + rho
        if g <= 0 and g == math.floor(g):
            logs.append(-math.inf)
            signs.append(0.0)
        else:
            lg = math.lgamma(g)
            sg = 1.0 if g > 0 or math.floor(g) % 2 == 0 else -1.0
            logs.append(-lg - math.lgamma(k + 1))
            signs.append(sg)
        quiet = quiet + 1 if logs[-1] + k * lz < -45 else 0
        if quiet >= 3:
            break
    logs, signs = np.array(logs), np.array(signs)
    if skip0:
        signs[0] = 0.0
    return logs, signs


def _wright_series_vec(sigma: float, rho: float, x: Array, skip0: bool = False) -> Array:
    """sum_k x^k / (k! Gamma(k sigma + rho)) for an array of |x| <= _SERIES_Z."""
    x = np.asarray(x, dtype=float)
    logs, signs = _wright_coefs(sigma, rho, _SERIES_Z, skip0)
    coef = signs * np.exp(logs)
    # Horner from the highest term down
    out = np.zeros(x.shape)
    for c in coef[::-1]:
        out = out * x + c
    return out


def _m_wright(beta: float, z: Array, ctl: SeriesControl = DEFAULT_CONTROL) -> Array:
    """M(z) = W_{-b,1-b}(-z), the inverse stable density at t=1."""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape)
    small = z <= _SERIES_Z
    if np.any(small):
        out[small] = _wright_series_vec(-beta, 1 - beta, -z[small])
    big = ~small
    if np.any(big):
        zb = z[big]
        out[big] = _m_big_times_z(beta, zb) / zb
    return out


def _uexpu(u: Array) -> Array:
    # clipping keeps exp away from subnormals, which are slow; u e^-u < 1e-301 there
    u = np.minimum(u, 700.0)
    return u * np.exp(-u)


def _m_big_times_z(beta: float, z: Array) -> Array:
    """z M(z) for z > _SERIES_Z; finite for any z."""
    with np.errstate(over="ignore"):
        c = z ** (1 / (1 - beta))
    return _kanter_avg(beta, c, _uexpu) / (1 - beta)


def inverse_stable_density(beta: float, x, t: float, ctl: SeriesControl = DEFAULT_CONTROL):
    """f_b(x, t) = t^{-b} W_{-b,1-b}(-x t^{-b}), x >= 0."""
    beta = _check_index(beta, "beta")
    if beta == 1:
        raise ValueError("inverse_stable_density: beta = 1 has no density (L(t) = t)")
    if t <= 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    tb = t ** -beta
    out = np.where(x < 0, 0.0, tb * _m_wright(beta, np.maximum(x, 0) * tb, ctl))
    return out if out.ndim else float(out)


def stable_density(alpha: float, x, t: float = 1.0, ctl: SeriesControl = DEFAULT_CONTROL):
    """g_a(x, t) = a t x^{-1} f_a(t, x), density of S_a(t) at x > 0."""
    alpha = _check_index(alpha)
    if alpha == 1:
        raise ValueError("stable_density: alpha = 1 is degenerate (S(t) = t)")
    x = np.asarray(x, dtype=float)
    pos = x > 0
    xs = np.where(pos, x, 1.0)
    z = t * xs ** -alpha
    small = z <= _SERIES_Z
    # g = alpha z M(z) / x
    zm = np.empty(z.shape)
    zm[small] = z[small] * _m_wright(alpha, z[small], ctl)
    zm[~small] = _m_big_times_z(alpha, z[~small])
    out = np.where(pos, alpha * zm / xs, 0.0)
    return out if out.ndim else float(out)


def _stable_tail_series(alpha: float, z: Array) -> Array:
    # P(S_a(t) > x) = 1 - W_{-a,1}(-z) = -sum_{k>=1} (-z)^k / (k! Gamma(1 - a k)), z = t x^{-a}
    return -_wright_series_vec(-alpha, 1.0, -np.asarray(z, dtype=float), skip0=True)


def stable_cdf(alpha: float, x, t: float = 1.0):
    """P(S_a(t) <= x)."""
    alpha = _check_index(alpha)
    x = np.asarray(x, dtype=float)
    if alpha == 1:
        out = (x >= t).astype(float)
        return out if out.ndim else float(out)
    pos = x > 0
    z = t * np.where(pos, x, 1.0) ** -alpha
    out = np.zeros(x.shape)
    small = pos & (z <= _SERIES_Z)
    if np.any(small):
        out[small] = 1.0 - _stable_tail_series(alpha, z[small])
    big = pos & ~small
    if np.any(big):
        with np.errstate(over="ignore"):
            c = z[big] ** (1 / (1 - alpha))
        out[big] = _kanter_avg(alpha, c, lambda u: np.exp(-np.minimum(u, 700.0)))
    return out if out.ndim else float(out)


def stable_sf(alpha: float, x, t: float = 1.0):
    """P(S_a(t) > x), accurate in the far right tail."""
    alpha = _check_index(alpha)
    x = np.asarray(x, dtype=float)
    if alpha == 1:
        out = (x < t).astype(float)
        return out if out.ndim else float(out)
    pos = x > 0
    z = t * np.where(pos, x, 1.0) ** -alpha
    out = np.ones(x.shape)
    small = pos & (z <= _SERIES_Z)
    if np.any(small):
        out[small] = _stable_tail_series(alpha, z[small])
    big = pos & ~small
    if np.any(big):
        with np.errstate(over="ignore"):
            c = z[big] ** (1 / (1 - alpha))
        out[big] = _kanter_avg(alpha, c, lambda u: -np.expm1(-np.minimum(u, 700.0)))
    return out if out.ndim else float(out)


def inverse_stable_cdf(beta: float, x, t: float = 1.0):
    """P(L_b(t) <= x) = P(S_b(x) >= t)."""
    beta = _check_index(beta, "beta")
    x = np.asarray(x, dtype=float)
    if beta == 1:
        out = (x >= t).astype(float)
        return out if out.ndim else float(out)
    pos = x > 0
    # S_b(x) =d x^{1/b} S_b(1)
    out = np.where(pos, stable_sf(beta, t * np.where(pos, x, 1.0) ** (-1 / beta)), 0.0)
    return out if out.ndim else float(out)


# -- quadrature rules -------------------------------------------------------

@lru_cache(maxsize=128)
def _m_wright_rule(beta: float, panels: int = 16, order: int = 24, graded: int = 12):
    zmax = (60.0 / ((1 - beta) * beta ** (beta / (1 - beta)))) ** (1 - beta)
    u, w = np.polynomial.legendre.leggauss(order)
    # geometric panels towards 0 absorb integrands like exp(-c x^a)
    first = zmax / panels
    edges = np.concatenate([[0.0], first * np.logspace(-graded, 0, graded + 1)[:-1],
                            np.linspace(first, zmax, panels)])
    z = np.concatenate([(a + b) / 2 + (b - a) / 2 * u for a, b in zip(edges[:-1], edges[1:])])
    wz = np.concatenate([(b - a) / 2 * w for a, b in zip(edges[:-1], edges[1:])])
    wz = wz * _m_wright(beta, z)
    return z, wz


def inverse_stable_rule(beta: float, t: float) -> tuple[Array, Array]:
    """Nodes and weights with sum_i w_i h(x_i) ~ E h(L_b(t)).

    h may have a power-type singularity at 0.
    """
    beta = _check_index(beta, "beta")
    if beta == 1:
        return np.array([float(t)]), np.array([1.0])
    z, w = _m_wright_rule(beta)
    return z * t ** beta, w.copy()


def inverse_stable_laplace(beta: float, eta: float, t: float = 1.0,
                           ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """E exp(-eta L_b(t)) = E_b(-eta t^b), robust for large arguments."""
    beta = _check_index(beta, "beta")
    x = eta * t ** beta
    if beta == 1:
        return math.exp(-x)
    if x <= 6.0:
        res = mittag_leffler(beta, 1.0, -x, ctl, info=True)
        if not res.precision_loss:
            return res.value
    # int_0^inf e^{-x z} M(z) dz = (1/x) int e^{-u} M(u/x) du
    u, w = np.polynomial.laguerre.laggauss(80)
    return float(w @ _m_wright(beta, u / x)) / x


# -- samplers ---------------------------------------------------------------

def _kanter_draw(alpha: float, rng: np.random.Generator, size, shape: float = 1.0):
    th = rng.uniform(0.0, np.pi, size)
    e = rng.exponential(1.0, size) if shape == 1.0 else rng.gamma(shape, 1.0, size)
    return np.exp((1 - alpha) / alpha * (kanter_log_a(th, alpha) - np.log(e)))


def _maybe_scalar(x, size):
    return float(x) if size is None else x


def sample_stable(alpha: float, t: float, rng: np.random.Generator, size=None):
    """Draws of S_a(t); S_1(t) = t exactly."""
    alpha = _check_index(alpha)
    if t < 0:
        raise ValueError("t must be non-negative")
    n = 1 if size is None else size
    if alpha == 1 or t == 0:
        return _maybe_scalar(np.full(n, float(t)), size) if size is not None else float(t)
    s = t ** (1 / alpha) * _kanter_draw(alpha, rng, n)
    return float(s[0]) if size is None else s


def sample_inverse_stable(beta: float, t: float, rng: np.random.Generator, size=None):
    """Draws of L_b(t) = (t / S_b(1))^b (marginal law only)."""
    beta = _check_index(beta, "beta")
    n = 1 if size is None else size
    if beta == 1 or t == 0:
        return float(t) if size is None else np.full(n, float(t))
    s1 = _kanter_draw(beta, rng, n)
    out = (t / s1) ** beta
    return float(out[0]) if size is None else out


def sample_composition(alpha: float, beta: float, t: float, rng: np.random.Generator, size=None):
    """Draws of H(t) = S_a(L_b(t)) with independent S and L."""
    _check_index(alpha)
    _check_index(beta, "beta")
    n = 1 if size is None else size
    L = np.atleast_1d(sample_inverse_stable(beta, t, rng, n))
    if alpha == 1:
        h = L
    else:
        h = L ** (1 / alpha) * _kanter_draw(alpha, rng, n)
    return float(h[0]) if size is None else h


def sample_clock(spec: TimeChangeSpec, t: float, rng: np.random.Generator, size=None):
    if spec.tag == "identity":
        return float(t) if size is None else np.full(size, float(t))
    if spec.tag == "stable":
        return sample_stable(spec.alpha, t, rng, size)
    if spec.tag == "inverse_stable":
        return sample_inverse_stable(spec.beta, t, rng, size)
    return sample_composition(spec.alpha, spec.beta, t, rng, size)


def _sample_size_biased(beta: float, rng: np.random.Generator, n: int) -> Array:
    """Draws with density proportional to s^{-b} g_b(s, 1).

    In Kanter form the weight s^{-b} = (E/A)^{1-b} turns E into Gamma(2-b)
    and tilts theta by A^{b-1}, which is bounded by A(0)^{b-1}.
    """
    la0 = math.log(kanter_a0(beta))
    th = np.empty(n)
    filled = 0
    while filled < n:
        m = 2 * (n - filled) + 64
        cand = rng.uniform(0.0, np.pi, m)
        acc = rng.uniform(size=m) < np.exp((beta - 1) * (kanter_log_a(cand, beta) - la0))
        take = cand[acc][: n - filled]
        th[filled:filled + take.size] = take
        filled += take.size
    e = rng.gamma(2 - beta, 1.0, n)
    return np.exp((1 - beta) / beta * (kanter_log_a(th, beta) - np.log(e)))


def sample_inverse_stable_path(beta: float, times, rng: np.random.Generator,
                               size: int) -> Array:
    """Joint draws of L_b at several times along one path; shape (size, m).

    ``times`` is a length-m sequence or a (size, m) array of per-replicate
    times.  Each passage of a level r above the current position uses the
    exact law of (passage time, undershoot, overshoot): undershoot
    r*Beta(b, 1-b), overshoot from the Levy measure, passage time from the
    size-biased law.
    """
    beta = _check_index(beta, "beta")
    times = np.asarray(times, dtype=float)
    tt = times if times.ndim == 2 else np.broadcast_to(times, (size, times.size))
    if beta == 1:
        return np.array(tt, dtype=float)
    order = np.argsort(tt, axis=1, kind="stable")
    srt = np.take_along_axis(tt, order, axis=1)
    vals = np.empty_like(srt)
    level = np.zeros(size)   # S just after the last passage
    clock = np.zeros(size)   # L at the last passage
    for j in range(srt.shape[1]):
        t = srt[:, j]
        need = level < t
        m = int(need.sum())
        if m:
            r = t[need] - level[need]
            y = r * rng.beta(beta, 1 - beta, m)
            v = rng.uniform(size=m)
            jump = (r - y) * v ** (-1 / beta)
            tau = y ** beta * _sample_size_biased(beta, rng, m) ** (-beta)
            clock[need] += tau
            level[need] += y + jump
        vals[:, j] = clock
    out = np.empty_like(vals)
    np.put_along_axis(out, order, vals, axis=1)
    return out


def sample_stable_path(alpha: float, times: Sequence[float], rng: np.random.Generator,
                       size: int) -> Array:
    """Joint draws of S_a at several times along one path; shape (size, m).

    ``times`` may be a (size, m) array of per-replicate times (non-negative).
    """
    times = np.asarray(times, dtype=float)
    per_row = times.ndim == 2
    tt = times if per_row else np.broadcast_to(times, (size, times.size))
    order = np.argsort(tt, axis=1, kind="stable")
    srt = np.take_along_axis(tt, order, axis=1)
    inc = np.diff(srt, axis=1, prepend=0.0)
    if alpha == 1:
        steps = inc
    else:
        steps = inc ** (1 / alpha) * _kanter_draw(alpha, rng, inc.shape)
    vals = np.cumsum(steps, axis=1)
    out = np.empty_like(vals)
    np.put_along_axis(out, order, vals, axis=1)
    return out


def sample_clock_path(spec: TimeChangeSpec, times: Sequence[float], rng: np.random.Generator,
                      size: int) -> Array:
    """One clock path evaluated at several times; shape (size, m)."""
    times = np.asarray(times, dtype=float)
    if spec.tag == "identity":
        return np.broadcast_to(times, (size, times.size)).copy()
    if spec.tag == "stable":
        return sample_stable_path(spec.alpha, times, rng, size)
    L = sample_inverse_stable_path(spec.beta, times, rng, size)
    if spec.tag == "inverse_stable":
        return L
    return sample_stable_path(spec.alpha, L, rng, size)


def sample_bivariate_time_change(pair: BivariatePairSpec, t1: float, t2: float,
                                 rng: np.random.Generator, size=None):
    """Draws of (T_1(t1), T_2(t2)); a common pair reads one path at both times."""
    n = 1 if size is None else size
    if pair.tag == "independent":
        a = np.atleast_1d(sample_clock(pair.spec1, t1, rng, n))
        b = np.atleast_1d(sample_clock(pair.spec2, t2, rng, n))
    else:
        p = sample_clock_path(pair.spec1, [t1, t2], rng, n)
        a, b = p[:, 0], p[:, 1]
    if size is None:
        return float(a[0]), float(b[0])
    return a, b


def scaling_pair(beta: float, t1: float, t2: float, rng: np.random.Generator, size: int):
    """(t1/S)^b, (t2/S)^b from one S = S_b(1).

    Right marginals, wrong joint law for an inverse subordinator path; kept
    only to compare against ``sample_inverse_stable_path``.
    """
    s = _kanter_draw(beta, rng, size)
    return (t1 / s) ** beta, (t2 / s) ** beta


# -- composition ------------------------------------------------------------

def composition_density(alpha: float, beta: float, x: float, t: float,
                        rel_tol: float = 1e-8) -> float:
    """f_{a,b}(x, t) = int_0^inf g_a(x, s) f_b(s, t) ds by adaptive quadrature."""
    alpha = _check_index(alpha)
    beta = _check_index(beta, "beta")
    if alpha == 1 or beta == 1:
        raise ValueError("composition_density needs alpha < 1 and beta < 1")
    if x <= 0 or t <= 0:
        raise ValueError("x and t must be positive")
    smax = t ** beta * _m_wright_rule(beta)[0][-1]

    def integrand(s):
        if s <= 0:
            return 0.0
        # S_a(s) =d s^{1/a} S_a(1)
        g = s ** (-1 / alpha) * stable_density(alpha, x * s ** (-1 / alpha))
        return g * inverse_stable_density(beta, s, t)

    val, err = integrate.quad(integrand, 0.0, smax, epsabs=0.0, epsrel=rel_tol, limit=200)
    if not err <= max(1e-6 * abs(val), 1e-12):
        raise ArithmeticError(f"composition_density quadrature error estimate {err:.3g}")
    return val


def composition_laplace(alpha: float, beta: float, eta: float, t: float,
                        ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """E exp(-eta H(t)) = E_b(-t^b eta^a)."""
    _check_index(alpha)
    _check_index(beta, "beta")
    if eta <= 0:
        raise ValueError("eta must be positive")
    if t == 0:
        return 1.0
    return inverse_stable_laplace(beta, eta ** alpha, t, ctl)


def composition_time_laplace(alpha: float, beta: float, x: float, z: float,
                             ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """int_0^inf e^{-zt} f_{a,b}(x, t) dt = z^{b-1} x^{a-1} E_{a,a}(-z^b x^a)."""
    return z ** (beta - 1) * x ** (alpha - 1) * mittag_leffler(alpha, alpha, -(z ** beta) * x ** alpha, ctl)


def generic_composition_double_laplace(sigma: Callable[[float], float], rho: Callable[[float], float],
                                       eta: float, z: float) -> float:
    """rho(z) / (z (sigma(eta) + rho(z)))."""
    r = rho(z)
    return r / (z * (sigma(eta) + r))


def power_bernstein(a: float) -> Callable:
    return lambda x: np.asarray(x, dtype=float) ** a


def bivariate_composition_double_laplace(B1: Callable, B2: Callable, B: Callable,
                                         eta1: float, eta2: float, z1: float, z2: float,
                                         probe: Sequence[float] = (0.1, 0.5, 1.0, 2.0, 7.0)) -> float:
    """Space-time double Laplace transform of (S_1(L_1(t1)), S_2(L_2(t2))).

    B is the joint exponent shared by the outer pair and the pair behind the
    inverse clocks; B1, B2 are its marginals (checked on ``probe``).
    """
    for p in probe:
        if abs(B(p, 0.0) - B1(p)) > 1e-10 * max(1.0, abs(B1(p))) or \
           abs(B(0.0, p) - B2(p)) > 1e-10 * max(1.0, abs(B2(p))):
            raise ValueError("joint exponent B is inconsistent with its marginals B1, B2")
    bz = B(z1, z2)
    b1z, b2z = B1(z1), B2(z2)
    bracket = (b2z * (bz - b2z) / (B2(eta2) + b2z)
               + b1z * (bz - b1z) / (B1(eta1) + b1z)
               + b1z + b2z - bz)
    return float(bracket / (z1 * z2 * (B(eta1, eta2) + bz)))


def stable_exponents(kind: str, alpha1: float, alpha2: float | None = None):
    """(B1, B2, B) for the two sampled corners of a bivariate stable clock."""
    alpha2 = alpha1 if alpha2 is None else alpha2
    B1, B2 = power_bernstein(alpha1), power_bernstein(alpha2)
    if kind == "independent":
        return B1, B2, lambda x, y: B1(x) + B2(y)
    if kind == "common":
        if alpha1 != alpha2:
            raise ValueError("a common clock has a single index")
        return B1, B2, lambda x, y: (np.asarray(x, float) + np.asarray(y, float)) ** alpha1
    raise ValueError(kind)


def sample_bivariate_composition(kind: str, alpha: float, beta: float, t1, t2,
                                 rng: np.random.Generator, size: int):
    """Draws of (S_1(L_1(t1)), S_2(L_2(t2))) for the independent or common corner.

    t1, t2 may be arrays of per-replicate times.  In the common corner one
    stable path S and one inverse path L (of an independent copy) serve
    both coordinates.
    """
    t1 = np.broadcast_to(np.asarray(t1, float), (size,))
    t2 = np.broadcast_to(np.asarray(t2, float), (size,))
    if kind == "independent":
        out = []
        for t in (t1, t2):
            s1 = _kanter_draw(beta, rng, size) if beta < 1 else np.ones(size)
            L = (t / s1) ** beta if beta < 1 else t.copy()
            out.append(L ** (1 / alpha) * _kanter_draw(alpha, rng, size) if alpha < 1 else L)
        return out[0], out[1]
    if kind != "common":
        raise ValueError(kind)
    L = sample_inverse_stable_path(beta, np.stack([t1, t2], axis=1), rng, size)
    H = sample_stable_path(alpha, L, rng, size)
    return H[:, 0], H[:, 1]
