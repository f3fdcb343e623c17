"""Levy processes run on a Poisson random field clock.

Y*(t1, t2) = Y(N(t1, t2) + a t1 t2) for an outer Levy process Y.  Also
the grid semigroups E f(x - N - a t1 t2) and E f(x - Y(N)), and the two
distributional checks: the decomposition into a random sum plus a drift
part, and stationarity of rectangular increments.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import samplers as smp
from .fields import FieldModel, drifted_prf_dist, rectangle_increment, sample_corner_counts_points
from .verify import ComparisonReport, ks_two_sample, make_report

Array = np.ndarray

_TAGS = ("brownian", "poisson", "compound_poisson", "stable_sub")
_JUMPS = ("unit", "gaussian")


@dataclass(frozen=True)
class LevyProcessSpec:
    tag: str
    drift: float = 0.0
    volatility: float = 1.0
    rate: float = 1.0
    jump: str = "unit"
    alpha: float = 1.0

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError(f"unknown Levy tag {self.tag!r}")
        if self.tag == "brownian" and not self.volatility > 0:
            raise ValueError("volatility must be positive")
        if self.tag in ("poisson", "compound_poisson") and not self.rate > 0:
            raise ValueError("rate must be positive")
        if self.tag == "compound_poisson" and self.jump not in _JUMPS:
            raise ValueError(f"jump must be one of {_JUMPS}")
        if self.tag == "stable_sub":
            smp._check_index(self.alpha)

    @classmethod
    def brownian(cls, drift=0.0, volatility=1.0):
        return cls("brownian", drift=drift, volatility=volatility)

    @classmethod
    def poisson(cls, rate):
        return cls("poisson", rate=rate)

    @classmethod
    def compound_poisson(cls, rate, jump="unit"):
        return cls("compound_poisson", rate=rate, jump=jump)

    @classmethod
    def stable_sub(cls, alpha):
        return cls("stable_sub", alpha=alpha)

    @property
    def mean1(self) -> float:
        if self.tag == "brownian":
            return self.drift
        if self.tag == "poisson" or (self.tag == "compound_poisson" and self.jump == "unit"):
            return self.rate
        if self.tag == "compound_poisson":
            return 0.0
        return 1.0 if self.alpha == 1 else math.inf

    @property
    def var1(self) -> float:
        if self.tag == "brownian":
            return self.volatility ** 2
        if self.tag in ("poisson", "compound_poisson"):
            return self.rate  # E jump^2 = 1 for both jump laws
        return 0.0 if self.alpha == 1 else math.inf

    def exponent(self, xi):
        """psi(xi) = log E exp(i xi Y(1))."""
        xi = np.asarray(xi, dtype=float)
        if self.tag == "brownian":
            return 1j * self.drift * xi - 0.5 * self.volatility ** 2 * xi ** 2
        if self.tag == "poisson" or (self.tag == "compound_poisson" and self.jump == "unit"):
            return self.rate * (np.exp(1j * xi) - 1)
        if self.tag == "compound_poisson":
            return self.rate * (np.exp(-0.5 * xi ** 2) - 1) + 0j
        return -((-1j * xi) ** self.alpha)


def sample_levy(spec: LevyProcessSpec, t, rng: np.random.Generator, size=None):
    """Y(t); ``t`` may be an array of (random) times, one per draw."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    shape = t.shape if size is None else np.broadcast_shapes(t.shape, (size,) if np.isscalar(size) else size)
    t = np.broadcast_to(t, shape)
    if spec.tag == "brownian":
        out = spec.drift * t + spec.volatility * np.sqrt(t) * rng.standard_normal(shape)
    elif spec.tag == "poisson" or (spec.tag == "compound_poisson" and spec.jump == "unit"):
        out = rng.poisson(spec.rate * t).astype(float)
    elif spec.tag == "compound_poisson":
        k = rng.poisson(spec.rate * t)
        out = np.sqrt(k) * rng.standard_normal(shape)
    else:
        out = t ** (1 / spec.alpha) * (smp._kanter_draw(spec.alpha, rng, shape) if spec.alpha < 1 else 1.0)
    return out if out.ndim else float(out)


def sample_levy_nested(spec: LevyProcessSpec, times: Array, rng: np.random.Generator) -> Array:
    """Y at each row of ``times`` (shape (n, m)) along one path per row."""
    times = np.asarray(times, dtype=float)
    order = np.argsort(times, axis=1, kind="stable")
    ts = np.take_along_axis(times, order, axis=1)
    dt = np.diff(ts, axis=1, prepend=0.0)
    vals = np.cumsum(sample_levy(spec, dt, rng), axis=1)
    out = np.empty_like(vals)
    np.put_along_axis(out, order, vals, axis=1)
    return out


def sample_prf_subordinated_levy(spec: LevyProcessSpec, model: FieldModel, t1: float, t2: float,
                                 rng: np.random.Generator, size: int) -> Array:
    """Y(N(t1, t2) + a t1 t2) with the field and Y drawn from separate streams."""
    rng_n, rng_y = smp.split_rng(rng, 2)
    n = rng_n.poisson(model.lam * t1 * t2, size)
    return np.asarray(sample_levy(spec, n + model.drift_a * t1 * t2, rng_y))


def prf_subordinated_cf(spec: LevyProcessSpec, lam: float, a: float, t1: float, t2: float, xi: float) -> complex:
    """E exp(i xi Y(N(t1,t2) + a t1 t2)) = exp(a t1 t2 psi) exp(lam t1 t2 (e^psi - 1))."""
    psi = complex(spec.exponent(xi))
    area = t1 * t2
    return complex(np.exp(a * area * psi + lam * area * (np.exp(psi) - 1)))


# -- grid semigroups ----------------------------------------------------------

@dataclass
class GridFunction:
    x_min: float
    h: float
    values: Array

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not self.h > 0:
            raise ValueError("grid step must be positive")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @classmethod
    def on_grid(cls, fn, x_min: float, x_max: float, h: float):
        n = int(round((x_max - x_min) / h)) + 1
        x = x_min + h * np.arange(n)
        return cls(x_min, h, fn(x))

    @property
    def x(self) -> Array:
        return self.x_min + self.h * np.arange(self.values.size)

    def sup_distance(self, other: "GridFunction") -> float:
        return float(np.max(np.abs(self.values - other.values)))


def _fourier_multiply(f: GridFunction, symbol, pad: int) -> GridFunction:
    """Apply f -> IFFT(symbol(omega) FFT(f)) on a zero-padded grid."""
    n = f.values.size
    m = 1 << int(math.ceil(math.log2(n + pad)))
    omega = 2 * np.pi * np.fft.rfftfreq(m, d=f.h)
    F = np.fft.rfft(f.values, m)
    out = np.fft.irfft(F * symbol(omega), m)[:n]
    return GridFunction(f.x_min, f.h, out)


def _edge_mass_warning(f: GridFunction, max_shift: float):
    # mass that a shift of max_shift would move past the right end of the grid
    cut = f.x[-1] - max_shift
    lost = np.abs(f.values[f.x > cut]).sum() * f.h
    if lost > 1e-12:
        warnings.warn(f"shifted support leaves the grid; truncation bound {lost:.3g}", RuntimeWarning,
                      stacklevel=3)


def prf_shift_semigroup_apply(f: GridFunction, lam: float, a: float, t1: float, t2: float,
                              method: str = "spectral") -> GridFunction:
    """(P f)(x) = sum_k w_k f(x - a t1 t2 - k) over the drifted field atoms.

    ``spectral`` shifts by a Fourier phase (exact for well-resolved f);
    ``linear`` interpolates f at the shifted points.
    """
    dist = drifted_prf_dist(lam, t1, t2, a=a)
    shifts = dist.offset + np.arange(dist.weights.size)
    _edge_mass_warning(f, shifts[-1] if dist.weights[-1] > 0 else dist.offset)
    if method == "linear":
        x = f.x
        acc = np.zeros_like(f.values)
        for w, s in zip(dist.weights, shifts):
            acc += w * np.interp(x - s, x, f.values, left=0.0, right=0.0)
        return GridFunction(f.x_min, f.h, acc)
    if method != "spectral":
        raise ValueError("method must be 'spectral' or 'linear'")
    pad = int(math.ceil(shifts[-1] / f.h)) + 1

    def symbol(omega):
        return np.exp(-1j * np.outer(omega, shifts)) @ dist.weights

    return _fourier_multiply(f, symbol, pad)


def subordinated_semigroup_apply(spec: LevyProcessSpec, f: GridFunction, lam: float, t1: float, t2: float,
                                 tail: float = 1e-12) -> GridFunction:
    """(T f)(x) = sum_n Poisson(n; lam t1 t2) E f(x - Y(n)).

    Each P_n acts as a Fourier multiplier exp(n psi(-omega)); for a
    Brownian outer this is convolution with the Gaussian kernel.
    """
    mu = lam * t1 * t2
    n_max = int(stats.poisson.isf(tail, mu)) + 1 if mu > 0 else 0
    w = stats.poisson.pmf(np.arange(n_max + 1), mu)
    # outer reach: mean plus 12 standard deviations at the largest n
    reach = 0.0
    if spec.tag != "stable_sub":
        reach = abs(spec.mean1) * n_max + 12 * math.sqrt(spec.var1 * n_max)
    pad = int(math.ceil(reach / f.h)) + 1

    def symbol(omega):
        psi = spec.exponent(-omega)
        return np.exp(np.outer(psi, np.arange(n_max + 1))) @ w

    return _fourier_multiply(f, symbol, pad)


# -- distributional checks ----------------------------------------------------

def _random_sum_of_unit_copies(spec: LevyProcessSpec, counts: Array, rng: np.random.Generator) -> Array:
    """sum_{k=1}^{N_i} Y_k(1) per replicate, each Y_k(1) drawn separately."""
    counts = np.asarray(counts, dtype=np.int64)
    y = np.asarray(sample_levy(spec, np.ones(int(counts.sum())), rng))
    rep = np.repeat(np.arange(counts.size), counts)
    return np.bincount(rep, weights=y, minlength=counts.size)


def decomposition_sides(spec: LevyProcessSpec, lam: float, a: float, t1: float, t2: float,
                        rng: np.random.Generator, size: int) -> tuple[Array, Array]:
    """Independent draws of Y(N + a t1 t2) and of sum_{k<=N} Y_k(1) + Y(a t1 t2)."""
    r_left, r_n, r_sum, r_drift = smp.split_rng(rng, 4)
    left = sample_prf_subordinated_levy(spec, FieldModel(lam, drift_a=a), t1, t2, r_left, size)
    n = r_n.poisson(lam * t1 * t2, size)
    right = _random_sum_of_unit_copies(spec, n, r_sum) + sample_levy(spec, a * t1 * t2, r_drift, size)
    return left, right


def decomposition_sides_stable(spec: LevyProcessSpec, lam: float, a: float, gamma_idx: float, alpha: float,
                               t1: float, t2: float, rng: np.random.Generator, size: int) -> tuple[Array, Array]:
    """As ``decomposition_sides`` with N(S_g(t1), t2) and drift a S_a(t1) t2, independent stable clocks."""
    r_l1, r_l2, r_l3, r_r1, r_r2, r_r3, r_r4 = smp.split_rng(rng, 7)
    sg = smp.sample_stable(gamma_idx, t1, r_l1, size)
    sa = smp.sample_stable(alpha, t1, r_l2, size)
    n = r_l3.poisson(lam * sg * t2)
    left = np.asarray(sample_levy(spec, n + a * sa * t2, r_l3))
    sg = smp.sample_stable(gamma_idx, t1, r_r1, size)
    sa = smp.sample_stable(alpha, t1, r_r2, size)
    n = r_r3.poisson(lam * sg * t2)
    right = _random_sum_of_unit_copies(spec, n, r_r3) + np.asarray(sample_levy(spec, a * sa * t2, r_r4))
    return left, right


def ks_report(name: str, a: Array, b: Array, seed: int = 0) -> ComparisonReport:
    d, crit = ks_two_sample(a, b)
    return make_report(name, 0.0, d, 0.0, d, crit, seed, a.size)


def decomposition_check(spec: LevyProcessSpec, lam: float, a: float, t1: float, t2: float,
                        n_samples: int, rng: np.random.Generator, name: str = "decomposition") -> ComparisonReport:
    """Two-sample KS at 1% between the two sides of the decomposition."""
    left, right = decomposition_sides(spec, lam, a, t1, t2, rng, n_samples)
    return ks_report(name, left, right)


def rect_increment_samples(spec: LevyProcessSpec, lam: float, anchor: tuple[float, float], h: float, k: float,
                           rng: np.random.Generator, size: int, a: float = 0.0) -> Array:
    """Rectangular increment of Y(N + a t1 t2) over (s, s + (h, k)].

    Corner counts come from one point pattern per replicate and Y is read
    at the four corner times along a single path.
    """
    r_pts, r_path = smp.split_rng(rng, 2)
    s1, s2 = anchor
    cc = sample_corner_counts_points(lam, anchor, h, k, r_pts, size).astype(float)
    corners = np.array([(s1 + h) * (s2 + k), s1 * (s2 + k), (s1 + h) * s2, s1 * s2])
    times = cc + a * corners[None, :]
    y = sample_levy_nested(spec, times, r_path)
    return rectangle_increment(y.T)


def stationary_rect_increment_check(spec: LevyProcessSpec, lam: float, anchors, h: float, k: float,
                                    n_samples: int, rng: np.random.Generator, a: float = 0.0,
                                    name: str = "stationary_increments") -> ComparisonReport:
    """Two-sample KS at 1% between increment laws at two anchors.

    Each anchor gets its own stream keyed by a base draw and the anchor
    itself, so equal anchors reproduce the same sample.
    """
    (p, q) = [tuple(map(float, an)) for an in anchors]
    base = int(rng.integers(2**63))
    samples = []
    for an in (p, q):
        key = smp.mix_seed(base, *(int(np.float64(c).view(np.int64)) for c in an))
        samples.append(rect_increment_samples(spec, lam, an, h, k, smp.make_rng(key), n_samples, a))
    return ks_report(name, samples[0], samples[1])

