"""Special functions: gamma, Mittag-Leffler, Wright, generalized Wright.

All series share one stopping rule (see ``SeriesControl``) and are summed
with ``math.fsum`` so alternating series keep as many digits as the
individual terms allow.  A result can report that cancellation ate most of
those digits (``precision_loss``); callers that care switch to quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class SeriesError(ArithmeticError):
    """Raised when a series cannot be evaluated to the requested tolerance."""


class NonConvergenceError(SeriesError):
    pass


class SeriesDivergenceError(SeriesError):
    """The series is divergent at this argument; use a quadrature fallback."""


class GammaPoleError(ValueError):
    pass


@dataclass(frozen=True)
class SeriesControl:
    abs_tol: float = 1e-17
    rel_tol: float = 1e-16
    max_terms: int = 5000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.max_terms >= 1):
            raise ValueError("SeriesControl needs abs_tol > 0, rel_tol > 0, max_terms >= 1")


DEFAULT_CONTROL = SeriesControl()

# a term this far below the largest one is under the rounding floor of the sum,
# which matters when the sum itself underflows or cancels
_NOISE = 0.01 * 2.0 ** -52


@dataclass(frozen=True)
class SeriesResult:
    value: float
    n_terms: int
    max_term: float
    precision_loss: bool

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class WrightParams:
    """Parameter pairs of a generalized Wright function.

    ``upper`` holds (a_i, alpha_i), ``lower`` holds (b_j, beta_j).
    """

    upper: tuple = ()
    lower: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple((float(a), float(s)) for a, s in self.upper))
        object.__setattr__(self, "lower", tuple((float(b), float(s)) for b, s in self.lower))

    @property
    def delta(self) -> float:
        # growth exponent of the coefficients, the n! included
        return sum(s for _, s in self.lower) - sum(s for _, s in self.upper) + 1.0


def _is_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def log_gamma(x: float) -> tuple[float, int]:
    """Return (log|Gamma(x)|, sign of Gamma(x))."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("log_gamma needs a finite argument")
    if _is_pole(x):
        raise GammaPoleError(f"Gamma has a pole at {x}")
    if x > 0:
        return math.lgamma(x), 1
    sign = 1 if math.floor(x) % 2 == 0 else -1
    return math.lgamma(x), sign


def rgamma(x: float) -> float:
    """1/Gamma(x), zero at the poles."""
    if _is_pole(x):
        return 0.0
    lg, sg = log_gamma(x)
    return sg * math.exp(-lg)


def falling_factorial(x, n: int):
    """(x)_n = x (x-1) ... (x-n+1); works elementwise on arrays."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    for i in range(n):
        out = out * (x - i)
    return out if out.ndim else float(out)


def sum_series(term: Callable[[int], float], ctl: SeriesControl = DEFAULT_CONTROL,
               start: int = 0, detect_divergence: bool = False) -> SeriesResult:
    """Sum term(k) for k >= start with the shared stopping rule.

    Stops when |term| <= abs_tol and |term| <= rel_tol*|partial sum| hold
    for two consecutive terms.  A term far below the rounding floor set by
    the largest term also counts, so underflowing sums terminate.
    """
    terms: list[float] = []
    partial = 0.0
    comp = 0.0
    max_term = 0.0
    quiet = 0
    rising = 0
    prev = None
    for i in range(ctl.max_terms):
        k = start + i
        try:
            t = term(k)
        except OverflowError:
            raise NonConvergenceError(f"term overflows at k={k}") from None
        if not math.isfinite(t):
            raise NonConvergenceError(f"non-finite term at k={k}")
        terms.append(t)
        # Neumaier running sum for the stopping test
        s = partial + t
        if abs(partial) >= abs(t):
            comp += (partial - s) + t
        else:
            comp += (t - s) + partial
        partial = s
        a = abs(t)
        max_term = max(max_term, a)
        if a <= ctl.abs_tol and (a <= ctl.rel_tol * abs(partial + comp) or a <= _NOISE * max_term):
            quiet += 1
            if quiet >= 2:
                value = math.fsum(terms)
                loss = max_term > 0 and abs(value) < 1e-6 * max_term
                return SeriesResult(value, i + 1, max_term, loss)
        else:
            quiet = 0
        if detect_divergence and prev is not None:
            rising = rising + 1 if a > prev and a > 0 else 0
            if i > 10 and rising >= 3:
                raise SeriesDivergenceError(
                    "series terms keep growing; use the quadrature fallback in fracfields.fields")
        prev = a
    raise NonConvergenceError(f"stopping rule not met within {ctl.max_terms} terms")


def _power_term(logabs_x: float, sign_x: int, k: int) -> tuple[float, int]:
    if k == 0:
        return 0.0, 1
    return k * logabs_x, sign_x ** k


def _ml_series(alpha: float, beta: float, x: float, ctl: SeriesControl) -> SeriesResult:
    if alpha <= 0:
        raise ValueError("mittag_leffler needs alpha > 0")
    if x == 0:
        return SeriesResult(rgamma(beta), 1, abs(rgamma(beta)), False)
    lx = math.log(abs(x))
    sx = 1 if x > 0 else -1

    def term(k):
        g = k * alpha + beta
        if _is_pole(g):
            return 0.0
        lg, sg = log_gamma(g)
        lp, sp = _power_term(lx, sx, k)
        return sp * sg * math.exp(lp - lg)

    return sum_series(term, ctl)


def _cancels(res: SeriesResult) -> bool:
    # more than two digits lost to cancellation
    return res.max_term > 100 * abs(res.value)


def _mp_resum(term, first: SeriesResult, ctl: SeriesControl) -> SeriesResult:
    """Re-sum a cancelling series in extended precision.

    ``term(k)`` returns an mpmath number at the working precision.  The
    precision covers the digits lost between the largest term and the sum.
    """
    import mpmath

    digits = 20 + max(0, math.ceil(math.log10(max(first.max_term, 1.0))))
    for _ in range(4):
        with mpmath.workdps(digits):
            total = mpmath.mpf(0)
            eps = mpmath.mpf(10) ** (-digits)
            quiet, prev, n = 0, None, 0
            for k in range(ctl.max_terms):
                t = term(k)
                n = k + 1
                if t == 0:
                    # pole of the gamma factor; says nothing about convergence
                    continue
                total += t
                a = abs(t)
                falling = prev is not None and a <= prev
                prev = a
                if falling and a <= eps * abs(total):
                    quiet += 1
                    if quiet >= 2:
                        break
                else:
                    quiet = 0
            else:
                raise NonConvergenceError(f"stopping rule not met within {ctl.max_terms} terms")
            value = float(total)
        if value == 0:
            return SeriesResult(0.0, n, first.max_term, False)
        need = 20 + math.ceil(math.log10(max(first.max_term, 1.0) / abs(value)))
        if need <= digits:
            return SeriesResult(value, n, first.max_term, False)
        digits = need
    return SeriesResult(value, n, first.max_term, True)


def _ml_asymptotic(alpha: float, beta: float, x: float):
    """-sum_{k>=1} x^-k / Gamma(beta - alpha k) for x -> -inf, 0 < alpha < 1.

    No exponential terms survive on the negative axis for alpha < 1; the
    error is below the first omitted term.  Returns None if the terms start
    growing before they are negligible.
    """
    terms = []
    prev = math.inf
    for k in range(1, 200):
        g = beta - alpha * k
        t = -rgamma(g) * x ** (-k)
        a = abs(t)
        if t != 0:
            if a > prev:
                return None
            prev = a
        terms.append(t)
        s = math.fsum(terms)
        if t != 0 and a <= 1e-17 * abs(s):
            return SeriesResult(s, k, max(abs(u) for u in terms), False)
    return None


def mittag_leffler(alpha: float, beta: float, x: float,
                   ctl: SeriesControl = DEFAULT_CONTROL, info: bool = False):
    """E_{alpha,beta}(x) = sum_k x^k / Gamma(k alpha + beta).

    When cancellation in double precision would eat the digits the series
    is summed again with mpmath at a precision that covers the loss.
    """
    alpha, beta, x = float(alpha), float(beta), float(x)
    if 0 < alpha < 1 and x < 0 and (-x) ** (1 / alpha) > 30:
        res = _ml_asymptotic(alpha, beta, x)
        if res is not None:
            return res if info else res.value
    res = _ml_series(alpha, beta, x, ctl)
    if _cancels(res):
        import mpmath
        res = _mp_resum(lambda k: mpmath.mpf(x) ** k * mpmath.rgamma(k * mpmath.mpf(alpha) + beta), res, ctl)
    return res if info else res.value


def wright(sigma: float, rho: float, x: float,
           ctl: SeriesControl = DEFAULT_CONTROL, info: bool = False):
    """W_{sigma,rho}(x) = sum_k x^k / (Gamma(k sigma + rho) k!).

    Terms whose gamma argument is a pole are zero.
    """
    sigma, rho, x = float(sigma), float(rho), float(x)
    if sigma <= -1:
        raise ValueError("wright needs sigma > -1")
    if x == 0:
        r = rgamma(rho)
        res = SeriesResult(r, 1, abs(r), False)
        return res if info else res.value
    lx = math.log(abs(x))
    sx = 1 if x > 0 else -1

    def term(k):
        g = k * sigma + rho
        if _is_pole(g):
            return 0.0
        lg, sg = log_gamma(g)
        lp, sp = _power_term(lx, sx, k)
        return sp * sg * math.exp(lp - lg - math.lgamma(k + 1))

    res = sum_series(term, ctl)
    if _cancels(res):
        import mpmath
        res = _mp_resum(lambda k: mpmath.mpf(x) ** k * mpmath.rgamma(k * mpmath.mpf(sigma) + rho)
                        / mpmath.factorial(k), res, ctl)
    return res if info else res.value


def generalized_wright(p: WrightParams, x: float,
                       ctl: SeriesControl = DEFAULT_CONTROL, info: bool = False):
    """Generalized Wright function lPsim at x.

    Raises SeriesDivergenceError when the coefficients outgrow x^n; callers
    fall back to quadrature.
    """
    if not isinstance(p, WrightParams):
        p = WrightParams(*p)
    x = float(x)
    entire = p.delta > 0

    def coef(k):
        lg, sg = 0.0, 1
        for a, s in p.upper:
            g = a + k * s
            if _is_pole(g):
                raise GammaPoleError(f"upper gamma argument {g} is a pole at term {k}")
            l, s_ = log_gamma(g)
            lg += l
            sg *= s_
        for b, s in p.lower:
            g = b + k * s
            if _is_pole(g):
                return None
            l, s_ = log_gamma(g)
            lg -= l
            sg *= s_
        return lg - math.lgamma(k + 1), sg

    if x == 0:
        c = coef(0)
        v = 0.0 if c is None else c[1] * math.exp(c[0])
        res = SeriesResult(v, 1, abs(v), False)
        return res if info else res.value
    if not entire and p.delta < 0:
        raise SeriesDivergenceError("generalized Wright series diverges for x != 0; use quadrature")
    lx = math.log(abs(x))
    sx = 1 if x > 0 else -1

    def term(k):
        c = coef(k)
        if c is None:
            return 0.0
        lp, sp = _power_term(lx, sx, k)
        return c[1] * sp * math.exp(c[0] + lp)

    res = sum_series(term, ctl, detect_divergence=not entire)
    return res if info else res.value


def caputo_ml_residual(beta: float, c: float, t: float,
                       ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Termwise Caputo derivative of t -> E_beta(c t^beta) minus c times the function.

    Each term t^{k beta}/Gamma(k beta + 1) maps to t^{(k-1) beta}/Gamma((k-1) beta + 1),
    so the two sides agree up to rounding; the residual measures that rounding.
    """
    lhs = termwise_caputo_ml(beta, c, t, ctl)
    return lhs - c * mittag_leffler(beta, 1.0, c * t ** beta, ctl)


def termwise_caputo_ml(beta: float, c: float, t: float,
                       ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """D^beta_t E_beta(c t^beta) computed term by term from the power series."""
    if t <= 0:
        raise ValueError("t must be positive")
    lt = math.log(t)
    lc = math.log(abs(c)) if c != 0 else -math.inf
    sc = 1 if c >= 0 else -1
    if c == 0:
        return 0.0

    def term(k):
        j = k + 1  # original index; k=0 term of the function is killed
        # c^j t^{j beta} Gamma(j beta+1)/Gamma(j beta+1) / Gamma((j-1) beta+1)
        return (sc ** j) * math.exp(j * lc + (j - 1) * beta * lt - math.lgamma((j - 1) * beta + 1))

    return sum_series(term, ctl).value


def wright_params(upper: Sequence[tuple[float, float]], lower: Sequence[tuple[float, float]]) -> WrightParams:
    return WrightParams(tuple(upper), tuple(lower))
