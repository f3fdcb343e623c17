"""Check types available to campaign manifests.

Each entry maps a check_type to a runner (name, params, cfg, index) ->
ComparisonReport.  Samplers only see a generator and a block size; the
block layout in ``verify.draw_blocks`` makes results independent of how
the work is chunked.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from . import fields as F
from . import levy as Lv
from . import moments as M
from . import samplers as smp
from .samplers import TimeChangeSpec
from .verify import (MCConfig, covariance_and_se, draw_blocks, ks_one_sample, ks_two_sample,
                     make_report, mean_and_se, variance_and_se)

CHECKS = {}


def check(kind):
    def deco(fn):
        CHECKS[kind] = fn
        return fn
    return deco


def _draw(sampler, cfg: MCConfig, index: int):
    return draw_blocks(sampler, cfg.n_samples, cfg.seed, index, cfg.n_chunks, cfg.workers)


def _mean_report(name, analytic, values, cfg):
    est, se = mean_and_se(values)
    stat = (est - analytic) / se if se > 0 else (0.0 if est == analytic else math.inf)
    return make_report(name, analytic, est, se, stat, cfg.tolerance_sigmas, cfg.seed, np.size(values))


# -- samplers against distribution functions ------------------------------------

@check("stable_ks")
def _stable_ks(name, p, cfg, i):
    alpha, t = p["alpha"], p.get("t", 1.0)
    x = _draw(lambda rng, n: smp.sample_stable(alpha, t, rng, n), cfg, i)
    d, crit = ks_one_sample(x, lambda v: smp.stable_cdf(alpha, v, t))
    return make_report(name, 0.0, d, 0.0, d, crit, cfg.seed, x.size)


@check("inverse_stable_ks")
def _inverse_stable_ks(name, p, cfg, i):
    beta, t = p["beta"], p.get("t", 1.0)
    x = _draw(lambda rng, n: smp.sample_inverse_stable(beta, t, rng, n), cfg, i)
    if beta == 0.5:
        # L_{1/2}(t) is |N(0, 2t)|
        cdf = lambda v: stats.halfnorm.cdf(v, scale=math.sqrt(2 * t))
    else:
        cdf = lambda v: smp.inverse_stable_cdf(beta, v, t)
    d, crit = ks_one_sample(x, cdf)
    return make_report(name, 0.0, d, 0.0, d, crit, cfg.seed, x.size)


@check("composition_laplace")
def _composition_laplace(name, p, cfg, i):
    a, b, eta, t = p["alpha"], p["beta"], p["eta"], p.get("t", 1.0)
    x = _draw(lambda rng, n: np.exp(-eta * smp.sample_composition(a, b, t, rng, n)), cfg, i)
    return _mean_report(name, smp.composition_laplace(a, b, eta, t), x, cfg)


@check("bivariate_double_laplace")
def _bivariate_double_laplace(name, p, cfg, i):
    kind, alpha = p["kind"], p["alpha"]
    beta = p.get("beta", alpha)
    e1, e2, z1, z2 = p.get("eta1", 1.0), p.get("eta2", 1.0), p.get("z1", 1.0), p.get("z2", 1.0)
    if beta != alpha:
        raise ValueError("the double Laplace formula shares one exponent: beta must equal alpha")
    B1, B2, B = smp.stable_exponents(kind, alpha)
    analytic = smp.bivariate_composition_double_laplace(B1, B2, B, e1, e2, z1, z2)

    def sampler(rng, n):
        # exponential times turn the time Laplace transform into an expectation
        t1 = rng.exponential(1 / z1, n)
        t2 = rng.exponential(1 / z2, n)
        h1, h2 = smp.sample_bivariate_composition(kind, alpha, beta, t1, t2, rng, n)
        return np.exp(-e1 * h1 - e2 * h2) / (z1 * z2)

    return _mean_report(name, analytic, _draw(sampler, cfg, i), cfg)


# -- pmfs ------------------------------------------------------------------------

def _field_sampler(model, t1, t2):
    return lambda rng, n: F.sample_field(model, t1, t2, rng, n)


@check("tc_pmf")
def _tc_pmf(name, p, cfg, i):
    lam, a1, b1, n0 = p.get("lambda", 1.0), p["alpha1"], p["beta1"], p["n"]
    t1, t2 = p.get("t1", 1.0), p.get("t2", 1.0)
    model = F.FieldModel(lam, TimeChangeSpec.composition(a1, b1), TimeChangeSpec.identity())
    x = _draw(_field_sampler(model, t1, t2), cfg, i)
    return _mean_report(name, F.tc_prf_pmf(lam, a1, b1, n0, t1, t2), (x == n0).astype(float), cfg)


@check("double_pmf")
def _double_pmf(name, p, cfg, i):
    lam, b1, b2, n0 = p.get("lambda", 1.0), p["beta1"], p["beta2"], p["n"]
    t1, t2 = p.get("t1", 1.0), p.get("t2", 1.0)
    model = F.FieldModel(lam, TimeChangeSpec.inverse_stable(b1), TimeChangeSpec.inverse_stable(b2))
    x = _draw(_field_sampler(model, t1, t2), cfg, i)
    return _mean_report(name, F.double_fractional_pmf(lam, b1, b2, n0, t1, t2), (x == n0).astype(float), cfg)


@check("stable_inverse_pmf")
def _stable_inverse_pmf(name, p, cfg, i):
    lam, a1, b2, n0 = p.get("lambda", 1.0), p["alpha1"], p["beta2"], p["n"]
    t1, t2 = p.get("t1", 1.0), p.get("t2", 1.0)
    model = F.FieldModel(lam, TimeChangeSpec.stable(a1), TimeChangeSpec.inverse_stable(b2))
    x = _draw(_field_sampler(model, t1, t2), cfg, i)
    return _mean_report(name, F.stable_inverse_pmf(lam, a1, b2, n0, t1, t2), (x == n0).astype(float), cfg)


@check("prf_mean_count")
def _prf_mean_count(name, p, cfg, i):
    lam = p.get("lambda", 1.0)
    win = F.Rectangle(0.0, p.get("t1", 1.0), 0.0, p.get("t2", 1.0))

    def sampler(rng, n):
        return np.array([F.sample_prf_points(lam, win, rng).points.shape[0] for _ in range(n)], float)

    return _mean_report(name, lam * win.area, _draw(sampler, cfg, i), cfg)


# -- moments ---------------------------------------------------------------------

@check("inverse_stable_mean")
def _inv_mean(name, p, cfg, i):
    beta, t = p["beta"], p.get("t", 1.0)
    x = _draw(lambda rng, n: smp.sample_inverse_stable(beta, t, rng, n), cfg, i)
    return _mean_report(name, M.inverse_stable_mean(beta, t), x, cfg)


@check("inverse_stable_variance")
def _inv_var(name, p, cfg, i):
    beta, t = p["beta"], p.get("t", 1.0)
    x = _draw(lambda rng, n: smp.sample_inverse_stable(beta, t, rng, n), cfg, i)
    est, se = variance_and_se(x)
    ana = M.inverse_stable_variance(beta, t)
    return make_report(name, ana, est, se, (est - ana) / se, cfg.tolerance_sigmas, cfg.seed, x.size)


@check("inverse_stable_cov")
def _inv_cov(name, p, cfg, i):
    beta, s, t = p["beta"], p["s"], p["t"]
    L = _draw(lambda rng, n: smp.sample_inverse_stable_path(beta, np.array([s, t]), rng, n), cfg, i)
    est, se = covariance_and_se(L[:, 0], L[:, 1])
    ana = M.inverse_stable_cov(beta, s, t)
    return make_report(name, ana, est, se, (est - ana) / se, cfg.tolerance_sigmas, cfg.seed, L.shape[0])


@check("fprf_mean")
def _fprf_mean(name, p, cfg, i):
    lam, b1, b2 = p.get("lambda", 1.0), p["beta1"], p["beta2"]
    t1, t2 = p.get("t1", 1.0), p.get("t2", 1.0)
    model = F.FieldModel(lam, TimeChangeSpec.inverse_stable(b1), TimeChangeSpec.inverse_stable(b2))
    x = _draw(_field_sampler(model, t1, t2), cfg, i)
    return _mean_report(name, M.fprf_moments(lam, b1, b2, t1, t2, t1, t2).mean, x, cfg)


@check("fprf_variance")
def _fprf_var(name, p, cfg, i):
    lam, b1, b2 = p.get("lambda", 1.0), p["beta1"], p["beta2"]
    t1, t2 = p.get("t1", 1.0), p.get("t2", 1.0)
    model = F.FieldModel(lam, TimeChangeSpec.inverse_stable(b1), TimeChangeSpec.inverse_stable(b2))
    x = _draw(_field_sampler(model, t1, t2), cfg, i)
    est, se = variance_and_se(x)
    ana = M.fprf_moments(lam, b1, b2, t1, t2, t1, t2).variance
    return make_report(name, ana, est, se, (est - ana) / se, cfg.tolerance_sigmas, cfg.seed, x.size)


@check("tclp_autocov")
def _tclp_autocov(name, p, cfg, i):
    """Cov(Y(L(s)), Y(L(t))) for a Poisson outer on one inverse stable clock."""
    lam, beta, s, t = p.get("lambda", 1.0), p["beta"], p["s"], p["t"]
    outer = M.OuterMoments.independent_poisson(lam, lam)
    ana = M.tclp_autocov(outer, M.ClockMoments.inverse_stable(beta, common=True), 1, 1, s, t)

    def sampler(rng, n):
        L = smp.sample_inverse_stable_path(beta, np.array([s, t]), rng, n)
        lo, hi = np.minimum(L[:, 0], L[:, 1]), np.maximum(L[:, 0], L[:, 1])
        y_lo = rng.poisson(lam * lo)
        y_hi = y_lo + rng.poisson(lam * (hi - lo))
        first = np.where(L[:, 0] <= L[:, 1], y_lo, y_hi)
        second = np.where(L[:, 0] <= L[:, 1], y_hi, y_lo)
        return first.astype(float), second.astype(float)

    y1, y2 = _draw(sampler, cfg, i)
    est, se = covariance_and_se(y1, y2)
    return make_report(name, ana, est, se, (est - ana) / se, cfg.tolerance_sigmas, cfg.seed, y1.size)


@check("tclp_cross_cov")
def _tclp_cross_cov(name, p, cfg, i):
    """Off-diagonal of the covariance matrix: independent Poisson outers on a common clock."""
    l1, l2, beta = p["lambda1"], p["lambda2"], p["beta"]
    t1, t2 = p.get("t1", 1.0), p.get("t2", 1.0)
    outer = M.OuterMoments.independent_poisson(l1, l2)
    ana = M.tclp_cov_matrix(outer, M.ClockMoments.inverse_stable(beta, common=True), t1, t2)[0, 1]

    def sampler(rng, n):
        L = smp.sample_inverse_stable_path(beta, np.array([t1, t2]), rng, n)
        return rng.poisson(l1 * L[:, 0]).astype(float), rng.poisson(l2 * L[:, 1]).astype(float)

    y1, y2 = _draw(sampler, cfg, i)
    est, se = covariance_and_se(y1, y2)
    return make_report(name, ana, est, se, (est - ana) / se, cfg.tolerance_sigmas, cfg.seed, y1.size)


# -- drifted fields --------------------------------------------------------------

@check("typeI_laplace")
def _typeI(name, p, cfg, i):
    lam, a, b1, b2, eta = p["lambda"], p["a"], p["beta1"], p["beta2"], p["eta"]
    t1, t2 = p.get("t1", 1.0), p.get("t2", 1.0)
    model = F.FieldModel(lam, TimeChangeSpec.inverse_stable(b1), TimeChangeSpec.inverse_stable(b2), a)
    x = _draw(lambda rng, n: np.exp(-eta * F.sample_field(model, t1, t2, rng, n)), cfg, i)
    return _mean_report(name, F.typeI_laplace(lam, a, b1, b2, eta, t1, t2), x, cfg)


@check("typeII_laplace")
def _typeII(name, p, cfg, i):
    lam, a, al, be, eta = p["lambda"], p["a"], p["alpha"], p["beta"], p["eta"]
    t1, t2 = p.get("t1", 1.0), p.get("t2", 1.0)
    model = F.FieldModel(lam, TimeChangeSpec.stable(al), TimeChangeSpec.inverse_stable(be), a)
    x = _draw(lambda rng, n: np.exp(-eta * F.sample_field(model, t1, t2, rng, n)), cfg, i)
    return _mean_report(name, F.typeII_laplace(lam, a, al, be, eta, t1, t2), x, cfg)


@check("typeIII_laplace")
def _typeIII(name, p, cfg, i):
    lam, a, g, al, be, eta = p["lambda"], p["a"], p["gamma"], p["alpha"], p["beta"], p["eta"]
    t1, t2 = p.get("t1", 1.0), p.get("t2", 1.0)
    x = _draw(lambda rng, n: np.exp(-eta * F.sample_typeIII(lam, a, g, al, be, t1, t2, rng, n)), cfg, i)
    return _mean_report(name, F.typeIII_laplace(lam, a, g, al, be, eta, t1, t2), x, cfg)


@check("drifted_increment_chisquare")
def _drifted_chisq(name, p, cfg, i):
    """Chi-square of the drifted field's rectangle increment against N(h, k) + a h k."""
    lam, a = p.get("lambda", 1.0), p["a"]
    anchor, h, k = tuple(p["anchor"]), p.get("h", 1.0), p.get("k", 1.0)
    s1, s2 = anchor
    corners = np.array([(s1 + h) * (s2 + k), s1 * (s2 + k), (s1 + h) * s2, s1 * s2])

    def sampler(rng, n):
        cc = F.sample_corner_counts_points(lam, anchor, h, k, rng, n)
        return F.rectangle_increment((cc + a * corners[None, :]).T)

    inc = _draw(sampler, cfg, i)
    counts = np.rint(inc - a * h * k).astype(int)
    mu = lam * h * k
    kmax = max(int(counts.max()), int(stats.poisson.isf(1e-9, mu)))
    obs = np.bincount(counts, minlength=kmax + 1).astype(float)
    exp = stats.poisson.pmf(np.arange(kmax + 1), mu)
    exp[-1] += stats.poisson.sf(kmax, mu)
    obs, exp = F._pool(obs, exp * inc.size)
    stat = stats.chisquare(obs, exp).statistic
    crit = stats.chi2.ppf(0.99, obs.size - 1)
    return make_report(name, mu + a * h * k, inc.mean(), inc.std(ddof=1) / math.sqrt(inc.size),
                       stat, crit, cfg.seed, inc.size)


# -- Levy processes on the field -------------------------------------------------

def _levy_spec(p):
    kind = p.get("outer", "brownian")
    if kind == "brownian":
        return Lv.LevyProcessSpec.brownian(p.get("drift", 0.0), p.get("volatility", 1.0))
    if kind == "poisson":
        return Lv.LevyProcessSpec.poisson(p.get("rate", 1.0))
    if kind == "compound_poisson":
        return Lv.LevyProcessSpec.compound_poisson(p.get("rate", 1.0), p.get("jump", "unit"))
    raise ValueError(f"unknown outer process {kind!r}")


@check("levy_decomposition")
def _levy_decomp(name, p, cfg, i):
    spec = _levy_spec(p)
    lam, a, t1, t2 = p.get("lambda", 1.0), p["a"], p.get("t1", 1.0), p.get("t2", 1.0)
    left, right = _draw(lambda rng, n: Lv.decomposition_sides(spec, lam, a, t1, t2, rng, n), cfg, i)
    d, crit = ks_two_sample(left, right)
    return make_report(name, 0.0, d, 0.0, d, crit, cfg.seed, left.size)


@check("levy_decomposition_stable")
def _levy_decomp_stable(name, p, cfg, i):
    spec = _levy_spec(p)
    lam, a, g, al = p.get("lambda", 1.0), p["a"], p["gamma"], p["alpha"]
    t1, t2 = p.get("t1", 1.0), p.get("t2", 1.0)
    left, right = _draw(lambda rng, n: Lv.decomposition_sides_stable(spec, lam, a, g, al, t1, t2, rng, n), cfg, i)
    d, crit = ks_two_sample(left, right)
    return make_report(name, 0.0, d, 0.0, d, crit, cfg.seed, left.size)


@check("levy_stationary_increments")
def _levy_stationary(name, p, cfg, i):
    """Two-sample KS between rectangle increments of Y(N(., .)) at two anchors."""
    spec = _levy_spec(p)
    lam, h, k = p.get("lambda", 1.0), p.get("h", 1.0), p.get("k", 1.0)
    a = p.get("a", 0.0)
    anchors = [tuple(x) for x in p["anchors"]]

    def sampler(rng, n):
        r1, r2 = smp.split_rng(rng, 2)
        return (Lv.rect_increment_samples(spec, lam, anchors[0], h, k, r1, n, a),
                Lv.rect_increment_samples(spec, lam, anchors[1], h, k, r2, n, a))

    x, y = _draw(sampler, cfg, i)
    d, crit = ks_two_sample(x, y)
    return make_report(name, 0.0, d, 0.0, d, crit, cfg.seed, x.size)


@check("levy_tower_variance")
def _levy_tower(name, p, cfg, i):
    spec = _levy_spec(p)
    lam, t1, t2 = p.get("lambda", 1.0), p.get("t1", 1.0), p.get("t2", 1.0)
    x = _draw(lambda rng, n: Lv.sample_prf_subordinated_levy(spec, F.FieldModel(lam), t1, t2, rng, n), cfg, i)
    est, se = variance_and_se(x)
    # centered outer: Var Y(N) = Var Y(1) E N
    ana = spec.var1 * lam * t1 * t2 + spec.mean1 ** 2 * lam * t1 * t2
    return make_report(name, ana, est, se, (est - ana) / se, cfg.tolerance_sigmas, cfg.seed, x.size)


# -- default manifest ------------------------------------------------------------

def default_manifest() -> list[dict]:
    m = []

    def add(name, check_type, **params):
        m.append({"name": name, "check_type": check_type, "params": params})

    add("stable_ks_a0.5", "stable_ks", alpha=0.5)
    add("inverse_stable_ks_b0.5", "inverse_stable_ks", beta=0.5)
    for a in (0.5, 0.8):
        for b in (0.5, 0.8):
            for eta in (0.5, 1.0, 2.0):
                add(f"composition_laplace_a{a}_b{b}_eta{eta}", "composition_laplace", alpha=a, beta=b, eta=eta)
    for kind in ("independent", "common"):
        add(f"bivariate_double_laplace_{kind}", "bivariate_double_laplace", kind=kind, alpha=0.5,
            eta1=1.0, eta2=1.0, z1=1.0, z2=1.0)
    for n in range(11):
        add(f"tc_pmf_n{n}", "tc_pmf", alpha1=0.5, beta1=0.8, n=n)
    for n in range(11):
        add(f"double_pmf_n{n}", "double_pmf", beta1=0.9, beta2=0.9, n=n)
    add("double_pmf_b0.5_n0", "double_pmf", beta1=0.5, beta2=0.5, n=0)
    for n in range(3):
        add(f"stable_inverse_pmf_n{n}", "stable_inverse_pmf", alpha1=0.5, beta2=0.5, n=n)
    add("inverse_stable_mean_b0.5", "inverse_stable_mean", beta=0.5)
    add("inverse_stable_variance_b0.5", "inverse_stable_variance", beta=0.5)
    add("inverse_stable_cov_b0.5", "inverse_stable_cov", beta=0.5, s=0.5, t=1.0)
    add("fprf_mean_b0.5", "fprf_mean", beta1=0.5, beta2=0.5)
    add("fprf_variance_b0.5", "fprf_variance", beta1=0.5, beta2=0.5)
    add("tclp_autocov_poisson_common", "tclp_autocov", beta=0.5, s=0.5, t=1.0)
    add("tclp_cross_cov_poisson_common", "tclp_cross_cov", lambda1=1.0, lambda2=2.0, beta=0.5)
    add("drifted_increment_anchor_0_0", "drifted_increment_chisquare", a=0.5, anchor=[0.0, 0.0])
    add("drifted_increment_anchor_2_3", "drifted_increment_chisquare", a=0.5, anchor=[2.0, 3.0])
    add("typeI_laplace", "typeI_laplace", **{"lambda": 1.0}, a=0.5, beta1=0.9, beta2=0.9, eta=1.0)
    add("typeII_laplace", "typeII_laplace", **{"lambda": 1.0}, a=0.3, alpha=0.5, beta=0.8, eta=1.0)
    add("typeIII_laplace", "typeIII_laplace", **{"lambda": 1.0}, a=0.4, gamma=0.7, alpha=0.5, beta=0.6, eta=1.0)
    add("levy_decomposition_brownian", "levy_decomposition", outer="brownian", a=0.5)
    add("levy_decomposition_poisson", "levy_decomposition", outer="poisson", a=0.5)
    add("levy_decomposition_stable_clocks", "levy_decomposition_stable", outer="brownian", a=0.5,
        gamma=0.7, alpha=0.5)
    add("levy_tower_variance_brownian", "levy_tower_variance", outer="brownian")
    return m
