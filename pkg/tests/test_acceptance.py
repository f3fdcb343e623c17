"""Acceptance suite: thirteen criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the
terminal summary) or ``python3 tests/test_acceptance.py``.
"""

import functools
import math
import time
import traceback

import numpy as np
from scipy import integrate, special

from fracfields import fields as F
from fracfields import levy as Lv
from fracfields import moments as M
from fracfields import samplers as S
from fracfields import specfun as SF
from fracfields import verify as V
from fracfields.checks import default_manifest

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

N_MC = 100_000
SEED = 42


def criterion(number, title):
    """Each criterion returns a list of (label, ok, detail) sub-results."""

    def wrap(fn):
        @functools.wraps(fn)
        def test():
            t0 = time.perf_counter()
            try:
                results = fn()
            except Exception as e:
                ACCEPTANCE_LINES.append(f"criterion {number}: FAIL  {title}  (error: {e!r})")
                raise
            dt = time.perf_counter() - t0
            # ok is None for a sub-check outside the criterion's domain
            skipped = [lab for lab, ok, _ in results if ok is None]
            bad = [f"{lab}: {det}" for lab, ok, det in results if ok is not None and not ok]
            checked = len(results) - len(skipped)
            status = "PASS" if not bad and checked else "FAIL"
            line = f"criterion {number}: {status}  {title}  [{checked - len(bad)}/{checked} sub-checks, {dt:.1f} s]"
            if skipped:
                line += f"  ({len(skipped)} outside domain: {', '.join(skipped)})"
            if bad:
                line += "  failing: " + "; ".join(bad)
            ACCEPTANCE_LINES.append(line)
            assert not bad, line

        test.criterion_number = number
        return test

    return wrap


def manifest_subset(*types, names=None):
    out = [d for d in default_manifest() if d["check_type"] in types]
    if names is not None:
        out = [d for d in out if d["name"] in names]
    return out


def campaign_results(manifest, n=N_MC, seed=SEED):
    reps = V.run_campaign(manifest, V.MCConfig(n, seed, 1))
    return [(r.name, r.passed, f"statistic {r.statistic:.4g} vs threshold {r.threshold:.4g}") for r in reps]


def close(label, got, want, tol):
    err = abs(got - want)
    return (label, err <= tol, f"got {got!r}, want {want!r}, |diff| {err:.3g} > {tol:g}")


# -- 1 ------------------------------------------------------------------------

def _erfc_quad(x):
    val = integrate.quad(lambda u: math.exp(-u * u), x, math.inf, epsabs=0, epsrel=1e-13)[0]
    return 2 / math.sqrt(math.pi) * val


@criterion(1, "special-function identities")
def test_special_function_identities():
    t0 = time.perf_counter()
    out = []
    xs = np.random.default_rng(SEED).uniform(-5, 5, 200)
    worst = max(abs(SF.mittag_leffler(1, 1, x) - math.exp(x)) for x in xs)
    out.append(("E_1,1(x) = exp(x), 200 points", worst <= 1e-10, f"max error {worst:.3g}"))
    for x in (0.5, 1.0, 2.0):
        out.append(close(f"E_0.5,1(-{x})", SF.mittag_leffler(0.5, 1, -x), math.exp(x * x) * _erfc_quad(x), 1e-8))
    for y in (0.0, 1.0, 2.0):
        out.append(close(f"W_-1/2,1/2(-{y})", SF.wright(-0.5, 0.5, -y), math.exp(-y * y / 4) / math.sqrt(math.pi), 1e-8))
    dt = time.perf_counter() - t0
    out.append(("runtime < 1 s", dt < 1.0, f"{dt:.2f} s"))
    return out


# -- 2 ------------------------------------------------------------------------

@criterion(2, "sampler against closed-form distribution functions")
def test_sampler_vs_density():
    t0 = time.perf_counter()
    x = S.sample_stable(0.5, 1.0, S.make_rng(SEED), N_MC)
    d1, c1 = V.ks_one_sample(x, lambda v: special.erfc(1 / (2 * np.sqrt(v))))
    y = S.sample_inverse_stable(0.5, 1.0, S.make_rng(SEED + 1), N_MC)
    d2, c2 = V.ks_one_sample(y, lambda v: special.erf(v / 2))
    dt = time.perf_counter() - t0
    return [
        ("stable(0.5) vs half-stable CDF", d1 <= c1, f"D {d1:.4g} > {c1:.4g}"),
        ("inverse stable(0.5) vs half-normal CDF", d2 <= c2, f"D {d2:.4g} > {c2:.4g}"),
        ("runtime < 5 s", dt < 5.0, f"{dt:.2f} s"),
    ]


# -- 3 ------------------------------------------------------------------------

@criterion(3, "composition Laplace transform against Monte Carlo")
def test_composition_laplace_mc():
    t0 = time.perf_counter()
    out = []
    for k, (a, b) in enumerate([(0.5, 0.5), (0.5, 0.8), (0.8, 0.5), (0.8, 0.8)]):
        h = S.sample_composition(a, b, 1.0, S.make_rng(S.mix_seed(SEED, k)), N_MC)
        for eta in (0.5, 1.0, 2.0):
            est, se = V.empirical_laplace(h, eta)
            ana = SF.mittag_leffler(b, 1, -eta ** a)
            out.append((f"alpha {a} beta {b} eta {eta}", abs(est - ana) <= 4 * se,
                        f"{est:.6f} vs {ana:.6f}, {abs(est - ana) / se:.2f} SE"))
    dt = time.perf_counter() - t0
    out.append(("runtime < 10 s", dt < 10.0, f"{dt:.2f} s"))
    return out


# -- 4 ------------------------------------------------------------------------

@criterion(4, "time-Laplace transform of the composition density")
def test_composition_time_laplace():
    a = b = 0.5
    f = lambda t: math.exp(-t) * S.composition_density(a, b, 1.0, t) if t > 0 else 0.0
    q = (integrate.quad(f, 0, 1, limit=200, epsrel=1e-9)[0]
         + integrate.quad(f, 1, math.inf, limit=200, epsrel=1e-9)[0])
    ana = SF.mittag_leffler(a, a, -1.0)  # z^(b-1) E_a,a(-z^b) at z = 1
    return [close("z = 1", q, ana, 1e-4), close("closed form helper", S.composition_time_laplace(a, b, 1.0, 1.0), ana, 1e-14)]


# -- 5 ------------------------------------------------------------------------

@criterion(5, "bivariate double Laplace transform, independent and common clocks")
def test_bivariate_double_laplace():
    return campaign_results(manifest_subset("bivariate_double_laplace"))


# -- 6 ------------------------------------------------------------------------

@criterion(6, "pmf normalization and unit-index reductions")
def test_pmf_normalization_and_reductions():
    out = []
    m = 200
    for a in (0.5, 0.8, 1.0):
        for b in (0.5, 0.8, 1.0):
            head = math.fsum(F.tc_prf_pmf(1.0, a, b, n, 1.0, 1.0) for n in range(m + 1))
            total = head + F.tc_prf_tail(1.0, a, b, m, 1.0, 1.0)
            out.append(close(f"sum tc pmf alpha1 {a} beta1 {b}", total, 1.0, 1e-6))
    for lam, t1, t2 in ((1.0, 1.0, 1.0), (2.5, 0.7, 1.3), (0.3, 2.0, 4.0)):
        for n in range(15):
            p = F.prf_pmf(lam, n, t1, t2)
            out.append(close(f"tc(1,1) n {n} lam {lam}", F.tc_prf_pmf(lam, 1, 1, n, t1, t2), p, 1e-12))
            out.append(close(f"double(1,1) n {n} lam {lam}", F.double_fractional_pmf(lam, 1, 1, n, t1, t2), p, 1e-12))
    return out


# -- 7 ------------------------------------------------------------------------

@criterion(7, "Monte Carlo pmf agreement, n <= 10")
def test_mc_pmf_agreement():
    names = {f"tc_pmf_n{n}" for n in range(11)} | {f"double_pmf_n{n}" for n in range(11)}
    return campaign_results(manifest_subset("tc_pmf", "double_pmf", names=names))


# -- 8 ------------------------------------------------------------------------

@criterion(8, "termwise fractional-equation residuals")
def test_fde_residuals():
    out = []
    for a, b in ((0.5, 0.7), (0.8, 0.9)):
        for n in (0, 1, 2, 5):
            r = F.caputo_fde_residual(1.0, a, b, n, 1.0, 1.0)
            out.append((f"pmf equation alpha1 {a} beta1 {b} n {n}", abs(r) <= 1e-6, f"{r:.3g}"))
        for u in (0.1, 0.5, 0.9):
            r = F.pgf_ode_residual(1.0, a, b, u, 1.0, 1.0)
            out.append((f"pgf equation alpha1 {a} beta1 {b} u {u}", abs(r) <= 1e-8, f"{r:.3g}"))
    for b1, b2 in ((0.9, 0.9), (0.8, 0.7), (0.6, 0.6)):
        for n in (0, 1, 2, 5):
            label = f"double recursion beta {b1},{b2} n {n}"
            try:
                r = F.double_caputo_recursion_residual(1.0, b1, b2, n, 1.0, 1.0)
            except SF.SeriesDivergenceError:
                # the series branch declines here, so the identity is not in scope
                out.append((label, None, "series branch declined"))
                continue
            out.append((label, abs(r) <= 1e-6, f"{r:.3g}"))
    return out


# -- 9 ------------------------------------------------------------------------

@criterion(9, "moment formulas against Monte Carlo")
def test_moment_formulas():
    out = [close("E L_0.5(1) = 2/sqrt(pi)", M.inverse_stable_mean(0.5, 1), 2 / math.sqrt(math.pi), 1e-14),
           close("Var L_0.5(1) = 2 - 4/pi", M.inverse_stable_variance(0.5, 1), 2 - 4 / math.pi, 1e-14),
           close("fprf mean 4/pi", M.fprf_moments(1.0, 0.5, 0.5, 1, 1, 1, 1).mean, 4 / math.pi, 1e-14)]
    names = {"inverse_stable_mean_b0.5", "inverse_stable_variance_b0.5", "fprf_mean_b0.5",
             "tclp_autocov_poisson_common"}
    return out + campaign_results(manifest_subset("inverse_stable_mean", "inverse_stable_variance", "fprf_mean",
                                                  "tclp_autocov", names=names))


# -- 10 -----------------------------------------------------------------------

@criterion(10, "drifted field: Laplace identity, governing equations, stationary increments")
def test_drifted_field():
    out = []
    for lam, a, eta, t1, t2 in ((1.0, 0.5, 1.0, 1.0, 1.0), (2.0, 0.3, 0.4, 1.5, 0.8)):
        atoms = F.drifted_prf_dist(lam, t1, t2, a=a).laplace(eta)
        out.append(close(f"Laplace identity lam {lam}", atoms, F.drifted_laplace(lam, a, eta, t1, t2), 1e-10))
        for axis in (1, 2):
            r = F.drifted_laplace_residual(lam, a, eta, t1, t2, axis=axis, h=1e-5)
            out.append((f"governing equation axis {axis} lam {lam}", abs(r) <= 1e-10, f"{r:.3g}"))
    return out + campaign_results(manifest_subset("drifted_increment_chisquare"))


# -- 11 -----------------------------------------------------------------------

@criterion(11, "random-drift Types I-III")
def test_types_i_to_iii():
    out = campaign_results(manifest_subset("typeI_laplace", "typeII_laplace", "typeIII_laplace"))
    lam, a, eta, t1, t2 = 1.3, 0.4, 0.7, 1.2, 0.9
    ref = F.drifted_laplace(lam, a, eta, t1, t2)
    out.append(close("Type I at unit indices", F.typeI_laplace(lam, a, 1, 1, eta, t1, t2), ref, 1e-10))
    out.append(close("Type II at unit indices", F.typeII_laplace(lam, a, 1, 1, eta, t1, t2), ref, 1e-10))
    out.append(close("Type III at unit indices", F.typeIII_laplace(lam, a, 1, 1, 1, eta, t1, t2), ref, 1e-10))
    dens = F.TypeIIIDensity(1.0, 0.4, 0.95, 0.95, 0.6, 1.0, 1.0)
    out.append(close("Type III density mass", dens.mass(1000), 1.0, 1e-3))
    return out


# -- 12 -----------------------------------------------------------------------

def _bump(x, c=10.0, w=3.0):
    z = (x - c) / w
    out = np.zeros_like(x)
    inside = np.abs(z) < 1
    out[inside] = np.exp(-1 / (1 - z[inside] ** 2))
    return out


@criterion(12, "Levy subordination: semigroup laws, decomposition, stationary increments")
def test_levy_subordination():
    out = []
    f = Lv.GridFunction.on_grid(_bump, -40.0, 80.0, 0.01)
    lam, a = 0.7, 0.3
    # shift semigroup of the drifted field
    p = lambda g, t1, t2: Lv.prf_shift_semigroup_apply(g, lam, a, t1, t2)
    for (s1, t1, t2) in ((0.5, 0.8, 1.0), (1.0, 1.0, 0.6)):
        d = p(p(f, s1, t2), t1, t2).sup_distance(p(f, s1 + t1, t2))
        out.append((f"shift semigroup, first axis {s1}+{t1}", d <= 1e-6, f"sup {d:.3g}"))
        d = p(p(f, t2, s1), t2, t1).sup_distance(p(f, t2, s1 + t1))
        out.append((f"shift semigroup, second axis {s1}+{t1}", d <= 1e-6, f"sup {d:.3g}"))
    # subordinated Brownian semigroup
    spec = Lv.LevyProcessSpec.brownian(0.2, 1.0)
    q = lambda g, t1, t2: Lv.subordinated_semigroup_apply(spec, g, lam, t1, t2)
    for (s1, t1, t2) in ((0.5, 0.8, 1.0),):
        d = q(q(f, s1, t2), t1, t2).sup_distance(q(f, s1 + t1, t2))
        out.append((f"subordinated semigroup, first axis {s1}+{t1}", d <= 1e-6, f"sup {d:.3g}"))
        d = q(q(f, t2, s1), t2, t1).sup_distance(q(f, t2, s1 + t1))
        out.append((f"subordinated semigroup, second axis {s1}+{t1}", d <= 1e-6, f"sup {d:.3g}"))
    for name, sp in (("brownian", spec), ("poisson", Lv.LevyProcessSpec.poisson(1.5))):
        r = Lv.decomposition_check(sp, 1.0, 0.5, 1.0, 1.0, N_MC, S.make_rng(SEED), name=name)
        out.append((f"decomposition KS, {name} outer", r.passed, f"D {r.statistic:.4g} > {r.threshold:.4g}"))
    for name, sp in (("brownian", Lv.LevyProcessSpec.brownian()), ("poisson", Lv.LevyProcessSpec.poisson(1.0))):
        r = Lv.stationary_rect_increment_check(sp, 1.0, [(0.0, 0.0), (2.0, 3.0)], 1.0, 1.0, N_MC,
                                               S.make_rng(SEED), name=name)
        out.append((f"stationary increments KS, {name} outer, anchors (0,0) vs (2,3)", r.passed,
                    f"D {r.statistic:.4g} > {r.threshold:.4g}"))
    return out


# -- 13 -----------------------------------------------------------------------

@criterion(13, "reproducible default campaign")
def test_reproducible_campaign():
    man = default_manifest()
    t0 = time.perf_counter()
    one = V.reports_to_json(V.run_campaign(man, V.MCConfig(N_MC, SEED, 1)))
    dt = time.perf_counter() - t0
    again = V.reports_to_json(V.run_campaign(man, V.MCConfig(N_MC, SEED, 1)))
    eight = V.reports_to_json(V.run_campaign(man, V.MCConfig(N_MC, SEED, 8)))
    return [
        ("identical across runs", one == again, "JSON differs"),
        ("identical across 1 and 8 chunks", one == eight, "JSON differs"),
        ("runtime <= 300 s", dt <= 300, f"{dt:.1f} s"),
    ]


if __name__ == "__main__":
    tests = sorted((v for v in list(globals().values()) if hasattr(v, "criterion_number")),
                   key=lambda t: t.criterion_number)
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
        except Exception:
            failed += 1
            traceback.print_exc()
        print(ACCEPTANCE_LINES[-1], flush=True)
    raise SystemExit(1 if failed else 0)
