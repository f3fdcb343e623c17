import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from fracfields import samplers as S
from fracfields import specfun as SF


def test_rng_is_reproducible():
    a = S.make_rng(7).uniform(size=5)
    b = S.make_rng(7).uniform(size=5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, S.make_rng(8).uniform(size=5))


def test_mix_seed_and_split():
    assert S.mix_seed(1, 2) != S.mix_seed(2, 1)
    assert S.mix_seed(1, 2) == S.mix_seed(1, 2)
    r = S.split_rng(S.make_rng(3), 3)
    draws = [g.uniform() for g in r]
    assert len(set(draws)) == 3
    again = [g.uniform() for g in S.split_rng(S.make_rng(3), 3)]
    assert draws == again


def test_index_validation():
    with pytest.raises(ValueError):
        S.TimeChangeSpec.stable(1.2)
    with pytest.raises(ValueError):
        S.TimeChangeSpec("bogus")
    with pytest.raises(ValueError):
        S.BivariatePairSpec.independent(S.TimeChangeSpec.stable(0.5), None)
    with pytest.raises(ValueError):
        S.sample_stable(0.0, 1.0, S.make_rng(0))


def test_half_stable_closed_forms():
    x = np.array([0.05, 0.3, 1.0, 4.0, 50.0])
    # Levy distribution: density x^-3/2 exp(-1/(4x)) / (2 sqrt(pi))
    dens = x ** -1.5 * np.exp(-1 / (4 * x)) / (2 * math.sqrt(math.pi))
    np.testing.assert_allclose(S.stable_density(0.5, x), dens, rtol=1e-9)
    np.testing.assert_allclose(S.stable_cdf(0.5, x), special.erfc(1 / (2 * np.sqrt(x))), rtol=1e-8)
    np.testing.assert_allclose(S.stable_sf(0.5, x), special.erf(1 / (2 * np.sqrt(x))), rtol=1e-8)


def test_inverse_half_stable_is_half_normal():
    x = np.array([0.1, 0.7, 2.0, 5.0])
    np.testing.assert_allclose(S.inverse_stable_density(0.5, x, 1.0), np.exp(-x * x / 4) / math.sqrt(math.pi),
                               rtol=1e-10)
    np.testing.assert_allclose(S.inverse_stable_cdf(0.5, x, 1.0), special.erf(x / 2), rtol=1e-8)


@pytest.mark.parametrize("alpha", [0.3, 0.7, 0.95])
def test_stable_density_normalizes(alpha):
    f = lambda x: float(S.stable_density(alpha, x))
    total = integrate.quad(f, 0, 1, limit=200)[0] + integrate.quad(f, 1, np.inf, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("beta", [0.3, 0.6, 0.9])
def test_inverse_stable_laplace_matches_ml(beta):
    for eta in (0.2, 1.0, 3.0):
        assert S.inverse_stable_laplace(beta, eta, 2.0) == pytest.approx(
            SF.mittag_leffler(beta, 1, -eta * 2.0 ** beta), rel=1e-10)
    # large argument goes through the M-Wright quadrature
    x, w = S.inverse_stable_rule(beta, 1.0)
    assert w.sum() == pytest.approx(1.0, abs=1e-10)
    assert S.inverse_stable_laplace(beta, 50.0) == pytest.approx(float(w @ np.exp(-50 * x)), rel=1e-6)


def test_stable_sampler_ks():
    x = S.sample_stable(0.7, 2.0, S.make_rng(1), 20_000)
    assert stats.kstest(x, lambda v: S.stable_cdf(0.7, v, 2.0)).pvalue > 0.001


def test_unit_indices_are_exact():
    rng = S.make_rng(0)
    np.testing.assert_array_equal(S.sample_stable(1.0, 2.5, rng, 4), np.full(4, 2.5))
    np.testing.assert_array_equal(S.sample_inverse_stable(1.0, 2.5, rng, 4), np.full(4, 2.5))
    assert S.sample_stable(1.0, 2.5, rng) == 2.5


def test_inverse_stable_path_marginals_and_order():
    times = np.array([0.5, 1.0, 3.0])
    L = S.sample_inverse_stable_path(0.6, times, S.make_rng(5), 20_000)
    assert L.shape == (20_000, 3)
    assert np.all(np.diff(L, axis=1) >= 0)
    for j, t in enumerate(times):
        assert stats.kstest(L[:, j], lambda v: S.inverse_stable_cdf(0.6, v, t)).pvalue > 0.001


def test_composition_density_and_laplace():
    f = lambda x: S.composition_density(0.6, 0.7, x, 1.0)
    total = integrate.quad(f, 0, 1, limit=100)[0] + integrate.quad(f, 1, np.inf, limit=100)[0]
    assert total == pytest.approx(1.0, abs=1e-5)
    assert S.composition_laplace(0.6, 0.7, 1.0, 0.0) == 1.0
    h = S.sample_composition(0.6, 0.7, 1.0, S.make_rng(2), 50_000)
    est = np.exp(-h).mean()
    se = np.exp(-h).std() / math.sqrt(h.size)
    assert abs(est - S.composition_laplace(0.6, 0.7, 1.0, 1.0)) < 4 * se


def test_composition_density_rejects_unit_index():
    with pytest.raises(ValueError):
        S.composition_density(1.0, 0.5, 1.0, 1.0)


def test_bivariate_transform_marginal_consistency():
    B1, B2, B = S.stable_exponents("independent", 0.5)
    v = S.bivariate_composition_double_laplace(B1, B2, B, 1, 1, 1, 1)
    assert v > 0
    with pytest.raises(ValueError):
        S.bivariate_composition_double_laplace(B1, B2, lambda x, y: (x + y) ** 0.7, 1, 1, 1, 1)


def test_bivariate_independent_factorizes():
    # independent clocks: transform is the product of one-dimensional ones
    B1, B2, B = S.stable_exponents("independent", 0.5)
    v = S.bivariate_composition_double_laplace(B1, B2, B, 0.7, 1.3, 0.9, 1.1)
    one = lambda eta, z: S.generic_composition_double_laplace(S.power_bernstein(0.5), S.power_bernstein(0.5), eta, z)
    assert v == pytest.approx(one(0.7, 0.9) * one(1.3, 1.1), rel=1e-12)


def test_sample_clock_dispatch():
    rng = S.make_rng(0)
    for spec in (S.TimeChangeSpec.identity(), S.TimeChangeSpec.stable(0.5),
                 S.TimeChangeSpec.inverse_stable(0.5), S.TimeChangeSpec.composition(0.5, 0.5)):
        x = S.sample_clock(spec, 1.0, rng, 10)
        assert x.shape == (10,) and np.all(x >= 0)
