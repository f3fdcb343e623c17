import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from fracfields import specfun as sf


@given(st.floats(-20, 20))
@settings(max_examples=200, deadline=None)
def test_ml_order_one_is_exp(x):
    assert sf.mittag_leffler(1, 1, x) == pytest.approx(math.exp(x), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.0, 3.0])
def test_ml_half_is_scaled_erfc(x):
    assert sf.mittag_leffler(0.5, 1, -x) == pytest.approx(special.erfcx(x), rel=1e-10)


def test_ml_order_two_is_cosh():
    for x in (0.3, 1.7, 4.0):
        assert sf.mittag_leffler(2, 1, x * x) == pytest.approx(math.cosh(x), rel=1e-13)
        assert sf.mittag_leffler(2, 1, -x * x) == pytest.approx(math.cos(x), abs=1e-13)


def test_ml_large_negative_argument():
    for x in (10.0, 40.0, 200.0):
        assert sf.mittag_leffler(0.5, 1, -x) == pytest.approx(special.erfcx(x), rel=1e-12)


def test_wright_cancelling_argument():
    assert sf.wright(-0.5, 0.5, -12) == pytest.approx(math.exp(-36) / math.sqrt(math.pi), rel=1e-10)
    assert sf.wright(1, 1, -100) == pytest.approx(special.j0(20), rel=1e-10)


def test_ml_known_value():
    assert sf.mittag_leffler(0.5, 1, -1) == pytest.approx(0.4275835761558072, rel=1e-14)


def test_wright_gaussian_reduction():
    for y in (0.0, 0.5, 1.0, 3.0):
        assert sf.wright(-0.5, 0.5, -y) == pytest.approx(math.exp(-y * y / 4) / math.sqrt(math.pi), abs=1e-12)


def test_wright_bessel_reduction():
    # W_{1,1}(-x^2/4) = J_0(x)
    for x in (0.5, 2.0, 6.0):
        assert sf.wright(1, 1, -x * x / 4) == pytest.approx(special.j0(x), abs=1e-12)


def test_wright_at_zero_pole():
    assert sf.wright(0.5, 0.0, 0.0) == 0.0
    assert sf.wright(0.5, 2.0, 0.0) == pytest.approx(1.0)


def test_log_gamma_sign():
    assert sf.log_gamma(-0.5) == (pytest.approx(math.log(2 * math.sqrt(math.pi))), -1)
    assert sf.log_gamma(-1.5)[1] == 1
    with pytest.raises(sf.GammaPoleError):
        sf.log_gamma(-2.0)
    assert sf.rgamma(0.0) == 0.0
    assert sf.rgamma(-3.0) == 0.0
    assert sf.rgamma(5.0) == pytest.approx(1 / 24)


def test_falling_factorial():
    assert sf.falling_factorial(5, 3) == 60
    assert sf.falling_factorial(0.5, 2) == pytest.approx(-0.25)
    np.testing.assert_allclose(sf.falling_factorial(np.array([3.0, 4.0]), 2), [6.0, 12.0])
    with pytest.raises(ValueError):
        sf.falling_factorial(1.0, -1)


def test_generalized_wright_reduces_to_ml():
    # 1Psi1[(1,1); (b, a); x] = E_{a,b}(x)
    p = sf.wright_params([(1, 1)], [(1, 0.7)])
    assert sf.generalized_wright(p, -1.3) == pytest.approx(sf.mittag_leffler(0.7, 1, -1.3), rel=1e-13)


def test_generalized_wright_divergence_raises():
    p = sf.WrightParams(((1, 1), (1, 1)), ((1, 0.2),))
    assert p.delta < 0
    with pytest.raises(sf.SeriesDivergenceError):
        sf.generalized_wright(p, 0.5)


def test_series_result_and_precision_flag():
    # plain double-precision sum of exp(-30) loses everything
    res = sf.sum_series(lambda k: (-30.0) ** k / math.factorial(k))
    assert res.precision_loss
    # the Mittag-Leffler wrapper re-sums it in extended precision
    res = sf.mittag_leffler(1, 1, -30, info=True)
    assert not res.precision_loss
    assert res.value == pytest.approx(math.exp(-30), rel=1e-13)
    res = sf.mittag_leffler(1, 1, 1, info=True)
    assert not res.precision_loss and res.n_terms > 10
    assert float(res) == res.value


def test_nonconvergence():
    with pytest.raises(sf.NonConvergenceError):
        sf.mittag_leffler(1, 1, 50.0, sf.SeriesControl(max_terms=10))


def test_series_control_validation():
    with pytest.raises(ValueError):
        sf.SeriesControl(abs_tol=0)


def test_underflowing_series_terminates():
    # every term underflows: the sum is zero and must stop
    res = sf.sum_series(lambda k: math.exp(-800 - k))
    assert res.value == 0.0


@pytest.mark.parametrize("beta,c,t", [(0.5, -1.0, 1.0), (0.8, 2.0, 0.7), (0.3, -0.5, 3.0)])
def test_caputo_ml_residual(beta, c, t):
    assert abs(sf.caputo_ml_residual(beta, c, t)) < 1e-12
