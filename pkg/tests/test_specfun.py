import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from keyhole_harq.specfun import (BromwichSettings, ContourError, ContourSettings,
                                  QuadratureSettings, bessel_k_int, bessel_k_int_scaled,
                                  bessel_k_small_x, exp_sinh, gamma_fn, inverse_laplace_cdf,
                                  inverse_mellin_cdf, ln_gamma, log_bessel_k_int,
                                  mellin_barnes_G, mellin_barnes_g, tricomi_u)


# gamma ---------------------------------------------------------------------

@given(st.floats(0.01, 150.0))
def test_ln_gamma_real_matches_math(x):
    assert abs(ln_gamma(x) - math.lgamma(x)) <= 1e-13 * max(1.0, abs(math.lgamma(x)))


@given(st.floats(-30.0, 30.0), st.floats(-40.0, 40.0))
@settings(max_examples=60)
def test_ln_gamma_complex_matches_mpmath(re, im):
    z = complex(re, im)
    if abs(im) < 1e-3 and re <= 0 and abs(re - round(re)) < 1e-3:
        return  # too close to a pole
    ref = complex(mp.loggamma(mp.mpc(re, im)))
    got = complex(ln_gamma(z))
    assert abs(got - ref) <= 1e-11 * max(1.0, abs(ref))


def test_gamma_fn_integers():
    for n in range(1, 15):
        assert gamma_fn(n) == pytest.approx(math.factorial(n - 1), rel=1e-13)


# Bessel K --------------------------------------------------------------------

@pytest.mark.parametrize("order", [0, 1, 2, 5, 12, 30])
def test_bessel_k_matches_scipy(order):
    x = np.geomspace(1e-4, 200.0, 80)
    ref = special.kv(order, x)
    ok = np.isfinite(ref) & (ref > 0)
    np.testing.assert_allclose(bessel_k_int(order, x)[ok], ref[ok], rtol=1e-11)


@given(st.integers(1, 40), st.floats(1e-3, 100.0))
def test_bessel_k_recurrence(n, x):
    lhs = bessel_k_int_scaled(n + 1, x)
    rhs = bessel_k_int_scaled(n - 1, x) + 2.0 * n / x * bessel_k_int_scaled(n, x)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_bessel_k_scaled_and_log():
    x = np.array([0.01, 1.0, 50.0, 600.0])
    np.testing.assert_allclose(bessel_k_int_scaled(3, x), special.kve(3, x), rtol=1e-12)
    for order in (0, 4, 300):
        for xv in (0.5, 20.0, 900.0):
            ref = float(mp.log(mp.besselk(order, xv)))
            assert log_bessel_k_int(order, xv) == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_bessel_k_underflow_flag():
    val, under = bessel_k_int(2, np.array([1.0, 800.0]), full_output=True)
    assert under.tolist() == [False, True]
    assert val[1] == 0.0


def test_bessel_k_small_x_leading_term():
    for order in (1, 3):
        assert bessel_k_int(order, 1e-6) == pytest.approx(bessel_k_small_x(order, 1e-6), rel=1e-4)
    # order 0 only matches up to the constant log(2) - euler_gamma
    assert bessel_k_int(0, 1e-6) - bessel_k_small_x(0, 1e-6) == pytest.approx(
        np.log(2.0) - np.euler_gamma, abs=1e-9)


def test_bessel_k_rejects_bad_input():
    with pytest.raises(ValueError):
        bessel_k_int(-1, 1.0)
    with pytest.raises(ValueError):
        bessel_k_int(1, 0.0)


# quadrature and Tricomi ---------------------------------------------------------

def test_exp_sinh_known_integrals():
    val, err = exp_sinh(lambda x: np.exp(-x) * x ** 2.5)
    assert val == pytest.approx(math.gamma(3.5), rel=1e-12)
    assert err < 1e-10
    val, _ = exp_sinh(lambda x: 1.0 / (1.0 + x * x))
    assert val == pytest.approx(np.pi / 2.0, rel=1e-10)
    val, _ = exp_sinh(lambda x: -np.log(x) * np.exp(-x))
    assert val == pytest.approx(np.euler_gamma, rel=1e-12)


def test_exp_sinh_vector_valued():
    def f(x):
        return np.stack([np.exp(-x), np.exp(-2.0 * x)])

    val, _ = exp_sinh(f, QuadratureSettings(rtol=1e-12))
    np.testing.assert_allclose(val, [1.0, 0.5], rtol=1e-12)


@pytest.mark.parametrize("a,b", [(1, 1), (2, 0), (3, -1), (2, 5), (4, 2)])
def test_tricomi_matches_mpmath(a, b):
    for z in (0.05, 1.0, 7.5, 3.0 + 40.0j, 0.2 - 5.0j):
        ref = complex(mp.hyperu(a, b, z))
        got = complex(tricomi_u(a, b, z))
        assert abs(got - ref) <= 1e-9 * abs(ref)


# transform inversion ------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 4, 10, 25])
def test_inverse_laplace_erlang(n):
    for x in (0.05, 1.0, 4.0, 30.0):
        got = inverse_laplace_cdf(lambda s: (1.0 + s) ** (-n), x)
        assert abs(got - special.gammainc(n, x)) < 1e-8


def test_inverse_laplace_relative_mode_tiny_values():
    # Erlang(6) far in the lower tail
    res = inverse_laplace_cdf(lambda s: (1.0 + s) ** -6, 1e-3, rtol=1e-8, full_output=True)
    ref = special.gammainc(6, 1e-3)
    assert res.value == pytest.approx(ref, rel=1e-7)
    assert res.error < 1e-6 * ref


def test_inverse_laplace_accepts_contour_settings():
    a = inverse_laplace_cdf(lambda s: 1.0 / (1.0 + s), 2.0, ContourSettings(euler_terms=15))
    b = inverse_laplace_cdf(lambda s: 1.0 / (1.0 + s), 2.0, BromwichSettings(euler_terms=15))
    assert a == b == pytest.approx(1.0 - np.exp(-2.0), abs=1e-9)


def test_inverse_laplace_rejects_nonpositive_x():
    with pytest.raises(ValueError):
        inverse_laplace_cdf(lambda s: 1.0 / (1.0 + s), 0.0)


def test_inverse_mellin_gamma_variable():
    # Y ~ Gamma(3): E[Y**(s-1)] = Gamma(s + 2) / Gamma(3)
    kernel = lambda s: np.exp(ln_gamma(np.asarray(s) + 2.0) - math.lgamma(3.0))
    cs = ContourSettings(offset=-0.5, half_width=60.0, steps=4000, tol=1e-8)
    for x in (0.3, 2.0, 8.0):
        res = inverse_mellin_cdf(kernel, x, cs, full_output=True)
        assert res.value == pytest.approx(special.gammainc(3, x), abs=1e-9)
        assert abs(res.imag_residue) < 1e-8


def test_inverse_mellin_pole_on_contour():
    with pytest.raises(ContourError, match="pole"):
        inverse_mellin_cdf(lambda s: np.ones_like(s), 1.0, ContourSettings(offset=0.0))


def test_contour_settings_validation():
    with pytest.raises(ValueError):
        ContourSettings(steps=63)
    with pytest.raises(ValueError):
        ContourSettings(steps=65)


def test_mellin_barnes_matches_mpmath_meijerg():
    # G^{2,1}_{1,3}(z | 1; 2, 3, 0)
    for z in (0.1, 1.0, 5.0):
        ref = float(mp.meijerg([[1], []], [[2, 3], [0]], z))
        got = mellin_barnes_g([1.0], [], [2.0, 3.0], [0.0], z,
                              ContourSettings(offset=1.0, tol=1e-12))
        assert got == pytest.approx(ref, rel=1e-9)
    assert mellin_barnes_G is mellin_barnes_g


def test_mellin_barnes_exponential():
    # G^{1,0}_{0,1}(z | -; 0) = exp(-z)
    for z in (0.5, 2.0):
        got = mellin_barnes_g([], [], [0.0], [], z, ContourSettings(offset=-0.5, tol=1e-12))
        assert got == pytest.approx(np.exp(-z), rel=1e-10)


def test_mellin_barnes_contour_must_separate_poles():
    with pytest.raises(ContourError):
        mellin_barnes_g([1.0], [], [2.0, 3.0], [0.0], 1.0, ContourSettings(offset=2.0))
    with pytest.raises(ContourError):
        mellin_barnes_g([1.0], [], [2.0, 3.0], [0.0], 1.0, ContourSettings(offset=2.5))
