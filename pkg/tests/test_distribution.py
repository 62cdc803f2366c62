import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from keyhole_harq.core import SystemConfig
from keyhole_harq.distribution import (AccuracyError, KeyholeGainDist, cc_transform, cdf_x,
                                       cdf_x_closed, cdf_x_meijer, laplace_factor,
                                       log_mellin_kernel_real, log_pdf_x, mellin_factor,
                                       mellin_kernel, pdf_x)

mp.mp.dps = 30


def mp_cdf(n_t, n_r, x):
    return float(mp.meijerg([[1], []], [[n_t, n_r], [0]], x) / (mp.gamma(n_t) * mp.gamma(n_r)))


def test_pdf_formula_against_mpmath():
    for n_t, n_r in ((1, 1), (2, 3), (4, 2)):
        dist = KeyholeGainDist.from_antennas(n_t, n_r)
        for x in (1e-3, 0.7, 5.0, 40.0):
            ref = (2 * mp.mpf(x) ** (mp.mpf(n_t + n_r) / 2 - 1) * mp.besselk(n_t - n_r, 2 * mp.sqrt(x))
                   / (mp.gamma(n_t) * mp.gamma(n_r)))
            assert pdf_x(dist, x) == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.parametrize("n_t,n_r", [(n_t, n_r) for n_t in range(1, 5) for n_r in range(1, 5)])
def test_pdf_normalized(n_t, n_r):
    dist = KeyholeGainDist.from_antennas(n_t, n_r)
    f = lambda u: np.exp(u + log_pdf_x(dist, np.exp(u)))
    c = np.log(dist.mean)
    total = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
                for a, b in ((c - 60.0, c), (c, c + 6.0)))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_pdf_rejects_nonpositive():
    with pytest.raises(ValueError):
        pdf_x(KeyholeGainDist.from_antennas(2, 2), 0.0)


@pytest.mark.parametrize("n_t,n_r", [(1, 1), (2, 2), (2, 3), (3, 2), (1, 4)])
def test_cdf_matches_mpmath_over_many_decades(n_t, n_r):
    dist = KeyholeGainDist.from_antennas(n_t, n_r)
    for x in (1e-12, 1e-6, 1e-2, 0.5, 3.0, 20.0):
        ref = mp_cdf(n_t, n_r, x)
        got, err = cdf_x(dist, x, full_output=True)
        assert got == pytest.approx(ref, rel=1e-9)
        assert err <= 1e-8 * ref + 1e-300


def test_cdf_closed_and_meijer_routes_agree():
    for n_t, n_r in ((1, 1), (2, 3), (3, 2)):
        dist = KeyholeGainDist.from_antennas(n_t, n_r)
        for x in (0.3, 2.0, 9.0):
            ref = cdf_x(dist, x)
            assert cdf_x_closed(dist, x) == pytest.approx(ref, rel=1e-9)
            assert cdf_x_meijer(dist, x) == pytest.approx(ref, rel=1e-8)


@given(st.integers(1, 4), st.integers(1, 4), st.floats(1e-4, 50.0), st.floats(1e-4, 50.0))
@settings(max_examples=40, deadline=None)
def test_cdf_monotone_and_bounded(n_t, n_r, a, b):
    dist = KeyholeGainDist.from_antennas(n_t, n_r)
    lo, hi = sorted((a, b))
    fa, fb = cdf_x(dist, lo), cdf_x(dist, hi)
    assert 0.0 <= fa <= fb <= 1.0


def test_cdf_edges():
    dist = KeyholeGainDist.from_antennas(2, 2)
    assert cdf_x(dist, 0.0) == 0.0
    assert cdf_x(dist, 1e4) == pytest.approx(1.0, abs=1e-14)


def test_laplace_factor_value():
    # (1, 1) at gamma = 1, s = 1: z Psi(1, 1; z) with z = 1, i.e. e E_1(1)
    dist = KeyholeGainDist.from_antennas(1, 1)
    got = laplace_factor(dist, 1.0, 1, 1.0)
    assert complex(got).real == pytest.approx(float(mp.e * mp.expint(1, 1)), rel=1e-12)
    assert complex(got).real == pytest.approx(0.596347362323194, rel=1e-12)


@pytest.mark.parametrize("n_t,n_r", [(1, 1), (2, 3), (3, 2), (2, 2)])
def test_laplace_routes_agree(n_t, n_r):
    dist = KeyholeGainDist.from_antennas(n_t, n_r)
    s = np.array([0.01, 0.5 + 3.0j, 2.0 - 40.0j, 10.0])
    a = laplace_factor(dist, 10.0, n_t, s, "tricomi")
    b = laplace_factor(dist, 10.0, n_t, s, "quadrature")
    np.testing.assert_allclose(a, b, rtol=1e-8)
    laplace_factor(dist, 10.0, n_t, s, "check")


def test_laplace_matches_moment_definition():
    # E[exp(-s gamma X / n_t)] by direct mpmath quadrature
    dist = KeyholeGainDist.from_antennas(2, 3)
    g, s = 4.0, 0.7

    def f(x):
        return mp.exp(-s * g * x / 2) * 2 * x ** (mp.mpf(5) / 2 - 1) * mp.besselk(1, 2 * mp.sqrt(x)) / 2

    ref = float(mp.quad(f, [0, 1, mp.inf]))
    assert complex(laplace_factor(dist, g, 2, s)).real == pytest.approx(ref, rel=1e-10)


def test_cc_transform_single_round_is_laplace_factor():
    cfg = SystemConfig.from_db(2, 2, 2, [3.0, 7.0], 2.0)
    dist = KeyholeGainDist.from_config(cfg)
    s = np.array([0.3 + 1.0j])
    expected = np.prod([laplace_factor(dist, g, 2, s) for g in cfg.snr_per_round], axis=0)
    np.testing.assert_allclose(cc_transform(cfg)(s), expected, rtol=1e-13)


@pytest.mark.parametrize("n_t,n_r", [(1, 1), (2, 3), (3, 2)])
def test_mellin_factor_routes_agree(n_t, n_r):
    dist = KeyholeGainDist.from_antennas(n_t, n_r)
    s = np.array([0.5, -0.3 + 2.0j, -1.2 + 15.0j])
    a = mellin_factor(dist, 20.0, n_t, s, "grid")
    np.testing.assert_allclose(a, mellin_factor(dist, 20.0, n_t, s, "quad"), rtol=1e-8)
    np.testing.assert_allclose(a, mellin_factor(dist, 20.0, n_t, s, "meijer"), rtol=1e-7)


def test_mellin_factor_at_one_is_one():
    dist = KeyholeGainDist.from_antennas(2, 2)
    assert complex(mellin_factor(dist, 10.0, 2, 1.0)) == pytest.approx(1.0, abs=1e-13)


def test_mellin_kernel_and_real_log_kernel():
    cfg = SystemConfig.from_db(2, 3, 2, [5.0, 10.0], 3.0)
    p = np.array([0.2, 1.0, 3.0])
    direct = np.log(mellin_kernel(cfg, 1.0 - p).real)
    np.testing.assert_allclose(log_mellin_kernel_real(cfg, p), direct, rtol=1e-11)


def test_dist_properties():
    dist = KeyholeGainDist.from_antennas(3, 2)
    assert dist.n_t == 3 and dist.n_r == 2 and dist.mean == 6.0
    assert dist.upper_cutoff() > dist.mean
    assert issubclass(AccuracyError, ArithmeticError)
