import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from keyhole_harq.asymptotics import asymptotic
from keyhole_harq.core import Method, SchemeTag, SystemConfig, effective_threshold
from keyhole_harq.distribution import KeyholeGainDist, cdf_x, cdf_x_closed, mellin_kernel, pdf_x
from keyhole_harq.outage import (cc_outage_floor, outage_cc_upper, outage_exact, outage_ir,
                                 outage_type1)
from keyhole_harq.specfun import ContourSettings, inverse_laplace_cdf


@pytest.mark.parametrize("n_t,n_r", [(1, 1), (2, 2), (2, 3), (3, 2)])
@pytest.mark.parametrize("snr_db", [0.0, 10.0, 20.0])
def test_single_round_engines_equal_gain_cdf(n_t, n_r, snr_db):
    cfg = SystemConfig.from_db(n_t, n_r, 1, snr_db, 3.0)
    ref = cdf_x(KeyholeGainDist.from_config(cfg), n_t * 7.0 / cfg.snr_per_round[0])
    for est in (outage_type1(cfg), outage_cc_upper(cfg), outage_ir(cfg)):
        assert est.value == pytest.approx(ref, rel=1e-7)


def test_type1_is_product_of_cdfs():
    cfg = SystemConfig.from_db(2, 3, 3, [3.0, 6.0, 9.0], 2.0)
    dist = KeyholeGainDist.from_config(cfg)
    ref = np.prod([cdf_x(dist, 2 * 3.0 / g) for g in cfg.snr_per_round])
    est = outage_type1(cfg)
    assert est.value == pytest.approx(ref, rel=1e-12)
    assert est.method is Method.EXACT


def _convolution_cdf(n_t, n_r, gammas, thr):
    # P(a X_1 + b X_2 < thr) by direct quadrature over X_1
    dist = KeyholeGainDist.from_antennas(n_t, n_r)
    a, b = (g / n_t for g in gammas)
    top = thr / a
    f = lambda x: pdf_x(dist, x) * cdf_x_closed(dist, (thr - a * x) / b)
    val, _ = integrate.quad(f, 0.0, top, epsabs=0.0, epsrel=1e-11, limit=400,
                            points=[min(top / 2, dist.mean)])
    return val


@pytest.mark.parametrize("n_t,n_r,snr_db", [(2, 2, (10.0, 10.0)), (3, 2, (5.0, 12.0)),
                                             (1, 1, (15.0, 15.0))])
def test_cc_bound_matches_direct_convolution(n_t, n_r, snr_db):
    cfg = SystemConfig.from_db(n_t, n_r, 2, snr_db, 3.0)
    ref = _convolution_cdf(n_t, n_r, cfg.snr_per_round, 7.0)
    est = outage_cc_upper(cfg)
    assert est.value == pytest.approx(ref, rel=1e-7)
    assert est.method is Method.UPPER_BOUND


@pytest.mark.parametrize("n_t,n_r,k", [(2, 2, 2), (3, 2, 3), (2, 3, 2), (1, 1, 3)])
@pytest.mark.parametrize("snr_db", [5.0, 20.0, 40.0])
def test_ir_matches_laplace_route_on_log_gain(n_t, n_r, k, snr_db):
    # E[exp(-p log X_IR)] = mellin_kernel(1 - p): invert it with the Bromwich engine
    cfg = SystemConfig.from_db(n_t, n_r, k, snr_db, 3.0)
    t = np.log(effective_threshold(cfg, SchemeTag.IR))
    ref = inverse_laplace_cdf(lambda p: mellin_kernel(cfg, 1.0 - p), t, rtol=1e-9)
    est = outage_ir(cfg)
    assert est.value == pytest.approx(ref, rel=2e-6)
    assert est.error_estimate < 1e-5 * est.value


def test_ir_with_explicit_contour_settings():
    cfg = SystemConfig.from_db(2, 2, 2, 10.0, 3.0)
    auto = outage_ir(cfg).value
    fixed = outage_ir(cfg, settings=ContourSettings(offset=-0.5, half_width=200.0, steps=20000,
                                                    tol=1e-7)).value
    assert fixed == pytest.approx(auto, abs=1e-7)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.floats(0.0, 25.0),
       st.floats(0.5, 4.0))
@settings(max_examples=12, deadline=None)
def test_scheme_ordering(n_t, n_r, k, snr_db, rate):
    # I_IR >= log2(1 + sum) >= log2(1 + max) per draw
    cfg = SystemConfig.from_db(n_t, n_r, k, snr_db, rate)
    p1 = outage_type1(cfg).value
    cc = outage_cc_upper(cfg).value
    ir = outage_ir(cfg).value
    assert ir <= cc * (1 + 1e-6) + 1e-12
    assert cc <= p1 * (1 + 1e-6) + 1e-12


def test_monotone_in_snr_and_rate():
    base = SystemConfig.from_db(2, 3, 2, 10.0, 3.0)
    for fn in (outage_type1, outage_cc_upper, outage_ir):
        by_snr = [fn(base.with_snr_db(s)).value for s in (5.0, 10.0, 15.0, 20.0)]
        by_rate = [fn(base.replace(rate=r)).value for r in (1.0, 2.0, 3.0, 4.0)]
        assert np.all(np.diff(by_snr) < 0)
        assert np.all(np.diff(by_rate) > 0)


def test_tiny_outage_keeps_relative_accuracy():
    cfg = SystemConfig.from_db(3, 2, 3, 60.0, 3.0)
    for tag in (SchemeTag.TYPE_I, SchemeTag.CC, SchemeTag.IR):
        est = outage_exact(cfg, tag)
        ratio = est.value / asymptotic(cfg, tag).value
        assert 0.9 < ratio < 1.1
        assert not est.below_floor


def test_cc_floor_erlang_and_general():
    cfg = SystemConfig.from_db(1024, 2, 3, 5.0, 3.0)
    g = cfg.snr_per_round[0]
    assert cc_outage_floor(cfg) == pytest.approx(special.gammainc(6, 7.0 / g), rel=1e-14)
    uneq = SystemConfig.from_db(1024, 2, 2, [5.0, 5.0 + 1e-9], 3.0)
    assert cc_outage_floor(uneq) == pytest.approx(special.gammainc(4, 7.0 / g), rel=1e-7)


def test_cc_bound_approaches_floor():
    floor = cc_outage_floor(SystemConfig.from_db(1024, 2, 3, 5.0, 3.0))
    gaps = [abs(outage_cc_upper(SystemConfig.from_db(n, 2, 3, 5.0, 3.0)).value - floor)
            for n in (16, 128, 1024)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.01 * floor
