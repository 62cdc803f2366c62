import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from keyhole_harq.core import (AntennaCase, Method, OutageEstimate, SchemeTag, SystemConfig,
                               antenna_profile, db_to_linear, effective_threshold, linear_to_db,
                               numeric_estimate)
from keyhole_harq.specfun import ContourError


@given(st.floats(-60.0, 60.0))
def test_db_round_trip(db):
    assert float(linear_to_db(db_to_linear(db))) == pytest.approx(db, abs=1e-12)


def test_config_from_db_and_accessors():
    cfg = SystemConfig.from_db(3, 2, 2, [10.0, 20.0], 1.5)
    assert cfg.snr_per_round == pytest.approx((10.0, 100.0))
    assert cfg.snr_db == pytest.approx((10.0, 20.0))
    assert not cfg.equal_rounds
    eq = SystemConfig.equal_snr(2, 2, 3, 5.0, 3.0)
    assert eq.equal_rounds and eq.snr_per_round == (5.0, 5.0, 5.0)
    assert eq.replace(k_max=1).snr_per_round == (5.0,)
    with pytest.raises(ValueError):
        cfg.replace(k_max=3)


@pytest.mark.parametrize("kwargs", [
    dict(n_t=0, n_r=2, k_max=1, snr_per_round=(1.0,), rate=1.0),
    dict(n_t=2.5, n_r=2, k_max=1, snr_per_round=(1.0,), rate=1.0),
    dict(n_t=True, n_r=2, k_max=1, snr_per_round=(1.0,), rate=1.0),
    dict(n_t=2, n_r=2, k_max=2, snr_per_round=(1.0,), rate=1.0),
    dict(n_t=2, n_r=2, k_max=1, snr_per_round=(-1.0,), rate=1.0),
    dict(n_t=2, n_r=2, k_max=1, snr_per_round=(np.inf,), rate=1.0),
    dict(n_t=2, n_r=2, k_max=1, snr_per_round=(1.0,), rate=0.0),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SystemConfig(**kwargs)


@given(st.integers(1, 64), st.integers(1, 64))
def test_antenna_profile(n_t, n_r):
    p = antenna_profile(n_t, n_r)
    assert p.tau == abs(n_t - n_r)
    assert p.n_min + p.tau == p.n_max
    assert p.case is {-1: AntennaCase.RX_EXCESS, 0: AntennaCase.EQUAL,
                      1: AntennaCase.TX_EXCESS}[int(np.sign(n_t - n_r))]


def test_effective_threshold():
    cfg = SystemConfig.from_db(2, 2, 1, 0.0, 3.0)
    assert effective_threshold(cfg, SchemeTag.TYPE_I) == 7.0
    assert effective_threshold(cfg, "cc") == 7.0
    assert effective_threshold(cfg, SchemeTag.IR) == 8.0


def test_outage_estimate_invariants():
    OutageEstimate(3.5, Method.ASYMPTOTIC)
    with pytest.raises(ValueError):
        OutageEstimate(1.5, Method.EXACT)
    with pytest.raises(ValueError):
        OutageEstimate(0.1, Method.MONTE_CARLO)
    with pytest.raises(ValueError):
        OutageEstimate(0.1, Method.EXACT, stderr=0.01)
    est = OutageEstimate(0.1, "monte-carlo", stderr=0.01, trials=1000)
    assert est.method is Method.MONTE_CARLO


def test_numeric_estimate_floor_and_clamp():
    low = numeric_estimate(-1e-12, 1e-11, Method.EXACT)
    assert low.value == 0.0 and low.below_floor
    tiny = numeric_estimate(1e-13, 1e-11, Method.EXACT)
    assert tiny.below_floor and tiny.value == 1e-13
    ok = numeric_estimate(0.25, 1e-9, Method.UPPER_BOUND)
    assert not ok.below_floor and ok.error_estimate == 1e-9
    assert numeric_estimate(1.0 + 1e-12, 1e-10, Method.EXACT).value == 1.0
    with pytest.raises(ContourError):
        numeric_estimate(-1e-3, 1e-9, Method.EXACT)
    with pytest.raises(ContourError):
        numeric_estimate(1.1, 1e-9, Method.EXACT)
