"""Outage probabilities of Type-I, CC and IR HARQ over keyhole channels."""

import numpy as np
from scipy import optimize, special

from .core import Method, SchemeTag, SystemConfig, effective_threshold, numeric_estimate
from .distribution import (KeyholeGainDist, cc_transform, cdf_x, log_mellin_kernel_real,
                           mellin_kernel)
from .specfun import ContourError, ContourSettings, inverse_laplace_cdf, inverse_mellin_cdf
from .specfun.contour import with_offset

#: offsets tried in turn when the IR contour is set up by hand
IR_FALLBACK_OFFSETS = (-0.5, -0.25, -1.5)


def outage_type1(config: SystemConfig):
    """Type-I HARQ outage ``prod_k F_X(N_T (2**R - 1) / gamma_k)``.

    Returns
    -------
    OutageEstimate
        Tagged ``exact``; ``error_estimate`` propagates the quadrature
        error of each factor.
    """
    dist = KeyholeGainDist.from_config(config)
    thr = effective_threshold(config, SchemeTag.TYPE_I)
    value = 1.0
    rel_err = 0.0
    for g in config.snr_per_round:
        f, e = cdf_x(dist, config.n_t * thr / g, full_output=True)
        value *= f
        rel_err += e / f if f > 0 else np.inf
    return numeric_estimate(value, value * rel_err if value > 0 else 0.0, Method.EXACT)


def outage_cc_upper(config: SystemConfig, rtol=1e-7, settings=None):
    """Upper bound on the CC outage, ``P(sum_k gamma_k X_k / N_T < 2**R - 1)``.

    Chase combining accumulates ``log2 det(I + sum_k gamma_k/N_T |u_k|^2 v_k v_k^H)``,
    which is never below ``log2(1 + sum_k gamma_k X_k / N_T)``; the CDF of the
    scalar sum is obtained by Euler-summation Bromwich inversion of the
    product of per-round Laplace transforms.

    Parameters
    ----------
    rtol : float
        Relative accuracy target; the Bromwich abscissa adapts so that
        very small probabilities keep it.
    settings : BromwichSettings, optional
    """
    x = effective_threshold(config, SchemeTag.CC)
    res = inverse_laplace_cdf(cc_transform(config), x, settings, rtol=rtol,
                              transform_rtol=1e-12, full_output=True)
    return numeric_estimate(res.value, res.error, Method.UPPER_BOUND)


def _ir_saddle(config, t):
    # minimise p t + log E[X_IR^-p] - log p over p > 0
    def objective(lp):
        p = np.exp(lp)
        return p * t + float(log_mellin_kernel_real(config, p)[0]) - lp

    res = optimize.minimize_scalar(objective, bounds=(np.log(1e-3), np.log(1e5)),
                                   method="bounded", options={"xatol": 1e-3})
    return float(np.exp(res.x)), float(res.fun)


def _ir_half_width(kernel, p0, log_x, rel=1e-5, start=10.0, limit=None):
    # grow the truncation until the integrand has dropped by ``rel`` from
    # its value on the real axis; the Euler-summed tail covers the rest
    def mag(y):
        s = -p0 + 1j * y
        return abs(np.exp(-s * log_x) * kernel(np.array([s + 1.0]))[0] / s)

    # the integrand's width in Im(s) grows with the offset
    limit = max(160.0, 4.0 * p0) if limit is None else limit
    level = rel * mag(0.0)
    T = start
    while T < limit and mag(T) > level:
        T *= 2.0
    return min(T, limit)


def outage_ir(config: SystemConfig, rtol=1e-6, settings=None):
    """IR HARQ outage ``P(prod_k (1 + gamma_k X_k / N_T) < 2**R)``.

    The CDF of the product is recovered from its Mellin transform
    (:func:`~keyhole_harq.distribution.mellin_kernel`) by a trapezoid on a
    vertical line left of the pole at zero.

    Without explicit ``settings`` the line is placed at the saddle point
    of ``x**p E[X_IR^-p] / p`` and the step is chosen so that the
    aliasing error is below ``rtol`` times the answer; this keeps tiny
    outage values relatively accurate. With ``settings`` the given line
    is used and, on failure, the offsets in :data:`IR_FALLBACK_OFFSETS`.
    """
    x = effective_threshold(config, SchemeTag.IR)
    kernel = lambda s: mellin_kernel(config, s)
    if settings is not None:
        return _ir_fixed(kernel, x, settings)

    t = np.log(x)
    p0, log_level = _ir_saddle(config, t)
    est = np.exp(log_level)
    T = _ir_half_width(kernel, p0, t)
    last = None
    for _ in range(4):
        h = min(2.0 * np.pi * p0 / np.log(10.0 / (rtol * est)), 0.9 * 2.0 * np.pi / t) / 2.0
        steps = max(64, 2 * int(np.ceil(T / h)))
        cs = ContourSettings(offset=-p0, half_width=T, steps=steps, rtol=rtol, tol=1e-300)
        try:
            res = inverse_mellin_cdf(kernel, x, cs, full_output=True)
        except ContourError as exc:
            last = exc
            T *= 2.0
            continue
        alias = np.exp(-np.pi * p0 / h)  # aliasing bound of the coarser (2h) rule
        if res.value > 0 and alias <= rtol * res.value:
            return numeric_estimate(res.value, res.error + np.exp(-2.0 * np.pi * p0 / h),
                                    Method.EXACT)
        est = max(min(res.value, est) * 1e-2, 1e-300)
    raise last or ContourError("IR inversion could not reach the requested accuracy")


def _ir_fixed(kernel, x, settings):
    offsets = [settings.offset] + [c for c in IR_FALLBACK_OFFSETS if c != settings.offset]
    last = None
    for c in offsets:
        try:
            res = inverse_mellin_cdf(kernel, x, with_offset(settings, c), full_output=True)
            return numeric_estimate(res.value, res.error, Method.EXACT)
        except ContourError as exc:
            last = exc
    raise last


def outage_exact(config: SystemConfig, scheme):
    """Dispatch to the analytic engine of ``scheme`` (CC gives the bound)."""
    scheme = SchemeTag(scheme)
    if scheme is SchemeTag.TYPE_I:
        return outage_type1(config)
    if scheme is SchemeTag.CC:
        return outage_cc_upper(config)
    return outage_ir(config)


def cc_outage_floor(config: SystemConfig):
    """Large-array limit of the CC bound, ``P(sum_k gamma_k |u_k|^2 < 2**R - 1)``.

    As ``N_T`` grows, ``|v_k|^2 / N_T -> 1`` and only the receive-side
    ``Gamma(N_R)`` variables remain. Equal SNRs give an Erlang CDF.
    """
    x = effective_threshold(config, SchemeTag.CC)
    gammas = config.snr_per_round
    if config.equal_rounds:
        return float(special.gammainc(config.k_max * config.n_r, x / gammas[0]))

    def transform(s):
        out = np.ones(np.shape(s), dtype=complex)
        for g in gammas:
            out = out * (1.0 + g * s) ** (-config.n_r)
        return out

    return inverse_laplace_cdf(transform, x, rtol=1e-9)
