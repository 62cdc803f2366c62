"""High-SNR outage asymptotes, diversity order and modulation-and-coding gain.

Every asymptote has the form ``shared * prod_k c_k`` where ``c_k`` depends
on round ``k`` only:

* Type-I: ``c_k = Gamma(tau)/(Gamma(N_T)Gamma(N_R)) * y_k**n / n`` with
  ``y_k = N_T (2**R - 1) / gamma_k`` and ``n = n_min``; with equal antenna
  counts ``c_k = y_k**N ln(gamma_k) / (N Gamma(N)**2)``.
* CC: ``c_k = Gamma(tau)/Gamma(n_max) * y_k**n`` (``ln(gamma_k)/Gamma(N)``
  in place of ``Gamma(tau)/Gamma(n_max)`` when equal), shared factor
  ``1/(K n)!``.
* IR: ``c_k = Gamma(tau)/Gamma(n_max) * (N_T/gamma_k)**n`` (again with
  ``ln(gamma_k)/Gamma(N)`` when equal), shared factor :func:`g_of_r`.
"""

from dataclasses import dataclass
from math import factorial, lgamma
from typing import Tuple

import numpy as np
from scipy import integrate

from .core import AntennaCase, Method, OutageEstimate, SchemeTag, SystemConfig, antenna_profile
from .specfun import ContourSettings, mellin_barnes_g


class UnsupportedCaseError(ValueError):
    """The requested closed form only exists for ``N_T == N_R``."""


class RouteDisagreementError(ArithmeticError):
    """The two evaluation routes of ``g(R)`` disagree."""


@dataclass(frozen=True)
class AsymptoticBreakdown:
    """Decomposition ``value = shared_factor * prod(per_round_constants)``.

    Attributes
    ----------
    value : float
    diversity_order : int
        ``K * min(N_T, N_R)``.
    log_exponent : int
        Power of ``ln(gamma)``: ``K`` with equal antenna counts, else 0.
    per_round_constants : tuple of float
    shared_factor : float
        1 for Type-I, ``1/(K n_min)!`` for CC, ``g(R)`` for IR.
    """

    value: float
    diversity_order: int
    log_exponent: int
    per_round_constants: Tuple[float, ...]
    shared_factor: float = 1.0

    def as_estimate(self):
        return OutageEstimate(self.value, Method.ASYMPTOTIC)


def indicator(x):
    """``1`` if ``x == 0`` else ``0``: the ln-gamma switch of the asymptotes."""
    return 1 if x == 0 else 0


def diversity_order(config: SystemConfig) -> int:
    """``K * min(N_T, N_R)``, the same for all three schemes."""
    return config.k_max * min(config.n_t, config.n_r)


def _breakdown(config, constants, shared):
    prof = antenna_profile(config)
    constants = tuple(float(c) for c in constants)
    return AsymptoticBreakdown(
        value=float(shared * np.prod(constants)),
        diversity_order=diversity_order(config),
        log_exponent=config.k_max * indicator(config.n_t - config.n_r),
        per_round_constants=constants,
        shared_factor=float(shared),
    )


def asym_type1(config: SystemConfig) -> AsymptoticBreakdown:
    """High-SNR Type-I outage.

    The exponent ``(N_T + N_R)/2 - tau/2`` is kept in its unsimplified
    form (it equals ``n_min``).
    """
    p = antenna_profile(config)
    nt, nr, tau = p.n_t, p.n_r, p.tau
    x = 2.0 ** config.rate - 1.0
    consts = []
    for g in config.snr_per_round:
        y = nt * x / g
        if p.case is AntennaCase.EQUAL:
            consts.append(y ** nt * np.log(g) / (nt * np.exp(2.0 * lgamma(nt))))
        else:
            e = (nt + nr) / 2.0 - tau / 2.0
            consts.append(np.exp(lgamma(tau) - lgamma(nt) - lgamma(nr)) * y ** e / e)
    return _breakdown(config, consts, 1.0)


def asym_cc(config: SystemConfig, x=None) -> AsymptoticBreakdown:
    """High-SNR CDF of ``X_CC`` at ``x`` (default ``2**R - 1``): the CC bound's asymptote."""
    p = antenna_profile(config)
    nt, nr, tau = p.n_t, p.n_r, p.tau
    x = 2.0 ** config.rate - 1.0 if x is None else float(x)
    if p.case is AntennaCase.TX_EXCESS:
        shared = 1.0 / factorial(config.k_max * nr)
        consts = [np.exp(lgamma(tau) - lgamma(nt)) * (nt * x / g) ** nr for g in config.snr_per_round]
    elif p.case is AntennaCase.RX_EXCESS:
        shared = 1.0 / factorial(config.k_max * nt)
        consts = [np.exp(lgamma(tau) - lgamma(nr)) * (nt * x / g) ** nt for g in config.snr_per_round]
    else:
        shared = 1.0 / factorial(config.k_max * nt)
        consts = [np.log(g) / np.exp(lgamma(nt)) * (nt * x / g) ** nt for g in config.snr_per_round]
    return _breakdown(config, consts, shared)


def asym_ir(config: SystemConfig, g_method="volume") -> AsymptoticBreakdown:
    """High-SNR IR outage: per-round constants times ``g(R)``."""
    p = antenna_profile(config)
    nt, nr, tau = p.n_t, p.n_r, p.tau
    if p.case is AntennaCase.TX_EXCESS:
        consts = [np.exp(lgamma(tau) - lgamma(nt)) * (nt / g) ** nr for g in config.snr_per_round]
    elif p.case is AntennaCase.RX_EXCESS:
        consts = [np.exp(lgamma(tau) - lgamma(nr)) * (nt / g) ** nt for g in config.snr_per_round]
    else:
        consts = [(nt / g) ** nr * np.log(g) / np.exp(lgamma(nt)) for g in config.snr_per_round]
    shared = g_of_r(config.rate, config.k_max, p.n_min, method=g_method)
    return _breakdown(config, consts, shared)


def asymptotic(config: SystemConfig, scheme) -> AsymptoticBreakdown:
    scheme = SchemeTag(scheme)
    if scheme is SchemeTag.TYPE_I:
        return asym_type1(config)
    if scheme is SchemeTag.CC:
        return asym_cc(config)
    return asym_ir(config)


# ---------------------------------------------------------------------------
# g(R)
# ---------------------------------------------------------------------------

def _volume(level, k, n, epsrel):
    # Gamma(n)^-k * int_{sum log(1+t_i) <= level} prod t_i^(n-1) dt, via
    # w_i = log(1 + t_i) and recursion on the number of coordinates
    if level <= 0.0:
        return 0.0
    if k == 1:
        return np.expm1(level) ** n / factorial(n)
    log_norm = -lgamma(n)

    def inner(w):
        return (np.exp((n - 1) * np.log(np.expm1(w)) + w + log_norm)
                * _volume(level - w, k - 1, n, epsrel))

    val, _ = integrate.quad(inner, 0.0, level, epsabs=0.0, epsrel=epsrel, limit=200)
    return val


def g_of_r_volume(rate, k_max, n_min, epsrel=1e-11):
    """``g(R)`` as the weighted volume of ``{t >= 0 : prod(1 + t_k) <= 2**R}``.

    Weight ``prod_k t_k**(N-1) / Gamma(N)``; nested adaptive quadrature.
    """
    if k_max > 4:
        raise ValueError("volume route supports k_max <= 4")
    return float(_volume(rate * np.log(2.0), int(k_max), int(n_min), epsrel))


def g_of_r_contour(rate, k_max, n_min, settings=None):
    """``G^{0,K+1}_{K+1,K+1}(2**R | 1, N+1, ..., N+1; 1, ..., 1, 0)`` by Mellin-Barnes.

    All poles of the integrand lie at ``s = 0, 1, ..., N`` and to the
    left, so the line sits at ``Re(s) = N + 1/2``.
    """
    k, n = int(k_max), int(n_min)
    settings = settings or ContourSettings(offset=n + 0.5, tol=1e-300, rtol=1e-9)
    return float(mellin_barnes_g([1.0] + [n + 1.0] * k, [], [], [1.0] * k + [0.0], 2.0 ** rate,
                                 settings))


def g_of_r(rate, k_max, n_min, method="volume", rtol=1e-4):
    """The IR rate factor ``g(R)``.

    Parameters
    ----------
    rate : float
        ``R > 0``.
    k_max, n_min : int
        ``K`` and ``min(N_T, N_R)``.
    method : {"volume", "contour", "both"}
        ``"both"`` evaluates the two routes and raises
        :class:`RouteDisagreementError` if they differ by more than ``rtol``.
        The volume route is used for ``K <= 4``, the contour otherwise.

    Examples
    --------
    >>> round(g_of_r(1.0, 1, 2), 12)      # (2**R - 1)**N / N!
    0.5
    """
    if not rate > 0:
        raise ValueError("rate must be positive")
    if method == "volume":
        return g_of_r_volume(rate, k_max, n_min) if k_max <= 4 else g_of_r_contour(rate, k_max, n_min)
    if method == "contour":
        return g_of_r_contour(rate, k_max, n_min)
    if method == "both":
        a = g_of_r_volume(rate, k_max, n_min)
        b = g_of_r_contour(rate, k_max, n_min)
        if abs(a - b) > rtol * abs(a):
            raise RouteDisagreementError(f"g(R) routes disagree: {a!r} vs {b!r}")
        return a
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# coding gain and the canonical asymptote
# ---------------------------------------------------------------------------

def coding_gain(config: SystemConfig, scheme) -> float:
    """Modulation-and-coding gain ``C(R)`` for ``N_T == N_R``.

    Defined through ``P_out ~ (C gamma)**-d (ln gamma)**K``.

    Raises
    ------
    UnsupportedCaseError
        If ``N_T != N_R``.
    """
    if config.n_t != config.n_r:
        raise UnsupportedCaseError("coding gain closed forms need N_T == N_R")
    scheme = SchemeTag(scheme)
    n, k = config.n_t, config.k_max
    x = 2.0 ** config.rate - 1.0
    gamma_term = np.exp(lgamma(n) / n)
    if scheme is SchemeTag.TYPE_I:
        return float((n * np.exp(2.0 * lgamma(n))) ** (1.0 / n) / (n * x))
    if scheme is SchemeTag.CC:
        return float(np.exp(lgamma(k * n + 1.0) / (k * n)) * gamma_term / (n * x))
    g = g_of_r(config.rate, k, n)
    return float(g ** (-1.0 / (k * n)) * gamma_term / n)


def asym_canonical(config: SystemConfig, scheme, gamma) -> float:
    """``(C(R) gamma)**-d * (ln gamma)**(K I(N_T - N_R))`` at equal SNR ``gamma``.

    For ``N_T != N_R`` no closed-form ``C(R)`` is available and the
    scheme's own asymptote at equal SNR ``gamma`` is returned.
    """
    gamma = float(gamma)
    if config.n_t != config.n_r:
        eq = SystemConfig.equal_snr(config.n_t, config.n_r, config.k_max, gamma, config.rate)
        return asymptotic(eq, scheme).value
    d = diversity_order(config)
    c = coding_gain(config, scheme)
    return float((c * gamma) ** (-d) * np.log(gamma) ** (config.k_max * indicator(config.n_t - config.n_r)))
