"""Modified Bessel functions of the second kind, integer order.

Power series below ``x = 2``, Steed's continued fraction (CF2, Temme's
normalisation) above it, then upward recurrence in the order, which is
the stable direction for K.
"""

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_SERIES_TERMS = 30
_CF_MAXIT = 10000
_CF_EPS = 1e-16
_SERIES_CUTOFF = 2.0


def _k01_series_scaled(x):
    # x <= 2: A&S 9.6.11 for n = 0, 1
    q = 0.25 * x * x
    term0 = np.ones_like(x)          # q^k / (k!)^2
    term1 = np.ones_like(x)          # q^k / (k! (k+1)!)
    harm = 0.0                       # H_k
    i0 = np.zeros_like(x)
    i1_sum = np.zeros_like(x)
    k0_sum = np.zeros_like(x)
    k1_sum = np.zeros_like(x)
    for k in range(_SERIES_TERMS):
        if k > 0:
            harm += 1.0 / k
            term0 = term0 * q / (k * k)
            term1 = term1 * q / (k * (k + 1))
        i0 += term0
        i1_sum += term1
        k0_sum += harm * term0
        psi_sum = 2.0 * harm + 1.0 / (k + 1) - 2.0 * EULER_GAMMA
        k1_sum += psi_sum * term1
    log_half = np.log(0.5 * x)
    k0 = -(log_half + EULER_GAMMA) * i0 + k0_sum
    k1 = 1.0 / x + log_half * (0.5 * x * i1_sum) - 0.25 * x * k1_sum
    ex = np.exp(x)
    return k0 * ex, k1 * ex


def _k01_cf2_scaled(x):
    # x > 2: Steed's method for K_0, K_1 (mu = 0)
    n = x.size
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros(n)
    q2 = np.ones(n)
    a1 = 0.25
    q = np.full(n, a1)
    c = np.full(n, a1)
    s = 1.0 + q * delh
    a = -a1
    active = np.arange(n)
    for i in range(2, _CF_MAXIT):
        if active.size == 0:
            break
        a -= 2 * (i - 1)
        ia = active
        c[ia] = -a * c[ia] / i
        qnew = (q1[ia] - b[ia] * q2[ia]) / a
        q1[ia] = q2[ia]
        q2[ia] = qnew
        q[ia] += c[ia] * qnew
        b[ia] += 2.0
        d[ia] = 1.0 / (b[ia] + a * d[ia])
        delh[ia] = (b[ia] * d[ia] - 1.0) * delh[ia]
        h[ia] += delh[ia]
        dels = q[ia] * delh[ia]
        s[ia] += dels
        active = ia[np.abs(dels / s[ia]) >= _CF_EPS]
    else:
        raise ArithmeticError("bessel K continued fraction did not converge")
    h = a1 * h
    k0 = np.sqrt(math.pi / (2.0 * x)) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def _k01_scaled(x):
    k0 = np.empty_like(x)
    k1 = np.empty_like(x)
    small = x <= _SERIES_CUTOFF
    if np.any(small):
        k0[small], k1[small] = _k01_series_scaled(x[small])
    if np.any(~small):
        k0[~small], k1[~small] = _k01_cf2_scaled(x[~small])
    return k0, k1


def _check_args(order, x):
    if int(order) != order or order < 0:
        raise ValueError("order must be a non-negative integer")
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("bessel_k_int: x must be positive")
    return int(order), x


def bessel_k_int_scaled(order, x):
    """Exponentially scaled ``exp(x) * K_order(x)``.

    Parameters
    ----------
    order : int
        Non-negative integer order.
    x : float or array_like
        Positive argument(s).
    """
    order, x = _check_args(order, x)
    scalar = x.ndim == 0
    xa = np.atleast_1d(x)
    km, k = _k01_scaled(xa)
    if order == 0:
        out = km
    else:
        for nu in range(1, order):
            km, k = k, km + (2.0 * nu / xa) * k
        out = k
    return float(out[0]) if scalar else out


def bessel_k_int(order, x, full_output=False):
    """Modified Bessel function of the second kind ``K_order(x)``.

    Parameters
    ----------
    order : int
        Non-negative integer order.
    x : float or array_like
        Positive argument(s).
    full_output : bool, optional
        If True, also return a boolean mask flagging results that
        underflowed to zero.

    Returns
    -------
    value : float or ndarray
    underflow : bool or ndarray of bool
        Only when ``full_output`` is True.
    """
    order, x = _check_args(order, x)
    scaled = bessel_k_int_scaled(order, x)
    with np.errstate(under="ignore", over="ignore"):
        value = scaled * np.exp(-x)
    if not full_output:
        return value
    underflow = (np.asarray(value) == 0.0) & np.isfinite(scaled)
    return value, (bool(underflow) if np.ndim(underflow) == 0 else underflow)


def log_bessel_k_int(order, x):
    """``log K_order(x)`` without overflow, via the ratio recurrence.

    Suitable for large orders (hundreds) where ``K`` itself overflows.
    """
    order, x = _check_args(order, x)
    scalar = x.ndim == 0
    xa = np.atleast_1d(x)
    k0, k1 = _k01_scaled(xa)
    out = np.log(k0) - xa
    ratio = k1 / k0
    for nu in range(order):
        out += np.log(ratio)
        ratio = 1.0 / ratio + 2.0 * (nu + 1) / xa
    return float(out[0]) if scalar else out


def bessel_k_small_x(order, x):
    """Leading small-argument form of ``K_order(x)``.

    ``0.5 * Gamma(order) * (x / 2) ** -order`` for ``order > 0`` and
    ``-log(x)`` for ``order == 0``.
    """
    x = np.asarray(x, dtype=float)
    if order == 0:
        out = -np.log(x)
    else:
        out = 0.5 * math.gamma(order) * (0.5 * x) ** (-order)
    return float(out) if out.ndim == 0 else out
