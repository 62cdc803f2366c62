"""Complex log-gamma via the Lanczos approximation."""

import numpy as np

# Lanczos coefficients, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


def _lanczos_log(z):
    # valid for Re(z) >= 0.5
    zm1 = z - 1.0
    series = np.full(zm1.shape, _LANCZOS_COEF[0], dtype=complex)
    for k in range(1, _LANCZOS_COEF.size):
        series = series + _LANCZOS_COEF[k] / (zm1 + k)
    t = zm1 + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm1 + 0.5) * np.log(t) - t + np.log(series)


def ln_gamma(z):
    """Principal branch of log Gamma(z) for complex ``z``.

    Arguments with ``Re(z) < 0.5`` are shifted right with the recurrence
    ``lnG(z) = lnG(z + n) - sum_j log(z + j)``; each logarithm is taken on
    its principal branch, which reproduces the principal branch of
    log-gamma (cut along the non-positive real axis).

    Parameters
    ----------
    z : complex or array_like
        Argument(s). Must not be a non-positive integer.

    Returns
    -------
    complex or ndarray of complex

    Raises
    ------
    ValueError
        If any argument is a pole (0, -1, -2, ...).
    """
    zarr = np.asarray(z, dtype=complex)
    scalar = zarr.ndim == 0
    zarr = np.atleast_1d(zarr)
    re, im = zarr.real, zarr.imag
    if np.any((im == 0) & (re <= 0) & (re == np.round(re))):
        raise ValueError("ln_gamma: pole at a non-positive integer")

    shift = np.where(re < 0.5, np.ceil(0.5 - re), 0.0).astype(int)
    out = _lanczos_log(zarr + shift)
    nmax = int(shift.max()) if shift.size else 0
    for j in range(nmax):
        active = shift > j
        out[active] -= np.log(zarr[active] + j)
    return out[0] if scalar else out


def gamma_fn(z):
    """Gamma(z) as ``exp(ln_gamma(z))``; complex output."""
    return np.exp(ln_gamma(z))
