"""Tricomi confluent hypergeometric function ``U(a, b; z)``."""

import numpy as np

from .gamma import ln_gamma
from .quadrature import QuadratureSettings, exp_sinh


def tricomi_u(a, b, z, settings=None, full_output=False):
    """Tricomi's ``Psi(a, b; z)`` (also written ``U``) for ``Re(z) > 0``.

    Uses the Laplace-type representation with the integration ray turned
    onto the direction of ``z``::

        Psi(a, b; z) = z**-a / Gamma(a) * int_0^inf exp(-r) r**(a-1)
                       * (1 + r/z)**(b-a-1) dr

    which removes the oscillation of ``exp(-z t)`` when ``Im(z)`` is large
    relative to ``Re(z)``. The remaining integral is done with the exp-sinh
    rule.

    Parameters
    ----------
    a : float
        Positive first parameter.
    b : float
        Second parameter.
    z : complex or array_like of complex
        Argument(s) with positive real part.
    settings : QuadratureSettings, optional
    full_output : bool
        Also return the absolute error estimate.

    Returns
    -------
    value : complex or ndarray of complex
    error : float
        Only when ``full_output`` is True.
    """
    if not a > 0:
        raise ValueError("tricomi_u: a must be positive")
    z = np.asarray(z, dtype=complex)
    if np.any(~(z.real > 0)):
        raise ValueError("tricomi_u: requires Re(z) > 0")
    scalar = z.ndim == 0
    zz = np.atleast_1d(z).ravel()
    log_z = np.log(zz)[:, None]
    c = b - a - 1.0

    def integrand(r):
        lr = np.log(r)
        logf = -r + (a - 1.0) * lr + c * np.log1p(r / zz[:, None])
        return np.exp(logf)

    settings = settings or QuadratureSettings(rtol=1e-12, atol=1e-300)
    integral, err = exp_sinh(integrand, settings)
    prefactor = np.exp(-a * log_z[:, 0] - ln_gamma(a))
    value = prefactor * integral
    error = float(np.max(np.abs(prefactor)) * err)
    value = value.reshape(np.shape(z))
    if scalar:
        value = complex(value)
    return (value, error) if full_output else value
