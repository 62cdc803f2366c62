"""Numerical inversion of Laplace and Mellin transforms.

Two engines share this module:

* :func:`inverse_laplace_cdf` -- the Abate-Whitt Fourier-series (EULER)
  algorithm on the Bromwich line, with optional oversampling and an
  adaptive abscissa that keeps the answer *relatively* accurate for
  very small probabilities.
* :func:`inverse_mellin_cdf` and :func:`mellin_barnes_g` -- trapezoidal
  rule on a vertical line ``Re(s) = offset``, with the truncated
  oscillatory tail summed block by block and accelerated by Euler
  summation.
"""

from dataclasses import dataclass, replace
from math import comb

import numpy as np

from .gamma import ln_gamma

_EPS = np.finfo(float).eps


class ContourError(ArithmeticError):
    """A contour integral failed to meet its tolerance or is ill-posed."""


@dataclass(frozen=True)
class BromwichSettings:
    """Parameters of the Euler-summation Bromwich inversion.

    Attributes
    ----------
    discretization : float
        The Abate-Whitt ``A``; the abscissa is ``A / (2 * oversample * x)``
        and the aliasing error is bounded by ``exp(-A)``.
    euler_terms : int
        Number ``m`` of binomially averaged partial sums.
    series_terms : int
        Number ``n`` of plain terms before averaging.
    oversample : int
        Abate-Whitt ``l``; step ``pi / (l * x)`` along the line.
    tol : float
        Absolute error budget.
    """

    discretization: float = 25.0
    euler_terms: int = 11
    series_terms: int = 25
    oversample: int = 1
    tol: float = 1e-8

    def __post_init__(self):
        if self.discretization <= 0 or self.euler_terms < 1 or self.series_terms < 1:
            raise ValueError("invalid Bromwich settings")
        if self.oversample < 1:
            raise ValueError("oversample must be >= 1")


@dataclass(frozen=True)
class ContourSettings:
    """Vertical-line trapezoid settings.

    Attributes
    ----------
    offset : float
        Real part of the integration line.
    half_width : float
        Trapezoid covers ``|Im(s)| <= half_width``.
    steps : int
        Number of trapezoid panels across ``[-half_width, half_width]``
        (even, at least 64).
    euler_terms, series_terms : int
        Euler summation parameters for the tail beyond ``half_width``.
    tol : float
        Absolute error budget.
    rtol : float
        Relative error budget; the effective tolerance is
        ``max(tol, rtol * |value|)``.
    """

    offset: float = -0.5
    half_width: float = 200.0
    steps: int = 20000
    euler_terms: int = 11
    series_terms: int = 25
    tol: float = 1e-6
    rtol: float = 0.0

    def __post_init__(self):
        if self.steps < 64 or self.steps % 2:
            raise ValueError("steps must be an even integer >= 64")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.tol <= 0 or self.rtol < 0:
            raise ValueError("invalid tolerances")


@dataclass(frozen=True)
class InversionResult:
    value: float
    error: float
    imag_residue: float = 0.0


def _euler_sum(partial, n, m):
    weights = np.array([comb(m, k) for k in range(m + 1)], dtype=float) / 2.0 ** m
    return float(np.dot(weights, partial[n:n + m + 1]))


# ---------------------------------------------------------------------------
# Bromwich / Laplace
# ---------------------------------------------------------------------------

def _abate_whitt(transform, x, A, ell, n, m, transform_rtol=0.0):
    a = A / (2.0 * ell * x)
    h = np.pi / (ell * x)
    jmax = ell * (n + m + 1)
    j = np.arange(jmax)
    s = a + 1j * j * h
    fhat = np.asarray(transform(s), dtype=complex) / s
    terms = np.real(fhat * np.exp(1j * j * np.pi / ell))
    terms[0] *= 0.5
    scale = np.exp(A / (2.0 * ell)) / (ell * x)
    partial = scale * np.cumsum(terms)[ell - 1::ell]
    value = _euler_sum(partial, n, m)
    trunc = abs(value - _euler_sum(partial, n - 1, m))
    roundoff = (10 * _EPS + transform_rtol) * scale * float(np.sum(np.abs(terms)))
    return value, trunc + roundoff


def inverse_laplace_cdf(transform, x, settings=None, *, rtol=None, transform_rtol=0.0,
                        full_output=False):
    """CDF at ``x`` from the Laplace transform of a density.

    Evaluates ``F(x) = (1/2 pi i) int transform(s) / s * exp(s x) ds``.

    Parameters
    ----------
    transform : callable
        ``E[exp(-s Y)]`` for a non-negative variable ``Y``; must accept an
        array of complex ``s`` with ``Re(s) > 0``.
    x : float
        Positive evaluation point.
    settings : BromwichSettings or ContourSettings, optional
        A :class:`ContourSettings` contributes only its Euler term counts.
    rtol : float, optional
        If given, the abscissa is pushed right until the aliasing bound
        ``exp(-A)`` is below ``rtol * F(x)``, so tiny CDF values come
        out with relative accuracy.
    transform_rtol : float
        Relative accuracy of ``transform`` itself; enters the roundoff
        part of the error estimate.
    full_output : bool
        Return an :class:`InversionResult` instead of a float.

    Raises
    ------
    ContourError
        If the Euler-extrapolated error estimate exceeds the tolerance.
    """
    if not x > 0:
        raise ValueError("inverse_laplace_cdf: x must be positive")
    if isinstance(settings, ContourSettings):
        settings = BromwichSettings(euler_terms=settings.euler_terms,
                                    series_terms=settings.series_terms)
    settings = settings or BromwichSettings()
    A = settings.discretization
    m = settings.euler_terms
    ell = settings.oversample

    def run(point, A):
        n = settings.series_terms
        value, err = _abate_whitt(transform, point, A, ell, n, m, transform_rtol)
        while err > 1e-3 * abs(value) and n < 400:
            n *= 2
            value, err = _abate_whitt(transform, point, A, ell, n, m, transform_rtol)
        return value, err

    value, err = run(x, A)
    alias = np.exp(-A)
    if rtol is not None:
        # aliasing is about exp(-A) * F((2l+1)x); size A against that
        for _ in range(6):
            far, _ = run((2 * ell + 1) * x, A)
            far = min(max(far, abs(value)), 1.0)
            alias = np.exp(-A) * far
            needed = float(np.log(far / max(rtol * abs(value), 1e-300))) + 1.0
            if needed <= A or A >= 200.0:
                break
            A = min(needed, 200.0)
            value, err = run(x, A)
        tol = max(rtol * abs(value), 1e-300)
    else:
        tol = settings.tol
    total = err + alias
    if not total <= tol:
        raise ContourError(f"Bromwich inversion did not converge (error {total:.3g} at x={x})")
    result = InversionResult(value, total)
    return result if full_output else value


# ---------------------------------------------------------------------------
# vertical-line trapezoid
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _tail(integrand, start, omega, n, m):
    # int_start^inf integrand(y) dy in half-period blocks, Euler-summed
    width = np.pi / omega
    nblocks = n + m + 1
    edges = start + width * np.arange(nblocks + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    y = (mid[:, None] + 0.5 * width * _GL_NODES[None, :]).ravel()
    vals = np.asarray(integrand(y), dtype=complex).reshape(nblocks, -1)
    blocks = 0.5 * width * vals @ _GL_WEIGHTS
    partial = np.cumsum(blocks)
    weights = np.array([comb(m, k) for k in range(m + 1)], dtype=float) / 2.0 ** m
    est = np.dot(weights, partial[n:n + m + 1])
    est_prev = np.dot(weights, partial[n - 1:n + m])
    return est, abs(est - est_prev)


# Gregory end corrections: int = T_h + h * sum_k g_k (D^k f_0 + D^k r_0),
# D the forward difference, r the samples read from the right end
_GREGORY = np.array([1.0 / 12, -1.0 / 24, 19.0 / 720, -3.0 / 160, 863.0 / 60480])


def _gregory(vals, h):
    """Trapezoid with Gregory end corrections (exact for quintics)."""
    total = vals.sum() - 0.5 * (vals[0] + vals[-1])
    order = min(_GREGORY.size, vals.size // 2 - 1)
    left = vals[:order + 1]
    right = vals[::-1][:order + 1]
    for k in range(order):
        left = np.diff(left)
        right = np.diff(right)
        total += _GREGORY[k] * (left[0] + right[0])
    return h * total


def _line_integral(integrand, omega, settings, hermitian=True):
    """(1/2 pi) * int integrand(y) dy over the real line.

    With ``hermitian`` the integrand is assumed to satisfy
    ``integrand(-y) == conj(integrand(y))`` and the result is real (the
    discarded imaginary part is reported). ``omega`` is the angular
    frequency of the oscillation, used to size the tail blocks.
    """
    T = settings.half_width
    steps = settings.steps
    y = np.linspace(-T, T, steps + 1)
    h = 2.0 * T / steps
    vals = np.asarray(integrand(y), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise ContourError("non-finite integrand on the contour")
    peak = float(np.max(np.abs(vals)))
    edge = max(abs(vals[0]), abs(vals[-1]))
    if peak == 0.0:
        return InversionResult(0.0, 0.0)
    if edge > 0.5 * peak:
        raise ContourError("integrand does not decay along the contour")

    total_h = _gregory(vals, h)
    total_2h = _gregory(vals[::2], 2.0 * h)
    err = abs(total_h - total_2h)

    if edge > 0.0:
        if omega > 0.0:
            n, m = settings.series_terms, settings.euler_terms
            right, right_err = _tail(integrand, T, omega, n, m)
            if hermitian:
                total_h += 2.0 * right.real
                err += 2.0 * right_err
            else:
                left, left_err = _tail(lambda u: integrand(-u), T, omega, n, m)
                total_h += right + left
                err += right_err + left_err
        else:
            err += 2.0 * edge * T

    value = total_h / (2.0 * np.pi)
    err = float(err / (2.0 * np.pi))
    if hermitian:
        return InversionResult(float(value.real), err, float(abs(value.imag)))
    return InversionResult(complex(value), err)


def _check(result, settings, what):
    tol = max(settings.tol, settings.rtol * abs(result.value))
    if not result.error <= tol:
        raise ContourError(f"{what} did not converge (error {result.error:.3g} > {tol:.3g})")


def inverse_mellin_cdf(kernel, x, settings=None, full_output=False):
    """CDF at ``x`` from the Mellin transform of a density.

    Evaluates ``F(x) = (1/2 pi i) int x**-s / (-s) * kernel(s + 1) ds`` on
    ``Re(s) = settings.offset``, where ``kernel(s) = E[Y**(s-1)]``. The
    offset must lie in the strip where the kernel converges and to the
    left of the pole at ``s = 0``.

    Parameters
    ----------
    kernel : callable
        Accepts an array of complex ``s``.
    x : float
        Positive evaluation point.
    settings : ContourSettings, optional
    full_output : bool
        Return an :class:`InversionResult` (value, error estimate and the
        discarded imaginary residue).
    """
    settings = settings or ContourSettings()
    c = settings.offset
    if c == 0.0:
        raise ContourError("pole on contour: offset must be non-zero")
    if not x > 0:
        raise ValueError("inverse_mellin_cdf: x must be positive")
    log_x = np.log(x)

    def integrand(y):
        s = c + 1j * y
        return np.exp(-s * log_x) * np.asarray(kernel(s + 1.0), dtype=complex) / (-s)

    result = _line_integral(integrand, abs(log_x), settings)
    _check(result, settings, "inverse Mellin transform")
    return result if full_output else result.value


def mellin_barnes_g(a_n, a_rest, b_m, b_rest, z, settings=None, full_output=False):
    """Meijer G-function from its Mellin-Barnes integral on a vertical line.

    ``G^{m,n}_{p,q}(a; b | z) = (1/2 pi i) int Phi(s) z**s ds`` with
    ``Phi(s) = prod Gamma(b_j - s) [j<=m] * prod Gamma(1 - a_j + s) [j<=n]
    / (prod Gamma(1 - b_j + s) [j>m] * prod Gamma(a_j - s) [j>n])``.

    The line ``Re(s) = settings.offset`` must separate the poles of the
    ``Gamma(b_j - s)`` factors (right) from those of ``Gamma(1 - a_j + s)``
    (left); the caller picks it from the pole locations.

    Parameters
    ----------
    a_n, a_rest, b_m, b_rest : sequence of float or complex
        Upper parameters split as ``(a_1..a_n), (a_{n+1}..a_p)`` and lower
        ones as ``(b_1..b_m), (b_{m+1}..b_q)``.
    z : float
        Positive argument.

    Returns
    -------
    float, or complex if any parameter is complex.
    """
    settings = settings or ContourSettings()
    c = settings.offset
    a_n, a_rest, b_m, b_rest = (np.asarray(v, dtype=complex).ravel()
                                for v in (a_n, a_rest, b_m, b_rest))
    params = np.concatenate([a_n, a_rest, b_m, b_rest])
    real = bool(np.all(params.imag == 0.0))
    # Gamma(b_j - s) has poles at b_j + k, Gamma(1 - a_j + s) at a_j - 1 - k
    right = b_m.real - c
    left = c - (a_n.real - 1.0)
    gaps = np.concatenate([right, left])
    if np.any(np.isclose(gaps, 0.0, atol=1e-12)):
        raise ContourError("pole on contour")
    if np.any(gaps < 0):
        raise ContourError("contour does not separate the two pole families")
    if not z > 0:
        raise ValueError("mellin_barnes_g: z must be positive")
    log_z = np.log(z)

    def integrand(y):
        s = c + 1j * y
        log_phi = np.zeros_like(s)
        for b in b_m:
            log_phi += ln_gamma(b - s)
        for a in a_n:
            log_phi += ln_gamma(1.0 - a + s)
        for b in b_rest:
            log_phi -= ln_gamma(1.0 - b + s)
        for a in a_rest:
            log_phi -= ln_gamma(a - s)
        return np.exp(log_phi + s * log_z)

    result = _line_integral(integrand, abs(log_z), settings, hermitian=real)
    _check(result, settings, "Mellin-Barnes integral")
    return result if full_output else result.value


mellin_barnes_G = mellin_barnes_g


def with_offset(settings, offset):
    """Copy of ``settings`` with a new line offset."""
    return replace(settings, offset=offset)
