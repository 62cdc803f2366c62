"""Law of the keyhole channel gain ``X = |u|^2 |v|^2`` and its transforms.

``|u|^2 ~ Gamma(N_R, 1)`` and ``|v|^2 ~ Gamma(N_T, 1)`` are independent, so
``X`` has density::

    f(x) = 2 x**((N_T + N_R)/2 - 1) K_tau(2 sqrt(x)) / (Gamma(N_T) Gamma(N_R))

with ``tau = |N_T - N_R|``.
"""

from dataclasses import dataclass
from math import lgamma

import numpy as np
from scipy import integrate

from .core import AntennaProfile, SystemConfig, antenna_profile
from .specfun import (ContourSettings, QuadratureError, QuadratureSettings, exp_sinh,
                      log_bessel_k_int, mellin_barnes_g, tricomi_u)
from .specfun.gamma import ln_gamma


class AccuracyError(ArithmeticError):
    """Two independent evaluation routes disagree."""


@dataclass(frozen=True)
class KeyholeGainDist:
    """Distribution of the per-round keyhole gain.

    Parameters
    ----------
    profile : AntennaProfile
    """

    profile: AntennaProfile

    @classmethod
    def from_antennas(cls, n_t, n_r):
        return cls(antenna_profile(n_t, n_r))

    @classmethod
    def from_config(cls, config: SystemConfig):
        return cls(antenna_profile(config))

    @property
    def n_t(self):
        return self.profile.n_t

    @property
    def n_r(self):
        return self.profile.n_r

    @property
    def mean(self):
        return float(self.n_t * self.n_r)

    @property
    def mode_scale(self):
        # where x f(x) peaks, roughly ((N_T + N_R) / 2)**2
        return 0.25 * (self.n_t + self.n_r) ** 2

    def upper_cutoff(self):
        """``x`` beyond which the density is below ``exp(-50)`` of its peak."""
        half = 0.5 * (self.n_t + self.n_r)
        root = half + 10.0 * np.sqrt(half) + 30.0
        return root * root


def log_pdf_x(dist: KeyholeGainDist, x):
    """Natural log of the density; ``-inf`` outside the support."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, -np.inf)
    pos = x > 0
    if np.any(pos):
        xp = x[pos]
        p = dist.profile
        out[pos] = (np.log(2.0) + (0.5 * (p.n_t + p.n_r) - 1.0) * np.log(xp)
                    + log_bessel_k_int(p.tau, 2.0 * np.sqrt(xp))
                    - lgamma(p.n_t) - lgamma(p.n_r))
    return float(out) if out.ndim == 0 else out


def pdf_x(dist: KeyholeGainDist, x):
    """Density of ``X``.

    Raises
    ------
    ValueError
        If any ``x <= 0``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("pdf_x: x must be positive")
    return np.exp(log_pdf_x(dist, x))


def _cdf_scalar(dist, x, epsrel):
    if x <= 0.0:
        return 0.0, 0.0
    f = lambda t: np.exp(log_pdf_x(dist, t))
    mode = dist.mode_scale
    if x <= dist.mean:
        # substitute t = exp(u): t f(t) decays like exp(n_min u) as u -> -inf
        g = lambda u: np.exp(log_pdf_x(dist, np.exp(u)) + u)
        top = np.log(x)
        lo = top - 80.0 / dist.profile.n_min - 10.0
        pts = [np.log(mode)] if mode < x else None
        val, err = integrate.quad(g, lo, top, epsabs=0.0, epsrel=epsrel, limit=200, points=pts)
        return val, err
    hi = max(dist.upper_cutoff(), 2.0 * x)
    pts = [mode] if x < mode < hi else None
    tail, err = integrate.quad(f, x, hi, epsabs=0.0, epsrel=epsrel, limit=200, points=pts)
    tail2, err2 = integrate.quad(f, hi, np.inf, epsabs=1e-300, epsrel=epsrel, limit=200)
    return 1.0 - tail - tail2, err + err2


def cdf_x(dist: KeyholeGainDist, x, epsrel=1e-11, full_output=False):
    """CDF of ``X`` by adaptive quadrature of the density.

    Below the mean the integral runs over ``[0, x]``, which keeps small
    CDF values relatively accurate; above it the complement is
    integrated.

    Parameters
    ----------
    dist : KeyholeGainDist
    x : float or array_like
        Evaluation point(s), ``x >= 0``.
    epsrel : float
        Relative tolerance passed to the quadrature.
    full_output : bool
        Also return the absolute error estimate(s).
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise ValueError("cdf_x: x must be non-negative")
    flat = np.atleast_1d(xa).ravel()
    vals = np.empty(flat.shape)
    errs = np.empty(flat.shape)
    for i, xi in enumerate(flat):
        vals[i], errs[i] = _cdf_scalar(dist, float(xi), epsrel)
    vals = vals.reshape(xa.shape)
    errs = errs.reshape(xa.shape)
    if xa.ndim == 0:
        vals, errs = float(vals), float(errs)
    return (vals, errs) if full_output else vals


def cdf_x_closed(dist: KeyholeGainDist, x):
    """Finite Bessel sum for the CDF (conditioning on ``|u|^2``).

    ``F(x) = 1 - (2/Gamma(N_R)) sum_{j<N_T} x**((N_R+j)/2) K_{N_R-j}(2 sqrt x) / j!``.
    Loses relative accuracy for small ``F``; kept for cross-checks.
    """
    x = float(x)
    if x <= 0:
        return 0.0
    n_t, n_r = dist.n_t, dist.n_r
    root = 2.0 * np.sqrt(x)
    total = 0.0
    for j in range(n_t):
        order = abs(n_r - j)
        log_term = (np.log(2.0) + 0.5 * (n_r + j) * np.log(x) + log_bessel_k_int(order, root)
                    - lgamma(n_r) - lgamma(j + 1))
        total += np.exp(log_term)
    return 1.0 - total


def cdf_x_meijer(dist: KeyholeGainDist, x, settings=None):
    """CDF through ``G^{2,1}_{1,3}(x | 1; N_T, N_R, 0) / (Gamma(N_T) Gamma(N_R))``.

    The Mellin-Barnes line sits at ``Re(s) = n_min / 2``, between the pole
    at ``s = 0`` and those at ``s = N_T, N_R``.
    """
    if x <= 0:
        return 0.0
    p = dist.profile
    settings = settings or ContourSettings(offset=0.5 * p.n_min, tol=1e-10)
    g = mellin_barnes_g([1.0], [], [p.n_t, p.n_r], [0.0], x, settings)
    return g * np.exp(-lgamma(p.n_t) - lgamma(p.n_r))


# ---------------------------------------------------------------------------
# Laplace transform of the scaled gain (gamma_k / N_T) X
# ---------------------------------------------------------------------------

def _laplace_tricomi(profile, scale, s):
    # E[exp(-s scale X)] = z**n_min Psi(n_min, 1 - tau; z), z = 1 / (scale s)
    z = 1.0 / (scale * s)
    psi, err = tricomi_u(profile.n_min, 1.0 - profile.tau, z, full_output=True)
    return np.exp(profile.n_min * np.log(z)) * psi


def _laplace_quadrature(dist, scale, s):
    s = np.atleast_1d(s)

    def integrand(x):
        return np.exp(log_pdf_x(dist, x)[None, :] - scale * s[:, None] * x[None, :])

    val, _ = exp_sinh(integrand, QuadratureSettings(rtol=1e-12, atol=1e-300))
    return val


def laplace_factor(dist: KeyholeGainDist, gamma_k, n_t, s, method="auto"):
    """Per-round Laplace transform ``E[exp(-s gamma_k X / n_t)]``.

    Parameters
    ----------
    dist : KeyholeGainDist
    gamma_k : float
        Linear SNR of the round.
    n_t : int
        Transmit antennas (power normalisation).
    s : complex or array_like
        Transform variable(s), ``Re(s) > 0``.
    method : {"auto", "tricomi", "quadrature", "check"}
        ``"tricomi"`` uses the closed form
        ``z**n_min * Psi(n_min, 1 - tau; z)`` with ``z = n_t / (gamma_k s)``;
        ``"quadrature"`` integrates against the density directly;
        ``"auto"`` tries the closed form and falls back to quadrature;
        ``"check"`` runs both and raises :class:`AccuracyError` if they
        differ by more than ``1e-7`` relative.
    """
    sa = np.asarray(s, dtype=complex)
    if np.any(~(sa.real > 0)):
        raise ValueError("laplace_factor: requires Re(s) > 0")
    scale = float(gamma_k) / float(n_t)
    flat = np.atleast_1d(sa).ravel()
    if method == "tricomi":
        out = _laplace_tricomi(dist.profile, scale, flat)
    elif method == "quadrature":
        out = _laplace_quadrature(dist, scale, flat)
    elif method == "auto":
        try:
            out = _laplace_tricomi(dist.profile, scale, flat)
        except QuadratureError:
            out = _laplace_quadrature(dist, scale, flat)
    elif method == "check":
        out = _laplace_tricomi(dist.profile, scale, flat)
        alt = _laplace_quadrature(dist, scale, flat)
        gap = np.max(np.abs(out - alt) / np.maximum(np.abs(alt), 1e-300))
        if gap > 1e-7:
            raise AccuracyError(f"Laplace factor routes disagree (relative gap {gap:.3g})")
    else:
        raise ValueError(f"unknown method {method!r}")
    out = out.reshape(sa.shape)
    return complex(out) if sa.ndim == 0 else out


def cc_transform(config: SystemConfig, method="auto"):
    """Laplace transform of ``X_CC = sum_k gamma_k X_k / N_T`` as a callable."""
    dist = KeyholeGainDist.from_config(config)
    gammas = config.snr_per_round

    def transform(s):
        out = np.ones(np.shape(s), dtype=complex)
        for g in sorted(set(gammas)):
            out = out * laplace_factor(dist, g, config.n_t, s, method) ** gammas.count(g)
        return out

    return transform


# ---------------------------------------------------------------------------
# Mellin transform of the IR gain prod(1 + gamma_k X_k / N_T)
# ---------------------------------------------------------------------------

class _LogGrid:
    """Trapezoid in ``u = log x`` for ``E[(1 + c X)^w]`` at many complex ``w``.

    The integrand ``x f(x) (1 + c x)^w`` is analytic in a strip around the
    real ``u`` axis and decays double-exponentially to the right and
    exponentially to the left, so the plain trapezoid converges
    geometrically in the step.
    """

    def __init__(self, dist, scale, re_w, max_im, rel=1e-17):
        self.dist = dist
        self.scale = scale
        # coarse scan of the log-modulus to find the significant range
        c_log = np.log(max(scale, 1e-300))
        lo = -c_log - 60.0 / dist.profile.n_min - 40.0
        hi = np.log(dist.upper_cutoff())
        u = np.linspace(min(lo, hi - 10.0), hi, 4001)
        logmod = self._log_weight(u)[None, :] + np.atleast_1d(re_w)[:, None] * self._log1p_cx(u)[None, :]
        logmod = logmod.max(axis=0)
        keep = logmod >= logmod.max() + np.log(rel)
        idx = np.nonzero(keep)[0]
        du_coarse = u[1] - u[0]
        u_lo = u[idx[0]] - 2.0 * du_coarse
        u_hi = u[idx[-1]] + 2.0 * du_coarse
        step = 2.0 * np.pi / (1.5 * (max_im + 20.0))
        n = int(np.ceil((u_hi - u_lo) / step)) + 1
        self.u = np.linspace(u_lo, u_hi, n)
        self.h = self.u[1] - self.u[0]
        self.log_w = self._log_weight(self.u)
        self.a = self._log1p_cx(self.u)
        self.max_im = max_im

    def _log_weight(self, u):
        return log_pdf_x(self.dist, np.exp(u)) + u

    def _log1p_cx(self, u):
        return np.log1p(self.scale * np.exp(u))

    def __call__(self, w, max_elements=2_000_000):
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        out = np.empty(w.shape, dtype=complex)
        # bound the (len(w), len(u)) work array; fine grids for large Im(w) are long
        chunk = max(1, min(256, max_elements // self.u.size))
        for start in range(0, w.size, chunk):
            wc = w[start:start + chunk]
            expo = self.log_w[None, :] + wc[:, None] * self.a[None, :]
            out[start:start + chunk] = self.h * np.exp(expo).sum(axis=1)
        return out


def mellin_factor(dist: KeyholeGainDist, gamma_k, n_t, s, method="grid"):
    """Per-round Mellin factor ``E[(1 + gamma_k X / n_t)^(s - 1)]``.

    Parameters
    ----------
    method : {"grid", "quad", "meijer"}
        ``"grid"`` (default) is a log-domain trapezoid; ``"quad"`` is
        scipy adaptive quadrature of the real and imaginary parts;
        ``"meijer"`` evaluates ``G^{3,1}_{1,3}(n_t/gamma_k | 1; 1-s, N_T, N_R)
        / (Gamma(N_T) Gamma(N_R) Gamma(1-s))`` on a Mellin-Barnes line.
    """
    sa = np.asarray(s, dtype=complex)
    flat = np.atleast_1d(sa).ravel()
    scale = float(gamma_k) / float(n_t)
    w = flat - 1.0
    if method == "grid":
        re = np.unique(np.round(w.real, 12))
        grid = _LogGrid(dist, scale, re, float(np.max(np.abs(w.imag))) if w.size else 0.0)
        out = grid(w)
    elif method == "quad":
        out = np.array([_mellin_quad(dist, scale, wi) for wi in w])
    elif method == "meijer":
        out = np.array([_mellin_meijer(dist, scale, si) for si in flat])
    else:
        raise ValueError(f"unknown method {method!r}")
    out = out.reshape(sa.shape)
    return complex(out) if sa.ndim == 0 else out


def _mellin_quad(dist, scale, w):
    def part(fn):
        f = lambda u: fn(np.exp(log_pdf_x(dist, np.exp(u)) + u + w * np.log1p(scale * np.exp(u))))
        lo = -np.log(max(scale, 1.0)) - 60.0 / dist.profile.n_min - 20.0
        hi = np.log(dist.upper_cutoff())
        val, err = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-11, limit=2000)
        return val
    return complex(part(np.real), part(np.imag))


def _mellin_meijer(dist, scale, s):
    p = dist.profile
    top = min((1.0 - s).real, p.n_min)
    if top <= 0:
        raise ValueError("meijer route needs Re(s) < 1")
    settings = ContourSettings(offset=0.5 * top, tol=1e-12)
    g = mellin_barnes_g([1.0], [], [1.0 - s, p.n_t, p.n_r], [], 1.0 / scale, settings)
    return g * np.exp(-lgamma(p.n_t) - lgamma(p.n_r) - ln_gamma(1.0 - s))


def mellin_kernel(config: SystemConfig, s, method="grid"):
    """``phi(s) = prod_k E[(1 + gamma_k X_k / N_T)^(s - 1)]``.

    The Mellin transform of the IR gain ``prod_k (1 + gamma_k X_k / N_T)``.
    """
    dist = KeyholeGainDist.from_config(config)
    gammas = config.snr_per_round
    sa = np.asarray(s, dtype=complex)
    out = np.ones(sa.shape, dtype=complex)
    for g in sorted(set(gammas)):
        out = out * mellin_factor(dist, g, config.n_t, sa, method) ** gammas.count(g)
    return complex(out) if sa.ndim == 0 else out


def log_mellin_kernel_real(config: SystemConfig, p):
    """``log phi(1 - p)`` for real ``p`` (``log E[X_IR^-p]``), vectorised."""
    dist = KeyholeGainDist.from_config(config)
    p = np.atleast_1d(np.asarray(p, dtype=float))
    total = np.zeros(p.shape)
    for g in sorted(set(config.snr_per_round)):
        grid = _LogGrid(dist, g / config.n_t, -p, 0.0)
        expo = grid.log_w[None, :] - p[:, None] * grid.a[None, :]
        top = expo.max(axis=1)
        val = top + np.log(grid.h * np.exp(expo - top[:, None]).sum(axis=1))
        total += config.snr_per_round.count(g) * val
    return total
