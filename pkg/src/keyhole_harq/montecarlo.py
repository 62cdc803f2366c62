"""Seeded Monte Carlo simulation of keyhole MIMO-HARQ links.

Each round draws ``H_k = u_k v_k^H`` with ``u_k ~ CN(0, I_{N_R})`` and
``v_k ~ CN(0, I_{N_T})``. Trials are split into fixed-size substreams, each
seeded from ``(seed, substream index)``; outage counts are integers
reduced in substream order, so serial and threaded runs agree exactly.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .core import Method, OutageEstimate, SchemeTag, SystemConfig

THREADS_ENV = "KEYHOLE_HARQ_THREADS"
# complex entries held in memory per sub-batch
_BATCH_ELEMENTS = 4_000_000


class CCVariant(str, Enum):
    """Chase-combining mutual information: exact determinant or scalar lower bound."""

    TRUE = "true"
    LEMMA_BOUND = "lemma-bound"


class NumericalFaultError(ArithmeticError):
    """A quantity that is positive in exact arithmetic came out non-positive."""


@dataclass(frozen=True)
class RngSpec:
    """Seed and substream size of a simulation.

    Attributes
    ----------
    seed : int
        Non-negative integer below ``2**64``.
    stream_chunk : int
        Trials per independently seeded substream.
    """

    seed: int = 20240101
    stream_chunk: int = 100_000

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.stream_chunk) < 1:
            raise ValueError("stream_chunk must be positive")

    def substream(self, index):
        return np.random.default_rng(np.random.SeedSequence(int(self.seed), spawn_key=(int(index),)))


@dataclass(frozen=True)
class RoundDraw:
    u: np.ndarray
    v: np.ndarray

    @property
    def x(self):
        return float(np.vdot(self.u, self.u).real * np.vdot(self.v, self.v).real)


@dataclass(frozen=True)
class ChannelDraw:
    """Keyhole vectors of all rounds.

    ``u`` has shape ``(..., K, N_R)`` and ``v`` shape ``(..., K, N_T)``;
    leading axes index independent trials.
    """

    u: np.ndarray
    v: np.ndarray

    @property
    def u_norm2(self):
        return np.sum(np.abs(self.u) ** 2, axis=-1)

    @property
    def v_norm2(self):
        return np.sum(np.abs(self.v) ** 2, axis=-1)

    @property
    def x(self):
        return self.u_norm2 * self.v_norm2

    @classmethod
    def from_rounds(cls, rounds):
        return cls(np.stack([r.u for r in rounds]), np.stack([r.v for r in rounds]))


def complex_normal(rng, shape):
    """Standard circular complex normals (variance 1/2 per component)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def draw_round(rng, config: SystemConfig) -> RoundDraw:
    """One round's ``(u, v)``."""
    u = complex_normal(rng, config.n_r)
    v = complex_normal(rng, config.n_t)
    return RoundDraw(u, v)


def draw_channel(rng, config: SystemConfig, trials=None) -> ChannelDraw:
    """All ``K`` rounds, optionally for a batch of ``trials``."""
    lead = () if trials is None else (int(trials),)
    u = complex_normal(rng, lead + (config.k_max, config.n_r))
    v = complex_normal(rng, lead + (config.k_max, config.n_t))
    return ChannelDraw(u, v)


# ---------------------------------------------------------------------------
# mutual information
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DetState:
    """Determinant and inverse of an accumulated positive-definite matrix."""

    det: float
    inverse: np.ndarray

    @classmethod
    def identity(cls, n):
        return cls(1.0, np.eye(n, dtype=complex))


def det_rank1_update(state: DetState, alpha, v) -> DetState:
    """Add ``alpha v v^H`` to the matrix tracked by ``state``.

    ``det(A + a v v^H) = det(A) (1 + a v^H A^-1 v)`` and the inverse follows
    from Sherman-Morrison.

    Raises
    ------
    NumericalFaultError
        If the update factor is not positive (``A`` lost definiteness).
    """
    alpha = float(alpha)
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if alpha == 0.0:
        return state
    v = np.asarray(v, dtype=complex)
    w = state.inverse @ v
    factor = 1.0 + alpha * float(np.vdot(v, w).real)
    if not (factor > 0 and state.det > 0):
        raise NumericalFaultError("rank-one update lost positive definiteness")
    inverse = state.inverse - (alpha / factor) * np.outer(w, w.conj())
    return DetState(state.det * factor, inverse)


def _log2det_cc(alpha, v):
    """``log2 det(I + sum_k alpha_k v_k v_k^H)`` for batches, without forming N_T x N_T.

    Uses ``A_k^-1 = I - sum_{j<=k} beta_j w_j w_j^H`` with
    ``w_k = A_{k-1}^-1 v_k`` (Sherman-Morrison), so each trial costs
    ``O(K^2 N_T)``.
    """
    k_max = v.shape[-2]
    ws = []
    betas = []
    total = np.zeros(v.shape[:-2])
    for k in range(k_max):
        vk = v[..., k, :]
        w = vk.copy()
        for wj, bj in zip(ws, betas):
            proj = np.einsum("...i,...i->...", wj.conj(), vk)
            w = w - (bj * proj)[..., None] * wj
        quad = np.einsum("...i,...i->...", vk.conj(), w).real
        factor = 1.0 + alpha[..., k] * quad
        if np.any(factor <= 0):
            raise NumericalFaultError("rank-one update lost positive definiteness")
        total += np.log2(factor)
        ws.append(w)
        betas.append(alpha[..., k] / factor)
    return total


def mutual_info(scheme, draws: ChannelDraw, config: SystemConfig, variant=CCVariant.TRUE):
    """Accumulated mutual information (bits/s/Hz) after ``K`` rounds.

    Type-I keeps the best single round, IR adds per-round rates, and CC
    combines the received signals: ``variant="true"`` evaluates the
    determinant, ``"lemma-bound"`` the scalar lower bound
    ``log2(1 + sum_k gamma_k X_k / N_T)``.
    """
    scheme = SchemeTag(scheme)
    snr = np.asarray(config.snr_per_round) / config.n_t
    if scheme is SchemeTag.CC and CCVariant(variant) is CCVariant.TRUE:
        alpha = snr * draws.u_norm2
        return _log2det_cc(alpha, draws.v)
    return mi_from_gains(scheme, draws.x, config, variant)


def mi_from_gains(scheme, x, config, variant=CCVariant.LEMMA_BOUND):
    """Mutual information from per-round gains ``x`` (shape ``(..., K)``).

    Not available for the true CC determinant, which needs the vectors.
    """
    scheme = SchemeTag(scheme)
    snr = np.asarray(config.snr_per_round) / config.n_t
    terms = snr * x
    if scheme is SchemeTag.TYPE_I:
        return np.log2(1.0 + terms.max(axis=-1))
    if scheme is SchemeTag.IR:
        return np.log1p(terms).sum(axis=-1) / np.log(2.0)
    if CCVariant(variant) is CCVariant.TRUE:
        raise ValueError("true CC needs the channel vectors")
    return np.log2(1.0 + terms.sum(axis=-1))


# ---------------------------------------------------------------------------
# outage estimation
# ---------------------------------------------------------------------------

def _key(scheme, variant):
    scheme = SchemeTag(scheme)
    if scheme is SchemeTag.CC:
        return scheme, CCVariant(variant or CCVariant.TRUE)
    return scheme, None


def _thread_count():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _chunk_counts(config, keys, rng, n, need_vectors):
    counts = np.zeros(len(keys), dtype=np.int64)
    per_trial = config.k_max * (config.n_t + config.n_r) if need_vectors else config.k_max
    sub = max(1, _BATCH_ELEMENTS // per_trial)
    done = 0
    while done < n:
        m = min(sub, n - done)
        if need_vectors:
            draws = draw_channel(rng, config, m)
            x = draws.x
        else:
            a = rng.standard_gamma(config.n_r, size=(m, config.k_max))
            b = rng.standard_gamma(config.n_t, size=(m, config.k_max))
            x = a * b
            draws = None
        for i, (scheme, variant) in enumerate(keys):
            if scheme is SchemeTag.CC and variant is CCVariant.TRUE:
                mi = mutual_info(scheme, draws, config, variant)
            else:
                mi = mi_from_gains(scheme, x, config, variant)
            counts[i] += int(np.count_nonzero(mi < config.rate))
        done += m
    return counts


def simulate(config: SystemConfig, schemes, trials, rng: Optional[RngSpec] = None):
    """Monte Carlo outage of several schemes on common draws.

    Parameters
    ----------
    schemes : iterable of SchemeTag or (SchemeTag, CCVariant)
    trials : int
        At least 1000.
    rng : RngSpec, optional

    Returns
    -------
    dict
        ``(scheme, variant) -> OutageEstimate``; ``variant`` is ``None``
        except for CC.
    """
    trials = int(trials)
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    rng = rng or RngSpec()
    keys = []
    for item in schemes:
        scheme, variant = item if isinstance(item, tuple) else (item, None)
        key = _key(scheme, variant)
        if key not in keys:
            keys.append(key)
    need_vectors = any(v is CCVariant.TRUE for _, v in keys)
    chunk = int(rng.stream_chunk)
    sizes = [min(chunk, trials - i * chunk) for i in range(-(-trials // chunk))]

    def run(i):
        return _chunk_counts(config, keys, rng.substream(i), sizes[i], need_vectors)

    threads = _thread_count()
    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    counts = np.zeros(len(keys), dtype=np.int64)
    for part in parts:           # fixed reduction order
        counts += part
    out = {}
    for key, c in zip(keys, counts):
        p = c / trials
        out[key] = OutageEstimate(float(p), Method.MONTE_CARLO,
                                  stderr=float(np.sqrt(p * (1.0 - p) / trials)), trials=trials)
    return out


def estimate_outage(config: SystemConfig, scheme, variant=None, trials=100_000,
                    rng: Optional[RngSpec] = None) -> OutageEstimate:
    """Fraction of trials whose accumulated mutual information is below ``R``.

    ``stderr = sqrt(p (1 - p) / trials)``. For CC, ``variant`` defaults to
    the true determinant.
    """
    key = _key(scheme, variant)
    return simulate(config, [key], trials, rng)[key]


@dataclass(frozen=True)
class GapSummary:
    """Distribution of the per-draw gap ``I_IR - I_CC`` (bits/s/Hz)."""

    mean_gap: float
    p50: float
    p90: float
    p99: float
    min_gap: float
    trials: int


def gap_ir_cc(config: SystemConfig, trials=10_000, rng: Optional[RngSpec] = None) -> GapSummary:
    """Summary of ``I_IR - I_CC`` over independent channel draws."""
    trials = int(trials)
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    rng = rng or RngSpec()
    chunk = int(rng.stream_chunk)
    per_trial = config.k_max * (config.n_t + config.n_r)
    sub = max(1, _BATCH_ELEMENTS // per_trial)
    gaps = []
    for i in range(-(-trials // chunk)):
        gen = rng.substream(i)
        n = min(chunk, trials - i * chunk)
        done = 0
        while done < n:
            m = min(sub, n - done)
            draws = draw_channel(gen, config, m)
            ir = mi_from_gains(SchemeTag.IR, draws.x, config)
            cc = mutual_info(SchemeTag.CC, draws, config, CCVariant.TRUE)
            gaps.append(ir - cc)
            done += m
    g = np.concatenate(gaps)
    p50, p90, p99 = np.quantile(g, [0.5, 0.9, 0.99])
    return GapSummary(float(g.mean()), float(p50), float(p90), float(p99), float(g.min()), trials)
