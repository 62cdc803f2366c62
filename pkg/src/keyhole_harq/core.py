"""System parameters, scheme tags and result records."""

from dataclasses import dataclass, field, replace
from enum import Enum
from numbers import Integral
from typing import Optional, Tuple

import numpy as np


def db_to_linear(snr_db):
    """``10 ** (snr_db / 10)``; accepts scalars or arrays."""
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def linear_to_db(snr):
    return 10.0 * np.log10(np.asarray(snr, dtype=float))


class SchemeTag(str, Enum):
    """HARQ combining scheme."""

    TYPE_I = "type-i"
    CC = "cc"
    IR = "ir"


class Method(str, Enum):
    """How an outage value was obtained."""

    EXACT = "exact"
    UPPER_BOUND = "upper-bound"
    ASYMPTOTIC = "asymptotic"
    MONTE_CARLO = "monte-carlo"


class AntennaCase(str, Enum):
    EQUAL = "equal"
    TX_EXCESS = "tx-excess"
    RX_EXCESS = "rx-excess"


def _positive_int(name, value):
    if isinstance(value, bool) or not isinstance(value, Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class SystemConfig:
    """Link parameters ``(N_T, N_R, K, gamma_k, R)``.

    Parameters
    ----------
    n_t, n_r : int
        Transmit and receive antenna counts.
    k_max : int
        Maximum number of HARQ rounds ``K``.
    snr_per_round : sequence of float
        Linear average transmit SNR of each round (length ``k_max``).
    rate : float
        Target rate ``R`` in bits/s/Hz.

    Examples
    --------
    >>> cfg = SystemConfig.from_db(2, 2, 3, snr_db=10.0, rate=3.0)
    >>> cfg.snr_per_round
    (10.0, 10.0, 10.0)
    """

    n_t: int
    n_r: int
    k_max: int
    snr_per_round: Tuple[float, ...]
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "n_t", _positive_int("n_t", self.n_t))
        object.__setattr__(self, "n_r", _positive_int("n_r", self.n_r))
        object.__setattr__(self, "k_max", _positive_int("k_max", self.k_max))
        snr = tuple(float(g) for g in np.atleast_1d(np.asarray(self.snr_per_round, dtype=float)))
        if len(snr) != self.k_max:
            raise ValueError(f"need {self.k_max} per-round SNRs, got {len(snr)}")
        if not all(np.isfinite(g) and g > 0 for g in snr):
            raise ValueError("per-round SNRs must be positive and finite")
        object.__setattr__(self, "snr_per_round", snr)
        rate = float(self.rate)
        if not (np.isfinite(rate) and rate > 0):
            raise ValueError("rate must be positive")
        object.__setattr__(self, "rate", rate)

    @classmethod
    def equal_snr(cls, n_t, n_r, k_max, snr, rate):
        """All rounds at the same linear SNR."""
        return cls(n_t, n_r, k_max, (float(snr),) * int(k_max), rate)

    @classmethod
    def from_db(cls, n_t, n_r, k_max, snr_db, rate):
        """Build from SNR in dB, either one value for all rounds or one per round."""
        snr_db = np.atleast_1d(np.asarray(snr_db, dtype=float))
        if snr_db.size == 1:
            snr_db = np.repeat(snr_db, int(k_max))
        return cls(n_t, n_r, k_max, tuple(db_to_linear(snr_db)), rate)

    @property
    def snr_db(self):
        return tuple(float(v) for v in linear_to_db(self.snr_per_round))

    @property
    def equal_rounds(self):
        return len(set(self.snr_per_round)) == 1

    def with_snr_db(self, snr_db):
        return SystemConfig.from_db(self.n_t, self.n_r, self.k_max, snr_db, self.rate)

    def replace(self, **changes):
        """Copy with fields replaced; an int ``k_max`` change on an equal-SNR
        config stretches the SNR tuple accordingly."""
        if "k_max" in changes and "snr_per_round" not in changes:
            if not self.equal_rounds:
                raise ValueError("changing k_max needs explicit snr_per_round")
            changes["snr_per_round"] = (self.snr_per_round[0],) * int(changes["k_max"])
        return replace(self, **changes)


@dataclass(frozen=True)
class AntennaProfile:
    """Antenna quantities driving the case splits of the analysis.

    ``tau = |N_T - N_R|``, ``n_min``/``n_max`` the smaller/larger count.
    """

    n_t: int
    n_r: int
    tau: int
    n_min: int
    n_max: int
    case: AntennaCase


def antenna_profile(config_or_nt, n_r=None) -> AntennaProfile:
    """Profile of a :class:`SystemConfig`, or of an ``(n_t, n_r)`` pair.

    >>> antenna_profile(SystemConfig.from_db(3, 2, 1, 10.0, 1.0)).case
    <AntennaCase.TX_EXCESS: 'tx-excess'>
    """
    if n_r is None:
        n_t, n_r = config_or_nt.n_t, config_or_nt.n_r
    else:
        n_t = config_or_nt
    n_t = _positive_int("n_t", n_t)
    n_r = _positive_int("n_r", n_r)
    if n_t == n_r:
        case = AntennaCase.EQUAL
    elif n_t > n_r:
        case = AntennaCase.TX_EXCESS
    else:
        case = AntennaCase.RX_EXCESS
    return AntennaProfile(n_t, n_r, abs(n_t - n_r), min(n_t, n_r), max(n_t, n_r), case)


def effective_threshold(config: SystemConfig, scheme: SchemeTag) -> float:
    """Argument at which the scheme's gain CDF is evaluated.

    ``2**R - 1`` for Type-I and CC, ``2**R`` for IR (the IR gain is the
    product ``prod(1 + gamma_k X_k / N_T)``).
    """
    scheme = SchemeTag(scheme)
    if scheme is SchemeTag.IR:
        return float(2.0 ** config.rate)
    if config.rate >= 1.0:
        return float(2.0 ** config.rate - 1.0)
    return float(np.expm1(config.rate * np.log(2.0)))


@dataclass(frozen=True)
class OutageEstimate:
    """An outage probability together with how it was obtained.

    Attributes
    ----------
    value : float
        Probability. Must lie in ``[0, 1]`` except for asymptotic values,
        which are reported unclamped.
    method : Method
    stderr : float, optional
        Monte Carlo standard error; present exactly for Monte Carlo values.
    trials : int, optional
    error_estimate : float, optional
        Absolute error estimate of a numerical (contour) evaluation.
    below_floor : bool
        The value is not distinguishable from zero at the achieved
        accuracy; ``value`` then carries the raw estimate (or 0 if that
        estimate was negative noise).
    """

    value: float
    method: Method
    stderr: Optional[float] = None
    trials: Optional[int] = None
    error_estimate: Optional[float] = None
    below_floor: bool = field(default=False)

    def __post_init__(self):
        method = Method(self.method)
        object.__setattr__(self, "method", method)
        value = float(self.value)
        object.__setattr__(self, "value", value)
        if not np.isfinite(value):
            raise ValueError("outage value must be finite")
        if method is not Method.ASYMPTOTIC and not 0.0 <= value <= 1.0:
            raise ValueError(f"{method.value} outage value {value!r} outside [0, 1]")
        if (self.stderr is not None) != (method is Method.MONTE_CARLO):
            raise ValueError("stderr is required for, and only for, Monte Carlo estimates")
        if self.stderr is not None and self.stderr < 0:
            raise ValueError("stderr must be non-negative")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be positive")


def numeric_estimate(value, error, method):
    """Wrap a contour/quadrature result, flagging values lost in the noise.

    A negative value within its own error bar becomes 0 with
    ``below_floor`` set; anything further outside ``[0, 1]`` is a genuine
    numerical failure.
    """
    from .specfun import ContourError

    error = float(abs(error))
    if value < 0.0:
        if -value <= error:
            return OutageEstimate(0.0, method, error_estimate=error, below_floor=True)
        raise ContourError(f"negative probability {value:.3g} beyond error {error:.3g}")
    if value > 1.0:
        if value - 1.0 <= error:
            value = 1.0
        else:
            raise ContourError(f"probability {value:.6g} exceeds 1 beyond error {error:.3g}")
    return OutageEstimate(value, method, error_estimate=error, below_floor=value <= error)
