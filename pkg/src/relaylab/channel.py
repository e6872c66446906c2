"""Network configuration, fading samplers, and link-gain distributions.

Channels are i.i.d. Rayleigh with E|h|^2 = 2*sigma^2 per coefficient (the
convention the Erlang gain CDF fixes), so a squared N_R-antenna vector norm is
Erlang(N_R) with mean 2*N_R*sigma^2. Gains are drawn directly as sums of unit
exponentials instead of complex vectors; every protocol quantity depends only
on the norms.

Sampling uses a counter-based generator (Philox) addressed by (seed, slot), so
slot ranges can be drawn in any partition, in any order, on any number of
workers, and still reproduce the sequential stream bit for bit.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Philox

__all__ = [
    "ChannelConfig",
    "NetworkState",
    "FadingStream",
    "sample_state",
    "sample_gains",
    "erlang_cdf",
    "min_erlang_cdf",
    "nakagami_sum_pdf",
    "nakagami_sum_cdf",
]

_U64_MAX = 2**64 - 1
# Philox emits 4 64-bit words per counter tick; per-slot draw counts are
# padded up to a full tick so slot s starts at counter s * (draws/4).
_WORDS_PER_TICK = 4


@dataclass(frozen=True)
class ChannelConfig:
    """Relay-network layout and fading/noise parameters.

    Relays 0..M-1 form group one, relays M..L-1 group two; both groups must
    be non-empty. sigma_g2/sigma_h2 are per-quadrature variances of the
    source-side and destination-side coefficients (E|h|^2 = 2*sigma^2).
    """

    L: int
    M: int
    N_R: int = 1
    sigma_g2: float = 1.0
    sigma_h2: float = 1.0
    noise_r: float = 1.0
    noise_d: float = 1.0

    def __post_init__(self):
        for name in ("L", "M", "N_R"):
            v = getattr(self, name)
            if int(v) != v or isinstance(v, float):
                raise ValueError(f"{name} must be an integer, got {v!r}")
        if self.L < 2:
            raise ValueError(f"need at least two relays, got L={self.L}")
        if not 1 <= self.M <= self.L - 1:
            raise ValueError(
                f"M={self.M} leaves an empty relay group (L={self.L})"
            )
        if self.N_R < 1:
            raise ValueError(f"N_R must be >= 1, got {self.N_R}")
        for name in ("sigma_g2", "sigma_h2", "noise_r", "noise_d"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"{name} must be > 0, got {v!r}")


@dataclass
class NetworkState:
    """One fading realization: per-relay source-side power gains ``sr_gain``
    (squared norms) and destination-side amplitudes ``rd_norm`` (norms)."""

    sr_gain: np.ndarray
    rd_norm: np.ndarray

    def __post_init__(self):
        self.sr_gain = np.asarray(self.sr_gain, dtype=np.float64)
        self.rd_norm = np.asarray(self.rd_norm, dtype=np.float64)
        if self.sr_gain.shape != self.rd_norm.shape or self.sr_gain.ndim != 1:
            raise ValueError("sr_gain and rd_norm must be 1-D of equal length")
        if (self.sr_gain < 0).any() or (self.rd_norm < 0).any():
            raise ValueError("gains must be non-negative")


@dataclass
class FadingStream:
    """Position in the slot-indexed fading sequence for a given seed."""

    seed: int
    next_slot: int = 0

    def __post_init__(self):
        if int(self.seed) != self.seed or not 0 <= self.seed <= _U64_MAX:
            raise ValueError(f"seed must be a 64-bit integer, got {self.seed!r}")
        if self.next_slot < 0:
            raise ValueError("next_slot must be >= 0")


def _draws_per_slot(cfg: ChannelConfig) -> int:
    need = 2 * cfg.L * cfg.N_R
    return -(-need // _WORDS_PER_TICK) * _WORDS_PER_TICK


def sample_gains(cfg: ChannelConfig, seed: int, start_slot: int, count: int):
    """Draw fading for slots [start_slot, start_slot + count).

    Returns (sr_gain, rd_norm), each of shape (count, L). The value of slot s
    depends only on (seed, s, cfg), never on the partition into calls.
    """
    if not 0 <= seed <= _U64_MAX:
        raise ValueError(f"seed must be a 64-bit integer, got {seed!r}")
    if start_slot < 0 or count < 1:
        raise ValueError("need start_slot >= 0 and count >= 1")
    per_slot = _draws_per_slot(cfg)
    need = 2 * cfg.L * cfg.N_R
    bits = Philox(
        key=seed,
        counter=[start_slot * (per_slot // _WORDS_PER_TICK), 0, 0, 0],
    )
    raw = bits.random_raw(count * per_slot).reshape(count, per_slot)[:, :need]
    # 53-bit uniform strictly inside (0,1): -log stays finite.
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    e = -np.log(u)
    half = cfg.L * cfg.N_R
    sr = e[:, :half].reshape(count, cfg.L, cfg.N_R).sum(axis=2)
    sr *= 2.0 * cfg.sigma_g2
    rd2 = e[:, half:].reshape(count, cfg.L, cfg.N_R).sum(axis=2)
    rd2 *= 2.0 * cfg.sigma_h2
    return sr, np.sqrt(rd2)


def sample_state(rng: FadingStream, cfg: ChannelConfig) -> NetworkState:
    """Draw the next slot's NetworkState and advance the stream."""
    sr, rd = sample_gains(cfg, rng.seed, rng.next_slot, 1)
    rng.next_slot += 1
    return NetworkState(sr_gain=sr[0], rd_norm=rd[0])


def _check_scalar_args(x, shape, sigma2, name):
    if int(shape) != shape or shape < 1:
        raise ValueError(f"shape must be a positive integer, got {shape!r}")
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be > 0, got {sigma2!r}")
    if x < 0:
        raise ValueError(f"{name} must be >= 0, got {x!r}")


def _poisson_tail(x: float, n: int) -> float:
    """e^-x * sum_{r<n} x^r / r!, evaluated term-by-term in log space."""
    if x == 0.0:
        return 1.0
    lx = math.log(x)
    return math.fsum(
        math.exp(-x + r * lx - math.lgamma(r + 1)) for r in range(n)
    )


def erlang_cdf(t: float, shape: int, sigma2: float) -> float:
    """CDF of an Erlang(shape) gain with mean 2*shape*sigma2 at t >= 0.

    This is the distribution of a squared N_R-antenna channel norm with
    shape = N_R: F(t) = 1 - e^{-t/2s2} * sum_{r<shape} (t/2s2)^r / r!.
    """
    _check_scalar_args(t, shape, sigma2, "t")
    s = _poisson_tail(t / (2.0 * sigma2), int(shape))
    return min(max(1.0 - s, 0.0), 1.0)


def min_erlang_cdf(z: float, group_size: int, shape: int, sigma2: float) -> float:
    """CDF of the minimum of group_size i.i.d. Erlang(shape) gains."""
    if int(group_size) != group_size or group_size < 1:
        raise ValueError(f"group_size must be a positive integer, got {group_size!r}")
    _check_scalar_args(z, shape, sigma2, "z")
    survival = _poisson_tail(z / (2.0 * sigma2), int(shape))
    return min(max(1.0 - survival ** int(group_size), 0.0), 1.0)


def nakagami_sum_pdf(z: float, group_size: int, shape: int, sigma2: float) -> float:
    """Moment-matched Nakagami density approximating a sum of group_size
    i.i.d. channel norms (each Nakagami with shape antennas).

    Exact at group_size = 1. pdf(z) = 2 mu^nm z^(2nm-1) e^(-mu z^2)/(nm-1)!
    with nm = shape*group_size and mu = 1/(2*group_size*sigma2).
    """
    if int(group_size) != group_size or group_size < 1:
        raise ValueError(f"group_size must be a positive integer, got {group_size!r}")
    _check_scalar_args(z, shape, sigma2, "z")
    if z == 0.0:
        return 0.0
    nm = int(shape) * int(group_size)
    mu = 1.0 / (2.0 * group_size * sigma2)
    logp = (
        math.log(2.0)
        + nm * math.log(mu)
        + (2 * nm - 1) * math.log(z)
        - mu * z * z
        - math.lgamma(nm)
    )
    return math.exp(logp)


def nakagami_sum_cdf(z: float, group_size: int, shape: int, sigma2: float) -> float:
    """CDF paired with nakagami_sum_pdf (integral of the density)."""
    if int(group_size) != group_size or group_size < 1:
        raise ValueError(f"group_size must be a positive integer, got {group_size!r}")
    _check_scalar_args(z, shape, sigma2, "z")
    nm = int(shape) * int(group_size)
    s = _poisson_tail(z * z / (2.0 * group_size * sigma2), nm)
    return min(max(1.0 - s, 0.0), 1.0)
