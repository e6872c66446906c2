"""Monte Carlo throughput estimators for the four relaying protocols.

All estimators share one fading sequence per (cfg, slots, seed): the sampled
gain arrays are cached and each protocol reduces them to its own per-slot
sufficient statistics, so protocol comparisons are paired (common random
numbers) and repeated power points reuse the same draws.

Slots are sampled in fixed-size blocks addressed by absolute slot index; the
worker count only changes how blocks are dispatched, never any value, so
results are bit-identical at any parallelism level.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import ChannelConfig, NetworkState, sample_gains

__all__ = [
    "SimConfig",
    "ThroughputEstimate",
    "sim_adb",
    "sim_crs",
    "sim_sfd_mmrs",
    "sim_df",
    "select_sfd",
    "adb_slot_rate",
    "crs_slot_rate",
    "df_slot_rate",
    "adb_component_estimates",
]

_BLOCK = 1 << 15
_INV_LN2 = 1.0 / math.log(2.0)


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo run settings. workers > 1 parallelizes block sampling
    across threads without changing any estimate."""

    slots: int = 1_000_000
    seed: int = 42
    workers: int = 1

    def __post_init__(self):
        if self.slots < 1:
            raise ValueError(f"slots must be >= 1, got {self.slots}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit integer, got {self.seed!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class ThroughputEstimate:
    """A throughput value (bps/Hz) with its standard error and provenance.

    boundary_ambiguous marks min-of-means results whose two operands were
    closer than one combined standard error; the reported std_error is then
    the larger of the two component errors.
    """

    value: float
    std_error: float
    method: str
    slots_used: int
    boundary_ambiguous: bool = False

    def __post_init__(self):
        if self.value < 0 or self.std_error < 0:
            raise ValueError("value and std_error must be non-negative")
        if self.method not in ("monte-carlo", "analytic"):
            raise ValueError(f"unknown method tag {self.method!r}")
        if self.method == "analytic" and self.std_error != 0.0:
            raise ValueError("analytic estimates carry no standard error")


def _check_powers(ps, pr):
    if not ps > 0 or not pr > 0:
        raise ValueError(f"powers must be > 0, got ps={ps!r}, pr={pr!r}")


@lru_cache(maxsize=2)
def _gain_arrays(cfg: ChannelConfig, slots: int, seed: int, workers: int):
    """Sampled (sr_gain, rd_norm) arrays of shape (slots, L), read-only."""
    sr = np.empty((slots, cfg.L))
    rd = np.empty((slots, cfg.L))

    def fill(start):
        n = min(_BLOCK, slots - start)
        sr[start:start + n], rd[start:start + n] = sample_gains(
            cfg, seed, start, n
        )

    starts = range(0, slots, _BLOCK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    else:
        for s in starts:
            fill(s)
    sr.setflags(write=False)
    rd.setflags(write=False)
    return sr, rd


@lru_cache(maxsize=2)
def _adb_arrays(cfg, slots, seed, workers):
    sr, rd = _gain_arrays(cfg, slots, seed, workers)
    m = cfg.M
    out = (
        sr[:, :m].min(axis=1),
        rd[:, :m].sum(axis=1) ** 2,
        sr[:, m:].min(axis=1),
        rd[:, m:].sum(axis=1) ** 2,
    )
    for a in out:
        a.setflags(write=False)
    return out


@lru_cache(maxsize=2)
def _df_arrays(cfg, slots, seed, workers):
    sr, rd = _gain_arrays(cfg, slots, seed, workers)
    out = (sr.min(axis=1), rd.sum(axis=1) ** 2)
    for a in out:
        a.setflags(write=False)
    return out


@lru_cache(maxsize=2)
def _sfd_arrays(cfg, slots, seed, workers):
    """Power-independent selection statistics: best/second-best source-side
    gains, best/second-best destination-side squared norms, collision mask."""
    sr, rd = _gain_arrays(cfg, slots, seed, workers)
    rows = np.arange(slots)
    r1 = sr.argmax(axis=1)
    t1 = rd.argmax(axis=1)
    masked = sr.copy()
    masked[rows, r1] = -np.inf
    r2 = masked.argmax(axis=1)
    masked = rd.copy()
    masked[rows, t1] = -np.inf
    t2 = masked.argmax(axis=1)
    out = (
        sr[rows, r1],
        sr[rows, r2],
        rd[rows, t1] ** 2,
        rd[rows, t2] ** 2,
        r1 == t1,
    )
    for a in out:
        a.setflags(write=False)
    return out


def _rate(x):
    """log2(1 + x) elementwise."""
    return np.log1p(x) * _INV_LN2


def _mean_se(x):
    n = x.shape[0]
    mean = float(x.mean())
    if n < 2:
        return mean, 0.0
    return mean, float(x.std(ddof=1) / math.sqrt(n))


def _min_of_means(a, b):
    """Pick the smaller of two (mean, se) pairs; flag a boundary ambiguity
    when they differ by less than one combined standard error."""
    ambiguous = abs(a[0] - b[0]) <= math.hypot(a[1], b[1])
    value, se = a if a[0] <= b[0] else b
    if ambiguous:
        se = max(a[1], b[1])
    return value, se, ambiguous


def _as_slots(sr_gain, rd_norm):
    sr_gain = np.asarray(sr_gain, dtype=np.float64)
    rd_norm = np.asarray(rd_norm, dtype=np.float64)
    single = sr_gain.ndim == 1
    return np.atleast_2d(sr_gain), np.atleast_2d(rd_norm), single


def adb_slot_rate(sr_gain, rd_norm, m, ps, pr):
    """Per-realization rate of the alternating-group scheme: group one's
    broadcast and beamforming rates paired, likewise group two, each pair
    min-combined and halved. Arrays may be (L,) or (slots, L)."""
    _check_powers(ps, pr)
    sr_gain, rd_norm, single = _as_slots(sr_gain, rd_norm)
    if not 1 <= m <= sr_gain.shape[1] - 1:
        raise ValueError(f"m={m} leaves an empty relay group")
    r11 = _rate(ps * sr_gain[:, :m].min(axis=1))
    r22 = _rate(pr * rd_norm[:, :m].sum(axis=1) ** 2)
    r21 = _rate(ps * sr_gain[:, m:].min(axis=1))
    r12 = _rate(pr * rd_norm[:, m:].sum(axis=1) ** 2)
    out = 0.5 * np.minimum(r11, r22) + 0.5 * np.minimum(r21, r12)
    return float(out[0]) if single else out


def crs_slot_rate(sr_gain, rd_norm, ps, pr):
    """Per-realization rate of best-relay selection: half the capacity of
    the strongest end-to-end min link."""
    _check_powers(ps, pr)
    sr_gain, rd_norm, single = _as_slots(sr_gain, rd_norm)
    best = np.minimum(ps * sr_gain, pr * rd_norm**2).max(axis=1)
    out = 0.5 * _rate(best)
    return float(out[0]) if single else out


def df_slot_rate(sr_gain, rd_norm, ps, pr):
    """Per-realization rate of all-relay decode-and-forward: weakest relay
    must decode, all relays beamform."""
    _check_powers(ps, pr)
    sr_gain, rd_norm, single = _as_slots(sr_gain, rd_norm)
    gain = np.minimum(ps * sr_gain.min(axis=1), pr * rd_norm.sum(axis=1) ** 2)
    out = 0.5 * _rate(gain)
    return float(out[0]) if single else out


def select_sfd(state: NetworkState, ps, pr):
    """Receive/transmit relay pair for single-slot full-duplex mimicking.

    Best receive and best transmit relays are chosen independently; on a
    collision the weaker of the two swap options is dropped: keep (r2, t1)
    if min(g_sr[r2], g_rd[t1]) >= min(g_sr[r1], g_rd[t2]), else (r1, t2).
    Ties go to the lowest relay index.
    """
    _check_powers(ps, pr)
    if state.sr_gain.shape[0] < 2:
        raise ValueError("relay selection needs at least two relays")
    g_sr = ps * state.sr_gain
    g_rd = pr * state.rd_norm**2
    r1 = int(np.argmax(g_sr))
    t1 = int(np.argmax(g_rd))
    if r1 != t1:
        return r1, t1
    sr_masked = g_sr.copy()
    sr_masked[r1] = -np.inf
    r2 = int(np.argmax(sr_masked))
    rd_masked = g_rd.copy()
    rd_masked[t1] = -np.inf
    t2 = int(np.argmax(rd_masked))
    if min(g_sr[r2], g_rd[t1]) >= min(g_sr[r1], g_rd[t2]):
        return r2, t1
    return r1, t2


def sim_adb(cfg: ChannelConfig, sim: SimConfig, ps, pr) -> ThroughputEstimate:
    """Estimate alternating-group throughput: the four component rates are
    averaged over slots, then 0.5*min(mean11, mean22) + 0.5*min(mean21,
    mean12)."""
    _check_powers(ps, pr)
    min1, beam1, min2, beam2 = _adb_arrays(cfg, sim.slots, sim.seed, sim.workers)
    a = ps / cfg.noise_r
    b = pr / cfg.noise_d
    e11 = _mean_se(_rate(a * min1))
    e22 = _mean_se(_rate(b * beam1))
    e21 = _mean_se(_rate(a * min2))
    e12 = _mean_se(_rate(b * beam2))
    v1, s1, amb1 = _min_of_means(e11, e22)
    v2, s2, amb2 = _min_of_means(e21, e12)
    return ThroughputEstimate(
        value=0.5 * (v1 + v2),
        std_error=0.5 * math.hypot(s1, s2),
        method="monte-carlo",
        slots_used=sim.slots,
        boundary_ambiguous=amb1 or amb2,
    )


def adb_component_estimates(cfg: ChannelConfig, sim: SimConfig, ps, pr):
    """Sample means and standard errors of the four component rates, keyed
    "c11", "c22" (group one) and "c21", "c12" (group two)."""
    _check_powers(ps, pr)
    min1, beam1, min2, beam2 = _adb_arrays(cfg, sim.slots, sim.seed, sim.workers)
    a = ps / cfg.noise_r
    b = pr / cfg.noise_d
    return {
        "c11": _mean_se(_rate(a * min1)),
        "c22": _mean_se(_rate(b * beam1)),
        "c21": _mean_se(_rate(a * min2)),
        "c12": _mean_se(_rate(b * beam2)),
    }


def sim_crs(cfg: ChannelConfig, sim: SimConfig, ps, pr) -> ThroughputEstimate:
    """Estimate best-relay-selection throughput."""
    _check_powers(ps, pr)
    sr, rd = _gain_arrays(cfg, sim.slots, sim.seed, sim.workers)
    vals = crs_slot_rate(sr, rd, ps / cfg.noise_r, pr / cfg.noise_d)
    mean, se = _mean_se(np.atleast_1d(vals))
    return ThroughputEstimate(mean, se, "monte-carlo", sim.slots)


def sim_df(cfg: ChannelConfig, sim: SimConfig, ps, pr) -> ThroughputEstimate:
    """Estimate all-relay decode-and-forward throughput."""
    _check_powers(ps, pr)
    min_all, beam_all = _df_arrays(cfg, sim.slots, sim.seed, sim.workers)
    gain = np.minimum(
        (ps / cfg.noise_r) * min_all, (pr / cfg.noise_d) * beam_all
    )
    mean, se = _mean_se(0.5 * _rate(gain))
    return ThroughputEstimate(mean, se, "monte-carlo", sim.slots)


def sim_sfd_mmrs(cfg: ChannelConfig, sim: SimConfig, ps, pr) -> ThroughputEstimate:
    """Estimate full-duplex-mimicking selection throughput: the smaller of
    the mean receive-link and mean transmit-link capacities, no half
    prefactor."""
    _check_powers(ps, pr)
    sr1, sr2, rd1, rd2, collide = _sfd_arrays(cfg, sim.slots, sim.seed, sim.workers)
    g_sr1 = (ps / cfg.noise_r) * sr1
    g_sr2 = (ps / cfg.noise_r) * sr2
    g_rd1 = (pr / cfg.noise_d) * rd1
    g_rd2 = (pr / cfg.noise_d) * rd2
    # On collisions keep the stronger swap option, as in select_sfd.
    demote_recv = collide & (np.minimum(g_sr2, g_rd1) >= np.minimum(g_sr1, g_rd2))
    demote_trans = collide & ~demote_recv
    c_sr = _mean_se(_rate(np.where(demote_recv, g_sr2, g_sr1)))
    c_rd = _mean_se(_rate(np.where(demote_trans, g_rd2, g_rd1)))
    value, se, ambiguous = _min_of_means(c_sr, c_rd)
    return ThroughputEstimate(
        value=value,
        std_error=se,
        method="monte-carlo",
        slots_used=sim.slots,
        boundary_ambiguous=ambiguous,
    )
