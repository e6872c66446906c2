"""Per-protocol total-power budgets and the source/relay power split search.

Each protocol spends its budget as ps + weight*pr <= total, where the weight
counts transmitting relays per slot (L/2 for the alternating scheme since only
one group beamforms at a time, L otherwise) and two-slot protocols get the
budget counted per transmission phase (total = 2*snr_total). Throughput is
increasing in both powers, so the optimum sits on the equality curve and the
search is one-dimensional in the ratio ps/pr.
"""

import math
from dataclasses import dataclass
from typing import Callable, Tuple

from .simulate import ThroughputEstimate

__all__ = [
    "PROTOCOLS",
    "PowerBudget",
    "PowerPoint",
    "budget_pr",
    "ratio_point",
    "maximize_throughput",
    "OptimizationError",
]

PROTOCOLS = ("adb", "crs", "df", "sfd-mmrs")

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class OptimizationError(RuntimeError):
    """The power-split search hit a non-finite objective value."""


@dataclass(frozen=True)
class PowerBudget:
    """Total-power constraint for one protocol: ps + weight*pr <= total."""

    protocol: str
    snr_total: float
    L: int

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if not self.snr_total > 0:
            raise ValueError(f"snr_total must be > 0, got {self.snr_total!r}")
        if self.L < 2 or int(self.L) != self.L:
            raise ValueError(f"L must be an integer >= 2, got {self.L!r}")

    @property
    def relay_weight(self) -> float:
        return self.L / 2.0 if self.protocol == "adb" else float(self.L)

    @property
    def total(self) -> float:
        # Two-slot protocols average their spend over both phases.
        if self.protocol in ("crs", "df"):
            return 2.0 * self.snr_total
        return self.snr_total


@dataclass(frozen=True)
class PowerPoint:
    ps: float
    pr: float

    def __post_init__(self):
        if not self.ps > 0 or not self.pr > 0:
            raise ValueError(
                f"powers must be > 0, got ps={self.ps!r}, pr={self.pr!r}"
            )


def budget_pr(budget: PowerBudget, ps: float) -> float:
    """Relay power that exhausts the budget at source power ps."""
    if not 0 < ps < budget.total:
        raise ValueError(
            f"ps must lie in (0, {budget.total}), got {ps!r}"
        )
    return (budget.total - ps) / budget.relay_weight


def ratio_point(budget: PowerBudget, ratio: float) -> PowerPoint:
    """Budget-equality point with ps/pr = ratio."""
    if not ratio > 0:
        raise ValueError(f"ratio must be > 0, got {ratio!r}")
    pr = budget.total / (ratio + budget.relay_weight)
    return PowerPoint(ps=ratio * pr, pr=pr)


Evaluator = Callable[[float, float], ThroughputEstimate]


def _probe(budget, evaluator, u, cache):
    if u not in cache:
        point = ratio_point(budget, math.exp(u))
        est = evaluator(point.ps, point.pr)
        if not math.isfinite(est.value):
            raise OptimizationError(
                f"objective returned {est.value!r} at ps={point.ps}, pr={point.pr}"
            )
        cache[u] = (est.value, point, est)
    return cache[u]


def _grid_values(budget, evaluator, us, cache):
    return [_probe(budget, evaluator, u, cache)[0] for u in us]


def _significant_maxima(us, vals, cache):
    """Indices of local maxima on the grid that rise above MC noise."""
    best = max(range(len(us)), key=vals.__getitem__)
    best_se = cache[us[best]][2].std_error
    found = []
    for i in range(1, len(us) - 1):
        if vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1]:
            se = math.hypot(cache[us[i]][2].std_error, best_se)
            if vals[i] >= vals[best] - 3.0 * se:
                found.append(i)
    return found or [best]


def maximize_throughput(
    budget: PowerBudget,
    evaluator: Evaluator,
    tolerance: float = 1e-3,
    ratio_bounds: Tuple[float, float] = (1e-2, 1e2),
    coarse_points: int = 25,
) -> Tuple[PowerPoint, ThroughputEstimate]:
    """Maximize evaluator(ps, pr) along the budget-equality curve.

    Log-spaced coarse grid over the ps/pr ratio, then golden-section
    refinement of ln(ratio) around the best grid point down to the given
    relative ratio tolerance. If the coarse grid shows several local maxima
    beyond combined Monte Carlo noise, a 200-point grid re-locates the peak
    first. Returns the best probed point and its estimate.
    """
    if not tolerance > 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance!r}")
    lo, hi = ratio_bounds
    if not (0 < lo < hi):
        raise ValueError(f"invalid ratio bounds {ratio_bounds!r}")
    cache = {}
    ulo, uhi = math.log(lo), math.log(hi)
    step = (uhi - ulo) / (coarse_points - 1)
    us = [ulo + i * step for i in range(coarse_points)]
    vals = _grid_values(budget, evaluator, us, cache)
    if len(_significant_maxima(us, vals, cache)) > 1:
        step = (uhi - ulo) / 199
        us = [ulo + i * step for i in range(200)]
        vals = _grid_values(budget, evaluator, us, cache)
    best = max(range(len(us)), key=vals.__getitem__)
    a = us[max(best - 1, 0)]
    b = us[min(best + 1, len(us) - 1)]

    width_goal = math.log1p(tolerance)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = _probe(budget, evaluator, c, cache)[0]
    fd = _probe(budget, evaluator, d, cache)[0]
    while (b - a) > width_goal:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _probe(budget, evaluator, c, cache)[0]
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = _probe(budget, evaluator, d, cache)[0]
    u_best = max(cache, key=lambda u: cache[u][0])
    _, point, est = cache[u_best]
    return point, est
