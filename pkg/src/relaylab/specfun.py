"""Scalar special functions behind the closed-form throughput expressions.

Exponential integrals E_n(x), plain and exponentially scaled, plus log-domain
factorial/multinomial helpers and integer-composition enumeration. Everything
here is a deterministic pure function; no numpy required.
"""

import math
import sys
from typing import Iterator, Sequence, Tuple

Composition = Tuple[int, ...]

EULER_GAMMA = 0.5772156649015328606

_EPS = 0.5 * sys.float_info.epsilon
_TINY = 1e-300
_MAX_ITER = 400


def _en_series(order: int, x: float) -> float:
    """Power series for E_n(x), reliable for 0 < x <= 1.

    Uses the expansion
        E_n(x) = (-x)^(n-1)/(n-1)! * (psi(n) - ln x) - sum_{m!=n-1} (-x)^m / (m! (m-n+1))
    accumulating terms until they fall below machine precision relative to the
    running sum. For x <= 1 the terms decay fast and cancellation is mild.
    """
    if order == 1:
        total = -math.log(x) - EULER_GAMMA
    else:
        total = 1.0 / (order - 1)
    term = 1.0
    for m in range(1, _MAX_ITER + 1):
        term *= -x / m
        if m == order - 1:
            # digamma(order) = -gamma + H_{order-1}
            psi = -EULER_GAMMA + sum(1.0 / i for i in range(1, order))
            delta = term * (psi - math.log(x))
        else:
            delta = -term / (m - order + 1)
        total += delta
        if abs(delta) < abs(total) * _EPS:
            return total
    raise ArithmeticError(f"E_{order} series failed to converge at x={x!r}")


def _en_cf_scaled(order: int, x: float) -> float:
    """Modified Lentz evaluation of exp(x) * E_n(x), reliable for x >= 1.

    The underlying continued fraction is
        E_n(x) = e^-x / (x + n - 1*n/(x + n + 2 - 2(n+1)/(x + n + 4 - ...)))
    and dropping the e^-x prefactor yields the scaled value directly, so the
    result stays representable out to arbitrarily large x.
    """
    b = x + order
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        a = -i * (order - 1 + i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"E_{order} continued fraction stalled at x={x!r}")


def exp_integral_e1(x: float) -> float:
    """Exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0.

    Power series below x = 1, modified Lentz continued fraction above.
    Relative error is a few ulps across [1e-8, 700]; underflows to 0.0
    gracefully once e^-x itself leaves the double range.
    """
    if not x > 0.0:
        raise ValueError(f"E1 requires x > 0, got {x!r}")
    if x <= 1.0:
        return _en_series(1, x)
    return math.exp(-x) * _en_cf_scaled(1, x)


def exp_scaled_e1(x: float) -> float:
    """exp(x) * E1(x) for x > 0; stays O(1/x) instead of underflowing."""
    return exp_scaled_en(1, x)


def exp_scaled_en(order: int, x: float) -> float:
    """exp(x) * E_order(x) for integer order >= 1 and x > 0.

    Same series/continued-fraction split as exp_integral_e1, generalized to
    higher order. Monotone decreasing in x and in order, bounded above by 1/x.
    """
    if order < 1 or int(order) != order:
        raise ValueError(f"order must be an integer >= 1, got {order!r}")
    if not x > 0.0:
        raise ValueError(f"E_n requires x > 0, got {x!r}")
    order = int(order)
    if x <= 1.0:
        return math.exp(x) * _en_series(order, x)
    return _en_cf_scaled(order, x)


def log_factorial(n: int) -> float:
    """ln(n!) for n >= 0; exact-integer path for small n, lgamma beyond."""
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    n = int(n)
    if n <= 20:
        return math.log(math.factorial(n)) if n > 1 else 0.0
    return math.lgamma(n + 1.0)


def compositions(total: int, parts: int) -> Iterator[Composition]:
    """Yield all tuples of `parts` non-negative ints summing to `total`.

    Enumeration is colexicographic: the last coordinate varies slowest.
    compositions(2, 2) yields (2, 0), (1, 1), (0, 2). The stream has
    C(total + parts - 1, parts - 1) elements.
    """
    if parts < 1:
        raise ValueError(f"parts must be >= 1, got {parts!r}")
    if total < 0:
        raise ValueError(f"total must be >= 0, got {total!r}")
    if parts == 1:
        yield (total,)
        return
    for tail in range(total + 1):
        for head in compositions(total - tail, parts - 1):
            yield head + (tail,)


def log_multinomial(total: int, counts: Sequence[int]) -> float:
    """ln of the multinomial coefficient total! / prod(counts_i!).

    The counts must be non-negative and sum to `total`.
    """
    counts = tuple(counts)
    if any(c < 0 or int(c) != c for c in counts):
        raise ValueError(f"counts must be non-negative integers, got {counts!r}")
    if sum(counts) != total:
        raise ValueError(
            f"counts sum to {sum(counts)}, expected total={total}"
        )
    return log_factorial(total) - math.fsum(log_factorial(c) for c in counts)
