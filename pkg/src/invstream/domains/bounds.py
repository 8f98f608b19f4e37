"""Extended rational bounds and threshold extrapolation.

Finite bounds are ``int`` (Int coordinates) or :class:`Fraction`; infinities
are ``math.inf`` and ``-math.inf``, which compare correctly with both.
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction

INF = math.inf
NEG_INF = -math.inf


def is_finite(b) -> bool:
    return b != INF and b != NEG_INF


def as_bound(value, integral=False):
    """Normalize a finite value or infinity; ``integral`` demands an integer."""
    if value in (INF, NEG_INF):
        return value
    f = Fraction(value)
    if integral:
        if f.denominator != 1:
            raise ValueError(f"non-integral bound {value} for an Int coordinate")
        return int(f)
    return f


def floor_bound(b, integral):
    if integral and is_finite(b):
        return math.floor(b)
    return b


def ceil_bound(b, integral):
    if integral and is_finite(b):
        return math.ceil(b)
    return b


def sorted_thresholds(thresholds) -> tuple:
    return tuple(sorted(Fraction(t) for t in thresholds))


def threshold_above(value, thresholds: tuple):
    """Least threshold ``>= value`` (``thresholds`` sorted), else +inf."""
    if value == INF:
        return INF
    i = bisect.bisect_left(thresholds, value)
    return thresholds[i] if i < len(thresholds) else INF


def threshold_below(value, thresholds: tuple):
    """Greatest threshold ``<= value``, else -inf."""
    if value == NEG_INF:
        return NEG_INF
    i = bisect.bisect_right(thresholds, value)
    return thresholds[i - 1] if i > 0 else NEG_INF


def widen_upper(old, new, thresholds: tuple, integral=False):
    if new <= old:
        return old
    return floor_bound(threshold_above(new, thresholds), integral)


def widen_lower(old, new, thresholds: tuple, integral=False):
    if new >= old:
        return old
    return ceil_bound(threshold_below(new, thresholds), integral)


def render_bound(b) -> str:
    if b == INF:
        return "+inf"
    if b == NEG_INF:
        return "-inf"
    f = Fraction(b)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def bound_sum(terms):
    """Sum of bounds; mixing +inf and -inf is a caller error."""
    total = Fraction(0)
    for t in terms:
        if t == INF or t == NEG_INF:
            return t
        total += t
    return total
