"""Trapezoidal fuzzy time periods and the asymmetric temporal distance.

A period is described by four breakpoints ``a <= b <= c <= d`` on a
continuous time axis measured in fractional years.  Membership (the degree
to which the period "exists" at an instant) is 0 outside ``[a, d]``, 1 on
the plateau ``[b, c]`` and linear on the two ramps.  Degenerate shapes are
allowed: ``a == b == c == d`` is a crisp instant, ``a == b`` and ``c == d``
a crisp interval.

The distance between a query period and a candidate period treats each
membership function as a polygon in the (time, membership) plane:

    distance(A, B) = gap(A, B) + area(A) - intersection_area(A, B)

where ``gap`` is the minimal planar distance between the two polygons.
The distance is asymmetric on purpose: ``A`` is always the query, so the
penalty measures how much of the query period the candidate fails to
explain.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass


class FuzzyDateError(ValueError):
    """Raised when a textual date cannot be parsed into a period."""


class PeriodOrderingError(ValueError):
    """Raised when breakpoints violate a <= b <= c <= d."""


@dataclass(frozen=True)
class FuzzyPeriod:
    """Trapezoidal fuzzy set over the time axis (fractional years)."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not (self.a <= self.b <= self.c <= self.d):
            raise PeriodOrderingError(
                f"breakpoints must satisfy a <= b <= c <= d, got "
                f"({self.a}, {self.b}, {self.c}, {self.d})"
            )

    def shifted(self, delta: float) -> "FuzzyPeriod":
        return FuzzyPeriod(self.a + delta, self.b + delta, self.c + delta, self.d + delta)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


def membership(p: FuzzyPeriod, t: float) -> float:
    """Degree in [0, 1] at instant ``t``, piecewise linear over (a, b, c, d)."""
    if t < p.a or t > p.d:
        return 0.0
    if p.b <= t <= p.c:
        return 1.0
    if t < p.b:
        return (t - p.a) / (p.b - p.a)
    return (p.d - t) / (p.d - p.c)


def area(p: FuzzyPeriod) -> float:
    """Area under the membership curve, in year*degree units."""
    return ((p.d - p.a) + (p.c - p.b)) / 2.0


def _cell_values(p: FuzzyPeriod, x0: float, x1: float) -> tuple[float, float]:
    """Limits of the membership at the ends of a cell with no interior
    breakpoint, taken from inside the cell (ignores jump discontinuities
    that degenerate ramps produce exactly at a breakpoint)."""
    mid = 0.5 * (x0 + x1)
    if mid < p.a or mid > p.d:
        return 0.0, 0.0
    if mid < p.b:
        inv = 1.0 / (p.b - p.a)
        return (x0 - p.a) * inv, (x1 - p.a) * inv
    if mid <= p.c:
        return 1.0, 1.0
    inv = 1.0 / (p.d - p.c)
    return (p.d - x0) * inv, (p.d - x1) * inv


def intersection_area(p1: FuzzyPeriod, p2: FuzzyPeriod) -> float:
    """Area under min(membership_p1, membership_p2).

    Exact: both functions are linear between consecutive merged breakpoints,
    so the pointwise minimum is integrated segment by segment, splitting a
    segment once where the two lines cross.
    """
    lo = max(p1.a, p2.a)
    hi = min(p1.d, p2.d)
    if hi <= lo:
        return 0.0
    cuts = sorted({p1.a, p1.b, p1.c, p1.d, p2.a, p2.b, p2.c, p2.d, lo, hi})
    xs = [x for x in cuts if lo <= x <= hi]
    total = 0.0
    for x0, x1 in zip(xs, xs[1:]):
        if x1 <= x0:
            continue
        f0, f1 = _cell_values(p1, x0, x1)
        g0, g1 = _cell_values(p2, x0, x1)
        d0, d1 = f0 - g0, f1 - g1
        if d0 * d1 < 0.0:
            # the two lines cross strictly inside the cell
            t = d0 / (d0 - d1)
            xm = x0 + t * (x1 - x0)
            fm = f0 + t * (f1 - f0)
            total += 0.5 * (min(f0, g0) + fm) * (xm - x0)
            total += 0.5 * (fm + min(f1, g1)) * (x1 - xm)
        else:
            total += 0.5 * (min(f0, g0) + min(f1, g1)) * (x1 - x0)
    return total


def _polygon_outline(p: FuzzyPeriod) -> list[tuple[float, float]]:
    """Closed outline of the period's polygon in the (time, membership)
    plane, with zero-length edges dropped.  A crisp instant degenerates to
    the vertical unit segment at its time coordinate."""
    ring = [(p.a, 0.0), (p.b, 1.0), (p.c, 1.0), (p.d, 0.0), (p.a, 0.0)]
    out: list[tuple[float, float]] = [ring[0]]
    for v in ring[1:]:
        if v != out[-1]:
            out.append(v)
    return out


def _segment_distance(
    a: tuple[float, float],
    b: tuple[float, float],
    c: tuple[float, float],
    d: tuple[float, float],
) -> float:
    """Minimal distance between segments ab and cd."""

    def point_seg(px, py, x0, y0, x1, y1):
        vx, vy = x1 - x0, y1 - y0
        ll = vx * vx + vy * vy
        if ll == 0.0:
            return math.hypot(px - x0, py - y0)
        t = ((px - x0) * vx + (py - y0) * vy) / ll
        t = min(1.0, max(0.0, t))
        return math.hypot(px - (x0 + t * vx), py - (y0 + t * vy))

    def orient(ox, oy, px, py, qx, qy):
        return (px - ox) * (qy - oy) - (py - oy) * (qx - ox)

    o1 = orient(*a, *b, *c)
    o2 = orient(*a, *b, *d)
    o3 = orient(*c, *d, *a)
    o4 = orient(*c, *d, *b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)):
        return 0.0  # proper crossing
    return min(
        point_seg(*c, *a, *b),
        point_seg(*d, *a, *b),
        point_seg(*a, *c, *d),
        point_seg(*b, *c, *d),
    )


def gap(p1: FuzzyPeriod, p2: FuzzyPeriod) -> float:
    """Minimal planar distance between the two period polygons.

    Zero whenever the supports [a, d] overlap or touch (the base edges then
    share at least one point); otherwise the minimum over boundary segment
    pairs, which for trapezoids equals the horizontal gap between supports.
    """
    if max(p1.a, p2.a) <= min(p1.d, p2.d):
        return 0.0
    r1 = _polygon_outline(p1)
    r2 = _polygon_outline(p2)
    best = math.inf
    for s1 in zip(r1, r1[1:]):
        for s2 in zip(r2, r2[1:]):
            best = min(best, _segment_distance(s1[0], s1[1], s2[0], s2[1]))
    return best


def temporal_distance(query: FuzzyPeriod, candidate: FuzzyPeriod) -> float:
    """gap + area(query) - intersection_area(query, candidate).

    Asymmetric: the first argument is the query. Mathematically >= 0; tiny
    negative float residue is clamped.
    """
    value = gap(query, candidate) + area(query) - intersection_area(query, candidate)
    return value if value > 0.0 else 0.0


_RE_YEAR = re.compile(r"^\d{1,6}$")
_RE_RANGE = re.compile(r"^(\d{1,6})\s*-\s*(\d{1,6})$")


def parse_fuzzy_date(text: str) -> FuzzyPeriod:
    """Parse a textual date into a period.

    Accepted grammars:
      "YYYY"        -> (Y, Y, Y+1, Y+1)      one-year-wide crisp interval
      "YYYY-YYYY"   -> (Y1, Y1, Y2, Y2)      crisp interval
      "a;b;c;d"     -> (a, b, c, d)          four reals, the raw trapezoid
    """
    s = text.strip()
    if not s:
        raise FuzzyDateError("empty date text")
    if ";" in s:
        parts = [p.strip() for p in s.split(";")]
        if len(parts) != 4:
            raise FuzzyDateError(
                f"expected four ';'-separated values, got {len(parts)} in {text!r}"
            )
        values = []
        for part in parts:
            try:
                values.append(float(part))
            except ValueError:
                raise FuzzyDateError(f"not a number: {part!r}") from None
        return FuzzyPeriod(*values)
    m = _RE_RANGE.match(s)
    if m:
        y1, y2 = float(m.group(1)), float(m.group(2))
        return FuzzyPeriod(y1, y1, y2, y2)
    if _RE_YEAR.match(s):
        y = float(s)
        return FuzzyPeriod(y, y, y + 1.0, y + 1.0)
    raise FuzzyDateError(f"unrecognized date: {s!r}")
