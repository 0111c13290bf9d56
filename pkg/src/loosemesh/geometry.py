"""Planar primitives: exact turn and circle decisions plus the disk
constructions (leaves, diametral disks, circumdisks) used by refinement."""

from __future__ import annotations

import enum
import math
from typing import Iterable, NamedTuple, Sequence

from .exceptions import DegenerateError
from .predicates import LEAF_BAND, band_incircle, incircle, orient2d

Point = tuple[float, float]

SQRT2 = math.sqrt(2.0)


class Turn(enum.IntEnum):
    RIGHT = -1
    COLLINEAR = 0
    LEFT = 1


class Position(enum.IntEnum):
    OUTSIDE = -1
    ON = 0
    INSIDE = 1


class Side(enum.IntEnum):
    RIGHT = -1
    LEFT = 1

    @property
    def opposite(self) -> "Side":
        return Side(-self.value)


class Disk(NamedTuple):
    center: Point
    radius: float

    def locate(self, p: Point) -> Position:
        d2 = (p[0] - self.center[0]) ** 2 + (p[1] - self.center[1]) ** 2
        r2 = self.radius * self.radius
        if d2 < r2:
            return Position.INSIDE
        if d2 > r2:
            return Position.OUTSIDE
        return Position.ON

    def contains(self, p: Point) -> bool:
        """Strict interior membership."""
        return self.locate(p) is Position.INSIDE


class Triangle(NamedTuple):
    a: Point
    b: Point
    c: Point


def check_point(p) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite coordinate in {p!r}")
    return (x, y)


def dist(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def orientation(p: Point, q: Point, r: Point) -> Turn:
    return Turn(orient2d(p[0], p[1], q[0], q[1], r[0], r[1]))


def in_circle(a: Point, b: Point, c: Point, d: Point) -> Position:
    """Position of ``d`` relative to the circle through a, b, c (any orientation)."""
    o = orient2d(a[0], a[1], b[0], b[1], c[0], c[1])
    if o == 0:
        raise DegenerateError("in_circle: a, b, c are collinear")
    s = incircle(a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1])
    return Position(s * o)


def _require_triangle(a: Point, b: Point, c: Point) -> None:
    if orient2d(a[0], a[1], b[0], b[1], c[0], c[1]) == 0:
        raise DegenerateError("degenerate (collinear) triangle")


def circumcenter(a: Point, b: Point, c: Point) -> Point:
    _require_triangle(a, b, c)
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    d = 2.0 * (bx * cy - by * cx)
    return (a[0] + (cy * b2 - by * c2) / d, a[1] + (bx * c2 - cx * b2) / d)


def circumcircle(t: Sequence[Point]) -> Disk:
    a, b, c = t
    o = circumcenter(a, b, c)
    return Disk(o, dist(o, a))


def _side_lengths(a: Point, b: Point, c: Point) -> tuple[float, float, float]:
    return dist(b, c), dist(c, a), dist(a, b)


def radius_edge_ratio(t: Sequence[Point]) -> float:
    """Circumradius divided by the shortest side."""
    a, b, c = t
    _require_triangle(a, b, c)
    la, lb, lc = _side_lengths(a, b, c)
    cross = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    return la * lb * lc / (2.0 * cross) / min(la, lb, lc)


def angles(t: Sequence[Point]) -> tuple[float, float, float]:
    """Interior angles in radians at a, b and c."""
    a, b, c = t
    out = []
    for p, q, r in ((a, b, c), (b, c, a), (c, a, b)):
        ux, uy = q[0] - p[0], q[1] - p[1]
        vx, vy = r[0] - p[0], r[1] - p[1]
        out.append(abs(math.atan2(ux * vy - uy * vx, ux * vx + uy * vy)))
    return out[0], out[1], out[2]


def min_angle(t: Sequence[Point]) -> float:
    return min(angles(t))


def angle_threshold(beta: float) -> float:
    """Smallest angle (radians) allowed by radius-edge bound ``beta``."""
    return math.asin(1.0 / (2.0 * beta))


def beta_from_angle(min_angle_deg: float) -> float:
    return 1.0 / (2.0 * math.sin(math.radians(min_angle_deg)))


def _check_pair(p: Point, q: Point, beta: float) -> None:
    if p == q:
        raise DegenerateError("pair endpoints coincide")
    if beta < 0.5:
        raise ValueError(f"no leaf disk exists for beta={beta} < 1/2")


def leaf_center(p: Point, q: Point, beta: float, side: Side) -> Point:
    _check_pair(p, q, beta)
    h = math.sqrt(max(beta * beta - 0.25, 0.0)) * side
    dx, dy = q[0] - p[0], q[1] - p[1]
    return (0.5 * (p[0] + q[0]) - dy * h, 0.5 * (p[1] + q[1]) + dx * h)


def leaf_disks(p: Point, q: Point, beta: float) -> tuple[Disk, Disk]:
    """Left and right leaves of the flower of pq."""
    r = beta * dist(p, q)
    return (Disk(leaf_center(p, q, beta, Side.LEFT), r),
            Disk(leaf_center(p, q, beta, Side.RIGHT), r))


def leaf_apex(p: Point, q: Point, beta: float, side: Side) -> Point:
    """Point of the leaf boundary furthest from the segment pq."""
    _check_pair(p, q, beta)
    h = (math.sqrt(max(beta * beta - 0.25, 0.0)) + beta) * side
    dx, dy = q[0] - p[0], q[1] - p[1]
    return (0.5 * (p[0] + q[0]) - dy * h, 0.5 * (p[1] + q[1]) + dx * h)


def leaf_contains(p: Point, q: Point, apex: Point, side: Side, x: Point) -> bool:
    """Is ``x`` strictly inside the leaf of pq whose apex is ``apex``?

    The circle is taken through p, q and the (rounded) apex; points whose
    normalized in-circle value falls within the band are reported outside.
    """
    dx, dy = q[0] - p[0], q[1] - p[1]
    l2 = dx * dx + dy * dy
    thr = LEAF_BAND * l2 * l2
    if side is Side.LEFT or side == 1:
        s = band_incircle(p[0], p[1], q[0], q[1], apex[0], apex[1], x[0], x[1], thr)
    else:
        s = band_incircle(q[0], q[1], p[0], p[1], apex[0], apex[1], x[0], x[1], thr)
    return s > 0


def diametral_disk(p: Point, q: Point) -> Disk:
    if p == q:
        raise DegenerateError("segment endpoints coincide")
    return Disk((0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])), 0.5 * dist(p, q))


def encroaches(x: Point, p: Point, q: Point) -> bool:
    """True iff x lies strictly inside the diametral circle of pq.

    Decided exactly: the angle pxq is obtuse iff the dot product is negative.
    """
    if p == q:
        raise DegenerateError("segment endpoints coincide")
    from fractions import Fraction

    ux, uy = p[0] - x[0], p[1] - x[1]
    vx, vy = q[0] - x[0], q[1] - x[1]
    dot = ux * vx + uy * vy
    mag = abs(ux * vx) + abs(uy * vy)
    if abs(dot) > 4e-16 * mag:
        return dot < 0
    fx, fy = Fraction(x[0]), Fraction(x[1])
    return (Fraction(p[0]) - fx) * (Fraction(q[0]) - fx) + (Fraction(p[1]) - fy) * (Fraction(q[1]) - fy) < 0


def lfs(x: Point, pts: Iterable[Point]) -> float:
    """Local feature size of x with respect to a finite point set.

    Radius of the smallest disk centred at x touching two distinct points
    of ``pts``; when x itself belongs to ``pts`` that is the distance to
    its nearest other point.
    """
    d = sorted(dist(x, p) for p in pts)
    if len(d) < 2:
        raise ValueError("lfs needs at least two reference points")
    return d[1]
