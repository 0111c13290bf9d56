"""Flowers, loose pairs, crescents, moonstruck points and off-centers."""

from __future__ import annotations

import enum
import math
from typing import Iterable, NamedTuple, Optional, Sequence

from .exceptions import BoundaryVertexError, DegenerateError
from .geometry import (
    Disk,
    Point,
    Position,
    Side,
    circumcenter,
    dist,
    in_circle,
    leaf_apex,
    leaf_contains,
    leaf_disks,
    lfs,
    orientation,
)


class Flower(NamedTuple):
    p: Point
    q: Point
    left_leaf: Disk
    right_leaf: Disk


class LoosePair(NamedTuple):
    p: Point
    q: Point
    empty_side: Side
    length: float


# Off-centers are pulled toward the chord midpoint by this relative amount:
# the exact apex sits on the leaf boundary, where the band test calls it
# outside, so inserting it verbatim would leave the pair loose.
OFFCENTER_PULL = 1e-10


def pull_inside(p: Point, q: Point, c: Point) -> Point:
    mx, my = 0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])
    k = 1.0 - OFFCENTER_PULL
    return (mx + (c[0] - mx) * k, my + (c[1] - my) * k)


class OffCenterKind(enum.Enum):
    APEX = "apex"
    CIRCUM_VIA_MOONSTRUCK = "circum_via_moonstruck"


class OffCenterResult(NamedTuple):
    steiner: Point
    kind: OffCenterKind
    moonstruck: Optional[Point] = None


class Crescent(NamedTuple):
    """Outer disk centred at the leaf apex through p and q, minus the leaf."""

    p: Point
    q: Point
    side: Side
    apex: Point
    outer: Disk
    leaf: Disk

    def contains(self, x: Point) -> bool:
        if x == self.p or x == self.q:
            return False
        if not self.outer.contains(x):
            return False
        return not leaf_contains(self.p, self.q, self.apex, self.side, x)


def flower(p: Point, q: Point, beta: float) -> Flower:
    left, right = leaf_disks(p, q, beta)
    return Flower(p, q, left, right)


def leaf_is_empty(p: Point, q: Point, beta: float, side: Side, candidates: Iterable[Point]) -> bool:
    apex = leaf_apex(p, q, beta, side)
    leaf = leaf_disks(p, q, beta)[0 if side == Side.LEFT else 1]
    # generous prefilter: only points near the leaf go to the exact test
    cx, cy = leaf.center
    r2 = (leaf.radius * (1.0 + 1e-9)) ** 2
    for x in candidates:
        if x == p or x == q:
            continue
        if (x[0] - cx) ** 2 + (x[1] - cy) ** 2 >= r2:
            continue
        if leaf_contains(p, q, apex, side, x):
            return False
    return True


def is_loose(p: Point, q: Point, beta: float, candidates: Iterable[Point],
             require_support: bool = False) -> Optional[LoosePair]:
    """Return the loose pair (p, q) if one of its leaves is empty.

    With ``require_support`` a side only counts when some candidate lies
    strictly on it, which rules out the outer side of a hull edge (there
    is no triangle there whose quality could be at stake).
    """
    if p == q:
        raise DegenerateError("pair endpoints coincide")
    cands = list(candidates)
    sides = [Side.LEFT, Side.RIGHT]
    if require_support:
        seen = {int(orientation(p, q, x)) for x in cands if x != p and x != q}
        sides = [s for s in sides if int(s) in seen]
    for s in sides:
        if leaf_is_empty(p, q, beta, s, cands):
            return LoosePair(p, q, s, dist(p, q))
    return None


def crescent(p: Point, q: Point, beta: float, side: Side) -> Crescent:
    apex = leaf_apex(p, q, beta, side)
    leaf = leaf_disks(p, q, beta)[0 if side == Side.LEFT else 1]
    outer = Disk(apex, max(dist(apex, p), dist(apex, q)))
    return Crescent(p, q, Side(side), apex, outer, leaf)


def _closer(p: Point, q: Point, x: Point, best: Point) -> bool:
    """Does x beat ``best`` as the moonstruck candidate?"""
    pos = in_circle(p, q, best, x)
    if pos is Position.INSIDE:
        return True
    if pos is Position.ON:
        return x < best
    return False


def moonstruck(p: Point, q: Point, beta: float, side: Side,
               candidates: Iterable[Point]) -> Optional[Point]:
    """Crescent point whose circumdisk with p and q holds no other crescent point."""
    cr = crescent(p, q, beta, side)
    best = None
    for x in candidates:
        if not cr.contains(x):
            continue
        if best is None or _closer(p, q, x, best):
            best = x
    return best


def off_center(p: Point, q: Point, beta: float, side: Side,
               candidates: Iterable[Point]) -> OffCenterResult:
    """Steiner point that destroys the loose pair (p, q) on ``side``.

    The point returned is the apex (empty crescent) or the circumcenter of
    p, q and the moonstruck, pulled inward by OFFCENTER_PULL.
    """
    r = moonstruck(p, q, beta, side, candidates)
    if r is None:
        c = leaf_apex(p, q, beta, side)
        return OffCenterResult(pull_inside(p, q, c), OffCenterKind.APEX, None)
    c = circumcenter(p, q, r)
    return OffCenterResult(pull_inside(p, q, c), OffCenterKind.CIRCUM_VIA_MOONSTRUCK, r)


def gap(x: Point, pts: Sequence[Point]) -> float:
    """Largest empty disk touching x divided by lfs(x).

    Uses the circumradii of the Delaunay triangles incident to x, which
    is exact for vertices interior to the convex hull.
    """
    from .delaunay import Triangulation

    pts = [tuple(map(float, p)) for p in pts]
    if len(pts) < 3:
        raise ValueError("gap needs at least three points")
    tri = Triangulation.build(pts)
    v = tri.vertex_index(x)
    if v is None:
        raise ValueError("x must belong to pts")
    if tri.is_hull_vertex(v):
        raise BoundaryVertexError("gap is unbounded at a convex-hull vertex")
    big = 0.0
    for t in tri.incident_triangles(v):
        a, b, c = (tri.points[i] for i in tri.triangle(t))
        o = circumcenter(a, b, c)
        big = max(big, dist(o, x))
    return big / lfs(x, pts)


def circumradius(a: Point, b: Point, c: Point) -> float:
    return dist(circumcenter(a, b, c), a)


def leaf_radius(p: Point, q: Point, beta: float) -> float:
    return beta * dist(p, q)


def leaf_height(beta: float) -> float:
    """Distance from the chord midpoint to the leaf centre, per unit chord."""
    return math.sqrt(max(beta * beta - 0.25, 0.0))
