"""Input normalization and the bounding-square frame.

The input is mapped by a similarity onto [1/3, 2/3]^2 and enclosed in the
unit square, whose sides start out split into thirds.  Boundary segments
are refined only by midpoint splits when a proposed point encroaches them.
"""

from __future__ import annotations

from bisect import bisect_right, insort
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .exceptions import DuplicatePointError
from .geometry import Point, encroaches

THIRD = 1.0 / 3.0
TWO_THIRDS = 2.0 / 3.0

# sides: 0 bottom (y=0), 1 right (x=1), 2 top (y=1), 3 left (x=0)
_SIDES = (0, 1, 2, 3)


def frame_points() -> List[Point]:
    """Corners plus the third-points of each side, 12 points."""
    return BoundingFrame().vertices()


class Transform(NamedTuple):
    """x_norm = scale * x + shift."""

    scale: float
    tx: float
    ty: float

    def forward(self, pts):
        a = np.asarray(pts, dtype=float).reshape(-1, 2)
        return a * self.scale + np.array([self.tx, self.ty])

    def inverse(self, pts):
        a = np.asarray(pts, dtype=float).reshape(-1, 2)
        return (a - np.array([self.tx, self.ty])) / self.scale


def check_unique(pts: Sequence[Point]) -> None:
    seen = set()
    for i, p in enumerate(pts):
        if p in seen:
            raise DuplicatePointError(f"duplicate point {p} at position {i}")
        seen.add(p)


def normalize_input(raw) -> tuple:
    """Map the minimum enclosing square of ``raw`` onto [1/3, 2/3]^2.

    The square is centred on the bounding-box centre; a single point maps
    to (0.5, 0.5).  Returns (points, Transform).
    """
    a = np.asarray(raw, dtype=float).reshape(-1, 2)
    if len(a) == 0:
        raise ValueError("need at least one point")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite coordinate in input")
    check_unique([tuple(p) for p in a.tolist()])
    lo, hi = a.min(axis=0), a.max(axis=0)
    side = float(max(hi - lo))
    scale = THIRD / side if side > 0 else 1.0
    cx, cy = 0.5 * (lo + hi)
    tf = Transform(scale, 0.5 - scale * cx, 0.5 - scale * cy)
    out = [tuple(p) for p in tf.forward(a).tolist()]
    # rounding can merge very close points or push them off the box
    check_unique(out)
    out = [(min(max(x, THIRD), TWO_THIRDS), min(max(y, THIRD), TWO_THIRDS)) for x, y in out]
    return out, tf


def side_point(side: int, t: float) -> Point:
    if side == 0:
        return (t, 0.0)
    if side == 1:
        return (1.0, t)
    if side == 2:
        return (t, 1.0)
    return (0.0, t)


class BoundingFrame:
    """Boundary vertices of the unit square, kept sorted per side."""

    def __init__(self):
        base = [0.0, THIRD, TWO_THIRDS, 1.0]
        self.params = {s: list(base) for s in _SIDES}
        self.split_count = 0

    def vertices(self) -> List[Point]:
        seen = set()
        out = []
        for s in _SIDES:
            for t in self.params[s]:
                p = side_point(s, t)
                if p not in seen:
                    seen.add(p)
                    out.append(p)
        return out

    def segments(self):
        for s in _SIDES:
            ps = self.params[s]
            for lo, hi in zip(ps, ps[1:]):
                yield s, lo, hi

    def segment_points(self, seg) -> tuple:
        s, lo, hi = seg
        return side_point(s, lo), side_point(s, hi)

    def _containing(self, s: int, t: float):
        ps = self.params[s]
        k = bisect_right(ps, t)
        if k == 0 or k == len(ps):
            return None
        return s, ps[k - 1], ps[k]

    def encroached_segment(self, c: Point) -> Optional[tuple]:
        """Boundary segment whose diametral disk holds c strictly inside.

        A point outside the closed unit square is reported against the
        segment of the side it is furthest beyond, at its clamped position.
        """
        x, y = c
        out = [(-y, 0), (x - 1.0, 1), (y - 1.0, 2), (-x, 3)]
        worst, s = max(out)
        if worst > 0:
            t = min(max(x if s in (0, 2) else y, 0.0), 1.0)
            seg = self._containing(s, t)
            if seg is None:  # clamped to the far corner
                ps = self.params[s]
                seg = (s, ps[-2], ps[-1])
            return seg
        for s in _SIDES:
            t = x if s in (0, 2) else y
            seg = self._containing(s, t)
            if seg is None:
                continue
            a, b = self.segment_points(seg)
            if encroaches(c, a, b):
                return seg
        return None

    def split(self, seg) -> Point:
        s, lo, hi = seg
        mid = 0.5 * (lo + hi)
        insort(self.params[s], mid)
        self.split_count += 1
        return side_point(s, mid)

    def halves(self, seg, mid_point: Point):
        s, lo, hi = seg
        mid = mid_point[0] if s in (0, 2) else mid_point[1]
        return (s, lo, mid), (s, mid, hi)

    def is_boundary(self, p: Point) -> bool:
        return p[0] in (0.0, 1.0) or p[1] in (0.0, 1.0)


class EncroachmentResult(NamedTuple):
    accept: bool
    segment: Optional[tuple] = None
    midpoint: Optional[Point] = None


def handle_encroachment(frame: BoundingFrame, candidate: Point) -> EncroachmentResult:
    """Accept the candidate, or report the segment to split and its midpoint.

    The frame is not modified; callers split via ``frame.split`` once they
    commit to inserting the midpoint.
    """
    seg = frame.encroached_segment(candidate)
    if seg is None:
        return EncroachmentResult(True)
    s, lo, hi = seg
    return EncroachmentResult(False, seg, side_point(s, 0.5 * (lo + hi)))
