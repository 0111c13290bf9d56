"""Loose-pair removal: repeatedly take the shortest loose pair and insert
its off-center (or, in circumcenter mode, Ruppert-style circumcenters of
bad triangles), splitting encroached boundary segments on the way."""

from __future__ import annotations

import heapq
import logging
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from ._gc import gc_paused
from .delaunay import Triangulation
from .exceptions import ConfigError
from .frame import BoundingFrame, frame_points
from .loose_pairs import pull_inside
from .geometry import (
    Point,
    Side,
    beta_from_angle,
    circumcenter,
    dist,
    encroaches,
    leaf_apex,
    leaf_contains,
    radius_edge_ratio,
)

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

KIND_INPUT, KIND_BOUNDARY, KIND_STEINER = 0, 1, 2

MODES = ("off_center", "circumcenter")


@dataclass
class RefinerConfig:
    beta: float = SQRT2
    mode: str = "off_center"
    max_insertions: Optional[int] = None
    record_lengths: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not math.isfinite(self.beta) or self.beta <= 0.5:
            raise ConfigError(f"beta must exceed 1/2, got {self.beta}")
        if self.experimental and self.max_insertions is None:
            raise ConfigError(
                f"beta={self.beta:.6g} is below sqrt(2); experimental runs need max_insertions")

    @property
    def experimental(self) -> bool:
        return self.beta < SQRT2 * (1.0 - 1e-12)

    @property
    def alpha(self) -> float:
        return math.asin(1.0 / (2.0 * self.beta))

    @classmethod
    def from_min_angle(cls, degrees: float, **kw) -> "RefinerConfig":
        return cls(beta=beta_from_angle(degrees), **kw)


@dataclass
class RefinementStats:
    steiner_count: int = 0
    boundary_split_count: int = 0
    rejected_encroaching_count: int = 0
    final_triangle_count: int = 0
    min_angle_deg: float = 0.0
    max_radius_edge: float = 0.0
    insertions: int = 0
    capped: bool = False
    skipped_duplicates: int = 0
    elapsed: float = 0.0
    handled_lengths: List[float] = field(default_factory=list)


def initial_mesh(points: Sequence[Point]):
    """Triangulation of frame + input with vertex kinds, plus the frame."""
    frame = BoundingFrame()
    fpts = frame_points()
    pts = list(fpts) + [p for p in points]
    tri = Triangulation.build(pts)
    tri.kinds = [KIND_BOUNDARY] * len(fpts) + [KIND_INPUT] * len(points)
    return tri, frame


def quality(tri: Triangulation) -> tuple:
    """(min angle in degrees, max radius-edge ratio) over all triangles."""
    P = tri.points
    worst = 0.0
    for a, b, c in tri.triangles():
        worst = max(worst, radius_edge_ratio((P[a], P[b], P[c])))
    ang = math.degrees(math.asin(min(1.0, 1.0 / (2.0 * worst)))) if worst > 0 else 60.0
    return ang, worst


class _Refiner:
    def __init__(self, tri, frame, cfg: RefinerConfig):
        self.tri = tri
        self.frame = frame
        self.cfg = cfg
        self.stats = RefinementStats()

    # -- shared helpers --------------------------------------------------

    def budget_left(self) -> bool:
        cap = self.cfg.max_insertions
        if cap is not None and self.stats.insertions >= cap:
            self.stats.capped = True
            return False
        return True

    def _insert(self, p: Point, kind: int) -> Optional[int]:
        v = self.tri.insert(p)
        if v is None:
            self.stats.skipped_duplicates += 1
            return None
        self.tri.kinds.append(kind)
        self.stats.insertions += 1
        if kind == KIND_STEINER:
            self.stats.steiner_count += 1
        return v

    def split_boundary(self, seg) -> List[int]:
        """Split seg at its midpoint and keep splitting encroached halves."""
        tri, frame = self.tri, self.frame
        added = []
        stack = [seg]
        while stack and self.budget_left():
            seg = stack.pop()
            m = frame.split(seg)
            v = self._insert(m, KIND_BOUNDARY)
            self.stats.boundary_split_count += 1
            if v is None:
                continue
            added.append(v)
            for half in frame.halves(seg, m):
                a, b = frame.segment_points(half)
                ia, ib = tri.vertex_index(a), tri.vertex_index(b)
                e = tri.find_edge(ia, ib)
                if e < 0:
                    continue
                _, _, l, r = tri.edge_info(e)
                w = l if r < 0 else r
                if encroaches(tri.points[w], a, b):
                    stack.append(half)
        return added

    def finish(self, t0):
        st = self.stats
        st.final_triangle_count = self.tri.n_triangles
        st.min_angle_deg, st.max_radius_edge = quality(self.tri)
        st.elapsed = time.perf_counter() - t0
        return self.tri, st

    # -- off-center mode ---------------------------------------------------

    def _push_edge(self, heap, a, b):
        P = self.tri.points
        p, q = P[a], P[b]
        if q < p:
            p, q, a, b = q, p, b, a
        heapq.heappush(heap, (dist(p, q), p, q, a, b))

    def _push_vertex_edges(self, heap, v):
        for w in self.tri.neighbors(v):
            self._push_edge(heap, v, w)

    def loose_side(self, a, b):
        """(side, third vertex) if the Delaunay edge ab is loose, else None.

        Uses the two triangles on ab: a leaf is empty iff neither third
        vertex is inside it.
        """
        tri = self.tri
        e = tri.find_edge(a, b)
        if e < 0:
            return None
        ea, eb, l, r = tri.edge_info(e)
        if ea != a:  # orient relative to a->b
            l, r = r, l
        P = tri.points
        p, q = P[a], P[b]
        beta = self.cfg.beta
        for side, third, other in ((Side.LEFT, l, r), (Side.RIGHT, r, l)):
            if third < 0:
                continue
            apex = leaf_apex(p, q, beta, side)
            if leaf_contains(p, q, apex, side, P[third]):
                continue
            if other >= 0 and leaf_contains(p, q, apex, side, P[other]):
                continue
            return side, third, apex
        return None

    def off_center_of(self, a, b, side, third, apex) -> Point:
        P = self.tri.points
        p, q, r = P[a], P[b], P[third]
        # the Delaunay third vertex on the empty side is the only crescent
        # candidate; it is the moonstruck iff it lies in the outer disk
        rad = dist(apex, p)
        if dist(apex, r) < rad:
            return pull_inside(p, q, circumcenter(p, q, r))
        return pull_inside(p, q, apex)

    def run_off_center(self):
        tri = self.tri
        heap = []
        for a, b in tri.edges():
            self._push_edge(heap, a, b)
        lengths = self.stats.handled_lengths if self.cfg.record_lengths else None
        while heap and self.budget_left():
            L, p, q, a, b = heapq.heappop(heap)
            hit = self.loose_side(a, b)
            if hit is None:
                continue
            side, third, apex = hit
            if lengths is not None:
                lengths.append(L)
            c = self.off_center_of(a, b, side, third, apex)
            seg = self.frame.encroached_segment(c)
            if seg is not None:
                self.stats.rejected_encroaching_count += 1
                for v in self.split_boundary(seg):
                    self._push_vertex_edges(heap, v)
                heapq.heappush(heap, (L, p, q, a, b))
                continue
            v = self._insert(c, KIND_STEINER)
            if v is None:
                continue
            self._push_vertex_edges(heap, v)
            # the other leaf may still be empty
            heapq.heappush(heap, (L, p, q, a, b))

    # -- circumcenter mode ------------------------------------------------

    def _push_triangle(self, heap, t):
        tri = self.tri
        P = tri.points
        a, b, c = tri.triangle(t)
        ratio = radius_edge_ratio((P[a], P[b], P[c]))
        if ratio <= self.cfg.beta:
            return
        short = min(dist(P[a], P[b]), dist(P[b], P[c]), dist(P[c], P[a]))
        key = tuple(sorted((P[a], P[b], P[c])))
        heapq.heappush(heap, (short, key, a, b, c))

    def _triangle_alive(self, a, b, c) -> bool:
        e = self.tri.find_edge(a, b)
        if e < 0:
            return False
        ea, eb, l, r = self.tri.edge_info(e)
        return (l if ea == a else r) == c

    def run_circumcenter(self):
        tri = self.tri
        heap = []
        for t in tri.triangle_ids():
            self._push_triangle(heap, t)
        while heap and self.budget_left():
            short, key, a, b, c = heapq.heappop(heap)
            if not self._triangle_alive(a, b, c):
                continue
            P = tri.points
            cc = circumcenter(P[a], P[b], P[c])
            seg = self.frame.encroached_segment(cc)
            if seg is not None:
                self.stats.rejected_encroaching_count += 1
                for v in self.split_boundary(seg):
                    for t in tri.incident_triangles(v):
                        self._push_triangle(heap, t)
                if self._triangle_alive(a, b, c):
                    heapq.heappush(heap, (short, key, a, b, c))
                continue
            v = self._insert(cc, KIND_STEINER)
            if v is None:
                continue
            for t in tri.incident_triangles(v):
                self._push_triangle(heap, t)


def refine(points: Sequence[Point], cfg: Optional[RefinerConfig] = None):
    """Refine normalized input points inside the unit-square frame.

    Returns (Triangulation, RefinementStats); the triangulation carries a
    ``kinds`` list (0 input, 1 boundary, 2 Steiner) parallel to its points.
    """
    cfg = cfg or RefinerConfig()
    t0 = time.perf_counter()
    with gc_paused():
        tri, frame = initial_mesh(points)
        r = _Refiner(tri, frame, cfg)
        if cfg.mode == "off_center":
            r.run_off_center()
        else:
            r.run_circumcenter()
    tri.frame = frame
    log.info("baseline %s: %d steiner, %d splits", cfg.mode,
             r.stats.steiner_count, r.stats.boundary_split_count)
    return r.finish(t0)


def continue_refinement(tri: Triangulation, frame: BoundingFrame, cfg: RefinerConfig):
    """Run the off-center loop on an existing mesh (used as a safety net)."""
    r = _Refiner(tri, frame, cfg)
    r.run_off_center()
    return r.stats
