"""Quadtree-driven loose-pair removal.

Nodes are processed deepest level first.  Each point carries an
activation depth ACT (its initial leaf, or the cell it was stored in) and
may serve as a pair endpoint only while ACT >= i >= ACT - c_span.  Every
stored point, active or not, blocks leaves and crescents.

Candidate pairs at a point p are pruned with an angular certificate: if
the points within rho of p leave no angular gap of pi or more, every
empty disk touching p has radius at most rho / (2 cos(gap/2)), so no loose
pair at p is longer than that over beta.
"""

from __future__ import annotations

import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from ._gc import gc_paused
from .baseline import (
    KIND_BOUNDARY,
    KIND_INPUT,
    KIND_STEINER,
    RefinerConfig,
    continue_refinement,
    quality,
)
from .constants import RefinementConstants
from .delaunay import Triangulation, loose_pairs_of
from .exceptions import ConfigError, QuadtreeError
from .frame import BoundingFrame, frame_points
from .geometry import Side, dist, encroaches, leaf_apex, leaf_contains, leaf_disks, orientation
from .loose_pairs import off_center
from .quadtree import Quadtree, QuadtreeParams

log = logging.getLogger(__name__)

CERT_SLACK = 1e-6
WITNESSES = 12


class LevelHeap:
    """Per-depth FIFO buckets; pops come from the deepest non-empty level."""

    def __init__(self, depth: int):
        self.buckets = [deque() for _ in range(depth + 1)]
        self.queued = set()
        self.level = depth
        self.pushes: Dict[tuple, int] = {}

    def push(self, nd) -> bool:
        if nd.key in self.queued:
            return False
        self.queued.add(nd.key)
        self.buckets[nd.depth].append(nd)
        self.pushes[nd.key] = self.pushes.get(nd.key, 0) + 1
        return True

    def pop(self):
        while self.level >= 0:
            b = self.buckets[self.level]
            if b:
                nd = b.popleft()
                self.queued.discard(nd.key)
                return nd
            self.level -= 1
        return None

    def __len__(self):
        return len(self.queued)

    def max_reschedules(self) -> int:
        return max(self.pushes.values(), default=1) - 1


@dataclass
class FastStats:
    steiner_count: int = 0
    boundary_split_count: int = 0
    rejected_encroaching_count: int = 0
    insertions: int = 0
    skipped_duplicates: int = 0
    capped: bool = False
    final_triangle_count: int = 0
    min_angle_deg: float = 0.0
    max_radius_edge: float = 0.0
    residual_loose: int = 0
    safety_net_used: bool = False
    safety_net_insertions: int = 0
    node_visits: int = 0
    max_reschedules: int = 0
    max_active_per_cell: int = 0
    pair_tests: int = 0
    deactivated: int = 0
    sandwich_misses: int = 0
    qt_depth: int = 0
    qt_nodes: int = 0
    qt_leaves: int = 0
    level_events: Dict[int, int] = field(default_factory=dict)
    time_quadtree: float = 0.0
    time_refine: float = 0.0
    time_delaunay: float = 0.0

    @property
    def elapsed(self) -> float:
        return self.time_quadtree + self.time_refine


class FastRefiner:
    """State of one run; ``observer`` receives hooks for instrumentation."""

    def __init__(self, points: Sequence, consts: Optional[RefinementConstants] = None,
                 max_insertions: Optional[int] = None, observer=None):
        self.consts = consts or RefinementConstants()
        self.beta = self.consts.beta
        if self.beta < math.sqrt(2.0) * (1 - 1e-12) and max_insertions is None:
            raise ConfigError("beta below sqrt(2) needs max_insertions")
        self.max_insertions = max_insertions
        self.observer = observer
        self.stats = FastStats()
        self.frame = BoundingFrame()
        t0 = time.perf_counter()
        fpts = frame_points()
        pts = list(fpts) + [tuple(map(float, p)) for p in points]
        params = QuadtreeParams(self.consts.c_low, self.consts.c_up)
        self.tree = Quadtree.build(pts, params)
        self.stats.time_quadtree = time.perf_counter() - t0
        self.kinds = [KIND_BOUNDARY] * len(fpts) + [KIND_INPUT] * len(points)
        self.P = self.tree.points
        self.index = {p: i for i, p in enumerate(self.P)}
        self.act: List[int] = []
        self.dead: List[bool] = []
        self.cert: List[float] = []
        self.near: List[list] = []
        self.insert_level: List[int] = []
        for i, p in enumerate(self.P):
            leaf = self.tree.leaf_of(*p)
            self.act.append(leaf.depth)
            self.dead.append(False)
            self.cert.append(math.inf)
            self.near.append([])
            self.insert_level.append(-1)
            leaf.pts.append(i)
        self.nonloose = set()
        st = self.stats
        st.qt_depth = self.tree.max_depth
        st.qt_nodes = len(self.tree.nodes)
        st.qt_leaves = sum(1 for nd in self.tree.nodes.values() if nd.leaf)

    # -- helpers -----------------------------------------------------------

    def budget_left(self) -> bool:
        cap = self.max_insertions
        if cap is not None and self.stats.insertions >= cap:
            self.stats.capped = True
            return False
        return True

    def is_active(self, x: int, i: int) -> bool:
        return not self.dead[x] and self.act[x] >= i >= self.act[x] - self.consts.c_span

    def _bound(self, p: int, R: float) -> float:
        """Upper bound on the length of any loose pair at p (inf if unknown)."""
        c = self.cert[p]
        if c < R:
            return c
        x, y = self.P[p]
        two_b = 2.0 * self.beta
        rho = 2.0 ** -self.act[p]
        P = self.P
        boundary = x in (0.0, 1.0) or y in (0.0, 1.0)
        while True:
            ids = self.tree.ids_in_disk(x, y, rho)
            ids = [j for j in ids if j != p]
            if ids:
                self._remember(p, ids)
            if boundary or rho / two_b >= R:
                return math.inf
            if len(ids) >= 3:
                ang = sorted(math.atan2(P[j][1] - y, P[j][0] - x) for j in ids)
                gap = ang[0] + 2.0 * math.pi - ang[-1]
                for a, b in zip(ang, ang[1:]):
                    if b - a > gap:
                        gap = b - a
                if gap < math.pi - 1e-9:
                    L = rho / (two_b * math.cos(0.5 * gap)) * (1.0 + CERT_SLACK)
                    self.cert[p] = L
                    return L
            rho *= 2.0

    def _remember(self, p: int, ids):
        """Keep p's nearest points as cheap witnesses for occupied leaves."""
        if len(ids) > WITNESSES:
            P = self.P
            x, y = P[p]
            ids = sorted(ids, key=lambda j: (P[j][0] - x) ** 2 + (P[j][1] - y) ** 2)[:WITNESSES]
        self.near[p] = ids

    def _sides(self, a: int, b: int):
        p, q = self.P[a], self.P[b]
        # both on one side of the square: only the inward leaf counts
        for k in (0, 1):
            for v in (0.0, 1.0):
                if p[k] == v and q[k] == v:
                    inner = int(orientation(p, q, (0.5, 0.5)))
                    return [Side(inner)]
        return [Side.LEFT, Side.RIGHT]

    def _occupied(self, p, q, apex, s, cx, cy, rad, ids, a, b) -> bool:
        P = self.P
        lo2 = (rad * (1.0 - 1e-7)) ** 2
        hi2 = (rad * (1.0 + 1e-7)) ** 2
        for j in ids:
            if j == a or j == b:
                continue
            x = P[j]
            d2 = (x[0] - cx) ** 2 + (x[1] - cy) ** 2
            if d2 >= hi2:
                continue
            if d2 < lo2 or leaf_contains(p, q, apex, s, x):
                return True
        return False

    def loose_side(self, a: int, b: int) -> Optional[Side]:
        P = self.P
        p, q = P[a], P[b]
        disks = leaf_disks(p, q, self.beta)
        self.stats.pair_tests += 1
        near = self.near
        for s in self._sides(a, b):
            apex = leaf_apex(p, q, self.beta, s)
            (cx, cy), rad = disks[0 if s == Side.LEFT else 1]
            if self._occupied(p, q, apex, s, cx, cy, rad, near[a], a, b):
                continue
            if self._occupied(p, q, apex, s, cx, cy, rad, near[b], a, b):
                continue
            ids = self.tree.ids_in_disk(cx, cy, rad * (1.0 + 1e-9))
            if not self._occupied(p, q, apex, s, cx, cy, rad, ids, a, b):
                return s
        return None

    # -- insertion ---------------------------------------------------------

    def _store(self, r, kind: int, d: float, level: int) -> Optional[int]:
        if r in self.index:
            self.stats.skipped_duplicates += 1
            return None
        tree = self.tree
        try:
            nd = tree.qualifying_cell(r, level, d)
        except QuadtreeError:
            self.stats.sandwich_misses += 1
            nd = tree.node_at(level, r[0], r[1])
        v = tree.add_point(r)
        self.index[r] = v
        self.kinds.append(kind)
        self.act.append(nd.depth)
        self.dead.append(False)
        self.cert.append(math.inf)
        self.near.append([])
        self.insert_level.append(level)
        holder = tree.node_at(level, r[0], r[1])
        holder.pts.append(v)
        st = self.stats
        st.insertions += 1
        if kind == KIND_STEINER:
            st.steiner_count += 1
        if nd.depth == level and holder.depth == level:
            self.heap.push(holder)
        if self.observer is not None:
            self.observer.inserted(self, v, nd, level)
        return v

    def _nearest(self, x, y, start: float) -> float:
        r = start
        while r < 4.0:
            ids = self.tree.ids_in_disk(x, y, r)
            ds = [math.hypot(self.P[j][0] - x, self.P[j][1] - y) for j in ids]
            ds = [v for v in ds if v > 0]
            if ds:
                return min(ds)
            r *= 2.0
        return start

    def split_boundary(self, seg, level: int):
        frame = self.frame
        stack = [seg]
        while stack and self.budget_left():
            seg = stack.pop()
            s, lo, hi = seg
            m = frame.split(seg)
            self.stats.boundary_split_count += 1
            d = self._nearest(m[0], m[1], 0.5 * (hi - lo))
            if self._store(m, KIND_BOUNDARY, d, level) is None:
                continue
            for half in frame.halves(seg, m):
                a, b = frame.segment_points(half)
                cx, cy = 0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])
                rad = 0.5 * dist(a, b)
                for j in self.tree.ids_in_disk(cx, cy, rad * (1 + 1e-9)):
                    x = self.P[j]
                    if x != a and x != b and encroaches(x, a, b):
                        stack.append(half)
                        break

    def handle_pair(self, a: int, b: int, side: Side, level: int) -> bool:
        """Destroy the loose pair (a, b); False when nothing could be inserted."""
        P = self.P
        p, q = P[a], P[b]
        apex = leaf_apex(p, q, self.beta, side)
        rad = dist(apex, p)
        ids = self.tree.ids_in_disk(apex[0], apex[1], rad * (1.0 + 1e-9))
        cands = [P[j] for j in ids]
        res = off_center(p, q, self.beta, side, cands)
        r = res.steiner
        if self.observer is not None:
            self.observer.handling(self, a, b, side, res, level)
        seg = self.frame.encroached_segment(r)
        if seg is not None:
            self.stats.rejected_encroaching_count += 1
            before = self.stats.insertions
            self.split_boundary(seg, level)
            return self.stats.insertions > before
        return self._store(r, KIND_STEINER, min(dist(p, r), dist(q, r)), level) is not None

    # -- main loop ---------------------------------------------------------

    def process_point(self, p: int, i: int, size: float):
        R = self.consts.c_reach * size
        P = self.P
        guard = 0
        while self.budget_left():
            L = min(self._bound(p, R), R)
            x, y = P[p]
            ids = self.tree.ids_in_disk(x, y, L * (1.0 + 1e-12))
            cands = []
            for q in ids:
                if q == p or not self.is_active(q, i):
                    continue
                key = (p, q) if p < q else (q, p)
                if key in self.nonloose:
                    continue
                cands.append((dist(P[p], P[q]), key))
            cands.sort()
            hit = None
            for _, key in cands:
                s = self.loose_side(*key)
                if s is None:
                    self.nonloose.add(key)
                    continue
                hit = key, s
                break
            if hit is None:
                return
            (a, b), s = hit
            if not self.handle_pair(a, b, s, i):
                self.nonloose.add((a, b))
            guard += 1
            if guard > 10000:
                raise RuntimeError("pair handling does not converge")

    def process_node(self, nd, i: int):
        st = self.stats
        st.node_visits += 1
        st.level_events[i] = st.level_events.get(i, 0) + 1
        actives = [x for x in nd.pts if self.is_active(x, i)]
        if len(actives) > st.max_active_per_cell:
            st.max_active_per_cell = len(actives)
        for p in actives:
            if not self.budget_left():
                return
            self.process_point(p, i, nd.size)

    def promote(self, j: int, nodes_at):
        """Move points held at depth j up one level, deactivating expired ones."""
        span = self.consts.c_span
        for nd in nodes_at[j]:
            if not nd.pts:
                continue
            up = nd.parent
            for x in nd.pts:
                if self.act[x] - span <= j - 1:
                    up.pts.append(x)
                else:
                    self.dead[x] = True
                    self.stats.deactivated += 1
            nd.pts = []

    def run(self):
        t0 = time.perf_counter()
        tree = self.tree
        depth = tree.max_depth
        nodes_at = [[] for _ in range(depth + 1)]
        for nd in tree.nodes.values():
            nodes_at[nd.depth].append(nd)
        self.heap = LevelHeap(depth)
        for d in range(depth, -1, -1):
            for nd in nodes_at[d]:
                self.heap.push(nd)
        self.heap.pushes.clear()
        for nd in tree.nodes.values():
            self.heap.pushes[nd.key] = 1
        prev = depth
        if self.observer is not None:
            self.observer.stage_start(self, depth)
        while self.budget_left():
            nd = self.heap.pop()
            if nd is None:
                break
            i = nd.depth
            while i < prev:
                self.promote(prev, nodes_at)
                prev -= 1
                if self.observer is not None:
                    self.observer.stage_start(self, prev)
            self.process_node(nd, i)
        self.stats.max_reschedules = self.heap.max_reschedules()
        self.stats.time_refine = time.perf_counter() - t0

    def triangulate(self) -> Triangulation:
        t0 = time.perf_counter()
        tri = Triangulation.build(list(self.P))
        tri.kinds = list(self.kinds)
        tri.frame = self.frame
        self.stats.time_delaunay = time.perf_counter() - t0
        return tri


def fast_refine(points: Sequence, consts: Optional[RefinementConstants] = None,
                max_insertions: Optional[int] = None, safety_net: bool = True,
                observer=None):
    """Refine normalized points (inside [1/3, 2/3]^2).

    Returns (Triangulation, FastStats).  If the final sweep still finds a
    loose pair, the off-center loop finishes the job on the triangulation
    and ``stats.safety_net_used`` is set.
    """
    with gc_paused():
        fr = FastRefiner(points, consts, max_insertions, observer)
        fr.run()
        tri = fr.triangulate()
    st = fr.stats
    if not st.capped:
        residual = loose_pairs_of(tri, fr.beta)
        st.residual_loose = len(residual)
        if residual and safety_net:
            log.warning("fast refiner left %d loose pairs; finishing with baseline", len(residual))
            st.safety_net_used = True
            cfg = RefinerConfig(beta=fr.beta, max_insertions=max_insertions)
            extra = continue_refinement(tri, fr.frame, cfg)
            st.safety_net_insertions = extra.insertions
            st.steiner_count += extra.steiner_count
            st.boundary_split_count += extra.boundary_split_count
    st.final_triangle_count = tri.n_triangles
    st.min_angle_deg, st.max_radius_edge = quality(tri)
    return tri, st
