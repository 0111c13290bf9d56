"""Incremental Delaunay triangulation on a flat half-edge layout.

Triangle ``t`` owns half-edges ``3t, 3t+1, 3t+2``; half-edge ``e`` runs from
``V[e]`` to ``V[next(e)]`` and ``H[e]`` is its twin (or -1 on the hull).
Triangles are counter-clockwise.  Point location walks from the triangle
created by the previous insertion.  Cocircular ties are broken by symbolic
perturbation keyed on vertex index, so the result is deterministic.
"""

from __future__ import annotations

import math
from typing import Iterator, List, Optional, Sequence

from .exceptions import DegenerateError, DuplicatePointError, OutsideHullError
from .geometry import Point, Triangle, dist, radius_edge_ratio
from .predicates import incircle_sos, orient2d


def _nxt(e):
    return e - 2 if e % 3 == 2 else e + 1


def _prv(e):
    return e + 2 if e % 3 == 0 else e - 1


class Triangulation:
    """Delaunay triangulation of a growing planar point set."""

    def __init__(self):
        self.points: List[Point] = []
        self.V: List[int] = []
        self.H: List[int] = []
        self._free: List[int] = []
        self._vedge: List[int] = []      # some outgoing half-edge per vertex
        self._hull_edge: List[int] = []  # outgoing hull half-edge, or -1
        self._index = {}
        self._last = 0
        self.last_created: List[int] = []
        self.flip_count = 0
        self.walk_steps = 0
        self.kinds: List[int] = []
        self.frame = None

    # -- construction ---------------------------------------------------

    @classmethod
    def build(cls, pts: Sequence[Point]) -> "Triangulation":
        """Delaunay triangulation of ``pts`` (vertex i is pts[i])."""
        t = cls()
        pts = [(float(p[0]), float(p[1])) for p in pts]
        if len(pts) < 3:
            raise DegenerateError("need at least three points")
        for i, p in enumerate(pts):
            if p in t._index:
                raise DuplicatePointError(f"duplicate point {p}")
            t._index[p] = i
        t.points = pts
        n = len(pts)
        t._vedge = [-1] * n
        t._hull_edge = [-1] * n
        order = sorted(range(n), key=lambda i: pts[i])
        # collinear prefix of the sweep
        a, b = order[0], order[1]
        k = 2
        while k < n and t._orient(a, b, order[k]) == 0:
            k += 1
        if k == n:
            raise DegenerateError("all points are collinear")
        apex = order[k]
        line = order[:k]
        left = t._orient(a, b, apex) > 0
        new = []
        for j in range(k - 1):
            u, w = line[j], line[j + 1]
            tri = t._new_tri(u, w, apex) if left else t._new_tri(w, u, apex)
            new.append(tri)
        for j in range(len(new) - 1):
            # shared edge between consecutive fan triangles
            if left:
                t._link(3 * new[j] + 1, 3 * new[j + 1] + 2)
            else:
                t._link(3 * new[j] + 2, 3 * new[j + 1] + 1)
        t._rebuild_hull()
        t._last = new[-1]
        prev = apex
        for i in order[k + 1:]:
            t._extend_hull(prev, i)
            prev = i
        return t

    def _rebuild_hull(self):
        self._hull_next = {}
        self._hull_prev = {}
        for e in range(len(self.V)):
            if self.V[e] >= 0 and self.H[e] < 0:
                a, b = self.V[e], self.V[_nxt(e)]
                self._hull_edge[a] = e
                self._hull_next[a] = b
                self._hull_prev[b] = a

    def _extend_hull(self, r: int, p: int):
        """Add vertex p, known to lie strictly outside the hull, near hull vertex r."""
        px, py = self.points[p]
        pts = self.points
        hn, hp = self._hull_next, self._hull_prev

        def visible(a):
            ax, ay = pts[a]
            bx, by = pts[hn[a]]
            return orient2d(ax, ay, bx, by, px, py) < 0

        s = r
        if not visible(s):
            s = hp[r]
            if not visible(s):
                raise DegenerateError("hull extension found no visible edge")
        guard = 0
        while visible(hp[s]) and hp[s] != r and guard < len(hn):
            s = hp[s]
            guard += 1
        v = s
        prev_tri = -1
        first_tri = -1
        created = []
        while visible(v):
            w = hn[v]
            he = self._hull_edge[v]
            t = self._new_tri(w, v, p)
            self._link(3 * t, he)
            self._hull_edge[v] = -1
            if prev_tri >= 0:
                self._link(3 * t + 1, 3 * prev_tri + 2)
            else:
                first_tri = t
            prev_tri = t
            created.append(t)
            if v != s:
                del hn[v]
                del hp[v]
            v = w
        # v is the end of the visible chain
        hn[s] = p
        hp[p] = s
        hn[p] = v
        hp[v] = p
        self._hull_edge[s] = 3 * first_tri + 1
        self._hull_edge[p] = 3 * prev_tri + 2
        self._last = prev_tri
        stack = [3 * t for t in created]
        self._legalize(stack, p)

    # -- low level ------------------------------------------------------

    def _orient(self, a, b, c):
        (ax, ay), (bx, by), (cx, cy) = self.points[a], self.points[b], self.points[c]
        return orient2d(ax, ay, bx, by, cx, cy)

    def _new_tri(self, a, b, c):
        if self._free:
            t = self._free.pop()
            e = 3 * t
            self.V[e], self.V[e + 1], self.V[e + 2] = a, b, c
            self.H[e] = self.H[e + 1] = self.H[e + 2] = -1
        else:
            t = len(self.V) // 3
            e = 3 * t
            self.V.extend((a, b, c))
            self.H.extend((-1, -1, -1))
        self._vedge[a] = e
        self._vedge[b] = e + 1
        self._vedge[c] = e + 2
        return t

    def _link(self, e1, e2):
        self.H[e1] = e2
        if e2 >= 0:
            self.H[e2] = e1

    def _set_outer(self, e, tw):
        """Give half-edge e the twin tw, tracking hull edges."""
        self.H[e] = tw
        if tw >= 0:
            self.H[tw] = e
        else:
            self._hull_edge[self.V[e]] = e

    def _legalize(self, stack, p):
        """Lawson flips; each stacked half-edge has p as its opposite vertex."""
        V, H, pts = self.V, self.H, self.points
        pp = pts[p]
        while stack:
            e = stack.pop()
            h = H[e]
            if h < 0:
                continue
            a, b = V[e], V[_nxt(e)]
            d = V[_prv(h)]
            if incircle_sos(pts[a], pts[b], pp, pts[d], (a, b, p, d)) <= 0:
                continue
            self.flip_count += 1
            t1, t2 = e // 3, h // 3
            # outer twins before rewriting
            bp_tw = H[_nxt(e)]
            pa_tw = H[_prv(e)]
            ad_tw = H[_nxt(h)]
            db_tw = H[_prv(h)]
            b1, b2 = 3 * t1, 3 * t2
            V[b1], V[b1 + 1], V[b1 + 2] = a, d, p
            V[b2], V[b2 + 1], V[b2 + 2] = d, b, p
            self._set_outer(b1, ad_tw)
            self._link(b1 + 1, b2 + 2)
            self._set_outer(b1 + 2, pa_tw)
            self._set_outer(b2, db_tw)
            self._set_outer(b2 + 1, bp_tw)
            self._vedge[a] = b1
            self._vedge[d] = b2
            self._vedge[b] = b2 + 1
            self._vedge[p] = b1 + 2
            stack.append(b1)
            stack.append(b2)

    # -- point location -------------------------------------------------

    def _walk(self, x, y, start):
        """Return (half-edge, code): code 0 inside triangle of e, 1 on edge e,
        2 at vertex V[e], -1 outside hull across hull edge e."""
        V, H, pts = self.V, self.H, self.points
        t = start
        if t < 0 or 3 * t >= len(V) or V[3 * t] < 0:
            t = self._any_triangle()
        limit = 4 * (len(V) // 3) + 16
        steps = 0
        rot = 0
        while steps < limit:
            steps += 1
            base = 3 * t
            moved = False
            zero_e = -1
            zeros = 0
            for k in range(3):
                e = base + (k + rot) % 3
                ax, ay = pts[V[e]]
                bx, by = pts[V[_nxt(e)]]
                o = orient2d(ax, ay, bx, by, x, y)
                if o < 0:
                    h = H[e]
                    if h < 0:
                        self.walk_steps += steps
                        return e, -1
                    t = h // 3
                    moved = True
                    break
                if o == 0:
                    zeros += 1
                    zero_e = e if zeros == 1 else zero_e
                    if zeros == 2:
                        zero_e2 = e
            if moved:
                rot = (rot + 1) % 3
                continue
            self.walk_steps += steps
            if zeros == 0:
                return base, 0
            if zeros == 1:
                return zero_e, 1
            # two collinear edges meet at the shared vertex
            if _nxt(zero_e) == zero_e2:
                return zero_e2, 2
            return zero_e, 2
        return self._scan(x, y)

    def _scan(self, x, y):
        V, H, pts = self.V, self.H, self.points
        for t in range(len(V) // 3):
            base = 3 * t
            if V[base] < 0:
                continue
            zeros = []
            ok = True
            for e in (base, base + 1, base + 2):
                ax, ay = pts[V[e]]
                bx, by = pts[V[_nxt(e)]]
                o = orient2d(ax, ay, bx, by, x, y)
                if o < 0:
                    ok = False
                    break
                if o == 0:
                    zeros.append(e)
            if ok:
                if not zeros:
                    return base, 0
                if len(zeros) == 1:
                    return zeros[0], 1
                e1, e2 = zeros
                return (e2, 2) if _nxt(e1) == e2 else (e1, 2)
        for e in range(len(V)):
            if V[e] >= 0 and H[e] < 0:
                ax, ay = pts[V[e]]
                bx, by = pts[V[_nxt(e)]]
                if orient2d(ax, ay, bx, by, x, y) < 0:
                    return e, -1
        raise DegenerateError("point location failed")

    def _any_triangle(self):
        for t in range(len(self.V) // 3):
            if self.V[3 * t] >= 0:
                return t
        raise DegenerateError("empty triangulation")

    def locate(self, p: Point) -> int:
        """Index of a triangle whose closure contains p, or -1 outside the hull."""
        e, code = self._walk(float(p[0]), float(p[1]), self._last)
        return -1 if code < 0 else e // 3

    # -- insertion ------------------------------------------------------

    def insert(self, p: Point, hint: int = -1) -> Optional[int]:
        """Insert p and return its vertex index; None if p is already present.

        Raises OutsideHullError when p is outside the triangulated region.
        """
        p = (float(p[0]), float(p[1]))
        if p in self._index:
            return None
        e, code = self._walk(p[0], p[1], self._last if hint < 0 else hint)
        if code == -1:
            raise OutsideHullError(f"{p} lies outside the convex hull")
        if code == 2:
            return None
        v = len(self.points)
        self.points.append(p)
        self._index[p] = v
        self._vedge.append(-1)
        self._hull_edge.append(-1)
        if code == 0:
            self._split_triangle(e // 3, v)
        else:
            self._split_edge(e, v)
        return v

    def _split_triangle(self, t, p):
        V, H = self.V, self.H
        base = 3 * t
        a, b, c = V[base], V[base + 1], V[base + 2]
        h0, h1, h2 = H[base], H[base + 1], H[base + 2]
        V[base + 2] = p  # t becomes (a, b, p)
        t1 = self._new_tri(b, c, p)
        t2 = self._new_tri(c, a, p)
        self._vedge[a] = base
        self._vedge[p] = base + 2
        b1, b2 = 3 * t1, 3 * t2
        self._set_outer(base, h0)
        self._set_outer(b1, h1)
        self._set_outer(b2, h2)
        self._link(base + 1, b1 + 2)
        self._link(b1 + 1, b2 + 2)
        self._link(b2 + 1, base + 2)
        self.last_created = [t, t1, t2]
        self._last = t
        self._legalize([base, b1, b2], p)

    def _split_edge(self, e, p):
        V, H = self.V, self.H
        h = H[e]
        a, b, c = V[e], V[_nxt(e)], V[_prv(e)]
        tb = e // 3
        bc_tw = H[_nxt(e)]
        ca_tw = H[_prv(e)]
        # reuse the triangle of e for (b, c, p)
        base = 3 * tb
        V[base], V[base + 1], V[base + 2] = b, c, p
        self._vedge[b] = base
        self._vedge[c] = base + 1
        self._vedge[p] = base + 2
        t1 = self._new_tri(c, a, p)
        b1 = 3 * t1
        self._set_outer(base, bc_tw)
        self._set_outer(b1, ca_tw)
        self._link(base + 1, b1 + 2)
        stack = [base, b1]
        created = [tb, t1]
        if h >= 0:
            d = V[_prv(h)]
            ad_tw = H[_nxt(h)]
            db_tw = H[_prv(h)]
            t2 = h // 3
            b2 = 3 * t2
            V[b2], V[b2 + 1], V[b2 + 2] = a, d, p
            self._vedge[a] = b2
            self._vedge[d] = b2 + 1
            t3 = self._new_tri(d, b, p)
            b3 = 3 * t3
            self._set_outer(b2, ad_tw)
            self._set_outer(b3, db_tw)
            self._link(b2 + 1, b3 + 2)   # d->p / p->d
            self._link(b1 + 1, b2 + 2)   # a->p / p->a
            self._link(b3 + 1, base + 2)  # b->p / p->b
            stack += [b2, b3]
            created += [t2, t3]
        else:
            # p lands on the hull edge a->b
            self.H[b1 + 1] = -1
            self.H[base + 2] = -1
            self._hull_edge[a] = b1 + 1
            self._hull_edge[p] = base + 2
            if hasattr(self, "_hull_next"):
                self._hull_next[a] = p
                self._hull_prev[p] = a
                self._hull_next[p] = b
                self._hull_prev[b] = p
        self.last_created = created
        self._last = tb
        self._legalize(stack, p)

    # -- queries --------------------------------------------------------

    def vertex_index(self, p: Point) -> Optional[int]:
        return self._index.get((float(p[0]), float(p[1])))

    def is_hull_vertex(self, v: int) -> bool:
        e = self._hull_edge[v]
        return e >= 0 and self.V[e] == v and self.H[e] < 0

    def triangle(self, t: int) -> tuple:
        b = 3 * t
        return self.V[b], self.V[b + 1], self.V[b + 2]

    def triangle_ids(self) -> List[int]:
        V = self.V
        return [t for t in range(len(V) // 3) if V[3 * t] >= 0]

    def triangles(self) -> List[tuple]:
        V = self.V
        return [(V[b], V[b + 1], V[b + 2]) for b in range(0, len(V), 3) if V[b] >= 0]

    def triangle_points(self) -> List[Triangle]:
        P = self.points
        return [Triangle(P[a], P[b], P[c]) for a, b, c in self.triangles()]

    @property
    def n_triangles(self) -> int:
        return len(self.V) // 3 - len(self._free)

    def half_edges(self) -> Iterator[int]:
        """One half-edge per undirected edge."""
        V, H = self.V, self.H
        for e in range(len(V)):
            if V[e] >= 0 and (H[e] < 0 or e < H[e]):
                yield e

    def edges(self) -> List[tuple]:
        V = self.V
        out = []
        for e in self.half_edges():
            a, b = V[e], V[_nxt(e)]
            out.append((a, b) if a < b else (b, a))
        return out

    def edge_info(self, e: int):
        """(a, b, left third vertex, right third vertex or -1) for half-edge e."""
        V, H = self.V, self.H
        h = H[e]
        return V[e], V[_nxt(e)], V[_prv(e)], (V[_prv(h)] if h >= 0 else -1)

    def outgoing(self, v: int) -> List[int]:
        """Outgoing half-edges of v in counter-clockwise order."""
        V, H = self.V, self.H
        start = self._hull_edge[v]
        if start < 0 or V[start] != v or H[start] >= 0:
            start = self._vedge[v]
        out = [start]
        e = start
        while True:
            tw = H[_prv(e)]
            if tw < 0 or tw == start:
                break
            e = tw
            out.append(e)
        return out

    def incident_triangles(self, v: int) -> List[int]:
        return [e // 3 for e in self.outgoing(v)]

    def neighbors(self, v: int) -> List[int]:
        V = self.V
        out = []
        es = self.outgoing(v)
        for e in es:
            out.append(V[_nxt(e)])
        if self.is_hull_vertex(v):
            out.append(V[_prv(es[-1])])
        return out

    def find_edge(self, a: int, b: int) -> int:
        """Half-edge a->b, b->a, or -1 if ab is not an edge."""
        V = self.V
        for e in self.outgoing(a):
            if V[_nxt(e)] == b:
                return e
        for e in self.outgoing(b):
            if V[_nxt(e)] == a:
                return e
        return -1

    def new_edges(self, v: int) -> List[int]:
        """Half-edges incident to v plus the link edges opposite it."""
        out = []
        for e in self.outgoing(v):
            out.append(e)
            out.append(_nxt(e))
        return out

    def check(self) -> None:
        """Raise AssertionError unless adjacency and orientation are consistent."""
        V, H, pts = self.V, self.H, self.points
        for e in range(len(V)):
            if V[e] < 0:
                continue
            h = H[e]
            if h >= 0:
                assert H[h] == e, f"asymmetric twin at {e}"
                assert V[h] == V[_nxt(e)] and V[_nxt(h)] == V[e], f"twin mismatch at {e}"
            if e % 3 == 0:
                assert self._orient(V[e], V[e + 1], V[e + 2]) > 0, f"triangle {e // 3} not ccw"
        nv = len(pts)
        ne = len(self.edges())
        nt = self.n_triangles
        nh = sum(1 for e in range(len(V)) if V[e] >= 0 and H[e] < 0)
        # Euler for a triangulated convex region
        assert nv - ne + nt == 1, "Euler relation violated"
        assert 2 * ne == 3 * nt + nh

    def is_delaunay(self) -> bool:
        """Local Delaunay check on every interior edge."""
        V, H, pts = self.V, self.H, self.points
        for e in self.half_edges():
            h = H[e]
            if h < 0:
                continue
            a, b, c, d = V[e], V[_nxt(e)], V[_prv(e)], V[_prv(h)]
            if incircle_sos(pts[a], pts[b], pts[c], pts[d], (a, b, c, d)) > 0:
                return False
        return True

    def min_angle(self) -> float:
        """Smallest angle of the triangulation, radians."""
        best = math.pi
        P = self.points
        for a, b, c in self.triangles():
            r = radius_edge_ratio((P[a], P[b], P[c]))
            best = min(best, math.asin(min(1.0, 1.0 / (2.0 * r))))
        return best


def build(pts: Sequence[Point]) -> Triangulation:
    return Triangulation.build(pts)


def insert(t: Triangulation, p: Point) -> Triangulation:
    t.insert(p)
    return t


def bad_triangles(t: Triangulation, beta: float) -> List[Triangle]:
    """Triangles with radius-edge ratio above beta, shortest edge first."""
    P = t.points
    out = []
    for a, b, c in t.triangles():
        tri = (P[a], P[b], P[c])
        if radius_edge_ratio(tri) > beta:
            short = min(dist(P[a], P[b]), dist(P[b], P[c]), dist(P[c], P[a]))
            out.append((short, Triangle(*tri)))
    out.sort(key=lambda s: (s[0], s[1]))
    return [tr for _, tr in out]


class _Grid:
    """Uniform bucket grid over the vertex set for range queries."""

    def __init__(self, pts):
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        self.x0, self.y0 = min(xs), min(ys)
        span = max(max(xs) - self.x0, max(ys) - self.y0) or 1.0
        k = max(1, int(math.sqrt(len(pts))))
        self.h = span / k
        self.cells = {}
        for i, p in enumerate(pts):
            key = (int((p[0] - self.x0) / self.h), int((p[1] - self.y0) / self.h))
            self.cells.setdefault(key, []).append(i)

    def near(self, cx, cy, r):
        h = self.h
        i0 = int(math.floor((cx - r - self.x0) / h))
        i1 = int(math.floor((cx + r - self.x0) / h))
        j0 = int(math.floor((cy - r - self.y0) / h))
        j1 = int(math.floor((cy + r - self.y0) / h))
        if (i1 - i0 + 1) * (j1 - j0 + 1) > 4 * len(self.cells) + 16:
            for ids in self.cells.values():
                yield from ids
            return
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                ids = self.cells.get((i, j))
                if ids:
                    yield from ids


def loose_pairs_of(t: Triangulation, beta: float) -> list:
    """All loose pairs of the vertex set, as LoosePair records.

    Each Delaunay edge is screened with its two third vertices, then every
    surviving side is confirmed against all vertices near the leaf.  The
    outer side of a hull edge has no triangle and is never counted.
    """
    from .geometry import Side, leaf_apex, leaf_contains, leaf_disks
    from .loose_pairs import LoosePair

    P = t.points
    grid = None
    out = []
    for e in t.half_edges():
        a, b, l, r = t.edge_info(e)
        p, q = P[a], P[b]
        for side, third, other in ((Side.LEFT, l, r), (Side.RIGHT, r, l)):
            if third < 0:
                continue
            apex = leaf_apex(p, q, beta, side)
            if leaf_contains(p, q, apex, side, P[third]):
                continue
            if other >= 0 and leaf_contains(p, q, apex, side, P[other]):
                continue
            if grid is None:
                grid = _Grid(P)
            disk = leaf_disks(p, q, beta)[0 if side == Side.LEFT else 1]
            occupied = False
            for i in grid.near(disk.center[0], disk.center[1], disk.radius * (1 + 1e-9)):
                if i != a and i != b and leaf_contains(p, q, apex, side, P[i]):
                    occupied = True
                    break
            if not occupied:
                out.append(LoosePair(p, q, side, dist(p, q)))
                break
    out.sort(key=lambda lp: (lp.length, lp.p, lp.q))
    return out
