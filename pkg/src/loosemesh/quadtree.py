"""Balanced quadtree over the unit square.

Nodes live in a dict keyed by ``(depth, ix, iy)``; the cell of that key is
``[ix, ix+1) x [iy, iy+1)`` scaled by ``2**-depth`` (the last row and column
also own the closing edge of the square).  A node at depth ``k`` exists iff
all its ancestors exist, which lets "deepest node containing x" be found by
binary search over depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import DuplicatePointError, QuadtreeError

MAX_DEPTH = 60
FEW = 4

# eight neighbour directions: E, NE, N, NW, W, SW, S, SE
DIRS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))


def _link_table():
    # per child slot (a + 2b) and direction: (sibling slot, -1, -1) or
    # (-1, parent direction, slot inside the parent's neighbour)
    out = []
    for slot in range(4):
        a, b = slot & 1, slot >> 1
        row = []
        for dx, dy in DIRS:
            sx, sy = a + dx, b + dy
            if 0 <= sx <= 1 and 0 <= sy <= 1:
                row.append((sy * 2 + sx, -1, -1))
            else:
                px = dx if not 0 <= sx <= 1 else 0
                py = dy if not 0 <= sy <= 1 else 0
                row.append((-1, DIRS.index((px, py)), (sy & 1) * 2 + (sx & 1)))
        out.append(tuple(row))
    return tuple(out)


_LINKS = _link_table()


@dataclass
class QuadtreeParams:
    c_low: float = 0.5
    c_up: float = 6.0 * math.sqrt(2.0)

    def __post_init__(self):
        if not (self.c_low > 0 and self.c_up >= 2 * self.c_low):
            raise ValueError(f"need c_up >= 2 c_low > 0, got {self.c_low}, {self.c_up}")


class Node:
    __slots__ = ("depth", "ix", "iy", "size", "x0", "y0", "leaf", "parent",
                 "children", "nbr", "pts", "index", "key", "count", "few")

    def __init__(self, depth, ix, iy, parent=None):
        self.depth = depth
        self.ix = ix
        self.iy = iy
        self.size = 2.0 ** -depth
        self.x0 = ix * self.size
        self.y0 = iy * self.size
        self.leaf = True
        self.parent = parent
        self.children = None
        self.nbr = None
        self.pts = []     # ids held here by the refinement schedule
        self.index = []   # ids whose containing leaf is this node
        self.key = (depth, ix, iy)
        self.count = 0    # indexed points in the subtree
        self.few = []     # their ids while count <= FEW, else None

    def __repr__(self):
        return f"Node(d={self.depth}, ix={self.ix}, iy={self.iy})"

    def contains(self, x, y) -> bool:
        n = 1 << self.depth
        return cell_index(x, self.depth, n) == self.ix and cell_index(y, self.depth, n) == self.iy

    def dist_to(self, x, y) -> float:
        s = self.size
        dx = max(self.x0 - x, 0.0, x - (self.x0 + s))
        dy = max(self.y0 - y, 0.0, y - (self.y0 + s))
        return math.hypot(dx, dy)


def cell_index(x: float, depth: int, n: Optional[int] = None) -> int:
    n = (1 << depth) if n is None else n
    i = int(x * n)
    return n - 1 if i >= n else (0 if i < 0 else i)


class Quadtree:
    def __init__(self, params: Optional[QuadtreeParams] = None):
        self.params = params or QuadtreeParams()
        self.nodes: Dict[tuple, Node] = {}
        self.root = self._make(0, 0, 0, None)
        self.points: List[tuple] = []
        self.max_depth = 0
        self.balance_splits = 0

    def _make(self, d, ix, iy, parent):
        nd = Node(d, ix, iy, parent)
        self.nodes[nd.key] = nd
        return nd

    def _split(self, nd: Node):
        d = nd.depth + 1
        nd.leaf = False
        nd.children = [self._make(d, 2 * nd.ix + a, 2 * nd.iy + b, nd)
                       for b in (0, 1) for a in (0, 1)]
        if d > self.max_depth:
            self.max_depth = d
        return nd.children

    # -- construction ----------------------------------------------------

    @classmethod
    def build(cls, pts: Sequence, params: Optional[QuadtreeParams] = None,
              max_depth: int = MAX_DEPTH) -> "Quadtree":
        """Crowding split (3x3 same-size block with >= 2 points), then balance.

        Points are registered in the spatial index of their leaves.
        """
        tree = cls(params)
        a = np.asarray(pts, dtype=float).reshape(-1, 2)
        if len(a) and (a.min() < 0 or a.max() > 1):
            raise ValueError("points must lie in the unit square")
        if len(np.unique(a, axis=0)) != len(a):
            raise DuplicatePointError("duplicate points would split forever")
        tree._crowding_split(a, max_depth)
        tree._balance()
        tree._link()
        for p in a.tolist():
            tree.add_point((p[0], p[1]))
        return tree

    def _crowding_split(self, a, max_depth):
        n = len(a)
        if n < 2:
            return
        # membership rows (node ix, node iy, point) of 3x3 blocks at depth d
        nix = np.zeros(n, dtype=np.int64)
        niy = np.zeros(n, dtype=np.int64)
        pid = np.arange(n)
        d = 0
        splitting = {(0, 0)}
        while len(pid) and d < max_depth:
            # nodes at depth d whose block holds >= 2 points
            keys = nix * (1 << 31) + niy if d < 31 else None
            if keys is not None:
                uk, inv, cnt = np.unique(keys, return_inverse=True, return_counts=True)
            else:
                stacked = np.stack([nix, niy], axis=1)
                uk, inv, cnt = np.unique(stacked, axis=0, return_inverse=True, return_counts=True)
                inv = inv.reshape(-1)
            crowded = cnt[inv] >= 2
            nix, niy, pid = nix[crowded], niy[crowded], pid[crowded]
            if not len(pid):
                break
            for kx, ky in set(zip(nix.tolist(), niy.tolist())):
                nd = self.nodes.get((d, kx, ky))
                if nd is not None and nd.leaf:
                    self._split(nd)
            # rows for the children at depth d+1
            m = 1 << (d + 1)
            px = np.minimum((a[pid, 0] * m).astype(np.int64), m - 1)
            py = np.minimum((a[pid, 1] * m).astype(np.int64), m - 1)
            rx, ry, rp = [], [], []
            for ox in (0, 1):
                cx = 2 * nix + ox
                okx = np.abs(px - cx) <= 1
                for oy in (0, 1):
                    cy = 2 * niy + oy
                    ok = okx & (np.abs(py - cy) <= 1)
                    rx.append(cx[ok])
                    ry.append(cy[ok])
                    rp.append(pid[ok])
            nix = np.concatenate(rx)
            niy = np.concatenate(ry)
            pid = np.concatenate(rp)
            d += 1

    def covering(self, d: int, ix: int, iy: int) -> Node:
        """Deepest existing node covering the depth-d cell (ix, iy)."""
        nodes = self.nodes
        nd = nodes.get((d, ix, iy))
        if nd is not None:
            return nd
        if d > 0:
            nd = nodes.get((d - 1, ix >> 1, iy >> 1))
            if nd is not None:
                return nd
        lo, hi = 0, min(d, self.max_depth)
        # invariant: node at depth lo exists, at depth > hi does not
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if (mid, ix >> (d - mid), iy >> (d - mid)) in nodes:
                lo = mid
            else:
                hi = mid - 1
        return nodes[(lo, ix >> (d - lo), iy >> (d - lo))]

    def node_at(self, depth: int, x: float, y: float) -> Node:
        """Deepest node of depth <= ``depth`` containing (x, y)."""
        depth = min(depth, self.max_depth)
        n = 1 << depth
        return self.covering(depth, cell_index(x, depth, n), cell_index(y, depth, n))

    def leaf_of(self, x: float, y: float) -> Node:
        return self.node_at(self.max_depth, x, y)

    def _balance(self):
        buckets: Dict[int, list] = {}
        for nd in self.nodes.values():
            if nd.leaf:
                buckets.setdefault(nd.depth, []).append(nd)
        for d in range(self.max_depth, 1, -1):
            for nd in buckets.get(d, ()):
                if not nd.leaf:
                    continue
                n = 1 << d
                for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    jx, jy = nd.ix + dx, nd.iy + dy
                    if not (0 <= jx < n and 0 <= jy < n):
                        continue
                    cov = self.covering(d, jx, jy)
                    while cov.depth < d - 1:
                        kids = self._split(cov)
                        self.balance_splits += 1
                        for k in kids:
                            buckets.setdefault(k.depth, []).append(k)
                        cov = self.covering(d, jx, jy)

    def _link(self):
        # top-down: a child's neighbour is a sibling, a child of the parent's
        # neighbour, or that (coarser) neighbour itself
        self.root.nbr = [None] * 8
        level = [self.root]
        while level:
            nxt = []
            for nd in level:
                if nd.leaf:
                    continue
                kids = nd.children
                pn = nd.nbr
                pd = nd.depth
                for slot, c in enumerate(kids):
                    out = []
                    for sib, pk, cslot in _LINKS[slot]:
                        if sib >= 0:
                            out.append(kids[sib])
                            continue
                        m = pn[pk]
                        if m is None or m.leaf or m.depth < pd:
                            out.append(m)
                        else:
                            out.append(m.children[cslot])
                    c.nbr = out
                    nxt.append(c)
            level = nxt

    def _link_node(self, nd):
        d = nd.depth
        n = 1 << d
        out = []
        for dx, dy in DIRS:
            jx, jy = nd.ix + dx, nd.iy + dy
            out.append(self.covering(d, jx, jy) if 0 <= jx < n and 0 <= jy < n else None)
        nd.nbr = out

    # -- queries ---------------------------------------------------------

    def leaves(self) -> List[Node]:
        return [nd for nd in self.nodes.values() if nd.leaf]

    def nodes_at_depth(self, d: int) -> List[Node]:
        return [nd for nd in self.nodes.values() if nd.depth == d]

    @property
    def depth(self) -> int:
        return self.max_depth

    def is_balanced(self) -> bool:
        for nd in self.nodes.values():
            if not nd.leaf:
                continue
            d = nd.depth
            n = 1 << d
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                jx, jy = nd.ix + dx, nd.iy + dy
                if not (0 <= jx < n and 0 <= jy < n):
                    continue
                cov = self.covering(d, jx, jy)
                if cov.depth < d - 1:
                    return False
                if cov.depth == d and not cov.leaf:
                    # finer leaves on the other side must be within one level
                    if self._deepest_leaf_along(cov, -dx, -dy) > d + 1:
                        return False
        return True

    def _deepest_leaf_along(self, nd, dx, dy):
        """Depth of the deepest leaf of nd's subtree touching its side (dx, dy)."""
        if nd.leaf:
            return nd.depth
        best = nd.depth
        for c in nd.children:
            a, b = c.ix & 1, c.iy & 1
            if (dx == 1 and a == 0) or (dx == -1 and a == 1):
                continue
            if (dy == 1 and b == 0) or (dy == -1 and b == 1):
                continue
            best = max(best, self._deepest_leaf_along(c, dx, dy))
        return best

    def neighbors_within(self, nd: Node, r: float) -> List[Node]:
        """Nodes at nd's depth, or coarser leaves, whose cells come within
        r * size(nd) of nd's cell (nd itself excluded)."""
        d = nd.depth
        n = 1 << d
        k = int(math.ceil(r)) + 1
        out = []
        seen = {nd.key}
        r2 = r * r
        for jx in range(max(0, nd.ix - k), min(n, nd.ix + k + 1)):
            gx = max(abs(jx - nd.ix) - 1, 0)
            for jy in range(max(0, nd.iy - k), min(n, nd.iy + k + 1)):
                gy = max(abs(jy - nd.iy) - 1, 0)
                if gx * gx + gy * gy >= r2:
                    continue
                cov = self.covering(d, jx, jy)
                if cov.key not in seen:
                    seen.add(cov.key)
                    out.append(cov)
        return out

    def qualifying_cell(self, p, min_level: int, d: float) -> Node:
        """Lowest node containing p with c_low*s <= d <= c_up*s and depth <= min_level."""
        c_low, c_up = self.params.c_low, self.params.c_up
        nd = self.node_at(min_level, p[0], p[1])
        while d > c_up * nd.size:
            if nd.parent is None:
                raise QuadtreeError(f"d={d} exceeds c_up at the root")
            nd = nd.parent
        if d < c_low * nd.size:
            raise QuadtreeError(
                f"d={d:.3g} below c_low * size={c_low * nd.size:.3g} at depth {nd.depth}")
        return nd

    def insert_point(self, p, min_level: int, d: float) -> Node:
        nd = self.qualifying_cell(p, min_level, d)
        i = self.add_point(p)
        nd.pts.append(i)
        return nd

    # -- spatial index -----------------------------------------------------

    def add_point(self, p) -> int:
        i = len(self.points)
        self.points.append((float(p[0]), float(p[1])))
        nd = self.leaf_of(p[0], p[1])
        nd.index.append(i)
        while nd is not None:
            nd.count += 1
            if nd.few is not None:
                if nd.count <= FEW:
                    nd.few.append(i)
                else:
                    nd.few = None
            nd = nd.parent
        return i

    def ids_near(self, cx: float, cy: float, r: float) -> List[int]:
        """Superset of point ids within distance r of (cx, cy)."""
        if r <= 0:
            r = 1e-300
        lev = int(math.floor(-math.log2(r))) if r < 1 else 0
        lev = max(0, min(lev, self.max_depth))
        n = 1 << lev
        ix, iy = cell_index(cx, lev, n), cell_index(cy, lev, n)
        out = []
        seen = set()
        stack = []
        for jx in range(max(0, ix - 1), min(n, ix + 2)):
            for jy in range(max(0, iy - 1), min(n, iy + 2)):
                nd = self.covering(lev, jx, jy)
                if nd.key in seen:
                    continue
                seen.add(nd.key)
                stack.append(nd)
        while stack:
            nd = stack.pop()
            if not nd.count:
                continue
            if nd.few is not None:
                out.extend(nd.few)
                continue
            if nd.leaf:
                out.extend(nd.index)
                continue
            for c in nd.children:
                if not c.count:
                    continue
                s = c.size
                dx = c.x0 - cx
                if dx < 0:
                    dx = cx - c.x0 - s
                    if dx < 0:
                        dx = 0.0
                dy = c.y0 - cy
                if dy < 0:
                    dy = cy - c.y0 - s
                    if dy < 0:
                        dy = 0.0
                if dx * dx + dy * dy <= r * r:
                    stack.append(c)
        return out

    def ids_in_disk(self, cx: float, cy: float, r: float) -> List[int]:
        P = self.points
        r2 = r * r
        return [i for i in self.ids_near(cx, cy, r)
                if (P[i][0] - cx) ** 2 + (P[i][1] - cy) ** 2 < r2]

    # -- audits ----------------------------------------------------------

    def sandwich_violations(self, pts: Sequence = None) -> List[tuple]:
        """(point, leaf, lfs/size) for indexed points outside [c_low, c_up]."""
        from sklearn.neighbors import NearestNeighbors

        P = self.points if pts is None else [tuple(p) for p in pts]
        if len(P) < 2:
            return []
        a = np.asarray(P)
        dd, _ = NearestNeighbors(n_neighbors=2).fit(a).kneighbors(a)
        out = []
        c_low, c_up = self.params.c_low, self.params.c_up
        for p, l in zip(P, dd[:, 1]):
            leaf = self.leaf_of(p[0], p[1])
            ratio = l / leaf.size
            if not (c_low <= ratio <= c_up):
                out.append((p, leaf, ratio))
        return out

    def dump(self) -> str:
        """One line per node: depth x0 y0 size count (count = held points)."""
        lines = []
        for key in sorted(self.nodes):
            nd = self.nodes[key]
            lines.append(f"{nd.depth} {nd.x0:.17g} {nd.y0:.17g} {nd.size:.17g} {len(nd.pts) + len(nd.index) if nd.leaf else len(nd.pts)}")
        return "\n".join(lines) + "\n"


def build(pts, params: Optional[QuadtreeParams] = None) -> Quadtree:
    return Quadtree.build(pts, params)


def neighbors_within(node: Node, radius_in_sizes: float, tree: Quadtree) -> List[Node]:
    return tree.neighbors_within(node, radius_in_sizes)


def insert_point(tree: Quadtree, r, min_level: int, d: float) -> Node:
    return tree.insert_point(r, min_level, d)
