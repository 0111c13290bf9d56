import math
from pathlib import Path

import numpy as np
import pytest

from loosemesh.exceptions import DuplicatePointError, QuadtreeError
from loosemesh.frame import frame_points
from loosemesh.quadtree import Quadtree, QuadtreeParams, build, insert_point, neighbors_within

from conftest import normalized

DATA = Path(__file__).parent / "data"


def ref_cell(x, d):
    n = 1 << d
    return min(max(int(math.floor(x * n)), 0), n - 1)


def reference_leaves(pts):
    """Naive rebuild: crowding splits level by level, then split-until-balanced."""
    pts = np.asarray(pts)
    leaves = {(0, 0, 0)}
    frontier = [(0, 0, 0)]
    while frontier:
        nxt = []
        for d, ix, iy in frontier:
            n = 1 << d
            cx = np.minimum(np.floor(pts[:, 0] * n), n - 1)
            cy = np.minimum(np.floor(pts[:, 1] * n), n - 1)
            if np.sum((np.abs(cx - ix) <= 1) & (np.abs(cy - iy) <= 1)) >= 2:
                leaves.discard((d, ix, iy))
                for a in (0, 1):
                    for b in (0, 1):
                        c = (d + 1, 2 * ix + a, 2 * iy + b)
                        leaves.add(c)
                        nxt.append(c)
        frontier = nxt

    def leaf_covering(d, ix, iy):
        while d >= 0:
            if (d, ix, iy) in leaves:
                return (d, ix, iy)
            d, ix, iy = d - 1, ix // 2, iy // 2
        return None

    changed = True
    while changed:
        changed = False
        for d, ix, iy in sorted(leaves, reverse=True):
            n = 1 << d
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                jx, jy = ix + dx, iy + dy
                if not (0 <= jx < n and 0 <= jy < n):
                    continue
                cov = leaf_covering(d, jx, jy)
                if cov is not None and cov[0] < d - 1:
                    leaves.discard(cov)
                    cd, cx_, cy_ = cov
                    leaves.update((cd + 1, 2 * cx_ + a, 2 * cy_ + b) for a in (0, 1) for b in (0, 1))
                    changed = True
            if changed:
                break
    return leaves


@pytest.mark.parametrize("gen,n,seed", [("uniform", 30, 0), ("clustered", 40, 1), ("grid", 25, 0), ("circle", 20, 2)])
def test_build_matches_reference(gen, n, seed):
    pts = frame_points() + normalized(gen, n, seed)
    tree = build(pts)
    assert {nd.key for nd in tree.leaves()} == reference_leaves(pts)


def test_frame_plus_center_golden():
    tree = build(frame_points() + [(0.5, 0.5)])
    assert tree.depth <= 4
    assert tree.sandwich_violations() == []
    assert tree.dump() == (DATA / "quadtree_frame_center.txt").read_text()


def test_two_close_points_depth_grows_with_k():
    depths = []
    for k in range(4, 30, 5):
        pts = [(0.5, 0.5), (0.5 + 2.0 ** -k, 0.5)]
        depths.append(build(pts).depth)
        assert k - 2 <= depths[-1] <= k + 2
    assert depths == sorted(depths)


def test_balance_on_random_inputs():
    rng = np.random.default_rng(7)
    for trial in range(100):
        n = int(rng.integers(2, 40))
        if trial % 2:
            pts = rng.uniform(0, 1, size=(n, 2))
        else:  # clustered: stresses balance
            pts = 0.5 + rng.normal(scale=0.01, size=(n, 2))
        pts = [tuple(p) for p in np.unique(np.clip(pts, 0, 1), axis=0).tolist()]
        tree = build(pts)
        assert tree.is_balanced()


def test_balance_check_detects_violation():
    tree = Quadtree()
    a = tree._split(tree.root)[0]
    b = tree._split(a)[3]  # (2, 1, 1) touches the depth-1 cells
    assert b.key == (2, 1, 1)
    tree._split(b)
    assert not tree.is_balanced()


def test_sandwich_on_random_inputs():
    rng = np.random.default_rng(3)
    for _ in range(20):
        pts = frame_points() + [tuple(p) for p in rng.uniform(1 / 3, 2 / 3, size=(60, 2)).tolist()]
        assert build(pts).sandwich_violations() == []


def test_duplicates_rejected():
    with pytest.raises(DuplicatePointError):
        build([(0.5, 0.5), (0.5, 0.5)])


def test_params_validation():
    with pytest.raises(ValueError):
        QuadtreeParams(c_low=1.0, c_up=1.5)


def brute_neighbors(tree, nd, r):
    """All depth-d nodes or coarser leaves with cells within r*size of nd's cell."""
    s = nd.size
    out = set()
    for m in tree.nodes.values():
        if m is nd or m.depth > nd.depth:
            continue
        if m.depth < nd.depth and not m.leaf:
            continue
        gx = max(m.x0 - (nd.x0 + s), nd.x0 - (m.x0 + m.size), 0.0)
        gy = max(m.y0 - (nd.y0 + s), nd.y0 - (m.y0 + m.size), 0.0)
        if gx * gx + gy * gy < (r * s) ** 2 - 1e-15:
            out.add(m.key)
    return out


@pytest.mark.parametrize("r", [1.0, 2.0, 2.9, 4.5])
def test_neighbors_within_matches_brute_force(r):
    rng = np.random.default_rng(11)
    pts = frame_points() + normalized("clustered", 50, 5)
    tree = build(pts)
    nodes = list(tree.nodes.values())
    for k in rng.choice(len(nodes), size=80, replace=False):
        nd = nodes[k]
        got = {m.key for m in neighbors_within(nd, r, tree)}
        assert got == brute_neighbors(tree, nd, r)


def test_neighbors_within_ring_and_corner():
    tree = build(frame_points() + [(0.5, 0.5)])
    inner = tree.nodes[(2, 1, 1)]
    assert 1 <= len(tree.neighbors_within(inner, 1.0)) <= 8
    corner = tree.nodes[(1, 0, 0)]
    assert len(tree.neighbors_within(corner, 1.0)) == 3


def test_qualifying_cell_climbs():
    tree = build(frame_points() + normalized("uniform", 30, 0))
    p = (0.5, 0.5)
    leaf = tree.leaf_of(*p)
    c_low, c_up = tree.params.c_low, tree.params.c_up
    d0 = 0.5 * (c_low + c_up) * leaf.size
    assert tree.qualifying_cell(p, leaf.depth, d0) is leaf
    nd = tree.qualifying_cell(p, leaf.depth, 3 * c_up * leaf.size)
    assert 1 <= leaf.depth - nd.depth <= 2
    for d in np.geomspace(c_low * leaf.size, 0.9 * c_up, 25):
        nd = tree.qualifying_cell(p, leaf.depth, float(d))
        assert c_low * nd.size <= d <= c_up * nd.size
        assert nd.contains(*p)
    with pytest.raises(QuadtreeError):
        tree.qualifying_cell(p, leaf.depth, 0.1 * c_low * leaf.size)
    with pytest.raises(QuadtreeError):
        tree.qualifying_cell(p, leaf.depth, 10 * c_up)


def test_insert_point_keeps_topology_and_indexes():
    tree = build(frame_points() + normalized("uniform", 20, 1))
    before = set(tree.nodes)
    p = (0.41, 0.52)
    leaf = tree.leaf_of(*p)
    nd = insert_point(tree, p, leaf.depth, leaf.size)
    assert set(tree.nodes) == before
    i = len(tree.points) - 1
    assert tree.points[i] == p and i in nd.pts
    assert i in tree.ids_in_disk(p[0], p[1], 1e-9)


def test_ids_in_disk_matches_scan():
    rng = np.random.default_rng(2)
    tree = build(frame_points() + normalized("clustered", 200, 3))
    P = np.asarray(tree.points)
    for _ in range(200):
        c = rng.uniform(0, 1, size=2)
        r = float(10 ** rng.uniform(-3, 0))
        want = set(np.flatnonzero(((P - c) ** 2).sum(1) < r * r).tolist())
        assert set(tree.ids_in_disk(c[0], c[1], r)) == want
        assert want <= set(tree.ids_near(c[0], c[1], r))
