import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from loosemesh.delaunay import Triangulation, bad_triangles, build, insert, loose_pairs_of
from loosemesh.exceptions import DegenerateError, DuplicatePointError, OutsideHullError
from loosemesh.frame import frame_points
from loosemesh.geometry import radius_edge_ratio
from loosemesh.loose_pairs import is_loose
from loosemesh.predicates import incircle, orient2d

B = math.sqrt(2.0)


def brute_empty_circles(t):
    """Independent oracle: no vertex strictly inside any triangle's circumcircle."""
    P = t.points
    for a, b, c in t.triangles():
        pa, pb, pc = P[a], P[b], P[c]
        assert orient2d(*pa, *pb, *pc) > 0
        for i, d in enumerate(P):
            if i in (a, b, c):
                continue
            assert incircle(*pa, *pb, *pc, *d) <= 0


def euler_ok(t):
    n = len(t.points)
    hull = sum(1 for v in range(n) if t.is_hull_vertex(v))
    # triangles of a triangulated convex region: 2n - h - 2
    return t.n_triangles == 2 * n - hull - 2


def test_three_points():
    t = build([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    assert t.n_triangles == 1


def test_square_corners_deterministic():
    sq = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    t1, t2 = build(sq), build(sq)
    assert t1.n_triangles == 2
    assert sorted(map(sorted, t1.triangles())) == sorted(map(sorted, t2.triangles()))


def test_errors():
    with pytest.raises(DegenerateError):
        build([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)])
    with pytest.raises(DuplicatePointError):
        build([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 0.0)])
    t = build([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    with pytest.raises(OutsideHullError):
        t.insert((5.0, 5.0))
    assert t.insert((1.0, 0.0)) is None


def test_random_thousand_empty_circles(rng):
    pts = [tuple(p) for p in rng.uniform(0, 1, size=(1000, 2)).tolist()]
    t = build(pts)
    t.check()
    assert t.is_delaunay()
    assert euler_ok(t)
    # the full O(n t) sweep on a subset of triangles keeps this quick
    P = t.points
    tris = t.triangles()
    for k in rng.choice(len(tris), size=60, replace=False):
        a, b, c = tris[k]
        for d in P:
            assert incircle(*P[a], *P[b], *P[c], *d) <= 0


def test_insert_centroid_and_edge():
    t = build([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    t.insert((1 / 3, 1 / 3))
    assert t.n_triangles == 3
    t = build([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    t.insert((0.5, 0.0))  # on a hull edge
    t.insert((0.5, 0.5))  # on the shared diagonal
    t.check()
    brute_empty_circles(t)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 40), st.integers(0, 40)), min_size=4, max_size=25, unique=True),
       st.randoms(use_true_random=False))
def test_insert_matches_rebuild(ints, rnd):
    pts = [(x / 40.0, y / 40.0) for x, y in ints]
    try:
        full = build(pts)
    except DegenerateError:
        assume(False)
    base = frame_points()
    t = build(base)
    order = list(pts)
    rnd.shuffle(order)
    for p in order:
        insert(t, p)
    t.check()
    brute_empty_circles(t)
    brute_empty_circles(full)


def test_general_position_insert_equals_build(rng):
    for _ in range(200):
        pts = [tuple(p) for p in rng.uniform(0.1, 0.9, size=(12, 2)).tolist()]
        f = frame_points()
        ref = build(f + pts)
        t = build(f)
        for i in rng.permutation(len(pts)):
            t.insert(pts[i])
        key = lambda tr: {frozenset(tri) for tri in ((tr.points[a], tr.points[b], tr.points[c])
                                                     for a, b, c in tr.triangles())}
        assert key(t) == key(ref)


def test_min_angle_matches_ratio_identity(rng):
    pts = [tuple(p) for p in rng.uniform(0, 1, size=(50, 2)).tolist()]
    t = build(pts)
    P = t.points
    worst = max(radius_edge_ratio((P[a], P[b], P[c])) for a, b, c in t.triangles())
    assert t.min_angle() == pytest.approx(math.asin(1 / (2 * worst)), rel=1e-12)


def test_bad_triangles():
    h = math.sqrt(3) / 2
    eq = build([(0.0, 0.0), (1.0, 0.0), (0.5, h)])
    assert bad_triangles(eq, B) == []
    skinny = build([(0.0, 0.0), (1.0, 0.0), (0.5, 0.05)])
    bad = bad_triangles(skinny, B)
    assert len(bad) == 1
    # circumradius 2.525, shortest side sqrt(0.2525)
    assert radius_edge_ratio(bad[0]) == pytest.approx(2.525 / math.sqrt(0.2525))


def test_bad_triangles_count_matches_scan(rng):
    pts = [tuple(p) for p in rng.uniform(0, 1, size=(80, 2)).tolist()]
    t = build(pts)
    P = t.points
    n = sum(1 for a, b, c in t.triangles() if radius_edge_ratio((P[a], P[b], P[c])) > B)
    bad = bad_triangles(t, B)
    assert len(bad) == n
    shorts = [min(math.dist(tr[0], tr[1]), math.dist(tr[1], tr[2]), math.dist(tr[2], tr[0])) for tr in bad]
    assert shorts == sorted(shorts)


def test_loose_pairs_skinny_triangle_in_frame():
    pts = frame_points() + [(0.45, 0.5), (0.55, 0.5), (0.5, 0.51)]
    t = build(pts)
    lps = loose_pairs_of(t, B)
    ends = {frozenset((lp.p, lp.q)) for lp in lps}
    assert frozenset(((0.45, 0.5), (0.5, 0.51))) in ends or frozenset(((0.55, 0.5), (0.5, 0.51))) in ends


def test_loose_pairs_consistent_with_is_loose(rng):
    pts = frame_points() + [tuple(p) for p in rng.uniform(1 / 3, 2 / 3, size=(40, 2)).tolist()]
    t = build(pts)
    lps = loose_pairs_of(t, B)
    assert lps
    for lp in lps:
        others = [x for x in t.points if x != lp.p and x != lp.q]
        assert is_loose(lp.p, lp.q, B, others) is not None


def test_loose_pairs_brute_force_over_all_pairs(rng):
    pts = frame_points() + [tuple(p) for p in rng.uniform(1 / 3, 2 / 3, size=(15, 2)).tolist()]
    t = build(pts)
    got = {frozenset((lp.p, lp.q)) for lp in loose_pairs_of(t, B)}
    want = set()
    for p, q in itertools.combinations(t.points, 2):
        others = [x for x in t.points if x != p and x != q]
        if is_loose(p, q, B, others, require_support=True):
            want.add(frozenset((p, q)))
    assert got == want
