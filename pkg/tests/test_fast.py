import math
from types import SimpleNamespace

import numpy as np
import pytest

from loosemesh.baseline import refine
from loosemesh.constants import (DEFAULT_REACH, DEFAULT_SPAN, MIN_REACH, RefinementConstants,
                                 eta_bound, packing_bound)
from loosemesh.delaunay import loose_pairs_of
from loosemesh.exceptions import ConfigError
from loosemesh.fast import LevelHeap, fast_refine
from loosemesh.frame import frame_points
from loosemesh.geometry import angle_threshold

from conftest import normalized

B = math.sqrt(2.0)


def test_constants_defaults_and_validation():
    c = RefinementConstants()
    assert c.c_reach == DEFAULT_REACH and c.c_span == DEFAULT_SPAN
    assert c.c_up >= 2 * c.c_low and c.c_reach >= MIN_REACH
    with pytest.raises(ConfigError):
        RefinementConstants(c_reach=2.0)
    RefinementConstants(c_reach=2.0, validate=False)
    with pytest.raises(ConfigError):
        RefinementConstants(c_low=1.0, c_up=1.5)
    with pytest.raises(ConfigError):
        RefinementConstants(c_span=-1)


def test_theoretical_constants():
    c = RefinementConstants(theoretical=True)
    alpha = math.asin(1 / (2 * B))
    c_gbu = (2 * B) ** (math.pi / alpha)
    assert c.c_gbu == pytest.approx(c_gbu)
    assert c.c_g == pytest.approx(2 * B * c_gbu)
    assert c.c_reach == pytest.approx(2 * c.c_up * c_gbu)
    assert c.c_span == math.ceil(math.log2(c_gbu * c.c_up / (c.c_low * c.c_shrink)) + 1)
    assert c.c_gbu >= c.c_g / (2 * c.beta) - 1e-9


def test_eta_bound():
    c = RefinementConstants()
    d = 7
    assert eta_bound(1, c, d) == pytest.approx(c.c_low_prime / 2 ** d)
    for i in range(1, d + 1):
        assert eta_bound(i + 1, c, d) == pytest.approx(2 * eta_bound(i, c, d))
    assert eta_bound(d + 1, c, d) == pytest.approx(c.c_low_prime)
    with pytest.raises(ValueError):
        eta_bound(0, c, d)


def test_packing_bound_grows_with_span():
    assert packing_bound(RefinementConstants(c_span=5)) > packing_bound(RefinementConstants(c_span=4))


def test_level_heap_deepest_first_fifo():
    h = LevelHeap(3)
    nodes = [SimpleNamespace(key=(d, i, 0), depth=d) for d, i in ((1, 0), (3, 0), (3, 1), (2, 0))]
    for nd in nodes:
        h.push(nd)
    assert not h.push(nodes[0])  # already queued
    order = [h.pop().key for _ in range(4)]
    assert order == [(3, 0, 0), (3, 1, 0), (2, 0, 0), (1, 0, 0)]
    assert h.pop() is None
    assert h.max_reschedules() == 0


def check_quality(tri, pts):
    assert loose_pairs_of(tri, B) == []
    assert tri.min_angle() >= angle_threshold(B) - 1e-9
    assert set(pts) | set(frame_points()) <= set(tri.points)


def test_single_point_matches_baseline_quality():
    tri, st = fast_refine([(0.5, 0.5)])
    check_quality(tri, [(0.5, 0.5)])
    btri, bst = refine([(0.5, 0.5)])
    assert not st.safety_net_used
    assert st.min_angle_deg >= math.degrees(angle_threshold(B)) - 1e-7
    assert bst.min_angle_deg >= math.degrees(angle_threshold(B)) - 1e-7


def test_frame_only_size_close_to_baseline():
    tri, st = fast_refine([])
    btri, _ = refine([])
    check_quality(tri, [])
    assert 1 / 3 <= len(tri.points) / len(btri.points) <= 3


@pytest.mark.parametrize("gen", ["uniform", "clustered", "grid", "circle"])
@pytest.mark.parametrize("n", [2, 30, 150])
def test_fast_refine_quality(gen, n):
    pts = normalized(gen, n, 1)
    tri, st = fast_refine(pts)
    check_quality(tri, pts)
    assert st.residual_loose == 0 and not st.safety_net_used
    assert st.sandwich_misses == 0


def test_thousand_points_against_baseline():
    pts = normalized("uniform", 1000, 0)
    tri, st = fast_refine(pts)
    assert st.residual_loose == 0 and not st.safety_net_used
    _, bst = refine(pts)
    assert 1 / 3 <= st.steiner_count / bst.steiner_count <= 3


def test_no_new_quadtree_nodes_during_refinement():
    from loosemesh.fast import FastRefiner

    fr = FastRefiner(normalized("clustered", 80, 2), RefinementConstants(), None, None)
    before = set(fr.tree.nodes)
    fr.run()
    assert set(fr.tree.nodes) == before
    assert fr.tree.is_balanced()


def test_cap_stops_early():
    pts = normalized("uniform", 100, 0)
    tri, st = fast_refine(pts, max_insertions=10)
    assert st.capped and st.insertions <= 10


def test_safety_net_repairs_bad_constants():
    pts = normalized("uniform", 150, 3)
    c = RefinementConstants(c_reach=0.25, c_span=0, validate=False)
    tri, st = fast_refine(pts, c)
    if st.residual_loose:
        assert st.safety_net_used
    assert loose_pairs_of(tri, B) == []


def test_deterministic():
    pts = normalized("clustered", 60, 4)
    a, _ = fast_refine(pts)
    b, _ = fast_refine(pts)
    assert a.points == b.points
