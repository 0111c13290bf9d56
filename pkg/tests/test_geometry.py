import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from loosemesh.exceptions import DegenerateError
from loosemesh.geometry import (Position, Side, Turn, angle_threshold, angles, beta_from_angle,
                                circumcenter, circumcircle, diametral_disk, dist, encroaches,
                                in_circle, leaf_apex, leaf_center, leaf_contains, leaf_disks, lfs,
                                min_angle, orientation, radius_edge_ratio)

coord = st.floats(min_value=-100, max_value=100, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)
betas = st.floats(min_value=1.0, max_value=3.0)


def test_orientation_and_in_circle():
    assert orientation((0, 0), (1, 0), (0, 1)) is Turn.LEFT
    assert in_circle((0, 0), (1, 0), (0, 1), (0.5, 0.5)) is Position.INSIDE
    assert in_circle((0, 0), (1, 0), (0, 1), (1, 1)) is Position.ON


def test_radius_edge_equilateral():
    h = math.sqrt(3) / 2
    assert radius_edge_ratio(((0, 0), (1, 0), (0.5, h))) == pytest.approx(1 / math.sqrt(3))


def test_radius_edge_matches_min_angle_identity(rng):
    for _ in range(200):
        t = [tuple(p) for p in rng.uniform(0, 1, size=(3, 2)).tolist()]
        if abs(orientation(*t)) == 0:
            continue
        r = radius_edge_ratio(t)
        assert r == pytest.approx(1 / (2 * math.sin(min_angle(t))), rel=1e-7)


def test_angles_sum_to_pi(rng):
    t = [tuple(p) for p in rng.uniform(0, 1, size=(3, 2)).tolist()]
    assert sum(angles(t)) == pytest.approx(math.pi)


def test_threshold_and_inverse():
    a = angle_threshold(math.sqrt(2))
    assert math.degrees(a) == pytest.approx(20.7048, abs=1e-4)
    assert beta_from_angle(math.degrees(a)) == pytest.approx(math.sqrt(2))


def test_circumcircle_passes_through_vertices():
    t = ((0.0, 0.0), (4.0, 0.0), (1.0, 3.0))
    c, r = circumcircle(t)
    for v in t:
        assert dist(c, v) == pytest.approx(r)
    assert circumcenter(*t) == pytest.approx(c)


@settings(max_examples=200, deadline=None)
@given(point, point, betas)
def test_leaf_center_equidistant(p, q, beta):
    assume(dist(p, q) > 1e-3)
    for side in Side:
        c = leaf_center(p, q, beta, side)
        r = beta * dist(p, q)
        assert dist(c, p) == pytest.approx(r, rel=1e-9)
        assert dist(c, q) == pytest.approx(r, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(point, point, betas)
def test_apex_triangle_is_barely_good(p, q, beta):
    assume(dist(p, q) > 1e-3)
    for side in Side:
        a = leaf_apex(p, q, beta, side)
        assert radius_edge_ratio((p, q, a)) == pytest.approx(beta, rel=1e-9)
        assert int(orientation(p, q, a)) == int(side)


def test_leaf_disks_are_mirror_images():
    left, right = leaf_disks((0.0, 0.0), (1.0, 0.0), math.sqrt(2))
    assert left.center[0] == pytest.approx(0.5) and right.center[0] == pytest.approx(0.5)
    assert left.center[1] == pytest.approx(-right.center[1])
    assert left.center[1] > 0


def test_leaf_contains_center_not_far_point():
    p, q, beta = (0.0, 0.0), (1.0, 0.0), math.sqrt(2)
    apex = leaf_apex(p, q, beta, Side.LEFT)
    c = leaf_center(p, q, beta, Side.LEFT)
    assert leaf_contains(p, q, apex, Side.LEFT, c)
    assert not leaf_contains(p, q, apex, Side.LEFT, (0.5, -0.1))
    assert not leaf_contains(p, q, apex, Side.LEFT, (0.5, 10.0))
    # points on the boundary count as outside
    assert not leaf_contains(p, q, apex, Side.LEFT, apex)


def test_encroachment():
    assert encroaches((0.5, 0.1), (0.0, 0.0), (1.0, 0.0))
    assert not encroaches((0.5, 0.5), (0.0, 0.0), (1.0, 0.0))  # on the circle
    assert not encroaches((0.5, 0.6), (0.0, 0.0), (1.0, 0.0))
    d = diametral_disk((0.0, 0.0), (2.0, 0.0))
    assert d.radius == 1.0 and d.center == (1.0, 0.0)


def test_degenerate_inputs_raise():
    with pytest.raises(DegenerateError):
        leaf_apex((1.0, 1.0), (1.0, 1.0), 2.0, Side.LEFT)
    with pytest.raises(ValueError):
        leaf_center((0.0, 0.0), (1.0, 0.0), 0.4, Side.LEFT)


def test_lfs_second_nearest():
    pts = [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]
    assert lfs((0.0, 0.0), pts) == 1.0
    assert lfs((2.0, 0.0), pts) == 1.0
    assert lfs((-1.0, 0.0), pts) == 2.0


def test_orientation_tiny_right_turn():
    # the float filter cannot see -1e-18 against terms of order 1; the exact path must
    assert orientation((0.0, 0.0), (1.0, 0.0), (0.5, -1e-18)) is Turn.RIGHT
    assert orientation((0.0, 0.0), (1.0, 1.0), (2.0, 2.0)) is Turn.COLLINEAR


def test_in_circle_outside():
    assert in_circle((0, 0), (1, 0), (0, 1), (2, 2)) is Position.OUTSIDE


@pytest.mark.parametrize("tri,center,radius", [
    (((0, 0), (1, 0), (0, 1)), (0.5, 0.5), math.sqrt(2) / 2),
    (((0, 0), (2, 0), (1, math.sqrt(3))), (1, 1 / math.sqrt(3)), 2 / math.sqrt(3)),
    # 0.25 + y^2 = (2.8 - y)^2
    (((0, 0), (1, 0), (0.5, 2.8)), (0.5, 7.59 / 5.6), 2.8 - 7.59 / 5.6),
])
def test_circumcircle_examples(tri, center, radius):
    c, r = circumcircle(tri)
    assert c == pytest.approx(center, rel=1e-12)
    assert r == pytest.approx(radius, rel=1e-12)


def test_right_triangle_ratio():
    assert radius_edge_ratio(((0, 0), (1, 0), (0, 1))) == pytest.approx(math.sqrt(2) / 2)


def test_leaf_examples():
    left, right = leaf_disks((0.0, 0.0), (1.0, 0.0), math.sqrt(2))
    assert left.center == pytest.approx((0.5, math.sqrt(1.75)))
    assert right.center == pytest.approx((0.5, -math.sqrt(1.75)))
    assert left.radius == pytest.approx(math.sqrt(2))
    # beta = 1/2 collapses both leaves onto the diametral disk
    l2, r2 = leaf_disks((0.0, 0.0), (0.0, 1.0), 0.5)
    assert l2.center == pytest.approx((0.0, 0.5)) and r2.center == pytest.approx((0.0, 0.5))
    assert l2.radius == pytest.approx(0.5)
    assert leaf_apex((0.0, 0.0), (1.0, 0.0), math.sqrt(2), Side.LEFT) == pytest.approx(
        (0.5, math.sqrt(1.75) + math.sqrt(2)))
    assert leaf_apex((0.0, 0.0), (1.0, 0.0), 0.5, Side.LEFT) == pytest.approx((0.5, 0.5))


def test_encroach_examples():
    assert encroaches((0.5, 0.49), (0.0, 0.0), (1.0, 0.0))
    assert not encroaches((0.5, 0.5), (0.0, 0.0), (1.0, 0.0))
    assert not encroaches((1.0, 1.0), (0.0, 0.0), (1.0, 0.0))


def test_lfs_examples_and_lipschitz(rng):
    assert lfs((0.0, 0.0), [(1.0, 0.0), (0.0, 2.0), (5.0, 5.0)]) == 2.0
    pts = [tuple(p) for p in rng.uniform(0, 1, size=(15, 2)).tolist()]
    probes = pts + [tuple(p) for p in rng.uniform(-0.5, 1.5, size=(15, 2)).tolist()]
    for x in probes:
        for y in probes:
            assert abs(lfs(x, pts) - lfs(y, pts)) <= dist(x, y) + 1e-12
