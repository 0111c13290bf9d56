import io
import math

import numpy as np
import pytest

from loosemesh.baseline import KIND_BOUNDARY, refine
from loosemesh.delaunay import build
from loosemesh.exceptions import ParseError
from loosemesh.meshio import (format_ele, format_node, format_stats, format_svg, parse_csv,
                              parse_node, parse_stats, read_ele, read_node, read_points, write_mesh)

from conftest import normalized


def test_node_format_example():
    pts = read_points(io.StringIO("3 2 0 0\n1 0 0\n2 1 0\n3 0 1\n"), fmt="node")
    assert pts.tolist() == [[0, 0], [1, 0], [0, 1]]


def test_node_comments_and_attrs():
    pts, attrs = parse_node(["# header follows", "2 2 1 1", "1 0.5 0.5 7 0", "2 1.5 0.5 8 1  # tail"])
    assert pts == [(0.5, 0.5), (1.5, 0.5)]
    assert attrs == [[7.0], [8.0]]


def test_csv_example():
    assert read_points(io.StringIO("0.1,0.2\n"), fmt="csv").tolist() == [[0.1, 0.2]]
    assert parse_csv(["x,y", "1,2", "3,4"]) == [(1.0, 2.0), (3.0, 4.0)]


def test_format_from_content(tmp_path):
    p = tmp_path / "pts.dat"
    p.write_text("1,2\n3,4\n")
    assert read_points(str(p)).shape == (2, 2)


@pytest.mark.parametrize("text,line", [
    ("3 2 0\n", 1),
    ("2 2 0 0\n1 0 0\n2 nan 0\n", 3),
    ("2 2 0 0\n1 0 0\n2 0 0\n", 3),
    ("3 2 0 0\n1 0 0\n2 1 0\n", 3),
    ("1 2 0 0\n1 0 0\n2 1 1\n", 3),
    ("1 2 0 0\n1 0\n", 2),
])
def test_node_errors_carry_line(text, line):
    with pytest.raises(ParseError) as ei:
        parse_node(text.splitlines())
    assert ei.value.lineno == line
    assert str(ei.value).startswith(f"line {line}:")


def test_csv_duplicate_at_second_occurrence():
    with pytest.raises(ParseError) as ei:
        parse_csv(["0.1,0.2", "0.3,0.4", "0.1,0.2"])
    assert ei.value.lineno == 3
    with pytest.raises(ParseError):
        parse_csv(["1,2", "3,inf"])


def test_single_triangle_ele():
    t = build([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    lines = format_ele(t).splitlines()
    assert lines[0] == "1 3 0"
    idx = lines[1].split()
    assert idx[0] == "1" and sorted(idx[1:]) == ["1", "2", "3"]


def test_roundtrip_full_precision(tmp_path, rng):
    raw = rng.normal(size=(40, 2)) * 1e3
    from loosemesh.frame import normalize_input

    pts, tf = normalize_input(raw)
    tri, _ = refine(pts)
    paths = write_mesh(tri, str(tmp_path / "m"), tf, svg=True, beta=math.sqrt(2))
    got, attrs = read_node(paths[0])
    want = tf.inverse(np.asarray(tri.points))
    assert np.array_equal(np.asarray(got), want)
    assert [int(a[0]) for a in attrs] == tri.kinds
    assert sum(1 for a in attrs if a[0] == KIND_BOUNDARY) >= 12
    tris = read_ele(paths[1])
    assert len(tris) == tri.n_triangles
    assert min(min(t) for t in tris) == 1 and max(max(t) for t in tris) == len(got)


def test_svg_one_line_per_edge():
    tri, _ = refine(normalized("uniform", 20, 0))
    svg = format_svg(tri)
    n, t = len(tri.points), tri.n_triangles
    hull = sum(1 for v in range(n) if tri.is_hull_vertex(v))
    # Euler: E = (3T + hull edges) / 2 with as many hull edges as hull vertices
    assert svg.count("<line ") == (3 * t + hull) // 2 == len(tri.edges())
    assert "<polygon" not in format_svg(tri, beta=math.sqrt(2))


def test_svg_marks_bad_triangles():
    t = build([(0.0, 0.0), (1.0, 0.0), (0.5, 0.05)])
    assert format_svg(t, beta=math.sqrt(2)).count("<polygon") == 1


def test_stats_roundtrip():
    rec = {"b": 1.5, "a": True, "c": 3}
    text = format_stats(rec)
    assert text.splitlines()[0] == "a=true"
    assert parse_stats(text) == {"a": "true", "b": "1.5", "c": "3"}
