"""Reading point sets and writing meshes (.node/.ele, SVG, key=value stats)."""

from __future__ import annotations

import io
import math
import os
from typing import Iterable, List, Optional, TextIO, Tuple, Union

import numpy as np

from .exceptions import ParseError

PathOrStream = Union[str, os.PathLike, TextIO]


def _open_text(src: PathOrStream):
    if hasattr(src, "read"):
        return src, False
    return open(src, "r", encoding="utf-8"), True


def _float(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"bad number {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite coordinate {tok!r}", lineno)
    return v


def _content_lines(text: Iterable[str]):
    for lineno, raw in enumerate(text, 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_node(text: Iterable[str]) -> Tuple[List[tuple], List[List[float]]]:
    """Triangle .node: header ``N 2 n_attr n_marker`` then ``i x y [attrs] [marker]``."""
    lines = _content_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty .node file", 1) from None
    toks = header.split()
    if len(toks) != 4:
        raise ParseError(f"malformed header {header!r}", lineno)
    try:
        n, dim, n_attr, n_mark = (int(t) for t in toks)
    except ValueError:
        raise ParseError(f"malformed header {header!r}", lineno) from None
    if dim != 2 or n < 0 or n_attr < 0 or n_mark not in (0, 1):
        raise ParseError(f"unsupported header {header!r}", lineno)
    width = 3 + n_attr + n_mark
    pts, attrs = [], []
    seen = {}
    for lineno, line in lines:
        if len(pts) == n:
            raise ParseError("more vertices than the header declares", lineno)
        toks = line.split()
        if len(toks) != width:
            raise ParseError(f"expected {width} fields, got {len(toks)}", lineno)
        p = (_float(toks[1], lineno), _float(toks[2], lineno))
        if p in seen:
            raise ParseError(f"duplicate point {p} (first on line {seen[p]})", lineno)
        seen[p] = lineno
        pts.append(p)
        attrs.append([_float(t, lineno) for t in toks[3:3 + n_attr]])
    if len(pts) != n:
        raise ParseError(f"header declares {n} vertices, found {len(pts)}", lineno if pts else 1)
    return pts, attrs


def parse_csv(text: Iterable[str]) -> List[tuple]:
    """``x,y`` rows; a non-numeric first row is taken as a header."""
    pts = []
    seen = {}
    first = True
    for lineno, line in _content_lines(text):
        toks = [t.strip() for t in line.split(",")]
        try:
            if len(toks) != 2:
                raise ParseError(f"expected 'x,y', got {line!r}", lineno)
            p = (_float(toks[0], lineno), _float(toks[1], lineno))
        except ParseError:
            if first and len(toks) == 2:
                first = False
                continue
            raise
        first = False
        if p in seen:
            raise ParseError(f"duplicate point {p} (first on line {seen[p]})", lineno)
        seen[p] = lineno
        pts.append(p)
    return pts


def read_points(src: PathOrStream, fmt: Optional[str] = None) -> np.ndarray:
    """Points from a .node or CSV file (format from the suffix unless given)."""
    if fmt is None:
        name = getattr(src, "name", src) if not isinstance(src, io.StringIO) else ""
        name = str(name)
        if name.endswith(".node"):
            fmt = "node"
        elif name.endswith(".csv") or name.endswith(".txt"):
            fmt = "csv"
    fh, close = _open_text(src)
    try:
        text = fh.read().splitlines()
    finally:
        if close:
            fh.close()
    if fmt is None:
        first = next((l for _, l in _content_lines(text)), "")
        fmt = "csv" if "," in first else "node"
    if fmt == "node":
        pts, _ = parse_node(text)
    elif fmt == "csv":
        pts = parse_csv(text)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return np.asarray(pts, dtype=float).reshape(-1, 2)


def read_node(path: PathOrStream):
    fh, close = _open_text(path)
    try:
        return parse_node(fh.read().splitlines())
    finally:
        if close:
            fh.close()


def read_ele(path: PathOrStream) -> List[tuple]:
    fh, close = _open_text(path)
    try:
        lines = _content_lines(fh.read().splitlines())
        lineno, header = next(lines)
        n = int(header.split()[0])
        out = []
        for lineno, line in lines:
            toks = line.split()
            out.append(tuple(int(t) for t in toks[1:4]))
        if len(out) != n:
            raise ParseError(f"header declares {n} triangles, found {len(out)}", lineno)
        return out
    finally:
        if close:
            fh.close()


def _coords(tri, transform):
    a = np.asarray(tri.points, dtype=float)
    return transform.inverse(a) if transform is not None else a


def format_node(tri, transform=None) -> str:
    a = _coords(tri, transform)
    kinds = getattr(tri, "kinds", None) or [0] * len(a)
    out = [f"{len(a)} 2 1 0"]
    for i, ((x, y), k) in enumerate(zip(a.tolist(), kinds), 1):
        out.append(f"{i} {x!r} {y!r} {k}")
    return "\n".join(out) + "\n"


def format_ele(tri) -> str:
    tris = tri.triangles()
    out = [f"{len(tris)} 3 0"]
    for i, (a, b, c) in enumerate(tris, 1):
        out.append(f"{i} {a + 1} {b + 1} {c + 1}")
    return "\n".join(out) + "\n"


def format_svg(tri, beta: Optional[float] = None, size: int = 800) -> str:
    """Edges as <line> elements; triangles worse than beta filled red."""
    from .geometry import radius_edge_ratio

    P = tri.points
    xs = [p[0] for p in P]
    ys = [p[1] for p in P]
    x0, y0 = min(xs), min(ys)
    span = max(max(xs) - x0, max(ys) - y0) or 1.0
    k = size / span

    def tx(p):
        return (p[0] - x0) * k, size - (p[1] - y0) * k

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
           f'viewBox="-2 -2 {size + 4} {size + 4}">']
    if beta is not None:
        for a, b, c in tri.triangles():
            if radius_edge_ratio((P[a], P[b], P[c])) > beta + 1e-9:
                pts = " ".join("%.3f,%.3f" % tx(P[v]) for v in (a, b, c))
                out.append(f'<polygon points="{pts}" fill="#f88" stroke="none"/>')
    for a, b in tri.edges():
        (x1, y1), (x2, y2) = tx(P[a]), tx(P[b])
        out.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
                   f'stroke="black" stroke-width="0.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_mesh(tri, base: str, transform=None, svg: bool = False,
               beta: Optional[float] = None) -> List[str]:
    """Write base.node, base.ele (and base.svg); returns the paths written."""
    paths = [base + ".node", base + ".ele"]
    with open(paths[0], "w", encoding="utf-8") as fh:
        fh.write(format_node(tri, transform))
    with open(paths[1], "w", encoding="utf-8") as fh:
        fh.write(format_ele(tri))
    if svg:
        paths.append(base + ".svg")
        with open(paths[2], "w", encoding="utf-8") as fh:
            fh.write(format_svg(tri, beta))
    return paths


def format_stats(record: dict) -> str:
    """key=value lines, keys sorted, floats at full precision."""
    out = []
    for k in sorted(record):
        v = record[k]
        if isinstance(v, float):
            v = repr(v)
        elif isinstance(v, bool):
            v = "true" if v else "false"
        out.append(f"{k}={v}")
    return "\n".join(out) + "\n"


def parse_stats(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        k, _, v = line.partition("=")
        out[k] = v
    return out
