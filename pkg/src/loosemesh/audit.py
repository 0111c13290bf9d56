"""Quality and conformity audit of a finished mesh."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from sklearn.neighbors import NearestNeighbors

from .baseline import KIND_STEINER, quality
from .delaunay import Triangulation, _Grid, loose_pairs_of
from .geometry import encroaches

BETA_SLACK = 1e-9


@dataclass
class MeshAudit:
    beta: float
    min_angle_deg: float
    max_radius_edge: float
    triangle_count: int
    vertex_count: int
    steiner_count: int
    loose_pair_count: int
    encroached_boundary_count: int
    all_points_in_unit_square: bool
    lfs_ratio_min: float

    @property
    def passed(self) -> bool:
        return (self.loose_pair_count == 0
                and self.max_radius_edge <= self.beta + BETA_SLACK
                and self.encroached_boundary_count == 0
                and self.all_points_in_unit_square)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return d


def _nn_dist(a: np.ndarray, queries: np.ndarray) -> np.ndarray:
    nn = NearestNeighbors(n_neighbors=2).fit(a)
    d, _ = nn.kneighbors(queries)
    return d[:, 1]


def encroached_boundary(tri: Triangulation) -> int:
    """Hull edges whose diametral disk holds a vertex strictly inside."""
    P = tri.points
    grid = _Grid(P)
    count = 0
    for e in tri.half_edges():
        a, b, _, r = tri.edge_info(e)
        if r >= 0:
            continue
        p, q = P[a], P[b]
        cx, cy = 0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])
        rad = 0.5 * math.dist(p, q)
        for i in grid.near(cx, cy, rad * (1 + 1e-9)):
            if i != a and i != b and encroaches(P[i], p, q):
                count += 1
                break
    return count


def audit(tri: Triangulation, input_points: Optional[Sequence] = None,
          beta: float = math.sqrt(2.0)) -> MeshAudit:
    """Audit a mesh over the normalized frame.

    ``input_points`` (normalized) enable the lfs ratio: the minimum over
    input points of nearest-neighbour distance in the output divided by
    that in the input (1.0 when fewer than two input points).
    """
    P = np.asarray(tri.points, dtype=float)
    ang, worst = quality(tri)
    kinds = getattr(tri, "kinds", None)
    steiner = sum(1 for k in kinds if k == KIND_STEINER) if kinds else 0
    inside = bool(np.all((P >= 0.0) & (P <= 1.0)))
    ratio = 1.0
    if input_points is not None and len(input_points) >= 2:
        inp = np.asarray(input_points, dtype=float).reshape(-1, 2)
        lfs_in = _nn_dist(inp, inp)
        lfs_out = _nn_dist(P, inp)
        ratio = float(np.min(lfs_out / lfs_in))
    return MeshAudit(
        beta=beta,
        min_angle_deg=ang,
        max_radius_edge=worst,
        triangle_count=tri.n_triangles,
        vertex_count=len(P),
        steiner_count=steiner,
        loose_pair_count=len(loose_pairs_of(tri, beta)),
        encroached_boundary_count=encroached_boundary(tri),
        all_points_in_unit_square=inside,
        lfs_ratio_min=ratio,
    )
