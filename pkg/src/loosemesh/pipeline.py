"""One-call meshing: normalize, refine with the chosen algorithm, audit."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

from .audit import MeshAudit, audit
from .baseline import RefinerConfig, refine
from .constants import RefinementConstants
from .frame import Transform, normalize_input

ALGORITHMS = ("baseline-offcenter", "baseline-circumcenter", "fast")


@dataclass
class MeshResult:
    tri: object
    transform: Transform
    stats: object
    audit: Optional[MeshAudit]
    algorithm: str
    beta: float
    wall_time: float
    input_points: list

    @property
    def steiner_count(self) -> int:
        return self.stats.steiner_count


def mesh_points(raw, algorithm: str = "fast", beta: float = math.sqrt(2.0),
                max_insertions: Optional[int] = None, c_shrink: float = 0.25,
                do_audit: bool = True) -> MeshResult:
    """Mesh raw 2D points; ``wall_time`` excludes the final Delaunay build for
    the fast algorithm (quadtree plus refinement loop only)."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    pts, tf = normalize_input(raw)
    t0 = time.perf_counter()
    if algorithm == "fast":
        from .fast import fast_refine

        consts = RefinementConstants(beta=beta, c_shrink=c_shrink)
        tri, st = fast_refine(pts, consts, max_insertions=max_insertions)
        wall = st.elapsed
    else:
        mode = "off_center" if algorithm == "baseline-offcenter" else "circumcenter"
        tri, st = refine(pts, RefinerConfig(beta=beta, mode=mode, max_insertions=max_insertions))
        wall = time.perf_counter() - t0
    a = audit(tri, pts, beta) if do_audit else None
    return MeshResult(tri, tf, st, a, algorithm, beta, wall, pts)
