"""Off-center Delaunay refinement of 2D point sets by loose pair removal."""

from .audit import MeshAudit, audit
from .baseline import RefinerConfig, RefinementStats, refine
from .constants import RefinementConstants
from .delaunay import Triangulation, loose_pairs_of
from .estimators import LooseMeshRefiner
from .exceptions import (ConfigError, DegenerateError, DuplicatePointError, LemmaViolation,
                         MeshError, ParseError, QuadtreeError)
from .fast import FastStats, fast_refine
from .pipeline import ALGORITHMS, MeshResult, mesh_points
from .quadtree import Quadtree, QuadtreeParams

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "ConfigError", "DegenerateError", "DuplicatePointError", "FastStats",
    "LemmaViolation", "LooseMeshRefiner", "MeshAudit", "MeshError", "MeshResult", "ParseError",
    "Quadtree", "QuadtreeError", "QuadtreeParams", "RefinementConstants", "RefinementStats",
    "RefinerConfig", "Triangulation", "audit", "fast_refine", "loose_pairs_of", "mesh_points",
    "refine",
]
