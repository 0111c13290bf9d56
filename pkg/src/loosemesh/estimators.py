"""Estimator-style wrapper around the refiners."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .pipeline import ALGORITHMS, mesh_points
from .validation import check_points


class LooseMeshRefiner(BaseEstimator):
    """Quality Delaunay refinement of a 2D point set.

    ``fit(X)`` meshes X; afterwards ``vertices_`` (input coordinates),
    ``triangles_`` (index triples), ``steiner_count_`` and ``audit_`` are
    available. ``transform(X)`` returns the refined vertex set, and
    ``predict(Q)`` gives, for each query point, the index of the mesh
    triangle containing it (-1 outside the mesh).
    """

    def __init__(self, algorithm: str = "fast", beta: float = math.sqrt(2.0),
                 max_insertions: Optional[int] = None, c_shrink: float = 0.25):
        self.algorithm = algorithm
        self.beta = beta
        self.max_insertions = max_insertions
        self.c_shrink = c_shrink

    def fit(self, X, y=None):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.beta < math.sqrt(2.0) * (1 - 1e-12) and self.max_insertions is None:
            raise ValueError("beta below sqrt(2) needs max_insertions")
        a = check_points(X)
        res = mesh_points(a, self.algorithm, self.beta, max_insertions=self.max_insertions,
                          c_shrink=self.c_shrink)
        self.result_ = res
        self.vertices_ = res.transform.inverse(np.asarray(res.tri.points, dtype=float))
        self.triangles_ = np.asarray(res.tri.triangles(), dtype=np.intp).reshape(-1, 3)
        self.steiner_count_ = res.steiner_count
        self.audit_ = res.audit
        self.n_features_in_ = 2
        return self

    def transform(self, X=None):
        check_is_fitted(self, "vertices_")
        return self.vertices_.copy()

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()

    def predict(self, Q):
        """Containing triangle index per query row, -1 when outside."""
        check_is_fitted(self, "triangles_")
        q = check_points(Q) if len(np.atleast_2d(Q)) else np.empty((0, 2))
        V = self.vertices_
        A, B, C = (V[self.triangles_[:, k]] for k in range(3))
        out = np.full(len(q), -1, dtype=np.intp)
        for i, p in enumerate(q):
            d1 = _cross(A, B, p)
            d2 = _cross(B, C, p)
            d3 = _cross(C, A, p)
            eps = 1e-12 * max(1.0, float(np.abs(V).max()) ** 2)
            ok = ((d1 >= -eps) & (d2 >= -eps) & (d3 >= -eps)) | ((d1 <= eps) & (d2 <= eps) & (d3 <= eps))
            hit = np.flatnonzero(ok)
            if len(hit):
                out[i] = hit[0]
        return out

    def score(self, X=None, y=None):
        """Minimum mesh angle in degrees."""
        check_is_fitted(self, "audit_")
        return float(self.audit_.min_angle_deg)


def _cross(a, b, p):
    return (b[:, 0] - a[:, 0]) * (p[1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (p[0] - a[:, 0])
