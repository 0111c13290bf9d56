"""Input checks shared by the estimator and the pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .exceptions import DuplicatePointError


def check_points(X, min_points: int = 1) -> np.ndarray:
    """Finite float array of shape (n, 2) without repeated rows."""
    a = check_array(X, dtype=np.float64, ensure_min_samples=min_points,
                    ensure_all_finite=True)
    if a.shape[1] != 2:
        raise ValueError(f"expected points of shape (n, 2), got {a.shape}")
    u = np.unique(a, axis=0)
    if len(u) != len(a):
        raise DuplicatePointError(f"{len(a) - len(u)} repeated point(s) in input")
    return a
