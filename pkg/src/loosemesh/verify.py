"""Brute-force checks used by the ``verify`` command and the test suite."""

from __future__ import annotations

import math
from typing import List

import numpy as np

from .baseline import RefinerConfig, refine
from .delaunay import Triangulation, loose_pairs_of
from .geometry import angle_threshold

SQRT2 = math.sqrt(2.0)


def lemma1_trial(pts, beta: float = SQRT2) -> tuple:
    """(has loose pair, min Delaunay angle <= alpha) for one point set."""
    tri = Triangulation.build([tuple(p) for p in pts])
    loose = bool(loose_pairs_of(tri, beta))
    small = tri.min_angle() <= angle_threshold(beta)
    return loose, small


def jittered_lattice(n: int, rng, jitter: float) -> np.ndarray:
    """A full k-by-k triangular lattice patch (k*k <= n) with its interior
    points moved by up to jitter * spacing.  The rim stays put: jittered
    hull rows and partial rows both leave slivers on the hull."""
    k = max(2, int(math.isqrt(n)))
    ii, jj = np.meshgrid(np.arange(k), np.arange(k))
    x = ii + 0.5 * (jj % 2)
    y = jj * math.sqrt(3) / 2
    a = np.column_stack([x.ravel(), y.ravel()])
    rim = ((ii == 0) | (ii == k - 1) | (jj == 0) | (jj == k - 1)).ravel()
    a[~rim] += rng.uniform(-jitter, jitter, size=(int((~rim).sum()), 2))
    return np.unique(a, axis=0)


def lemma1_table(trials: int = 500, max_n: int = 60, seed: int = 0,
                 beta: float = SQRT2) -> List[List[int]]:
    """Contingency table ``t[loose][small]``.

    Half the sets are uniform in the unit square (nearly always skinny),
    half are triangular lattices with random jitter, which straddle the
    angle threshold.
    """
    rng = np.random.default_rng(seed)
    t = [[0, 0], [0, 0]]
    for k in range(trials):
        n = int(rng.integers(3, max_n + 1))
        if k % 2:
            pts = rng.uniform(0.0, 1.0, size=(n, 2))
        else:
            pts = jittered_lattice(max(n, 4), rng, float(rng.uniform(0.0, 0.3)))
        loose, small = lemma1_trial(pts.tolist(), beta)
        t[int(loose)][int(small)] += 1
    return t


def handled_lengths(pts, beta: float = SQRT2) -> List[float]:
    """Lengths of the loose pairs handled by an off-center baseline run, in order."""
    cfg = RefinerConfig(beta=beta, record_lengths=True)
    _, st = refine(pts, cfg)
    return st.handled_lengths


def first_decrease(seq, tol: float = 1e-12):
    """Index of the first element smaller than its predecessor minus tol, or None."""
    for i in range(1, len(seq)):
        if seq[i] < seq[i - 1] - tol:
            return i
    return None
