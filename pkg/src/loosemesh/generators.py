"""Synthetic point sets for tests and benchmarks (raw coordinates in [0, 1]^2)."""

from __future__ import annotations

import math

import numpy as np

GENERATORS = ("uniform", "clustered", "grid", "circle")


def _dedupe(a: np.ndarray) -> np.ndarray:
    _, keep = np.unique(a, axis=0, return_index=True)
    return a[np.sort(keep)]


def uniform(n: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return _dedupe(rng.uniform(0.0, 1.0, size=(n, 2)))


def clustered(n: int, seed: int = 0, k: int = None, spread: float = 0.03) -> np.ndarray:
    """Gaussian blobs around k uniform centres, clipped to the unit square."""
    rng = np.random.default_rng(seed)
    if k is None:
        k = max(1, int(round(math.sqrt(n) / 2)))
    centres = rng.uniform(0.15, 0.85, size=(k, 2))
    lab = rng.integers(0, k, size=n)
    a = centres[lab] + rng.normal(0.0, spread, size=(n, 2))
    return _dedupe(np.clip(a, 0.0, 1.0))


def grid(n: int, seed: int = 0) -> np.ndarray:
    """Square lattice with ceil(sqrt(n))^2 points; the seed is ignored."""
    k = max(1, int(math.ceil(math.sqrt(n))))
    t = np.linspace(0.0, 1.0, k) if k > 1 else np.array([0.5])
    xx, yy = np.meshgrid(t, t)
    return np.stack([xx.ravel(), yy.ravel()], axis=1)


def circle(n: int, seed: int = 0, jitter: float = 0.0) -> np.ndarray:
    """n points on a circle, optionally jittered in angle."""
    rng = np.random.default_rng(seed)
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    if jitter:
        th = th + rng.uniform(-jitter, jitter, size=n) * (2.0 * math.pi / n)
    a = 0.5 + 0.5 * np.stack([np.cos(th), np.sin(th)], axis=1)
    return _dedupe(a)


def generate(name: str, n: int, seed: int = 0) -> np.ndarray:
    try:
        fn = {"uniform": uniform, "clustered": clustered, "grid": grid, "circle": circle}[name]
    except KeyError:
        raise ValueError(f"unknown generator {name!r}; choose from {GENERATORS}") from None
    return fn(n, seed)
