import math

import gmpy2
import numpy as np
import pytest

from loosemesh.frame import normalize_input
from loosemesh.generators import generate

SQRT2 = math.sqrt(2.0)


def mpq(x):
    return gmpy2.mpq(x)


def orient_oracle(ax, ay, bx, by, cx, cy):
    ax, ay, bx, by, cx, cy = map(mpq, (ax, ay, bx, by, cx, cy))
    d = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (d > 0) - (d < 0)


def incircle_oracle(ax, ay, bx, by, cx, cy, dx, dy):
    rows = []
    for x, y in ((ax, ay), (bx, by), (cx, cy)):
        x, y = mpq(x) - mpq(dx), mpq(y) - mpq(dy)
        rows.append((x, y, x * x + y * y))
    (a, b, c), (d, e, f), (g, h, i) = rows
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    return (det > 0) - (det < 0)


def normalized(name, n, seed):
    pts, _ = normalize_input(generate(name, n, seed))
    return pts


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
