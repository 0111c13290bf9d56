"""Adaptive exact predicates for planar points.

Each predicate first evaluates its determinant in double precision and
checks the result against a forward error bound.  Only when the sign is
not certified does it fall back to exact rational arithmetic, so the
returned sign is always the sign of the determinant of the *given*
floating point coordinates.
"""

from fractions import Fraction

_EPS = 2.0 ** -53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS
# below this magnitude products may be subnormal and the bounds above fail
_TINY = 1e-250

# relative width of the "treated as outside" band used by leaf tests
LEAF_BAND = 1e-12


def _sign(v):
    return (v > 0) - (v < 0)


def _orient_exact(ax, ay, bx, by, cx, cy):
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def orient2d(ax, ay, bx, by, cx, cy):
    """Sign of the signed area of (a, b, c): +1 left turn, -1 right turn, 0 collinear."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    detsum = abs(detleft) + abs(detright)
    if detsum > _TINY:
        bound = _CCW_BOUND * detsum
        if det > bound:
            return 1
        if -det > bound:
            return -1
    return _orient_exact(ax, ay, bx, by, cx, cy)


def _incircle_terms(ax, ay, bx, by, cx, cy, dx, dy):
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    bc = bdx * cdy - cdx * bdy
    ca = cdx * ady - adx * cdy
    ab = adx * bdy - bdx * ady
    return alift, blift, clift, bc, ca, ab


def _incircle_exact_parts(ax, ay, bx, by, cx, cy, dx, dy):
    vals = map(Fraction, (ax, ay, bx, by, cx, cy, dx, dy))
    return _incircle_terms(*vals)


def incircle_exact(ax, ay, bx, by, cx, cy, dx, dy):
    """Exact in-circle determinant as a Fraction (positive: d inside ccw abc)."""
    alift, blift, clift, bc, ca, ab = _incircle_exact_parts(ax, ay, bx, by, cx, cy, dx, dy)
    return alift * bc + blift * ca + clift * ab


def incircle(ax, ay, bx, by, cx, cy, dx, dy):
    """Sign of the in-circle determinant.

    Positive when d lies inside the circle through a, b, c and (a, b, c)
    is counter-clockwise; the sign flips for a clockwise triple.
    """
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    cdxady = cdx * ady
    adxcdy = adx * cdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    if permanent > _TINY:
        bound = _ICC_BOUND * permanent
        if det > bound:
            return 1
        if -det > bound:
            return -1
    return _sign(incircle_exact(ax, ay, bx, by, cx, cy, dx, dy))


def incircle_sos(a, b, c, d, keys):
    """In-circle sign with symbolic perturbation for cocircular input.

    ``keys`` holds one integer priority per point; ties are broken as if the
    lifted coordinate of the point with the smallest key were raised by the
    largest infinitesimal.  Never returns 0 for four distinct points with
    (a, b, c) non-collinear.
    """
    s = incircle(a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1])
    if s:
        return s
    _, _, _, bc, ca, ab = _incircle_exact_parts(a[0], a[1], b[0], b[1],
                                               c[0], c[1], d[0], d[1])
    # derivative of the determinant w.r.t. each point's lifted coordinate
    coeffs = (bc, ca, ab, -(bc + ca + ab))
    for _, coef in sorted(zip(keys, coeffs), key=lambda kc: kc[0]):
        if coef:
            return _sign(coef)
    return 0


def band_incircle(ax, ay, bx, by, cx, cy, dx, dy, threshold):
    """Compare the in-circle determinant of (a, b, c, d) against ``threshold``.

    Returns +1 if det > threshold, -1 if det < threshold and 0 on equality,
    decided exactly.  ``threshold`` is a non-negative float.
    """
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    cdxady = cdx * ady
    adxcdy = adx * cdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    if permanent > _TINY:
        bound = _ICC_BOUND * permanent + 4 * _EPS * (abs(det) + threshold)
        diff = det - threshold
        if diff > bound:
            return 1
        if -diff > bound:
            return -1
    exact = incircle_exact(ax, ay, bx, by, cx, cy, dx, dy)
    return _sign(exact - Fraction(threshold))
