#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

#########################################
# In this section we define the planar primitives used everywhere else
# 1. Orientation and in-circle predicates with a floating-point filter and an exact fallback
# 2. Circumcircles, segment intersection and edge angles
#########################################

EPSILON = 2.0 ** -53
CCW_ERRBOUND = (3.0 + 16.0 * EPSILON) * EPSILON
ICC_ERRBOUND = (10.0 + 96.0 * EPSILON) * EPSILON


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point
    b: Point


class PredicateError(ValueError):
    """Raised when a predicate is called outside its precondition."""


class DegenerateTriangleError(ValueError):
    """Raised when three points that must span a triangle are collinear."""


class ZeroLengthEdgeError(ValueError):
    """Raised for an edge whose endpoints coincide."""


def _sign(value):
    return int(value > 0) - int(value < 0)


def _orient2d_exact(a, b, c):
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def _incircle_exact(a, b, c, d):
    dx, dy = Fraction(d[0]), Fraction(d[1])
    adx, ady = Fraction(a[0]) - dx, Fraction(a[1]) - dy
    bdx, bdy = Fraction(b[0]) - dx, Fraction(b[1]) - dy
    cdx, cdy = Fraction(c[0]) - dx, Fraction(c[1]) - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    return _sign(det)


def orient2d(a, b, c, exact=False):
    """Sign of the signed area of the triangle abc.

    The determinant is first evaluated in floating point and accepted when it exceeds the forward error bound;
    otherwise the decision is recomputed with exact rational arithmetic.

    :param a: first point
    :type a: Point or tuple
    :param b: second point
    :type b: Point or tuple
    :param c: third point
    :type c: Point or tuple
    :param exact: skip the floating-point filter and always decide exactly
    :type exact: bool

    :returns: +1 if abc is counterclockwise, -1 if clockwise, 0 if collinear
    :rtype: int
    """

    if exact:
        return _orient2d_exact(a, b, c)

    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright

    if detleft > 0.0:
        if detright <= 0.0:
            return _sign(det)
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            return _sign(det)
        detsum = -detleft - detright
    else:
        return _sign(det)

    errbound = CCW_ERRBOUND * detsum
    if det >= errbound or -det >= errbound:
        return _sign(det)

    return _orient2d_exact(a, b, c)


def _incircle_unchecked(a, b, c, d, exact=False):
    if exact:
        return _incircle_exact(a, b, c, d)

    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]

    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady

    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy

    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    errbound = ICC_ERRBOUND * permanent
    if det > errbound or -det > errbound:
        return _sign(det)

    return _incircle_exact(a, b, c, d)


def incircle(a, b, c, d, exact=False):
    """Position of d relative to the circle through the counterclockwise triangle abc.

    :param a: first triangle vertex
    :type a: Point or tuple
    :param b: second triangle vertex
    :type b: Point or tuple
    :param c: third triangle vertex
    :type c: Point or tuple
    :param d: query point
    :type d: Point or tuple
    :param exact: skip the floating-point filter and always decide exactly
    :type exact: bool

    :returns: +1 if d is strictly inside, 0 if on the circle, -1 if outside
    :rtype: int
    """

    orientation = orient2d(a, b, c, exact=exact)
    if orientation < 0:
        raise PredicateError("incircle needs a counterclockwise triangle, got a clockwise one")
    if orientation == 0:
        raise PredicateError("incircle needs a counterclockwise triangle, got collinear points")

    return _incircle_unchecked(a, b, c, d, exact=exact)


def circumcircle(a, b, c):
    """Center and radius of the circle through a, b and c.

    :returns: center, radius
    :rtype: Point, float
    """

    if orient2d(a, b, c) == 0:
        raise DegenerateTriangleError("Collinear points " + str((tuple(a), tuple(b), tuple(c))) + " have no circumcircle")

    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    b_norm = bx * bx + by * by
    c_norm = cx * cx + cy * cy
    ux = (cy * b_norm - by * c_norm) / d
    uy = (bx * c_norm - cx * b_norm) / d

    return Point(a[0] + ux, a[1] + uy), math.hypot(ux, uy)


def _on_collinear_segment(p, q, r):
    # r is collinear with pq
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


def segment_crosses_segment(s1, s2):
    """True iff the closed segments s1 and s2 share at least one point. Touching counts as crossing.

    :type s1: Segment or pair of points
    :type s2: Segment or pair of points
    :rtype: bool
    """

    a, b = s1
    c, d = s2
    o1 = orient2d(a, b, c)
    o2 = orient2d(a, b, d)
    o3 = orient2d(c, d, a)
    o4 = orient2d(c, d, b)

    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_collinear_segment(a, b, c):
        return True
    if o2 == 0 and _on_collinear_segment(a, b, d):
        return True
    if o3 == 0 and _on_collinear_segment(c, d, a):
        return True
    if o4 == 0 and _on_collinear_segment(c, d, b):
        return True

    return False


def segment_meets_box(a, b, box):
    """True iff the closed segment ab meets the closed axis-aligned box.

    Separating-axis test: bounding boxes first, then the sign of the four corners against the line ab.

    :param box: (xmin, xmax, ymin, ymax)
    :type box: tuple
    :rtype: bool
    """

    xmin, xmax, ymin, ymax = box
    if max(a[0], b[0]) < xmin or min(a[0], b[0]) > xmax:
        return False
    if max(a[1], b[1]) < ymin or min(a[1], b[1]) > ymax:
        return False

    signs = {orient2d(a, b, corner) for corner in ((xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax))}

    return signs != {1} and signs != {-1}


def point_in_box(p, box):
    xmin, xmax, ymin, ymax = box
    return xmin <= p[0] <= xmax and ymin <= p[1] <= ymax


def edge_angle_and_hproj(e):
    """Absolute angle of an edge with the x-axis, folded to [0, pi/2], and the length of its horizontal projection.

    :param e: the edge
    :type e: Segment or pair of points

    :returns: angle, hproj
    :rtype: float, float
    """

    a, b = e
    dx = abs(b[0] - a[0])
    dy = abs(b[1] - a[1])
    if dx == 0.0 and dy == 0.0:
        raise ZeroLengthEdgeError("Edge endpoints coincide at " + str(tuple(a)))

    return math.atan2(dy, dx), dx


#########################################
# Vectorised predicates: floating-point filter over arrays, exact fallback on the uncertain rows only
#########################################


def orient2d_array(a, b, c):
    """Row-wise orient2d over (N, 2) arrays (broadcasting allowed).

    :rtype: ndarray of int
    """

    a, b, c = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(c, dtype=float))
    detleft = (a[..., 0] - c[..., 0]) * (b[..., 1] - c[..., 1])
    detright = (a[..., 1] - c[..., 1]) * (b[..., 0] - c[..., 0])
    det = detleft - detright
    errbound = CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    signs = np.sign(det).astype(int)

    uncertain = np.abs(det) <= errbound
    uncertain &= (detleft != 0.0) | (detright != 0.0)
    for ix in zip(*np.nonzero(uncertain)):
        signs[ix] = _orient2d_exact(a[ix], b[ix], c[ix])

    return signs


def incircle_array(a, b, c, d):
    """Row-wise in-circle test over (N, 2) arrays; triangles abc are assumed counterclockwise.

    :rtype: ndarray of int
    """

    a, b, c, d = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, c, d)))
    adx, ady = a[..., 0] - d[..., 0], a[..., 1] - d[..., 1]
    bdx, bdy = b[..., 0] - d[..., 0], b[..., 1] - d[..., 1]
    cdx, cdy = c[..., 0] - d[..., 0], c[..., 1] - d[..., 1]

    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy

    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = ((np.abs(bdxcdy) + np.abs(cdxbdy)) * alift
                 + (np.abs(cdxady) + np.abs(adxcdy)) * blift
                 + (np.abs(adxbdy) + np.abs(bdxady)) * clift)
    signs = np.sign(det).astype(int)

    uncertain = np.abs(det) <= ICC_ERRBOUND * permanent
    for ix in zip(*np.nonzero(uncertain)):
        signs[ix] = _incircle_exact(a[ix], b[ix], c[ix], d[ix])

    return signs
