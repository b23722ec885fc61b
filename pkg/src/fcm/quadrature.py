"""Quadrature rules for polygonal regions and boundary chains.

Polygon regions are integrated by triangulating (centroid fan when the
polygon is star-shaped w.r.t. its centroid, ear clipping otherwise) and
applying a symmetric triangle rule.  Axis-aligned rectangles — including
the frequent "cut element fully covered" case — get a tensor Gauss rule
instead, which is exact for the tensor-polynomial integrands of the
method.  Boundary chains get per-segment Gauss-Legendre.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, UnsupportedTopologyError
from .geometry import polygon_area


@dataclass
class VolumeRule:
    points: np.ndarray   # (k, 2)
    weights: np.ndarray  # (k,)

    @property
    def total_weight(self):
        return float(self.weights.sum())


@dataclass
class BoundaryRule:
    points: np.ndarray
    weights: np.ndarray
    normals: np.ndarray  # outward unit normal per point

    @property
    def total_weight(self):
        return float(self.weights.sum())


_EMPTY_VOLUME = VolumeRule(points=np.zeros((0, 2)), weights=np.zeros(0))

# symmetric triangle rules in barycentric orbits; weights sum to 1
_TRI_DEG1 = (np.array([[1 / 3, 1 / 3, 1 / 3]]), np.array([1.0]))

_TRI_DEG2 = (
    np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6], [1 / 6, 1 / 6, 2 / 3]]),
    np.full(3, 1 / 3),
)


def _orbit3(a):
    b = 1.0 - 2.0 * a
    return [[b, a, a], [a, b, a], [a, a, b]]


def _orbit6(a, b):
    c = 1.0 - a - b
    return [[c, a, b], [c, b, a], [a, c, b], [b, c, a], [a, b, c], [b, a, c]]


_TRI_DEG4 = (
    np.array(_orbit3(0.445948490915965) + _orbit3(0.091576213509771)),
    np.concatenate([np.full(3, 0.223381589678011), np.full(3, 0.109951743655322)]),
)

_TRI_DEG6 = (
    np.array(_orbit3(0.249286745170910) + _orbit3(0.063089014491502)
             + _orbit6(0.310352451033785, 0.053145049844816)),
    np.concatenate([np.full(3, 0.116786275726379), np.full(3, 0.050844906370207),
                    np.full(6, 0.082851075618374)]),
)

_TRI_RULES = {1: _TRI_DEG1, 2: _TRI_DEG2, 4: _TRI_DEG4, 6: _TRI_DEG6}


def triangle_rule(degree):
    """(barycentric points, weights) exact to at least ``degree``."""
    for d in sorted(_TRI_RULES):
        if d >= degree:
            return _TRI_RULES[d]
    raise ConfigurationError(f"no triangle rule of degree {degree} available")


@lru_cache(maxsize=32)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gauss_points(degree):
    """Node count for a 1D Gauss rule exact to ``degree``."""
    return (degree + 2) // 2


def tensor_rule(box, n):
    """n x n tensor Gauss-Legendre rule on a rectangle, exact per-axis to
    degree 2n-1."""
    x0, x1, y0, y1 = box
    gx, gw = _gauss_legendre(n)
    xs = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * gx
    ys = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * gx
    wx = 0.5 * (x1 - x0) * gw
    wy = 0.5 * (y1 - y0) * gw
    X, Y = np.meshgrid(xs, ys)
    W = np.outer(wy, wx)
    return VolumeRule(points=np.column_stack([X.ravel(), Y.ravel()]),
                      weights=W.ravel())


def _as_rectangle(poly, tol):
    """(x0, x1, y0, y1) when poly is an axis-aligned rectangle, else None."""
    if poly.shape[0] != 4:
        return None
    x0, x1 = poly[:, 0].min(), poly[:, 0].max()
    y0, y1 = poly[:, 1].min(), poly[:, 1].max()
    for px, py in poly:
        if min(abs(px - x0), abs(px - x1)) > tol or min(abs(py - y0), abs(py - y1)) > tol:
            return None
    # rectangle must have one vertex per corner
    corners = {(px < 0.5 * (x0 + x1), py < 0.5 * (y0 + y1)) for px, py in poly}
    if len(corners) != 4:
        return None
    return (x0, x1, y0, y1)


def _fan_triangles(poly, tol_area):
    cx, cy = _polygon_centroid(poly)
    c = np.array([cx, cy])
    tris = []
    n = poly.shape[0]
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        area = 0.5 * ((a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]))
        if area < -tol_area:
            return None  # not star-shaped w.r.t. centroid
        if area > tol_area:
            tris.append((c, a, b, area))
    return tris


def _polygon_centroid(poly):
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    cx = ((x + xn) * cross).sum() / (6.0 * a)
    cy = ((y + yn) * cross).sum() / (6.0 * a)
    return cx, cy


def _ear_clip(poly, tol_area):
    """Triangulate a simple polygon by ear clipping; returns list of
    (a, b, c, area) with positive areas."""
    idx = list(range(poly.shape[0]))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10000:
            raise UnsupportedTopologyError("ear clipping failed to terminate")
        found = False
        n = len(idx)
        for k in range(n):
            i0, i1, i2 = idx[(k - 1) % n], idx[k], idx[(k + 1) % n]
            a, b, c = poly[i0], poly[i1], poly[i2]
            area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
            if area <= tol_area:
                if abs(area) <= tol_area:
                    # collinear/duplicate vertex: drop it outright
                    idx.pop(k)
                    found = True
                    break
                continue
            # no other active vertex may lie inside the candidate ear
            ok = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                if _point_in_tri(poly[j], a, b, c, tol_area):
                    ok = False
                    break
            if ok:
                tris.append((a, b, c, area))
                idx.pop(k)
                found = True
                break
        if not found:
            raise UnsupportedTopologyError("polygon could not be triangulated")
    a, b, c = poly[idx[0]], poly[idx[1]], poly[idx[2]]
    area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    if area > tol_area:
        tris.append((a, b, c, area))
    return tris


def _point_in_tri(p, a, b, c, tol):
    d1 = (p[0] - a[0]) * (b[1] - a[1]) - (p[1] - a[1]) * (b[0] - a[0])
    d2 = (p[0] - b[0]) * (c[1] - b[1]) - (p[1] - b[1]) * (c[0] - b[0])
    d3 = (p[0] - c[0]) * (a[1] - c[1]) - (p[1] - c[1]) * (a[0] - c[0])
    return d1 < -tol and d2 < -tol and d3 < -tol  # strictly inside (CCW tri)


def volume_rule(polygon, degree, min_area=0.0):
    """Positive-weight rule over a CCW polygon, exact to total ``degree``
    on triangulated regions and per-axis degree >= ``degree`` on
    axis-aligned rectangles.  Returns the empty rule when the polygon is
    missing or its area does not exceed ``min_area``."""
    if polygon is None:
        return _EMPTY_VOLUME
    poly = np.asarray(polygon, float)
    if poly.shape[0] < 3:
        return _EMPTY_VOLUME
    area = polygon_area(poly)
    scale = max(np.ptp(poly[:, 0]), np.ptp(poly[:, 1]))
    if area <= max(min_area, 0.0) or area <= 1e-16 * scale * scale:
        return _EMPTY_VOLUME

    rect = _as_rectangle(poly, 1e-12 * scale)
    if rect is not None:
        return tensor_rule(rect, gauss_points(degree))

    tol_area = 1e-15 * scale * scale
    tris = _fan_triangles(poly, tol_area)
    if tris is None:
        tris = _ear_clip(poly, tol_area)

    bary, bw = triangle_rule(degree)
    pts = []
    wts = []
    for a, b, c, tarea in tris:
        corners = np.array([a, b, c])
        pts.append(bary @ corners)
        wts.append(bw * tarea)
    return VolumeRule(points=np.vstack(pts), weights=np.concatenate(wts))


def boundary_rule(chain, degree):
    """Per-segment Gauss-Legendre rule along a boundary chain, carrying the
    outward normal of each segment to its quadrature points."""
    n1d = gauss_points(degree)
    gx, gw = _gauss_legendre(n1d)
    pts = []
    wts = []
    nrm = []
    for i in range(chain.n_segments):
        a, b = chain.segment(i)
        d = b - a
        length = float(np.hypot(*d))
        if length == 0.0:
            continue
        mid = 0.5 * (a + b)
        pts.append(mid[None, :] + 0.5 * gx[:, None] * d[None, :])
        wts.append(0.5 * length * gw)
        nrm.append(np.repeat(chain.normals[i][None, :], n1d, axis=0))
    if not pts:
        return BoundaryRule(points=np.zeros((0, 2)), weights=np.zeros(0),
                            normals=np.zeros((0, 2)))
    return BoundaryRule(points=np.vstack(pts), weights=np.concatenate(wts),
                        normals=np.vstack(nrm))
