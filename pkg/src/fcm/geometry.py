"""Polygonal domain geometry and element/domain intersection.

The domain boundary is a closed CCW polygon.  Each background-grid element
is classified inside/outside/cut by clipping the directed polygon edges
against the (closed) element box.  A cut element gets:

- the boundary chain: the connected polyline of clipped edge pieces that
  this element owns, with per-segment outward normals,
- the inside region: one CCW polygon (chain + element-boundary walk),
- the outside regions: polygons tiling element minus inside.

Pieces that lie exactly on a shared element face are owned by the element
on the interior side of the boundary (probe point nudged inward), so a
boundary running along a grid line is claimed by exactly one element.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, UnsupportedTopologyError

# tolerances, all relative to the element size
EDGE_EPS_REL = 1e-12    # clip tie-break: within this of a face counts as inside
OWN_PROBE_REL = 1e-9    # inward nudge for face-ownership probes
JOIN_REL = 1e-9         # max endpoint gap when merging pieces into a chain
AREA_DROP_REL = 1e-14   # regions smaller than this * h^2 are dropped

OUTSIDE, INSIDE, CUT = 0, 1, 2
_CLASS_NAMES = {OUTSIDE: "outside", INSIDE: "inside", CUT: "cut"}


def polygon_area(pts):
    """Signed (shoelace) area of a closed polygon given without repeated
    end vertex; positive for CCW."""
    pts = np.asarray(pts, float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


class DomainPolygon:
    """Simple closed polygon with CCW orientation (interior on the left)."""

    def __init__(self, vertices):
        v = np.array(vertices, float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ConfigurationError("polygon needs at least 3 (x, y) vertices")
        if np.allclose(v[0], v[-1]):
            v = v[:-1]
        if not np.isfinite(v).all():
            raise ConfigurationError("polygon vertices must be finite")
        d = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(d[:, 0], d[:, 1])
        scale = max(lengths.max(), 1e-300)
        if (lengths < 1e-14 * scale).any():
            raise ConfigurationError("polygon has a zero-length edge")
        area = polygon_area(v)
        if area <= 0.0:
            raise ConfigurationError(
                f"polygon must be CCW with positive area, got signed area {area}")
        self.vertices = v
        self._edge_vec = d
        self._edge_len = lengths
        # outward normal of a CCW edge (dx, dy) is (dy, -dx)/len
        self._normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]

    @property
    def n_edges(self):
        return self.vertices.shape[0]

    @property
    def area(self):
        return polygon_area(self.vertices)

    @property
    def perimeter(self):
        return float(self._edge_len.sum())

    @property
    def bbox(self):
        v = self.vertices
        return (float(v[:, 0].min()), float(v[:, 0].max()),
                float(v[:, 1].min()), float(v[:, 1].max()))

    def edge(self, i):
        a = self.vertices[i]
        return a, a + self._edge_vec[i]

    def edge_normal(self, i):
        return self._normals[i]

    def contains(self, pts):
        """Crossing-number point-in-polygon test, vectorized; boundary
        points resolve by parity (use signed_distance for ties)."""
        pts = np.atleast_2d(np.asarray(pts, float))
        out = np.empty(pts.shape[0], bool)
        for lo in range(0, pts.shape[0], 256):
            out[lo:lo + 256] = self._contains_chunk(pts[lo:lo + 256])
        return out

    def _contains_chunk(self, pts):
        v = self.vertices
        ax, ay = v[:, 0][None, :], v[:, 1][None, :]
        bx = np.roll(v[:, 0], -1)[None, :]
        by = np.roll(v[:, 1], -1)[None, :]
        x, y = pts[:, 0][:, None], pts[:, 1][:, None]
        cond = (ay > y) != (by > y)
        denom = np.where(cond, by - ay, 1.0)
        xi = ax + (y - ay) / denom * (bx - ax)
        crossings = (cond & (x < xi)).sum(axis=1)
        return (crossings % 2) == 1

    def distance_to_boundary(self, pts):
        """Unsigned distance from each point to the polygon boundary."""
        pts = np.atleast_2d(np.asarray(pts, float))
        out = np.empty(pts.shape[0])
        for lo in range(0, pts.shape[0], 256):
            out[lo:lo + 256] = self._dist_chunk(pts[lo:lo + 256])
        return out

    def _dist_chunk(self, pts):
        a = self.vertices[None, :, :]
        d = self._edge_vec[None, :, :]
        w = pts[:, None, :] - a
        t = np.clip((w * d).sum(-1) / (self._edge_len[None, :] ** 2), 0.0, 1.0)
        proj = a + t[:, :, None] * d
        dist = np.hypot(*(pts[:, None, :] - proj).transpose(2, 0, 1))
        return dist.min(axis=1)

    def signed_distance(self, pts):
        """Negative inside, positive outside."""
        d = self.distance_to_boundary(pts)
        sign = np.where(self.contains(pts), -1.0, 1.0)
        return sign * d


def make_disc_polygon(center=(0.0, 0.0), radius=1.0, n_vertices=4096):
    """Disc approximated by an inscribed regular polygon (CCW)."""
    if n_vertices < 16:
        raise ConfigurationError("disc polygon needs at least 16 vertices")
    if radius <= 0:
        raise ConfigurationError("disc radius must be positive")
    k = np.arange(n_vertices)
    theta = 2.0 * np.pi * k / n_vertices
    verts = np.column_stack([center[0] + radius * np.cos(theta),
                             center[1] + radius * np.sin(theta)])
    return DomainPolygon(verts)


@dataclass(frozen=True)
class ShiftSpec:
    """Relative grid shift; the offset applied to the grid origin is
    (s*h, s*h/3) so no sweep direction is axis-aligned."""

    s: float
    h: float

    def __post_init__(self):
        if not (0.0 <= self.s <= 1.0):
            raise ConfigurationError(f"shift fraction must be in [0, 1], got {self.s}")
        if not (self.h > 0):
            raise ConfigurationError("shift spec needs a positive element size")

    @property
    def offset(self):
        return (self.s * self.h, self.s * self.h / 3.0)


def shift_grid(grid, spec):
    ox, oy = grid.origin
    dx, dy = spec.offset
    return replace(grid, origin=(ox + dx, oy + dy))


@dataclass
class Chain:
    """Boundary polyline within one element with per-segment outward
    normals; ``normals[i]`` belongs to points[i] -> points[i+1] (and the
    closing segment when ``closed``)."""

    points: np.ndarray
    normals: np.ndarray
    closed: bool

    @property
    def n_segments(self):
        return self.normals.shape[0]

    def segment(self, i):
        a = self.points[i]
        b = self.points[(i + 1) % self.points.shape[0]]
        return a, b

    @property
    def length(self):
        total = 0.0
        for i in range(self.n_segments):
            a, b = self.segment(i)
            total += float(np.hypot(*(b - a)))
        return total

    def tangents(self):
        """Unit tangents per segment (rotate the outward normal by +90deg,
        i.e. t = (-ny, nx), so t x n is consistent across segments)."""
        n = self.normals
        return np.column_stack([-n[:, 1], n[:, 0]])

    def tangent_projectors(self):
        """P = I - n n^T per segment, shape (n_segments, 2, 2)."""
        n = self.normals
        eye = np.eye(2)[None, :, :]
        return eye - n[:, :, None] * n[:, None, :]


@dataclass
class CutGeometry:
    """Classification and clipped geometry of one element."""

    classification: str
    inside_region: np.ndarray | None = None
    outside_regions: list = field(default_factory=list)
    chain: Chain | None = None

    @property
    def inside_area(self):
        return 0.0 if self.inside_region is None else polygon_area(self.inside_region)

    @property
    def outside_area(self):
        return float(sum(polygon_area(r) for r in self.outside_regions))


# ---------------------------------------------------------------------------
# clipping machinery
# ---------------------------------------------------------------------------

def _clip_segment_box(ax, ay, bx, by, box, eps):
    """Liang-Barsky clip of segment a->b against a closed box.

    Returns (t0, t1) or None.  Segments running along a face within
    ``eps`` are treated as inside the box."""
    x0, x1, y0, y1 = box
    dx, dy = bx - ax, by - ay
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, ax - x0), (dx, x1 - ax), (-dy, ay - y0), (dy, y1 - ay)):
        if p == 0.0:
            if q < -eps:
                return None
        else:
            r = q / p
            if p < 0.0:
                if r > t1:
                    return None
                if r > t0:
                    t0 = r
            else:
                if r < t0:
                    return None
                if r < t1:
                    t1 = r
    if t0 > t1:
        return None
    return t0, t1


def _owns_piece(mid, normal, box, probe):
    """True when this element is on the interior side of a chain piece.

    Pieces strictly inside the box are always owned; pieces on a face are
    owned iff a point nudged inward (against the outward normal) stays in
    the open box."""
    x0, x1, y0, y1 = box
    margin = min(mid[0] - x0, x1 - mid[0], mid[1] - y0, y1 - mid[1])
    if margin > probe:
        return True
    qx = mid[0] - probe * normal[0]
    qy = mid[1] - probe * normal[1]
    return (x0 < qx < x1) and (y0 < qy < y1)


def _perimeter_coord(pt, box):
    """Arc-length coordinate of a boundary point, CCW from (x0, y0)."""
    x0, x1, y0, y1 = box
    w, h = x1 - x0, y1 - y0
    d_bottom = pt[1] - y0
    d_right = x1 - pt[0]
    d_top = y1 - pt[1]
    d_left = pt[0] - x0
    side = int(np.argmin([abs(d_bottom), abs(d_right), abs(d_top), abs(d_left)]))
    if side == 0:
        return min(max(pt[0] - x0, 0.0), w)
    if side == 1:
        return w + min(max(pt[1] - y0, 0.0), h)
    if side == 2:
        return w + h + min(max(x1 - pt[0], 0.0), w)
    return 2 * w + h + min(max(y1 - pt[1], 0.0), h)


def _corners_between(s_from, s_to, box, tol):
    """Box corners strictly between two perimeter coordinates going CCW."""
    x0, x1, y0, y1 = box
    w, h = x1 - x0, y1 - y0
    per = 2 * (w + h)
    corners = [(w, (x1, y0)), (w + h, (x1, y1)), (2 * w + h, (x0, y1)), (per, (x0, y0))]
    span = (s_to - s_from) % per
    if span == 0.0:
        span = per
    picked = []
    for sc, pt in corners:
        dc = (sc - s_from) % per
        if tol < dc < span - tol:
            picked.append((dc, pt))
    picked.sort()
    return [np.array(pt) for _, pt in picked]


def _dedupe(points, tol):
    out = [points[0]]
    for pt in points[1:]:
        if np.hypot(*(pt - out[-1])) > tol:
            out.append(pt)
    if len(out) > 1 and np.hypot(*(out[0] - out[-1])) <= tol:
        out.pop()
    return out


def _is_convex(poly, tol):
    d = np.roll(poly, -1, axis=0) - poly
    cross = d[:, 0] * np.roll(d[:, 1], -1) - d[:, 1] * np.roll(d[:, 0], -1)
    return (cross >= -tol).all()


def _box_minus_convex(box, poly, drop_area):
    """Tile box minus a strictly-enclosed convex polygon with simple
    polygons: two side slabs plus the pieces above/below the hull chains."""
    x0, x1, y0, y1 = box
    if not _is_convex(poly, 1e-12 * (x1 - x0) ** 2):
        raise UnsupportedTopologyError(
            "element fully containing a non-convex boundary loop is unsupported")
    px = poly[:, 0]
    i_left = int(np.lexsort((poly[:, 1], px))[0])
    i_right = int(np.lexsort((-poly[:, 1], -px))[0])
    pxl, pxr = px[i_left], px[i_right]
    n = poly.shape[0]

    def ccw_path(i_from, i_to):
        idx = [i_from]
        while idx[-1] != i_to:
            idx.append((idx[-1] + 1) % n)
        return poly[idx]

    lower = ccw_path(i_left, i_right)    # below the hole, traversed left->right
    upper = ccw_path(i_right, i_left)    # above the hole, traversed right->left
    pieces = []
    if pxl - x0 > 0:
        pieces.append(np.array([(x0, y0), (pxl, y0), (pxl, y1), (x0, y1)]))
    if x1 - pxr > 0:
        pieces.append(np.array([(pxr, y0), (x1, y0), (x1, y1), (pxr, y1)]))
    top = list(upper[::-1]) + [np.array((pxr, y1)), np.array((pxl, y1))]
    bottom = [np.array((pxl, y0)), np.array((pxr, y0))] + list(lower[::-1])
    for cand in (top, bottom):
        cand = _dedupe(cand, 1e-14 * (x1 - x0))
        if len(cand) >= 3:
            pieces.append(np.array(cand))
    return [p for p in pieces if polygon_area(p) > drop_area]


def _clip_box(domain, box, candidates):
    """Classify one element box against the domain using the candidate
    polygon edge indices; returns a CutGeometry."""
    x0, x1, y0, y1 = box
    hbox = min(x1 - x0, y1 - y0)
    eps = EDGE_EPS_REL * hbox
    probe = OWN_PROBE_REL * hbox
    join = JOIN_REL * hbox
    drop_area = AREA_DROP_REL * hbox * hbox

    pieces = []  # (pa, pb, normal)
    for i in candidates:
        a, b = domain.edge(i)
        hit = _clip_segment_box(a[0], a[1], b[0], b[1], box, eps)
        if hit is None:
            continue
        t0, t1 = hit
        d = b - a
        pa = a + t0 * d
        pb = a + t1 * d
        if np.hypot(*(pb - pa)) < eps:
            continue
        normal = domain.edge_normal(i)
        mid = 0.5 * (pa + pb)
        if not _owns_piece(mid, normal, box, probe):
            continue
        pieces.append((pa, pb, normal))

    if not pieces:
        center = np.array([[0.5 * (x0 + x1), 0.5 * (y0 + y1)]])
        if bool(domain.contains(center)[0]):
            return CutGeometry("inside",
                               inside_region=np.array([(x0, y0), (x1, y0),
                                                       (x1, y1), (x0, y1)]))
        return CutGeometry("outside")

    # merge consecutive pieces into chains (pieces arrive in polygon order)
    chains = [[pieces[0]]]
    for piece in pieces[1:]:
        if np.hypot(*(piece[0] - chains[-1][-1][1])) <= join:
            chains[-1].append(piece)
        else:
            chains.append([piece])
    if len(chains) > 1 and np.hypot(*(chains[0][0][0] - chains[-1][-1][1])) <= join:
        chains[0] = chains[-1] + chains[0]
        chains.pop()
    if len(chains) > 1:
        raise UnsupportedTopologyError(
            f"element {box} is crossed by {len(chains)} disjoint boundary chains")

    run = chains[0]
    pts = [run[0][0]]
    normals = []
    for pa, pb, nrm in run:
        pts.append(pb)
        normals.append(nrm)
    closed = np.hypot(*(pts[-1] - pts[0])) <= join
    if closed:
        chain_pts = np.array(pts[:-1])
        if chain_pts.shape[0] < 3:
            raise UnsupportedTopologyError("degenerate closed boundary chain")
        chain = Chain(points=chain_pts, normals=np.array(normals), closed=True)
        inside = chain_pts
        if polygon_area(inside) <= 0:
            raise UnsupportedTopologyError(
                "closed boundary chain is not counterclockwise")
        outside = _box_minus_convex(box, inside, drop_area)
        return CutGeometry("cut", inside_region=inside,
                           outside_regions=outside, chain=chain)

    chain = Chain(points=np.array(pts), normals=np.array(normals), closed=False)
    a_pt, b_pt = pts[0], pts[-1]
    s_a = _perimeter_coord(a_pt, box)
    s_b = _perimeter_coord(b_pt, box)

    inside_pts = _dedupe(pts + _corners_between(s_b, s_a, box, join), join)
    outside_pts = _dedupe(pts[::-1] + _corners_between(s_a, s_b, box, join), join)

    inside_poly = np.array(inside_pts) if len(inside_pts) >= 3 else None
    inside_area = polygon_area(inside_poly) if inside_poly is not None else 0.0
    if inside_area < -drop_area:
        raise UnsupportedTopologyError("inside region has negative orientation")
    if inside_area <= drop_area:
        inside_poly = None

    outside = []
    if len(outside_pts) >= 3:
        poly = np.array(outside_pts)
        oarea = polygon_area(poly)
        if oarea < -drop_area:
            raise UnsupportedTopologyError("outside region has negative orientation")
        if oarea > drop_area:
            outside.append(poly)

    return CutGeometry("cut", inside_region=inside_poly,
                       outside_regions=outside, chain=chain)


def _candidate_edges(domain, box, eps):
    """All polygon edges whose bbox (inflated by eps) meets the box."""
    v = domain.vertices
    w = np.roll(v, -1, axis=0)
    x0, x1, y0, y1 = box
    lo = np.minimum(v, w)
    hi = np.maximum(v, w)
    hit = ((hi[:, 0] >= x0 - eps) & (lo[:, 0] <= x1 + eps) &
           (hi[:, 1] >= y0 - eps) & (lo[:, 1] <= y1 + eps))
    return np.flatnonzero(hit)


def classify_element(domain, box):
    """'inside' / 'outside' / 'cut' for one element box."""
    return clip_element(domain, box).classification


def clip_element(domain, box):
    """Full clipped geometry of one element box against the domain."""
    eps = EDGE_EPS_REL * min(box[1] - box[0], box[3] - box[2])
    cand = _candidate_edges(domain, box, eps)
    return _clip_box(domain, box, cand)


@dataclass
class CutMesh:
    """Per-element classification over a grid plus clipped geometry of the
    cut elements."""

    grid: object
    domain: DomainPolygon
    classification: np.ndarray               # (ny, nx) int8
    cuts: dict                                # (ex, ey) -> CutGeometry

    def geometry_for(self, ex, ey):
        code = self.classification[ey, ex]
        if code == CUT:
            return self.cuts[(ex, ey)]
        box = self.grid.element_box(ex, ey)
        if code == INSIDE:
            x0, x1, y0, y1 = box
            return CutGeometry("inside",
                               inside_region=np.array([(x0, y0), (x1, y0),
                                                       (x1, y1), (x0, y1)]))
        return CutGeometry("outside")

    @property
    def inside_area(self):
        h2 = self.grid.h ** 2
        total = float((self.classification == INSIDE).sum()) * h2
        total += sum(g.inside_area for g in self.cuts.values())
        return total

    @property
    def chain_length(self):
        return float(sum(g.chain.length for g in self.cuts.values()
                         if g.chain is not None))


def cut_elements(grid, domain):
    """Classify every grid element and clip the cut ones."""
    h = grid.h
    eps = EDGE_EPS_REL * h
    ox, oy = grid.origin
    v = domain.vertices
    w = np.roll(v, -1, axis=0)
    lo = np.minimum(v, w)
    hi = np.maximum(v, w)

    buckets = {}
    exlo = np.clip(np.floor((lo[:, 0] - ox - eps) / h).astype(int), 0, grid.nx - 1)
    exhi = np.clip(np.floor((hi[:, 0] - ox + eps) / h).astype(int), 0, grid.nx - 1)
    eylo = np.clip(np.floor((lo[:, 1] - oy - eps) / h).astype(int), 0, grid.ny - 1)
    eyhi = np.clip(np.floor((hi[:, 1] - oy + eps) / h).astype(int), 0, grid.ny - 1)
    # skip edges entirely left/right/above/below the grid
    in_grid = ((hi[:, 0] >= ox - eps) & (lo[:, 0] <= ox + grid.nx * h + eps) &
               (hi[:, 1] >= oy - eps) & (lo[:, 1] <= oy + grid.ny * h + eps))
    for i in np.flatnonzero(in_grid):
        for ey in range(eylo[i], eyhi[i] + 1):
            for ex in range(exlo[i], exhi[i] + 1):
                buckets.setdefault((ex, ey), []).append(i)

    classification = np.zeros((grid.ny, grid.nx), np.int8)
    cuts = {}
    plain = []
    plain_centers = []
    for ey in range(grid.ny):
        for ex in range(grid.nx):
            cand = buckets.get((ex, ey))
            if cand is None:
                plain.append((ex, ey))
                x0, x1, y0, y1 = grid.element_box(ex, ey)
                plain_centers.append((0.5 * (x0 + x1), 0.5 * (y0 + y1)))
                continue
            geom = _clip_box(domain, grid.element_box(ex, ey), np.array(cand))
            if geom.classification == "cut":
                classification[ey, ex] = CUT
                cuts[(ex, ey)] = geom
            elif geom.classification == "inside":
                classification[ey, ex] = INSIDE

    if plain:
        inside = domain.contains(np.array(plain_centers))
        for (ex, ey), flag in zip(plain, inside):
            if flag:
                classification[ey, ex] = INSIDE

    return CutMesh(grid=grid, domain=domain,
                   classification=classification, cuts=cuts)


def boundary_layer_elements(space, cuts=None):
    """Cut elements plus their active vertex neighbors, as a set of
    (ex, ey) pairs.  The least-squares interior term acts on this layer."""
    mesh = cuts if cuts is not None else space.cut_mesh
    if mesh is None:
        raise ConfigurationError("space carries no cut mesh; pass cuts explicitly")
    cut_mask = mesh.classification == CUT
    grown = np.zeros_like(cut_mask)
    ny, nx = cut_mask.shape
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            src = cut_mask[max(0, -dy):ny - max(0, dy), max(0, -dx):nx - max(0, dx)]
            grown[max(0, dy):ny - max(0, -dy), max(0, dx):nx - max(0, -dx)] |= src
    grown &= mesh.classification != OUTSIDE
    ys, xs = np.nonzero(grown)
    return {(int(x), int(y)) for x, y in zip(xs, ys)}
