"""Uniform tensor-product B-spline spaces on a background grid.

The 1D space over ``nx`` elements of size ``h`` starting at ``ox`` has
``nx + p`` basis functions; basis ``i`` is supported on
``[ox + (i-p)h, ox + (i+1)h]`` and element ``e`` carries bases
``e .. e+p``.  No open/clamped end knots: every basis is a translate of
the cardinal B-spline, so the space is C^(p-1) everywhere including the
grid boundary.  Global dof ids are lexicographic with x fastest:
``id = iy*(nx+p) + ix``.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigurationError, OutOfDomainError


@dataclass(frozen=True)
class BackgroundGrid:
    """Axis-aligned uniform grid of square elements."""

    origin: tuple
    h: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.h > 0.0):
            raise ConfigurationError(f"element size must be positive, got {self.h}")
        if self.nx < 1 or self.ny < 1:
            raise ConfigurationError("grid needs at least one element per axis")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def bbox(self):
        ox, oy = self.origin
        return (ox, ox + self.nx * self.h, oy, oy + self.ny * self.h)

    def element_box(self, ex, ey):
        ox, oy = self.origin
        h = self.h
        return (ox + ex * h, ox + (ex + 1) * h, oy + ey * h, oy + (ey + 1) * h)

    def locate(self, x, y):
        """Element index pair containing (x, y); right/top edges inclusive."""
        ox, oy = self.origin
        ex = int(np.floor((x - ox) / self.h))
        ey = int(np.floor((y - oy) / self.h))
        if ex == self.nx and abs(x - self.bbox[1]) <= 1e-12 * self.h:
            ex -= 1
        if ey == self.ny and abs(y - self.bbox[3]) <= 1e-12 * self.h:
            ey -= 1
        if not (0 <= ex < self.nx and 0 <= ey < self.ny):
            raise OutOfDomainError(f"point ({x}, {y}) outside grid bounding box")
        return ex, ey


def grid_covering(bbox, h, margin=2, offset=(0.0, 0.0)):
    """Grid of spacing h covering ``bbox=(x0,x1,y0,y1)`` plus ``margin``
    extra element rings, then translated by ``offset``."""
    x0, x1, y0, y1 = bbox
    if not (x1 > x0 and y1 > y0):
        raise ConfigurationError("empty bounding box")
    nx = int(np.ceil((x1 - x0) / h)) + 2 * margin
    ny = int(np.ceil((y1 - y0) / h)) + 2 * margin
    ox = x0 - margin * h + offset[0]
    oy = y0 - margin * h + offset[1]
    return BackgroundGrid((ox, oy), h, nx, ny)


def knot_vector(origin_1d, h, n_elements, p):
    """Uniform (non-open) knot vector carrying the n_elements+p basis
    functions of one axis."""
    return origin_1d + h * (np.arange(n_elements + 2 * p + 1) - p)


def eval_basis_1d(knots, p, x):
    """(p+1, 3) array of (value, d/dx, d2/dx2) for the splines nonzero at x.

    ``knots`` must be nondecreasing with at least 2p+2 entries; x must lie
    in the fully-covered range [knots[p], knots[-p-1]].
    """
    knots = np.asarray(knots, float)
    if knots.size < 2 * p + 2:
        raise ConfigurationError("knot vector too short for the requested degree")
    if np.any(np.diff(knots) < 0):
        raise ConfigurationError("knot vector must be nondecreasing")
    lo, hi = knots[p], knots[knots.size - 1 - p]
    if not (lo <= x <= hi):
        raise OutOfDomainError(f"x={x} outside admissible knot range [{lo}, {hi}]")
    span = int(np.searchsorted(knots, x, side="right")) - 1
    span = min(max(span, p), knots.size - p - 2)
    out = kernels.ders_basis_point(knots, p, span, x)
    return out.T.copy()


class TensorSplineSpace:
    """Active tensor-product spline space over a background grid.

    A basis function is active when its support intersects the domain in a
    set of positive area, i.e. when it is supported on at least one active
    (inside or cut) element.
    """

    def __init__(self, grid, p, active_element_mask, cut_mesh=None):
        if p < 2:
            raise ConfigurationError(f"spline order must be >= 2, got {p}")
        self.grid = grid
        self.p = p
        self.cut_mesh = cut_mesh
        self._el_active = np.asarray(active_element_mask, bool)
        if self._el_active.shape != (grid.ny, grid.nx):
            raise ConfigurationError("element mask shape does not match grid")
        if not self._el_active.any():
            raise ConfigurationError("no active elements: domain does not meet grid")

        nbx, nby = grid.nx + p, grid.ny + p
        basis_mask = np.zeros((nby, nbx), bool)
        for dy in range(p + 1):
            for dx in range(p + 1):
                basis_mask[dy:dy + grid.ny, dx:dx + grid.nx] |= self._el_active
        self._basis_mask = basis_mask
        self.active_basis = np.flatnonzero(basis_mask.ravel())
        self._dof_of = np.full(nbx * nby, -1, dtype=np.int64)
        self._dof_of[self.active_basis] = np.arange(self.active_basis.size)

        ey, ex = np.nonzero(self._el_active)
        order = np.lexsort((ex, ey))
        self.active_elements = np.column_stack([ex[order], ey[order]])

    @property
    def n_dofs(self):
        return self.active_basis.size

    @property
    def n_basis_x(self):
        return self.grid.nx + self.p

    def is_active_element(self, ex, ey):
        return bool(self._el_active[ey, ex])

    def element_dofs(self, ex, ey):
        """Dense dof indices of the (p+1)^2 bases on element (ex, ey),
        ordered by local index (x fastest)."""
        p, nbx = self.p, self.n_basis_x
        ix = ex + np.arange(p + 1)
        iy = ey + np.arange(p + 1)
        flat = (iy[:, None] * nbx + ix[None, :]).ravel()
        dofs = self._dof_of[flat]
        assert (dofs >= 0).all(), "inactive basis on an active element"
        return dofs

    def basis_support_box(self, flat_id):
        """Support rectangle (x0, x1, y0, y1) of a basis by flat tensor id."""
        p = self.p
        ix = flat_id % self.n_basis_x
        iy = flat_id // self.n_basis_x
        ox, oy = self.grid.origin
        h = self.grid.h
        return (ox + (ix - p) * h, ox + (ix + 1) * h,
                oy + (iy - p) * h, oy + (iy + 1) * h)

    def greville_points(self):
        """Greville abscissae (support centroids) of the active bases."""
        p = self.p
        ox, oy = self.grid.origin
        h = self.grid.h
        ix = self.active_basis % self.n_basis_x
        iy = self.active_basis // self.n_basis_x
        gx = ox + h * (ix + (1.0 - p) / 2.0)
        gy = oy + h * (iy + (1.0 - p) / 2.0)
        return np.column_stack([gx, gy])


def build_space(grid, p, domain, cuts=None):
    """Construct the active spline space for ``domain`` over ``grid``.

    ``cuts`` may carry a precomputed element classification (from
    ``geometry.cut_elements``); it is computed on demand otherwise.
    """
    bx0, bx1, by0, by1 = domain.bbox
    gx0, gx1, gy0, gy1 = grid.bbox
    if bx0 < gx0 or bx1 > gx1 or by0 < gy0 or by1 > gy1:
        raise ConfigurationError("domain is not contained in the grid bounding box")
    if cuts is None:
        from . import geometry
        cuts = geometry.cut_elements(grid, domain)
    active = cuts.classification != 0
    return TensorSplineSpace(grid, p, active, cut_mesh=cuts)


@dataclass
class FieldEval:
    value: float
    gradient: np.ndarray
    laplacian: float


def eval_field(space, coeffs, x, y):
    """Evaluate a spline field (value, gradient, laplacian) at one point.

    The point must lie in an active element of the space."""
    coeffs = np.asarray(coeffs, float)
    if coeffs.shape != (space.n_dofs,):
        raise ConfigurationError("coefficient vector length does not match space")
    ex, ey = space.grid.locate(x, y)
    if not space.is_active_element(ex, ey):
        raise OutOfDomainError(f"point ({x}, {y}) lies outside the active region")
    pt = np.array([[float(x), float(y)]])
    ox, oy = space.grid.origin
    val, gx, gy, lap = kernels.element_blocks(pt, ox, oy, space.grid.h, space.p, ex, ey)
    c = coeffs[space.element_dofs(ex, ey)]
    return FieldEval(
        value=float(val[0] @ c),
        gradient=np.array([float(gx[0] @ c), float(gy[0] @ c)]),
        laplacian=float(lap[0] @ c),
    )
