"""Assembly of the stabilized Nitsche / finite cell bilinear system.

For trial/test splines v, w the form is

    A(v, w) = (grad v, grad w)_Omega
            + tau h^2 (lap v, lap w)_{layer cap Omega}          [ls]
            + alpha (grad v, grad w)_{active elements \\ Omega}
            - (dn v, w)_boundary - (v, dn w)_boundary
            + beta [ (2 + 1/tau) h^-1 (v, w)_boundary
                     + 2 h (dt v, dt w)_boundary ]               [dt term: ls]

with right-hand side

    L(w) = (f, w)_Omega - tau h^2 (f, lap w)_{layer cap Omega}   [ls]
         - (g, dn w)_boundary
         + beta [ (2 + 1/tau) h^-1 (g, w)_boundary
                  + 2 h (dt g, dt w)_boundary ]                  [ls]

where dn/dt are normal/tangential derivatives, alpha = c_alpha h^(2p-1),
and the [ls] terms drop when least-squares stabilization is off.  The
penalty keeps the beta (2 + 1/tau) coefficient in both modes.

Every local matrix is accumulated symmetrically (see kernels), so the
global matrix is symmetric to machine precision by construction.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import geometry, kernels, quadrature
from .errors import ConfigurationError, DataError

BOUNDARY_DEGREE = 9  # per-segment Gauss degree for chain integrals


@dataclass(frozen=True)
class MethodParams:
    """Method parameters; defaults follow the reference configuration."""

    beta: float = 5.0
    tau: float = 0.1
    c_alpha: float = 1e-3
    ls_terms: bool = True

    def __post_init__(self):
        if not (self.beta > 0):
            raise ConfigurationError(f"beta must be positive, got {self.beta}")
        if not (self.tau > 0):
            raise ConfigurationError(f"tau must be positive, got {self.tau}")
        if self.c_alpha < 0:
            raise ConfigurationError(f"c_alpha must be nonnegative, got {self.c_alpha}")

    @property
    def effective_penalty(self):
        """Coefficient of the h^-1 boundary mass term: beta (2 + 1/tau)."""
        return self.beta * (2.0 + 1.0 / self.tau)

    def alpha(self, h, p):
        """Virtual-domain stiffness scaling alpha = c_alpha h^(2p-1)."""
        return self.c_alpha * h ** (2 * p - 1)


@dataclass
class ProblemData:
    """Problem callbacks, all vectorized over (x, y) arrays.

    ``exact`` is an optional (u, grad_u, lap_u) triple used by error
    measurement; grad_u returns a (n, 2) array."""

    f: object
    g: object
    exact: tuple = None


class SparseSymSystem:
    """Assembled symmetric system A x = b in CSR storage."""

    def __init__(self, matrix, rhs):
        self.matrix = matrix
        self.rhs = rhs
        self.n = rhs.size

    def quadratic_form(self, v, w):
        return float(v @ (self.matrix @ w))

    def symmetry_defect(self):
        """max |A - A^T| over entries."""
        d = (self.matrix - self.matrix.T).tocoo()
        return float(np.abs(d.data).max()) if d.nnz else 0.0

    def max_entry(self):
        return float(np.abs(self.matrix.data).max()) if self.matrix.nnz else 0.0

    def dense(self):
        return self.matrix.toarray()


def element_rules(space, ex, ey, geom, boundary_degree=BOUNDARY_DEGREE):
    """Quadrature rules (inside, outside list, boundary) for one element.

    Full elements and full-coverage cut elements get tensor Gauss rules;
    partial regions get triangulated rules of total degree 2p."""
    p = space.p
    h = space.grid.h
    box = space.grid.element_box(ex, ey)
    drop = geometry.AREA_DROP_REL * h * h

    if geom.classification == "inside":
        vol_in = quadrature.tensor_rule(box, p + 1)
        return vol_in, [], None

    vol_in = quadrature.volume_rule(geom.inside_region, 2 * p, min_area=drop)
    vol_out = [quadrature.volume_rule(r, 2 * p, min_area=drop)
               for r in geom.outside_regions]
    vol_out = [r for r in vol_out if r.weights.size]
    brule = None
    if geom.chain is not None:
        brule = quadrature.boundary_rule(geom.chain, boundary_degree)
    return vol_in, vol_out, brule


def _eval_data(fn, pts, name):
    vals = np.asarray(fn(pts[:, 0], pts[:, 1]), float)
    if vals.shape != (pts.shape[0],):
        vals = np.broadcast_to(vals, (pts.shape[0],)).astype(float)
    if not np.isfinite(vals).all():
        raise DataError(f"problem data callback '{name}' returned non-finite values")
    return vals


def element_contribution(space, element, geom, in_layer, params, data,
                         boundary_degree=BOUNDARY_DEGREE):
    """Local (K, F) of one active element; local dof order matches
    ``space.element_dofs``."""
    ex, ey = element
    p = space.p
    h = space.grid.h
    ox, oy = space.grid.origin
    m = (p + 1) ** 2
    K = np.zeros((m, m))
    F = np.zeros(m)
    vol_in, vol_out, brule = element_rules(space, ex, ey, geom, boundary_degree)
    ls = params.ls_terms and in_layer
    tau_h2 = params.tau * h * h

    if vol_in.weights.size:
        w = vol_in.weights
        val, gx, gy, lap = kernels.element_blocks(vol_in.points, ox, oy, h, p, ex, ey)
        kernels.acc_same(w, gx, 1.0, K)
        kernels.acc_same(w, gy, 1.0, K)
        if ls:
            kernels.acc_same(w, lap, tau_h2, K)
        fv = _eval_data(data.f, vol_in.points, "f")
        kernels.acc_rhs(w, fv, val, 1.0, F)
        if ls:
            kernels.acc_rhs(w, fv, lap, -tau_h2, F)

    alpha = params.alpha(h, p)
    if alpha > 0.0:
        for rule in vol_out:
            w = rule.weights
            _, gx, gy, _ = kernels.element_blocks(rule.points, ox, oy, h, p, ex, ey)
            kernels.acc_same(w, gx, alpha, K)
            kernels.acc_same(w, gy, alpha, K)

    if brule is not None and brule.weights.size:
        w = brule.weights
        nx, ny = brule.normals[:, 0], brule.normals[:, 1]
        val, gx, gy, _ = kernels.element_blocks(brule.points, ox, oy, h, p, ex, ey)
        dn = nx[:, None] * gx + ny[:, None] * gy
        dt = -ny[:, None] * gx + nx[:, None] * gy
        pen = params.effective_penalty / h
        kernels.acc_pair(w, dn, val, -1.0, K)
        kernels.acc_same(w, val, pen, K)
        gv = _eval_data(data.g, brule.points, "g")
        kernels.acc_rhs(w, gv, dn, -1.0, F)
        kernels.acc_rhs(w, gv, val, pen, F)
        if params.ls_terms:
            kernels.acc_same(w, dt, 2.0 * params.beta * h, K)
            # tangential derivative of g by central differences along the chain
            step = 1e-6 * h
            tx, ty = -ny, nx
            pp = brule.points + step * np.column_stack([tx, ty])
            pm = brule.points - step * np.column_stack([tx, ty])
            dgdt = (_eval_data(data.g, pp, "g") - _eval_data(data.g, pm, "g")) / (2 * step)
            kernels.acc_rhs(w, dgdt, dt, 2.0 * params.beta * h, F)

    return K, F


def assemble_system(space, domain, layer, params, data, cuts=None,
                    boundary_degree=BOUNDARY_DEGREE):
    """Assemble the global system over the active elements of ``space``.

    ``layer`` is the set of (ex, ey) element ids carrying the interior
    least-squares term (cut elements plus active neighbors)."""
    if space.n_dofs == 0:
        raise ConfigurationError("cannot assemble on an empty space")
    mesh = cuts if cuts is not None else space.cut_mesh
    if mesh is None:
        mesh = geometry.cut_elements(space.grid, domain)

    n = space.n_dofs
    m = (space.p + 1) ** 2
    k = space.active_elements.shape[0]
    rows = np.empty(k * m * m, np.int64)
    cols = np.empty(k * m * m, np.int64)
    vals = np.empty(k * m * m)
    rhs = np.zeros(n)

    for e in range(k):
        ex, ey = int(space.active_elements[e, 0]), int(space.active_elements[e, 1])
        geom = mesh.geometry_for(ex, ey)
        K, F = element_contribution(space, (ex, ey), geom, (ex, ey) in layer,
                                    params, data, boundary_degree)
        dofs = space.element_dofs(ex, ey)
        lo = e * m * m
        rows[lo:lo + m * m] = np.repeat(dofs, m)
        cols[lo:lo + m * m] = np.tile(dofs, m)
        vals[lo:lo + m * m] = K.ravel()
        np.add.at(rhs, dofs, F)

    if not np.isfinite(vals).all() or not np.isfinite(rhs).all():
        raise DataError("assembly produced non-finite entries")
    matrix = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return SparseSymSystem(matrix, rhs)
