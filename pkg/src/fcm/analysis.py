"""Error measurement in the method's norms and convergence-rate tools."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import assembly, geometry, kernels
from .errors import ConfigurationError, DataError


@dataclass
class ErrorReport:
    l2: float
    h1_semi: float
    energy: float
    dof_count: int
    h: float
    shift: float = math.nan
    parts: dict = field(default_factory=dict)


def _exact_triple(exact):
    if exact is None or len(exact) != 3 or not all(callable(f) for f in exact):
        raise ConfigurationError("exact solution must be a (u, grad_u, lap_u) triple")
    return exact


def error_norms(space, coeffs, exact, domain, layer, params, cuts=None,
                boundary_degree=assembly.BOUNDARY_DEGREE):
    """L2, H1-seminorm and method energy norm of u - u_h.

    The energy norm matches the assembled form: the tau h^2 Laplacian part
    and the tangential boundary part enter only when least-squares terms
    are on; the alpha part enters when c_alpha > 0."""
    u_ex, grad_ex, lap_ex = _exact_triple(exact)
    coeffs = np.asarray(coeffs, float)
    if coeffs.shape != (space.n_dofs,):
        raise ConfigurationError("coefficient vector length does not match space")
    mesh = cuts if cuts is not None else space.cut_mesh
    if mesh is None:
        mesh = geometry.cut_elements(space.grid, domain)

    p = space.p
    h = space.grid.h
    ox, oy = space.grid.origin
    alpha = params.alpha(h, p)
    tau_h2 = params.tau * h * h
    pen = (2.0 + 1.0 / params.tau) / h

    l2_sq = 0.0
    h1_sq = 0.0
    ls_sq = 0.0
    bnd_sq = 0.0
    alpha_sq = 0.0

    for ex, ey in space.active_elements:
        ex, ey = int(ex), int(ey)
        geom = mesh.geometry_for(ex, ey)
        dofs = space.element_dofs(ex, ey)
        c = coeffs[dofs]
        vol_in, vol_out, brule = assembly.element_rules(space, ex, ey, geom,
                                                        boundary_degree)
        if vol_in.weights.size:
            pts, w = vol_in.points, vol_in.weights
            val, gx, gy, lap = kernels.element_blocks(pts, ox, oy, h, p, ex, ey)
            x, y = pts[:, 0], pts[:, 1]
            ev = np.asarray(u_ex(x, y), float) - val @ c
            grads = np.asarray(grad_ex(x, y), float)
            egx = grads[:, 0] - gx @ c
            egy = grads[:, 1] - gy @ c
            l2_sq += float(w @ (ev * ev))
            h1_sq += float(w @ (egx * egx + egy * egy))
            if params.ls_terms and (ex, ey) in layer:
                el = np.asarray(lap_ex(x, y), float) - lap @ c
                ls_sq += tau_h2 * float(w @ (el * el))
        if alpha > 0.0:
            for rule in vol_out:
                pts, w = rule.points, rule.weights
                _, gx, gy, _ = kernels.element_blocks(pts, ox, oy, h, p, ex, ey)
                grads = np.asarray(grad_ex(pts[:, 0], pts[:, 1]), float)
                egx = grads[:, 0] - gx @ c
                egy = grads[:, 1] - gy @ c
                alpha_sq += alpha * float(w @ (egx * egx + egy * egy))
        if brule is not None and brule.weights.size:
            pts, w = brule.points, brule.weights
            nx, ny = brule.normals[:, 0], brule.normals[:, 1]
            val, gx, gy, _ = kernels.element_blocks(pts, ox, oy, h, p, ex, ey)
            ev = np.asarray(u_ex(pts[:, 0], pts[:, 1]), float) - val @ c
            bnd_sq += pen * float(w @ (ev * ev))
            if params.ls_terms:
                grads = np.asarray(grad_ex(pts[:, 0], pts[:, 1]), float)
                etx = grads[:, 0] - gx @ c
                ety = grads[:, 1] - gy @ c
                et = -ny * etx + nx * ety
                bnd_sq += 2.0 * h * float(w @ (et * et))

    if min(l2_sq, h1_sq, ls_sq, bnd_sq, alpha_sq) < -1e-30:
        raise DataError("negative squared norm accumulated")
    energy = math.sqrt(h1_sq + ls_sq + bnd_sq + alpha_sq)
    return ErrorReport(
        l2=math.sqrt(l2_sq), h1_semi=math.sqrt(h1_sq), energy=energy,
        dof_count=space.n_dofs, h=h,
        parts={"h1_semi_sq": h1_sq, "ls_sq": ls_sq, "boundary_sq": bnd_sq,
               "alpha_sq": alpha_sq},
    )


def bilinear_form(space, domain, layer, params, vhat, what, cuts=None,
                  boundary_degree=assembly.BOUNDARY_DEGREE):
    """Direct quadrature of the method bilinear form A(v, w) for two
    coefficient vectors, bypassing the assembled matrix."""
    vhat = np.asarray(vhat, float)
    what = np.asarray(what, float)
    if vhat.shape != (space.n_dofs,) or what.shape != (space.n_dofs,):
        raise ConfigurationError("coefficient vector length does not match space")
    mesh = cuts if cuts is not None else space.cut_mesh
    if mesh is None:
        mesh = geometry.cut_elements(space.grid, domain)

    p = space.p
    h = space.grid.h
    ox, oy = space.grid.origin
    alpha = params.alpha(h, p)
    tau_h2 = params.tau * h * h
    pen = params.effective_penalty / h
    total = 0.0

    for ex, ey in space.active_elements:
        ex, ey = int(ex), int(ey)
        geom = mesh.geometry_for(ex, ey)
        dofs = space.element_dofs(ex, ey)
        cv, cw = vhat[dofs], what[dofs]
        vol_in, vol_out, brule = assembly.element_rules(space, ex, ey, geom,
                                                        boundary_degree)
        if vol_in.weights.size:
            w = vol_in.weights
            _, gx, gy, lap = kernels.element_blocks(vol_in.points, ox, oy, h, p, ex, ey)
            total += float(w @ ((gx @ cv) * (gx @ cw) + (gy @ cv) * (gy @ cw)))
            if params.ls_terms and (ex, ey) in layer:
                total += tau_h2 * float(w @ ((lap @ cv) * (lap @ cw)))
        if alpha > 0.0:
            for rule in vol_out:
                w = rule.weights
                _, gx, gy, _ = kernels.element_blocks(rule.points, ox, oy, h, p, ex, ey)
                total += alpha * float(w @ ((gx @ cv) * (gx @ cw)
                                            + (gy @ cv) * (gy @ cw)))
        if brule is not None and brule.weights.size:
            w = brule.weights
            nx, ny = brule.normals[:, 0], brule.normals[:, 1]
            val, gx, gy, _ = kernels.element_blocks(brule.points, ox, oy, h, p, ex, ey)
            vv, wv = val @ cv, val @ cw
            dnv = nx * (gx @ cv) + ny * (gy @ cv)
            dnw = nx * (gx @ cw) + ny * (gy @ cw)
            total += float(w @ (-dnv * wv - vv * dnw + pen * vv * wv))
            if params.ls_terms:
                dtv = -ny * (gx @ cv) + nx * (gy @ cv)
                dtw = -ny * (gx @ cw) + nx * (gy @ cw)
                total += 2.0 * params.beta * h * float(w @ (dtv * dtw))

    return total


@dataclass
class ConvergenceTable:
    h: list
    errors: dict                 # norm name -> list of errors, one per h
    rates: dict                  # norm name -> list of len(h)-1 pair rates
    fitted: dict                 # norm name -> least-squares log-log slope

    def __str__(self):
        names = list(self.errors)
        lines = ["  h           " + "".join(f"{n:>14}" for n in names)]
        for i, h in enumerate(self.h):
            row = f"  {h:<12.6g}"
            for n in names:
                row += f"{self.errors[n][i]:>14.4e}"
            lines.append(row)
            if i + 1 < len(self.h):
                row = "   rate       "
                for n in names:
                    row += f"{self.rates[n][i]:>14.2f}"
                lines.append(row)
        fit = "  fitted:     " + "".join(f"{self.fitted[n]:>14.2f}" for n in names)
        lines.append(fit)
        return "\n".join(lines)


def eoc(h_values, errors):
    """Estimated orders of convergence from errors on a refinement ladder.

    ``errors`` maps norm names to per-h error lists; h must be strictly
    decreasing."""
    h_values = [float(v) for v in h_values]
    if len(h_values) < 2:
        raise ConfigurationError("need at least two mesh sizes for rates")
    if any(b >= a for a, b in zip(h_values, h_values[1:])):
        raise ConfigurationError("mesh sizes must be strictly decreasing")
    rates = {}
    fitted = {}
    for name, errs in errors.items():
        if len(errs) != len(h_values):
            raise ConfigurationError(f"error list '{name}' length mismatch")
        rs = []
        for (h0, h1), (e0, e1) in zip(zip(h_values, h_values[1:]),
                                      zip(errs, errs[1:])):
            if e0 <= 0 or e1 <= 0:
                rs.append(math.nan)
            else:
                rs.append(math.log(e0 / e1) / math.log(h0 / h1))
        rates[name] = rs
        fitted[name] = loglog_slope(h_values, errs)
    return ConvergenceTable(h=h_values, errors={k: list(v) for k, v in errors.items()},
                            rates=rates, fitted=fitted)


def loglog_slope(x, y):
    """Least-squares slope of log(y) against log(x), ignoring non-finite
    or non-positive pairs."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    ok = np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0)
    if ok.sum() < 2:
        return math.nan
    lx, ly = np.log(x[ok]), np.log(y[ok])
    return float(np.polyfit(lx, ly, 1)[0])


def worst_over(groups):
    """Worst-case (max) aggregation of per-shift results.

    ``groups`` is a list of (h, dict-of-values); returns (h sorted
    descending, dict of per-h maxima)."""
    by_h = {}
    for h, vals in groups:
        slot = by_h.setdefault(float(h), {})
        for k, v in vals.items():
            if v is None or (isinstance(v, float) and math.isnan(v)):
                continue
            slot[k] = max(slot.get(k, -math.inf), v)
    hs = sorted(by_h, reverse=True)
    names = sorted({k for slot in by_h.values() for k in slot})
    out = {k: [by_h[h].get(k, math.nan) for h in hs] for k in names}
    return hs, out
