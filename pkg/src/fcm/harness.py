"""Experiment drivers: convergence, condition sweeps, special-case
geometries, and single solves with CSV export.

The reference configuration is a disc (radius 1, polygon with 4096
vertices) with the manufactured solution

    u(x, y) = (sin 2x + x cos 3y) / 10,

swept over relative grid shifts s in [0, 1] applied as (s h, s h / 3).
"""

import math
import time
from dataclasses import dataclass, field, fields

import numpy as np

from . import analysis, geometry, solve
from .assembly import MethodParams, ProblemData, assemble_system
from .errors import ConfigurationError, IndefiniteSystemError
from .splines import BackgroundGrid, build_space, eval_field, grid_covering

NAN = math.nan

CSV_COLUMNS = [
    "experiment", "h", "shift", "delta", "beta", "tau", "c_alpha", "ls",
    "l2", "h1_semi", "energy", "kappa", "kappa_jacobi",
    "lambda_min", "lambda_max", "dofs", "wall_s",
]


def manufactured_solution():
    """(u, grad_u, lap_u) of the reference manufactured solution."""

    def u(x, y):
        return (np.sin(2 * x) + x * np.cos(3 * y)) / 10.0

    def grad(x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        return np.column_stack([(2 * np.cos(2 * x) + np.cos(3 * y)) / 10.0,
                                -3 * x * np.sin(3 * y) / 10.0])

    def lap(x, y):
        x = np.asarray(x, float)
        return (-4 * np.sin(2 * x) - 9 * x * np.cos(3 * y)) / 10.0

    return u, grad, lap


def manufactured_problem():
    """Problem data with f = -lap(u) and g = u for the reference solution."""
    u, grad, lap = manufactured_solution()

    def f(x, y):
        x = np.asarray(x, float)
        return (4 * np.sin(2 * x) + 9 * x * np.cos(3 * y)) / 10.0

    return ProblemData(f=f, g=u, exact=(u, grad, lap))


@dataclass
class ExperimentConfig:
    experiment: str = "convergence"
    h_values: list = None            # per-experiment defaults below
    n_shifts: int = 100
    p: int = 2
    beta: float = 5.0
    tau: float = 0.1
    c_alpha: float = 1e-3
    c_alpha_values: list = None      # special-case only; defaults below
    ls_terms: bool = True
    disc_center: tuple = (0.0, 0.0)
    disc_radius: float = 1.0
    disc_vertices: int = 4096
    variant: str = "rotated45"
    deltas: list = field(default_factory=lambda: [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    shift: float = 0.0               # single-solve shift fraction
    lattice: int = 50
    solver: str = "direct"
    out: str = None

    def __post_init__(self):
        if self.n_shifts < 1:
            raise ConfigurationError("need at least one shift")
        if self.experiment not in ("convergence", "condition-sweep",
                                   "special-case", "solve"):
            raise ConfigurationError(f"unknown experiment '{self.experiment}'")
        if self.h_values is None:
            # dense eigensolves cap the condition sweep at h = 0.05
            self.h_values = ([0.2, 0.1, 0.05]
                             if self.experiment == "condition-sweep"
                             else [0.2, 0.1, 0.05, 0.025])
        if self.variant not in ("rotated45", "aligned"):
            raise ConfigurationError(f"unknown special-case variant '{self.variant}'")
        if self.c_alpha_values is None:
            self.c_alpha_values = [0.0, 1e-6, 1e-3]

    def params(self, c_alpha=None):
        return MethodParams(beta=self.beta, tau=self.tau,
                            c_alpha=self.c_alpha if c_alpha is None else c_alpha,
                            ls_terms=self.ls_terms)


_BOOL_WORDS = {"1": True, "true": True, "on": True, "yes": True,
               "0": False, "false": False, "off": False, "no": False}

_LIST_KEYS = {"h_values": float, "deltas": float, "c_alpha_values": float}
_FLOAT_KEYS = {"beta", "tau", "c_alpha", "disc_radius", "shift"}
_INT_KEYS = {"n_shifts", "p", "disc_vertices", "lattice"}
_STR_KEYS = {"experiment", "variant", "solver", "out"}
_KEY_ALIASES = {"h": "h_values", "shifts": "n_shifts", "ls": "ls_terms",
                "delta": "deltas", "vertices": "disc_vertices"}


def parse_config_value(key, raw):
    key = _KEY_ALIASES.get(key, key)
    raw = raw.strip()
    try:
        if key in _LIST_KEYS:
            return key, [_LIST_KEYS[key](v) for v in raw.split(",") if v.strip()]
        if key in _FLOAT_KEYS:
            return key, float(raw)
        if key in _INT_KEYS:
            return key, int(raw)
        if key == "ls_terms":
            return key, _BOOL_WORDS[raw.lower()]
        if key == "disc_center":
            a, b = raw.split(",")
            return key, (float(a), float(b))
        if key in _STR_KEYS:
            return key, raw
    except (ValueError, KeyError) as err:
        raise ConfigurationError(f"bad value for '{key}': {raw!r} ({err})")
    raise ConfigurationError(f"unknown config key '{key}'")


def load_config(path=None, overrides=None):
    """Config from a flat key=value file plus override pairs (CLI flags)."""
    values = {}
    if path is not None:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigurationError(
                        f"{path}:{lineno}: expected key = value, got {line!r}")
                key, raw = line.split("=", 1)
                k, v = parse_config_value(key.strip(), raw)
                values[k] = v
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        k, v = parse_config_value(key, raw) if isinstance(raw, str) else (
            _KEY_ALIASES.get(key, key), raw)
        values[k] = v
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**values)


def shift_fractions(n):
    """n evenly spaced shift fractions covering [0, 1]."""
    if n == 1:
        return [0.0]
    return [k / (n - 1) for k in range(n)]


def disc_domain(config):
    return geometry.make_disc_polygon(config.disc_center, config.disc_radius,
                                      config.disc_vertices)


def build_case(domain, h, s, p=2, margin=2):
    """Grid + cut mesh + space + layer for one (h, shift) case."""
    spec = geometry.ShiftSpec(s=s, h=h)
    grid = grid_covering(domain.bbox, h, margin=margin, offset=spec.offset)
    mesh = geometry.cut_elements(grid, domain)
    space = build_space(grid, p, domain, cuts=mesh)
    layer = geometry.boundary_layer_elements(space)
    return grid, mesh, space, layer


def _row(**kw):
    row = {c: NAN for c in CSV_COLUMNS}
    row.update(kw)
    return row


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    return str(v)


def write_csv(path, rows, columns=CSV_COLUMNS):
    with open(path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(c, NAN)) for c in columns) + "\n")


def run_convergence(config, log=print):
    """Error norms over h x shifts; returns (rows, worst-case EOC table)."""
    domain = disc_domain(config)
    data = manufactured_problem()
    params = config.params()
    rows = []
    for h in config.h_values:
        for s in shift_fractions(config.n_shifts):
            t0 = time.perf_counter()
            grid, mesh, space, layer = build_case(domain, h, s, config.p)
            system = assemble_system(space, domain, layer, params, data, cuts=mesh)
            rep = solve.solve_spd(system, method=config.solver)
            err = analysis.error_norms(space, rep.coefficients, data.exact,
                                       domain, layer, params, cuts=mesh)
            rows.append(_row(experiment="convergence", h=h, shift=s,
                             beta=config.beta, tau=config.tau,
                             c_alpha=config.c_alpha, ls=int(config.ls_terms),
                             l2=err.l2, h1_semi=err.h1_semi, energy=err.energy,
                             dofs=space.n_dofs,
                             wall_s=time.perf_counter() - t0))
        worst_h = [r for r in rows if r["h"] == h]
        log(f"h={h:g}: {len(worst_h)} shifts, worst l2="
            f"{max(r['l2'] for r in worst_h):.4e}")
    hs, worst = analysis.worst_over(
        (r["h"], {"l2": r["l2"], "h1_semi": r["h1_semi"], "energy": r["energy"]})
        for r in rows)
    table = analysis.eoc(hs, worst)
    log("worst-case errors over shifts:")
    log(str(table))
    if config.out:
        write_csv(config.out, rows)
    return rows, table


def _spectrum_row(system, base_row):
    """Fill eigenvalue/condition fields of a result row in place."""
    rep = solve.extreme_eigenvalues(system, jacobi=False)
    base_row["lambda_min"] = rep.lambda_min
    base_row["lambda_max"] = rep.lambda_max
    base_row["kappa"] = rep.kappa
    try:
        scaled, _ = solve.jacobi_scale(system)
        smin, smax = solve._extremes_dense(scaled)
        base_row["kappa_jacobi"] = solve._kappa(smin, smax)
    except IndefiniteSystemError:
        base_row["kappa_jacobi"] = math.inf
    return base_row


def run_condition_sweep(config, log=print):
    """Condition numbers over h x shifts; returns (rows, fitted slope of the
    worst-case kappa against h)."""
    domain = disc_domain(config)
    data = manufactured_problem()
    params = config.params()
    rows = []
    for h in config.h_values:
        for s in shift_fractions(config.n_shifts):
            t0 = time.perf_counter()
            grid, mesh, space, layer = build_case(domain, h, s, config.p)
            system = assemble_system(space, domain, layer, params, data, cuts=mesh)
            row = _row(experiment="condition-sweep", h=h, shift=s,
                       beta=config.beta, tau=config.tau, c_alpha=config.c_alpha,
                       ls=int(config.ls_terms), dofs=space.n_dofs)
            _spectrum_row(system, row)
            row["wall_s"] = time.perf_counter() - t0
            rows.append(row)
        worst_h = max(r["kappa"] for r in rows if r["h"] == h)
        log(f"h={h:g}: worst kappa {worst_h:.4e}")
    hs, worst = analysis.worst_over(
        (r["h"], {"kappa": r["kappa"], "kappa_jacobi": r["kappa_jacobi"]})
        for r in rows)
    slope = analysis.loglog_slope(hs, worst["kappa"])
    log(f"fitted worst-case kappa slope: {slope:.3f}")
    if config.out:
        write_csv(config.out, rows)
    return rows, slope


def special_case_geometry(variant, delta):
    """Grid and shifted square domain of the two degenerate-cut studies.

    rotated45: the square rotated 45 degrees sits on a grid chosen so every
    cut element is cut corner-to-corner into half elements, then the
    geometry is nudged diagonally by delta*h; sliver intersections shrink
    like delta^2.  aligned: the unit square starts grid-aligned at the
    origin corner and is shifted by (delta, delta)."""
    if variant == "rotated45":
        h = math.sqrt(2.0) / 16.0          # "h = 0.09": half-diagonal = 8 h
        half = 8.0 * h
        dx = delta * h / math.sqrt(2.0)
        verts = [(half + dx, dx), (dx, half + dx),
                 (-half + dx, dx), (dx, -half + dx)]
        grid = BackgroundGrid((-11 * h, -11 * h), h, 22, 22)
        return grid, geometry.DomainPolygon(verts)
    if variant == "aligned":
        h = 0.07
        verts = [(delta, delta), (1 + delta, delta),
                 (1 + delta, 1 + delta), (delta, 1 + delta)]
        grid = BackgroundGrid((-2 * h, -2 * h), h, 18, 18)
        return grid, geometry.DomainPolygon(verts)
    raise ConfigurationError(f"unknown special-case variant '{variant}'")


def run_special_case(config, log=print):
    """Condition numbers of the two cut-degeneracy geometries over delta and
    the configured c_alpha values."""
    data = manufactured_problem()
    rows = []
    for delta in config.deltas:
        grid, domain = special_case_geometry(config.variant, delta)
        mesh = geometry.cut_elements(grid, domain)
        space = build_space(grid, config.p, domain, cuts=mesh)
        layer = geometry.boundary_layer_elements(space)
        for c_alpha in config.c_alpha_values:
            t0 = time.perf_counter()
            params = config.params(c_alpha=c_alpha)
            system = assemble_system(space, domain, layer, params, data, cuts=mesh)
            row = _row(experiment=f"special-{config.variant}", h=grid.h,
                       delta=delta, beta=config.beta, tau=config.tau,
                       c_alpha=c_alpha, ls=int(config.ls_terms),
                       dofs=space.n_dofs)
            _spectrum_row(system, row)
            row["wall_s"] = time.perf_counter() - t0
            rows.append(row)
            log(f"{config.variant} delta={delta:g} c_alpha={c_alpha:g}: "
                f"kappa={row['kappa']:.4e} jacobi={row['kappa_jacobi']:.4e}")
    if config.out:
        write_csv(config.out, rows)
    return rows


def run_solve(config, log=print):
    """One solve on the disc; writes a lattice sample of u_h."""
    domain = disc_domain(config)
    data = manufactured_problem()
    params = config.params()
    h = config.h_values[0]
    t0 = time.perf_counter()
    grid, mesh, space, layer = build_case(domain, h, config.shift, config.p)
    system = assemble_system(space, domain, layer, params, data, cuts=mesh)
    rep = solve.solve_spd(system, method=config.solver)
    err = analysis.error_norms(space, rep.coefficients, data.exact,
                               domain, layer, params, cuts=mesh)
    log(f"h={h:g} shift={config.shift:g}: dofs={space.n_dofs} "
        f"l2={err.l2:.4e} h1={err.h1_semi:.4e} energy={err.energy:.4e} "
        f"({time.perf_counter() - t0:.2f}s)")

    n = config.lattice
    x0, x1, y0, y1 = domain.bbox
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    sample_rows = []
    for y in ys:
        pts = np.column_stack([xs, np.full(n, y)])
        inside = domain.contains(pts)
        for x, flag in zip(xs, inside):
            try:
                value = eval_field(space, rep.coefficients, x, y).value
            except Exception:
                value = NAN
            sample_rows.append({"x": x, "y": y, "u_h": value,
                                "inside": int(bool(flag))})
    if config.out:
        write_csv(config.out, sample_rows, columns=["x", "y", "u_h", "inside"])
    return rep, err, sample_rows
