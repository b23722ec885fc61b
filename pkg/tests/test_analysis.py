"""Error measures and convergence-rate utilities against closed forms."""

import math

import numpy as np
import pytest

from fcm import (
    BackgroundGrid,
    ConfigurationError,
    DomainPolygon,
    MethodParams,
    bilinear_form,
    boundary_layer_elements,
    build_space,
    cut_elements,
    eoc,
    loglog_slope,
)
from fcm.analysis import error_norms, worst_over
from fcm.assembly import ProblemData, assemble_system


def fitted_square(n=8):
    grid = BackgroundGrid((-2 / n, -2 / n), 1 / n, n + 4, n + 4)
    domain = DomainPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    mesh = cut_elements(grid, domain)
    space = build_space(grid, 2, domain, cuts=mesh)
    layer = boundary_layer_elements(space)
    return grid, domain, mesh, space, layer


CONST_ONE = (lambda x, y: 1.0 + 0 * np.asarray(x),
             lambda x, y: np.zeros((np.size(x), 2)),
             lambda x, y: 0 * np.asarray(x))

LINEAR_X = (lambda x, y: np.asarray(x, float) + 0 * np.asarray(y),
            lambda x, y: np.column_stack([np.ones(np.size(x)),
                                          np.zeros(np.size(x))]),
            lambda x, y: 0 * np.asarray(x))


def test_zero_field_against_constant_one():
    grid, domain, mesh, space, layer = fitted_square()
    params = MethodParams(c_alpha=0.0, tau=0.1)
    err = error_norms(space, np.zeros(space.n_dofs), CONST_ONE,
                      domain, layer, params, cuts=mesh)
    assert err.l2 == pytest.approx(1.0, rel=1e-12)          # sqrt(area)
    assert err.h1_semi == pytest.approx(0.0, abs=1e-13)
    # boundary part: (2 + 1/tau) h^-1 |e|^2 over the 4-long boundary
    expect_bnd = (2 + 1 / 0.1) / grid.h * 4.0
    assert err.parts["boundary_sq"] == pytest.approx(expect_bnd, rel=1e-12)
    assert err.energy == pytest.approx(math.sqrt(expect_bnd), rel=1e-12)


def test_zero_field_against_linear():
    grid, domain, mesh, space, layer = fitted_square()
    params = MethodParams(c_alpha=0.0, tau=0.1)
    err = error_norms(space, np.zeros(space.n_dofs), LINEAR_X,
                      domain, layer, params, cuts=mesh)
    assert err.l2 == pytest.approx(1 / math.sqrt(3), rel=1e-12)
    assert err.h1_semi == pytest.approx(1.0, rel=1e-12)
    # boundary |x|^2 integral 5/3, tangential derivative active on the
    # two horizontal sides only
    expect_bnd = (2 + 1 / 0.1) / grid.h * (5 / 3) + 2 * grid.h * 2.0
    assert err.parts["boundary_sq"] == pytest.approx(expect_bnd, rel=1e-12)
    total = err.parts["h1_semi_sq"] + err.parts["ls_sq"] + \
        err.parts["boundary_sq"] + err.parts["alpha_sq"]
    assert err.energy == pytest.approx(math.sqrt(total), rel=1e-13)
    assert err.dof_count == space.n_dofs
    assert err.h == grid.h


def test_tangent_term_dropped_without_ls():
    grid, domain, mesh, space, layer = fitted_square()
    err = error_norms(space, np.zeros(space.n_dofs), LINEAR_X, domain, layer,
                      MethodParams(c_alpha=0.0, tau=0.1, ls_terms=False),
                      cuts=mesh)
    assert err.parts["boundary_sq"] == pytest.approx(
        (2 + 1 / 0.1) / grid.h * (5 / 3), rel=1e-12)
    assert err.parts["ls_sq"] == 0.0


def test_bilinear_form_matches_matrix():
    grid, domain, mesh, space, layer = fitted_square(4)
    params = MethodParams(c_alpha=0.0)
    data = ProblemData(f=lambda x, y: 0 * np.asarray(x),
                       g=lambda x, y: 0 * np.asarray(x))
    system = assemble_system(space, domain, layer, params, data, cuts=mesh)
    rng = np.random.default_rng(21)
    v = rng.standard_normal(space.n_dofs)
    w = rng.standard_normal(space.n_dofs)
    direct = bilinear_form(space, domain, layer, params, v, w, cuts=mesh)
    assert direct == pytest.approx(system.quadratic_form(v, w), rel=1e-11)


def test_eoc_exact_power():
    hs = [0.4, 0.2, 0.1]
    table = eoc(hs, {"l2": [h**3 for h in hs], "h1": [2 * h**2 for h in hs]})
    np.testing.assert_allclose(table.rates["l2"], [3.0, 3.0], rtol=1e-12)
    assert table.fitted["h1"] == pytest.approx(2.0, rel=1e-12)
    text = str(table)
    assert "rate" in text and "fitted" in text


def test_eoc_validation():
    with pytest.raises(ConfigurationError):
        eoc([0.1, 0.2], {"l2": [1, 2]})
    with pytest.raises(ConfigurationError):
        eoc([0.2], {"l2": [1]})
    with pytest.raises(ConfigurationError):
        eoc([0.2, 0.1], {"l2": [1, 2, 3]})


def test_loglog_slope_skips_nonpositive():
    x = [0.4, 0.2, 0.1, 0.05]
    y = [0.16, 0.04, 0.0, 0.01]     # zero entry ignored
    assert loglog_slope(x, y) == pytest.approx(
        loglog_slope([0.4, 0.2, 0.05], [0.16, 0.04, 0.01]))
    assert math.isnan(loglog_slope([1.0], [1.0]))


def test_worst_over_groups():
    hs, worst = worst_over([(0.1, {"e": 1.0}), (0.2, {"e": 3.0}),
                            (0.1, {"e": 2.0}), (0.2, {"e": 0.5})])
    assert hs == [0.2, 0.1]
    assert worst["e"] == [3.0, 2.0]
