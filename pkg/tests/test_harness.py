"""Experiment drivers: manufactured data, config handling, CSV output."""

import math

import numpy as np
import pytest

from fcm import ConfigurationError, cli, harness
from fcm.geometry import cut_elements


def test_manufactured_solution_consistent_by_finite_differences():
    u, grad, lap = harness.manufactured_solution()
    data = harness.manufactured_problem()
    rng = np.random.default_rng(17)
    pts = rng.uniform(-1, 1, size=(100, 2))
    d = 1e-5
    for x, y in pts:
        fd_lap = (u(x + d, y) + u(x - d, y) + u(x, y + d) + u(x, y - d)
                  - 4 * u(x, y)) / d**2
        assert data.f(x, y) == pytest.approx(-fd_lap, abs=1e-5)
        fd_gx = (u(x + d, y) - u(x - d, y)) / (2 * d)
        fd_gy = (u(x, y + d) - u(x, y - d)) / (2 * d)
        np.testing.assert_allclose(grad(x, y)[0], (fd_gx, fd_gy), atol=1e-9)
    # boundary data is the trace of the manufactured solution
    assert data.g(0.3, -0.7) == pytest.approx(u(0.3, -0.7), rel=1e-15)


def test_shift_fractions_cover_unit_interval():
    s = harness.shift_fractions(100)
    assert len(s) == 100
    assert s[0] == 0.0 and s[-1] == 1.0
    assert harness.shift_fractions(1) == [0.0]
    with pytest.raises(ConfigurationError):
        harness.ExperimentConfig(n_shifts=0)


def test_config_file_and_overrides(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "experiment = convergence\n"
        "h = 0.2, 0.1\n"
        "shifts = 3\n"
        "tau = 0.2   # trailing comment\n"
        "\n"
        "ls = off\n")
    cfg = harness.load_config(str(cfg_file))
    assert cfg.h_values == [0.2, 0.1]
    assert cfg.n_shifts == 3
    assert cfg.tau == 0.2
    assert cfg.ls_terms is False
    cfg = harness.load_config(str(cfg_file), overrides={"tau": "0.5"})
    assert cfg.tau == 0.5


def test_config_rejects_unknown_and_malformed(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_key = 1\n")
    with pytest.raises(ConfigurationError):
        harness.load_config(str(bad))
    bad.write_text("just a line\n")
    with pytest.raises(ConfigurationError):
        harness.load_config(str(bad))
    with pytest.raises(ConfigurationError):
        harness.load_config(overrides={"tau": "abc"})


def test_experiment_defaults():
    assert harness.ExperimentConfig().h_values == [0.2, 0.1, 0.05, 0.025]
    sweep = harness.ExperimentConfig(experiment="condition-sweep")
    assert sweep.h_values == [0.2, 0.1, 0.05]
    assert sweep.c_alpha_values == [0.0, 1e-6, 1e-3]


def test_csv_formatting(tmp_path):
    path = tmp_path / "rows.csv"
    harness.write_csv(str(path), [
        {"experiment": "x", "h": 0.1, "kappa": math.inf, "l2": math.nan,
         "dofs": 42, "wall_s": 0.123456789012345}])
    header, line = path.read_text().strip().splitlines()
    assert header.split(",") == harness.CSV_COLUMNS
    fields = dict(zip(header.split(","), line.split(",")))
    assert fields["kappa"] == "inf"
    assert fields["l2"] == "nan"
    assert fields["dofs"] == "42"
    assert fields["h"] == "0.1"


def test_rotated_square_construction_cuts_half_elements():
    grid, domain = harness.special_case_geometry("rotated45", 0.0)
    assert domain.area == pytest.approx(1.0, rel=1e-12)
    mesh = cut_elements(grid, domain)
    assert len(mesh.cuts) == 32
    for geom in mesh.cuts.values():
        assert geom.inside_area == pytest.approx(0.5 * grid.h**2, rel=1e-11)


def test_aligned_square_construction():
    grid, domain = harness.special_case_geometry("aligned", 1e-3)
    assert grid.h == 0.07
    assert domain.area == pytest.approx(1.0, rel=1e-12)
    x0, x1, y0, y1 = domain.bbox
    assert x0 == pytest.approx(1e-3) and x1 == pytest.approx(1 + 1e-3)


def _strip_wall(text):
    lines = text.strip().splitlines()
    idx = lines[0].split(",").index("wall_s")
    return [",".join(c for i, c in enumerate(l.split(",")) if i != idx)
            for l in lines]


def test_convergence_csv_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        cfg = harness.ExperimentConfig(h_values=[0.4, 0.2], n_shifts=2,
                                       out=str(out))
        harness.run_convergence(cfg, log=lambda *a: None)
    assert _strip_wall(out1.read_text()) == _strip_wall(out2.read_text())


def test_solve_lattice_csv(tmp_path):
    out = tmp_path / "field.csv"
    cfg = harness.ExperimentConfig(experiment="solve", h_values=[0.4],
                                   shift=0.5, lattice=9, out=str(out))
    rep, err, rows = harness.run_solve(cfg, log=lambda *a: None)
    assert len(rows) == 81
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x,y,u_h,inside"
    assert len(lines) == 82
    inside = [r for r in rows if r["inside"]]
    assert inside and all(math.isfinite(r["u_h"]) for r in inside)


def test_cli_convergence_assert_passes():
    rc = cli.main(["convergence", "--h", "0.2,0.1", "--shifts", "3", "--assert"])
    assert rc == 0


def test_cli_rejects_bad_config():
    rc = cli.main(["solve", "--tau", "not-a-number"])
    assert rc == 1


def test_kappa_growth_ratio_extended_arithmetic():
    assert cli.kappa_growth_ratio(1e9, 1e6) == pytest.approx(1e3)
    assert cli.kappa_growth_ratio(math.inf, 1e6) == math.inf
    assert cli.kappa_growth_ratio(math.inf, math.inf) == math.inf
    assert math.isnan(cli.kappa_growth_ratio(1e9, math.inf))


def test_special_case_check_logic():
    rows_blowup = [
        {"delta": 1e-2, "c_alpha": 0.0, "kappa": 1e8, "kappa_jacobi": 1e4},
        {"delta": 1e-6, "c_alpha": 0.0, "kappa": 1e14, "kappa_jacobi": 1e9},
        {"delta": 1e-2, "c_alpha": 1e-3, "kappa": 2e9, "kappa_jacobi": 50.0},
        {"delta": 1e-6, "c_alpha": 1e-3, "kappa": 3e9, "kappa_jacobi": 55.0},
    ]
    assert cli.check_special_case(rows_blowup, "rotated45")
    rows_flat = [dict(r, kappa=1e8, kappa_jacobi=1e4) for r in rows_blowup]
    assert not cli.check_special_case(rows_flat, "rotated45")
    rows_bounded = [
        {"delta": 1e-2, "c_alpha": 0.0, "kappa": 1e5, "kappa_jacobi": 1e2},
        {"delta": 1e-6, "c_alpha": 0.0, "kappa": 2e6, "kappa_jacobi": 2e2},
    ]
    assert cli.check_special_case(rows_bounded, "aligned")
    assert not cli.check_special_case(
        [dict(r, kappa=math.inf) for r in rows_bounded], "aligned")
