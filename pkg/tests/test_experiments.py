import csv
import io

import numpy as np
import pytest

from sscp.experiments import (
    Axis,
    SweepSpec,
    figure_axes,
    figure_config,
    grid_from_rows,
    grid_position,
    inclusive_range,
    optimize_scalar,
    point_seed,
    position_spec,
    run_sweep,
    triangle_check,
    write_csv,
)
from sscp.sysmodel import ConfigError, ScenarioConfig

FAST = dict(quad_n=200, quad_o=200)


def test_axis_parse_range():
    ax = Axis.parse("gamma_u_db=0:40:5")
    assert ax.keys == ("gamma_u_db",)
    assert [v[0] for v in ax.values] == [0, 5, 10, 15, 20, 25, 30, 35, 40]


def test_axis_parse_list_and_tied_keys():
    ax = Axis.parse("K+Q=1,2,3")
    assert ax.values == ((1, 1), (2, 2), (3, 3))
    assert all(isinstance(v, int) for t in ax.values for v in t)
    ax = Axis.parse("omega+nu1=0/0,3/0,3/0.4")
    assert ax.values == ((0.0, 0.0), (3.0, 0.0), (3.0, 0.4))


@pytest.mark.parametrize("text", ["K", "=1,2", "K+Q=1/2/3", "K=1.5"])
def test_axis_parse_rejects(text):
    with pytest.raises(ConfigError):
        Axis.parse(text)


def test_inclusive_range_keeps_endpoint():
    assert inclusive_range(0.05, 0.95, 0.05)[-1] == pytest.approx(0.95)
    assert len(inclusive_range(50, 300, 10)) == 26
    with pytest.raises(ConfigError) as exc:
        inclusive_range(5, 1, 1)
    assert exc.value.code == "empty-range"


def test_empty_sweep_rejected():
    with pytest.raises(ConfigError) as exc:
        SweepSpec(ScenarioConfig(), ())
    assert exc.value.code == "empty-sweep"
    with pytest.raises(ConfigError) as exc:
        Axis(("K",), ())
    assert exc.value.code == "empty-sweep"


def test_unknown_key_and_method_rejected():
    with pytest.raises(ConfigError):
        SweepSpec(ScenarioConfig(), (Axis.single("bogus", [1.0]),))
    with pytest.raises(ConfigError):
        SweepSpec(ScenarioConfig(), (Axis.single("eta", [0.5]),), methods=("exact",))


def test_points_are_row_major():
    spec = SweepSpec(ScenarioConfig(), (Axis.single("K", [1, 2]), Axis.single("eta", [0.3, 0.6])))
    assert spec.points() == [(1, 0.3), (1, 0.6), (2, 0.3), (2, 0.6)]


def test_point_seed_depends_on_index():
    assert point_seed(0, 1) == point_seed(0, 1)
    assert point_seed(0, 1) != point_seed(0, 2)
    assert point_seed(0, 1) != point_seed(1, 1)


def _small_spec(**kw):
    base = ScenarioConfig(**FAST)
    axes = (Axis.parse("K+Q=1,2"), Axis.parse("gamma_u_db=10,30"))
    return SweepSpec(base, axes, **kw)


def test_csv_layout():
    spec = _small_spec(methods=("analytic", "monte-carlo"), trials=2000)
    text = write_csv(spec, run_sweep(spec))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["K", "Q", "gamma_u_db", "sscp_ana", "sscp_ref", "sscp_mc",
                       "mc_stderr", "mc_trials", "seed", "err"]
    assert len(rows) == 5
    assert rows[1][:3] == ["1", "1", "10"]
    assert rows[1][4] == ""  # reference not requested
    assert rows[1][7] == "2000"
    assert not text.endswith("\r\n")


def test_csv_identical_across_workers(tmp_path):
    texts = []
    for workers in (1, 3):
        spec = _small_spec(methods=("analytic", "monte-carlo"), trials=3000, seed=7,
                           workers=workers)
        out = tmp_path / f"w{workers}.csv"
        write_csv(spec, run_sweep(spec), out)
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_invalid_point_becomes_error_row():
    spec = SweepSpec(ScenarioConfig(**FAST), (Axis.single("eta", [0.5, 1.0]),))
    rows = run_sweep(spec)
    assert rows[0].err == "" and 0 <= rows[0].sscp_ana <= 1
    assert rows[1].err and rows[1].sscp_ana is None
    line = write_csv(spec, rows).splitlines()[2]
    assert line.endswith(rows[1].err)


def test_flat_objective_returns_lower_bound():
    cfg = ScenarioConfig(l=0.0)
    x, v = optimize_scalar(cfg, "eta", (0.1, 0.9), budget=10)
    assert (x, v) == (0.1, 1.0)


def test_optimizer_on_known_quadratic():
    f = lambda c: -(c.eta - 0.37) ** 2  # noqa: E731
    x, _ = optimize_scalar(ScenarioConfig(), "eta", (0.05, 0.95), budget=60, objective=f)
    assert x == pytest.approx(0.37, abs=1e-6)


def test_optimizer_argument_checks():
    with pytest.raises(ConfigError) as exc:
        optimize_scalar(ScenarioConfig(), "eta", (0.5, 0.5))
    assert exc.value.code == "degenerate-bounds"
    with pytest.raises(ConfigError):
        optimize_scalar(ScenarioConfig(), "K", (1, 3))


def test_optimizer_stable_when_budget_doubles():
    cfg = figure_config(6, FAST)
    x1, v1 = optimize_scalar(cfg, "eta", (0.05, 0.95), budget=30)
    x2, v2 = optimize_scalar(cfg, "eta", (0.05, 0.95), budget=60)
    assert abs(x1 - x2) < 0.01
    assert v2 >= v1 - 1e-12


def test_single_cell_grid():
    res = grid_position(ScenarioConfig(**FAST), (0, 5), (0, 5), step=10)
    assert res.sscp.shape == (1, 1)
    assert res.argmax == (0, 0) and not res.interior


def _mirror(cfg):
    return cfg.replace(**{k: -getattr(cfg, k) for k in ("x_f", "y_f", "x_n", "y_n", "x_e", "y_e")})


def test_grid_mirror_symmetry():
    cfg = figure_config(7, FAST)
    rng = (-60.0, 60.0)
    g = grid_position(cfg, rng, rng, step=30)
    gm = grid_position(_mirror(cfg), rng, rng, step=30)
    np.testing.assert_allclose(g.sscp, gm.sscp[::-1, ::-1], atol=1e-6, rtol=0)


def test_grid_from_rows_rejects_error_rows():
    spec = position_spec(ScenarioConfig(**FAST).replace(h_u=50.0), (0, 10), (0, 10), 10)
    rows = run_sweep(spec)
    rows[1].err = "bad-value"
    with pytest.raises(ConfigError):
        grid_from_rows(spec, rows)


def test_figure_fixtures_load():
    for n in (3, 4, 5, 6, 7):
        cfg = figure_config(n)
        assert cfg.nu1 == 0.4 and cfg.omega_fu == 3.0
        assert figure_axes(n)
    assert figure_config(4).K == 5
    with pytest.raises(ConfigError):
        figure_config(8)


def test_triangle_scores_columns():
    spec = _small_spec(methods=("analytic", "reference", "monte-carlo"), trials=20000)
    rep = triangle_check(run_sweep(spec))
    assert rep.points == 4 and rep.errors == 0
    assert rep.max_ref_gap < 1e-3
    assert rep.mc_within_4 == 4
