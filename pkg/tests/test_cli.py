import pytest

from sscp.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, main
from sscp.sysmodel import SYMBOLS

FAST = ["--set", "quad_n=200", "--set", "quad_o=200"]


def test_eval_prints_value(capsys):
    assert main(["eval", *FAST]) == EXIT_OK
    value, method = capsys.readouterr().out.split()
    assert method == "lemma-1"
    assert 0.0 <= float(value) <= 1.0


def test_eval_both_methods(capsys):
    assert main(["eval", "--method", "both", "--set", "K=2", *FAST]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    ana, ref = float(lines[0].split()[0]), float(lines[1].split()[0])
    assert abs(ana - ref) < 1e-3


def test_simulate_reports_seed(capsys):
    assert main(["simulate", "--trials", "5000", "--seed", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "+/-" in out and "trials=5000" in out and "seed=3" in out


def test_bad_override_exits_2(capsys):
    assert main(["eval", "--set", "eta=1.5"]) == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err
    assert main(["eval", "--set", "nonsense=1"]) == EXIT_CONFIG


def test_missing_config_file_exits_4(tmp_path):
    assert main(["eval", "--config", str(tmp_path / "missing.cfg")]) == EXIT_IO


def test_unwritable_output_exits_4(tmp_path):
    out = tmp_path / "no" / "such" / "dir.csv"
    assert main(["sweep", "--axis", "eta=0.5", "--out", str(out), *FAST]) == EXIT_IO


def test_config_file_and_override(tmp_path, capsys):
    path = tmp_path / "s.cfg"
    path.write_text("sysmodel:\n  K: 2\n  Q: 2\nchannel:\n  nu1: 0.0\n")
    assert main(["eval", "--config", str(path), *FAST]) == EXIT_OK
    assert capsys.readouterr().out.split()[1] == "lemma-2"


def test_sweep_rerun_byte_identical(tmp_path):
    args = ["sweep", "--axis", "K+Q=1,2", "--axis", "gamma_u_db=10:30:10",
            "--methods", "ana,mc", "--trials", "4000", "--seed", "11", *FAST]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*args, "--out", str(a)]) == EXIT_OK
    assert main([*args, "--out", str(b), "--workers", "2"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 7


def test_empty_sweep_axis_exits_2():
    assert main(["sweep", "--axis", "eta="]) == EXIT_CONFIG


def test_optimize_output(capsys):
    assert main(["optimize", "--key", "eta", "--bounds", "0.1:0.9", "--budget", "12",
                 *FAST]) == EXIT_OK
    out = capsys.readouterr().out.strip()
    assert out.startswith("eta=") and "sscp=" in out


def test_optimize_degenerate_bounds_exits_2():
    assert main(["optimize", "--key", "h_u", "--bounds", "80:80"]) == EXIT_CONFIG


def test_gridpos_csv(tmp_path, capsys):
    out = tmp_path / "g.csv"
    assert main(["gridpos", "--x=-20:20", "--y=-20:20", "--step", "20",
                 "--out", str(out), *FAST]) == EXIT_OK
    assert len(out.read_text().splitlines()) == 10
    assert capsys.readouterr().out.startswith("argmax x_u=")


def test_help_lists_every_key(capsys):
    with pytest.raises(SystemExit):
        main(["eval", "--help"])
    text = capsys.readouterr().out
    for key in SYMBOLS:
        assert key in text
