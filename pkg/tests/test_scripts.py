import json
import os

import pandas as pd

from scripts.run_coupler_analysis import main
from scripts.validate_configs import main as validate_main

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIG2_CONF = os.path.join(BASE_DIR, "configs", "fig2.conf")


def _run(tmp_path, *argv):
    return main(["--log-file", str(tmp_path / "runs.log"), *argv])


def test_coupling_sweep_to_file(tmp_path):
    out = tmp_path / "coupling.csv"
    assert _run(tmp_path, "coupling", "--sweep", "omega_y", "4.7", "4.9", "--grid", "5", "--out", str(out)) == 0
    frame = pd.read_csv(out)
    assert len(frame) == 5
    assert frame.columns[0] == "omega_y_ghz"
    meta = json.loads((tmp_path / "coupling.meta.json").read_text(encoding="utf-8"))
    assert meta["command"] == "coupling"
    assert meta["sweep"][0]["points"] == 5
    assert "exit 0" in (tmp_path / "runs.log").read_text(encoding="utf-8")


def test_zz_to_stdout(tmp_path, capsys):
    assert _run(tmp_path, "zz", "--config", FIG2_CONF, "--sweep", "omega_y", "4.8", "4.9", "--grid", "3",
                "--cross-kerr") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("omega_y_ghz,xi2_mhz,xi3_mhz,xi4s_mhz,xi4c0_mhz")
    assert len(lines) == 4


def test_derived_zz_ladder_with_workers(tmp_path, capsys):
    argv = ("zz", "--config", FIG2_CONF, "--sweep", "omega_y", "4.85", "4.95", "--grid", "4",
            "--cross-kerr", "--zz-form", "rayleigh_schrodinger")
    assert _run(tmp_path, *argv) == 0
    serial = capsys.readouterr().out
    assert _run(tmp_path, *argv, "--workers", "2") == 0
    assert capsys.readouterr().out == serial
    assert serial.splitlines()[0].startswith("omega_y_ghz,xi2_mhz,xi3_mhz,xi4s_mhz,xi4ab_mhz,xi_total_mhz")


def test_spectrum_with_matrix_dump(tmp_path, capsys):
    matrix = tmp_path / "H.csv"
    assert _run(tmp_path, "spectrum", "--labels", "0100,0010", "--dump-matrix", str(matrix)) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3
    assert matrix.exists()


def test_switchoff_report(tmp_path):
    conf = tmp_path / "no_direct.conf"
    conf.write_text(open(FIG2_CONF, encoding="utf-8").read().replace("g_xy_mhz = 1", "g_xy_mhz = 0"),
                    encoding="utf-8")
    out = tmp_path / "roots.csv"
    assert _run(tmp_path, "switchoff", "--config", str(conf), "--which", "g_d",
                "--sweep", "omega_y", "4.2", "5.0", "--grid", "161", "--out", str(out)) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["root", "bracket_lo", "bracket_hi", "residual"]
    assert abs(frame["root"].iloc[0] - 4.747) < 5e-3


def test_config_error_exit_code(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("omega_a_ghz = fast\n", encoding="utf-8")
    assert _run(tmp_path, "coupling", "--config", str(conf)) == 1
    assert "error:" in capsys.readouterr().err
    assert "config error" in (tmp_path / "runs.log").read_text(encoding="utf-8")


def test_bad_sweep_variable(tmp_path):
    assert _run(tmp_path, "coupling", "--sweep", "theta", "0", "1") == 1


def test_domain_error_exit_code(tmp_path):
    assert _run(tmp_path, "zzzero", "--sweep", "omega_x", "4.4", "4.6", "--sweep2", "omega_y", "4.8", "5.0",
                "--grid", "3") == 2


def test_figure_datasets(tmp_path):
    assert _run(tmp_path, "figure", "fig6", "--grid", "5", "--out", str(tmp_path / "figs")) == 0
    assert (tmp_path / "figs" / "fig6_zz.csv").exists()
    meta = json.loads((tmp_path / "figs" / "fig6_zz.meta.json").read_text(encoding="utf-8"))
    assert meta["figure"] == "fig6"


def test_validate_subset(tmp_path, capsys):
    assert _run(tmp_path, "validate", "capacitance_approximation") == 0
    assert "✓ capacitance_approximation" in capsys.readouterr().out


def test_validate_configs(tmp_path, capsys):
    assert validate_main([FIG2_CONF, os.path.join(BASE_DIR, "configs", "hierarchy_network.conf")]) == 0
    bad = tmp_path / "bad.conf"
    bad.write_text("g_xy_mhz = 1\ng_xy_mhz = 2\n", encoding="utf-8")
    assert validate_main([str(bad)]) == 1
    assert "duplicate key" in capsys.readouterr().err
