import csv
import json

import pytest

from dqs import ConfigError, RelaxRates, derive
from dqs.cli import FIG1_PANELS, main, strength_values
from dqs.config import RunConfig, load_config, parse_config_text

from .conftest import drive_at

NARROW = ["--set", "spectrum.omega_min=-0.2", "--set", "spectrum.omega_max=0.2"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_config_text():
    values = parse_config_text("# comment\ndrive.a = 6.0   # inline\nrelax.eta = 0.01\nintegrator.phase_average = yes\n\n")
    assert values == {"drive.a": 6.0, "relax.eta": 0.01, "integrator.phase_average": True}


def test_parse_config_collects_every_problem():
    with pytest.raises(ConfigError) as info:
        parse_config_text("drive.a = 6\ndrive.a = 7\nbogus.key = 1\nrelax.gamma = fast\nno equals sign\n")
    lines = str(info.value).splitlines()
    assert len(lines) == 4
    assert any("duplicate" in line for line in lines)
    assert any("unknown" in line for line in lines)


def test_config_invariants():
    assert RunConfig({"drive.a": 6.0}).problems() == []
    problems = RunConfig({"drive.a": 6.0, "drive.g": 3.0, "relax.gamma": -1.0, "output.format": "xml"}).problems()
    assert len(problems) == 4  # a negative gamma also breaks gamma + eta > 0
    assert RunConfig().problems() == ["drive: exactly one of drive.g or drive.a must be set"]
    cfg = RunConfig({"drive.g": 3.0}).with_overrides({"drive.a": "5"})
    assert cfg["drive.g"] is None and cfg["drive.a"] == 5.0


def test_omega_grid_default_step():
    cfg = RunConfig({"drive.a": 6.0})
    drive, relax = cfg.drive(), cfg.relax()
    grid = cfg.omega_grid(drive, relax)
    assert grid[0] == -0.5 and grid[-1] <= 6.5
    assert grid[1] - grid[0] == pytest.approx(derive(drive, relax).gamma_perp_dressed / 10)


def test_strength_values():
    values = strength_values(1.5, 12.0, 0.25)
    assert len(values) == 43 and values[0] == 1.5 and values[-1] == 12.0


def test_spectrum_outputs(tmp_path):
    out = tmp_path / "a6"
    assert main(["spectrum", "--set", "drive.a=6.0", "--mode", "both", "--out", str(out)]) == 0
    derived = json.loads((out / "derived.json").read_text())
    assert set(derived) == {"a", "sigma0", "eps_q", "Gamma_par", "Gamma_perp"}
    assert derived["sigma0"] == pytest.approx(-0.198, abs=1e-3)
    rows = read_csv(out / "spectrum_inc.csv")
    assert list(rows[0]) == ["Omega", "S_analytic", "S_numeric"]
    lines = json.loads((out / "lines_coh.json").read_text())
    assert {line["pipeline"] for line in lines} == {"analytic", "numeric"}
    peaks = json.loads((out / "peaks.json").read_text())
    for pipeline in ("analytic", "numeric"):
        n1 = [p for p in peaks if p["pipeline"] == pipeline and p["n"] == 1]
        assert n1 and n1[0]["amplitude"] < 0
    for p in peaks:
        assert set(p) == {"pipeline", "n", "center", "half_width", "amplitude", "residual"}
    # the resolved config reproduces the run
    again = load_config(out / "resolved_config")
    assert again.dumps() == (out / "resolved_config").read_text()


def test_json_output_format(tmp_path):
    out = tmp_path / "j"
    assert main(["spectrum", "--set", "drive.a=6.0", "--set", "output.format=json", "--mode", "analytic", "--out", str(out)]) == 0
    data = json.loads((out / "spectrum_inc.json").read_text())
    assert set(data) == {"Omega", "S_analytic"}
    assert not (out / "spectrum_inc.csv").exists()


def test_config_file_and_regression_flag(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("drive.a = 6.0\nspectrum.omega_min = -0.2\nspectrum.omega_max = 0.2\n")
    out = tmp_path / "o"
    assert main(["spectrum", "--config", str(cfg), "--mode", "numeric", "--regression-term", "paper", "--out", str(out)]) == 0
    assert "integrator.regression_term = paper_constant" in (out / "resolved_config").read_text()


def test_undriven_outputs_are_empty(tmp_path):
    out = tmp_path / "g0"
    assert main(["spectrum", "--set", "drive.g=0", "--out", str(out)] + NARROW) == 0
    assert json.loads((out / "lines_coh.json").read_text()) == []
    assert json.loads((out / "peaks.json").read_text()) == []
    for row in read_csv(out / "spectrum_inc.csv"):
        assert float(row["S_analytic"]) == 0.0
        assert abs(float(row["S_numeric"])) < 1e-12


def test_weak_drive_warns(tmp_path, capsys):
    assert main(["spectrum", "--set", "drive.a=1.0", "--mode", "analytic", "--out", str(tmp_path / "w")]) == 0
    assert "below 1.5" in capsys.readouterr().err


def test_config_errors_exit_2(tmp_path, capsys):
    code = main(["spectrum", "--set", "drive.a=-1", "--set", "relax.gamma=0", "--out", str(tmp_path / "x")])
    assert code == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 2 and all(line.startswith("config error:") for line in err)
    assert main(["spectrum", "--set", "nope=1", "--out", str(tmp_path / "x")]) == 2
    assert main(["fig2", "--a-min", "1.0", "--out", str(tmp_path / "x")]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("drive.a = 6\nmystery = 3\n")
    assert main(["spectrum", "--config", str(bad), "--out", str(tmp_path / "x")]) == 2


def test_horizon_error_exits_3(tmp_path, capsys):
    width = derive(drive_at(8.6), RelaxRates(0.03)).gamma_perp_dressed
    code = main(["spectrum", "--set", "drive.a=8.6", "--set", f"integrator.tau_max={10.5 / width}",
                 "--mode", "numeric", "--out", str(tmp_path / "h")] + NARROW)
    assert code == 3
    assert "numerical error" in capsys.readouterr().err


def test_output_is_deterministic(tmp_path):
    args = ["spectrum", "--set", "drive.a=5.0", "--mode", "both"] + NARROW
    assert main(args + ["--out", str(tmp_path / "r1")]) == 0
    assert main(args + ["--out", str(tmp_path / "r2")]) == 0
    for name in ("spectrum_inc.csv", "lines_coh.json", "peaks.json", "derived.json"):
        assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()


def test_fig1_analytic(tmp_path):
    out = tmp_path / "fig1"
    assert main(["fig1", "--mode", "analytic", "--jobs", "1", "--out", str(out)]) == 0
    rows = read_csv(out / "summary.csv")
    assert [r["panel"] for r in rows] == [p[0] for p in FIG1_PANELS]
    for row in rows:
        tol = 0.025 if row["panel"] == "c" else 1e-3
        assert float(row["sigma0_analytic"]) == pytest.approx(float(row["sigma0_reference"]), abs=tol)
        assert (out / f"panel_{row['panel']}" / "derived.json").exists()
    peaks = json.loads((out / "panel_a" / "peaks.json").read_text())
    assert [p for p in peaks if p["n"] == 1][0]["amplitude"] < 0


def test_fig2_small_range(tmp_path):
    out = tmp_path / "fig2"
    assert main(["fig2", "--a-min", "2.25", "--a-max", "2.5", "--a-step", "0.25", "--jobs", "1", "--out", str(out)]) == 0
    rows = read_csv(out / "quasienergy.csv")
    assert list(rows[0]) == ["a", "eps_q_numeric", "eps_q_analytic"]
    assert [float(r["a"]) for r in rows] == [2.25, 2.5]
    # the quasienergy changes sign between these points
    assert float(rows[0]["eps_q_numeric"]) > 0 > float(rows[1]["eps_q_numeric"])


def test_sweep_parallel_matches_serial(tmp_path):
    base = ["sweep", "--key", "relax.eta", "--values", "0", "0.01", "--set", "drive.a=6", "--mode", "analytic"]
    assert main(base + ["--jobs", "1", "--out", str(tmp_path / "s1")]) == 0
    assert main(base + ["--jobs", "2", "--out", str(tmp_path / "s2")]) == 0
    assert (tmp_path / "s1" / "summary.csv").read_bytes() == (tmp_path / "s2" / "summary.csv").read_bytes()
    assert (tmp_path / "s1" / "relax.eta=0.01" / "derived.json").exists()
    assert main(["sweep", "--key", "drive.a", "--range", "5", "6", "0.5", "--mode", "analytic",
                 "--out", str(tmp_path / "s3")]) == 0
    assert [r["drive.a"] for r in read_csv(tmp_path / "s3" / "summary.csv")] == ["5", "5.5", "6"]
