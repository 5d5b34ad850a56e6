import json

import numpy as np
import pytest

from conftest import THRESHOLD
from parametric_emission import ConfigurationError
from parametric_emission.cli import PRESETS, Command, build_config, main
from parametric_emission.io import fmt, line_plot, parse_config_text, parse_overrides, write_csv, write_json


# --- io ----------------------------------------------------------------------

def test_parse_config_text():
    cfg = parse_config_text("f0 = 0.1  # drive\n\n g0=0.3\n# only a comment\n")
    assert cfg == {"f0": "0.1", "g0": "0.3"}
    with pytest.raises(ConfigurationError):
        parse_config_text("f0 0.1")
    with pytest.raises(ConfigurationError):
        parse_config_text("= 3")


def test_parse_overrides():
    assert parse_overrides(["a=1", " b = x=y "]) == {"a": "1", "b": "x=y"}
    with pytest.raises(ConfigurationError):
        parse_overrides(["novalue"])


def test_fmt():
    assert fmt(0.1) == "0.1"
    assert fmt(-0.0) == "0.0"
    assert fmt(np.float64(1 / 3)) == repr(1 / 3)
    assert fmt(None) == ""
    assert fmt(np.int64(4)) == "4"
    assert fmt("First") == "First"


def test_writers_round_trip(tmp_path):
    path = write_csv(tmp_path / "a.csv", ("x", "y"), [(1.0, 2), (0.5, None)])
    assert path.read_text() == "x,y\n1.0,2\n0.5,\n"
    data = {"b": np.float64(0.25), "a": [1, np.int64(2)], "c": float("nan"), "z": 1 + 2j}
    loaded = json.loads(write_json(tmp_path / "a.json", data).read_text())
    assert loaded == {"a": [1, 2], "b": 0.25, "c": None, "z": {"re": 1.0, "im": 2.0}}


def test_line_plot(tmp_path):
    x = np.linspace(0, 1, 20)
    svg = line_plot(tmp_path / "p.svg", [("up", x, np.exp(x)), ("gap", x, np.where(x > 0.5, np.nan, x))],
                    xlabel="t", ylabel="n <a>", logy=True).read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline") == 2
    assert "n &lt;a&gt;" in svg


# --- configuration -----------------------------------------------------------

CAPTIONS = {
    2: {"deltaB": 0.0, "g0": 0.3, "f0": 0.2},
    3: {"deltaB": 0.0, "g0": 0.3, "f0": 0.1},
    4: {"delta0": 0.0, "deltaB": 0.0, "g0": 0.3, "f0": 0.2},
    5: {"delta0": 0.0, "deltaB": 0.0, "g0": 0.3, "f0": 0.2},
    6: {"delta0": 0.0, "deltaB": 0.0, "g0": 0.3, "f0": 0.1},
    7: {"delta0": 0.0, "deltaB": 0.0, "g0": 0.3, "f0": 0.1},
    8: {"deltaB": 0.0, "g0": 0.3, "f0": 0.2},
    9: {"deltaB": 0.0, "g0": 0.3, "f0": 0.2},
}


@pytest.mark.parametrize("figure", sorted(CAPTIONS))
def test_presets_match_captions(figure, tmp_path):
    cmd = PRESETS[figure][0]
    cfg = build_config(cmd.value, figure=figure, out=tmp_path)
    for key, value in CAPTIONS[figure].items():
        assert getattr(cfg.params, key) == value
    if figure in (8, 9):
        assert cfg.series == [0.15, 0.3]


def test_figure_one_is_decoupled(tmp_path):
    cfg = build_config("sweep", figure=1, out=tmp_path)
    assert cfg.params.g0 == 0.0


def test_config_precedence(tmp_path):
    (tmp_path / "run.cfg").write_text("f0 = 0.15\nt_count = 5\n")
    cfg = build_config("evolve", config_path=tmp_path / "run.cfg", overrides={"f0": "0.12"},
                       figure=6, out=tmp_path)
    assert cfg.params.f0 == 0.12
    assert cfg.settings["t_count"] == 5


@pytest.mark.parametrize("overrides", [
    {"t_count": "1"},
    {"delta0_min": "1", "delta0_max": "1"},
    {"bogus": "1"},
    {"step": "fast"},
    {"g0": "-1"},
])
def test_invalid_config(overrides, tmp_path):
    with pytest.raises(ValueError):
        build_config("sweep", overrides=overrides, out=tmp_path)


def test_wrong_command_for_figure(tmp_path):
    with pytest.raises(ConfigurationError):
        build_config("sweep", figure=4, out=tmp_path)
    with pytest.raises(ConfigurationError):
        build_config("sweep", figure=12, out=tmp_path)


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ConfigurationError):
        build_config("threshold", out=blocker / "sub")


# --- end to end ----------------------------------------------------------------

def test_threshold_command(tmp_path, capsys):
    assert main(["threshold", "--set", "f0=0.2", "--set", "g0=0.3", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "summary.json").read_text())
    assert data["threshold"] == pytest.approx(0.0872, abs=1e-4)
    assert data["threshold_sweep"] == pytest.approx(THRESHOLD, abs=1e-4)
    assert set(data) >= {"n_a_stationary", "flux", "gamma_I", "threshold"}
    assert str(tmp_path / "summary.json") in capsys.readouterr().out


def test_sweep_figure_two(tmp_path):
    assert main(["sweep", "--figure", "2", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "delta0,branch_id,re_z,im_z,sheet_plus,sheet_minus,classification"
    assert len(lines) > 1000
    events = (tmp_path / "events.csv").read_text().splitlines()
    assert events[0] == "delta0,event,re_z,im_z"
    assert sum("RealAxisCrossing" in e for e in events) == 2


def test_byte_identical_outputs(tmp_path):
    for run in ("a", "b"):
        assert main(["sweep", "--figure", "3", "--set", "step=0.05", "--out", str(tmp_path / run)]) == 0
        assert main(["spectrum", "--figure", "9", "--format", "svg", "--out", str(tmp_path / run)]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_evolve_both_backends(tmp_path):
    argv = ["evolve", "--figure", "6", "--set", "t_max=60", "--set", "t_count=4", "--backend", "both",
            "--out", str(tmp_path)]
    assert main(argv) == 0
    diff = json.loads((tmp_path / "diff.json").read_text())
    assert diff["max_rel_dev_n_a"] < 0.01
    header = (tmp_path / "timeseries_oracle.csv").read_text().splitlines()[0]
    assert header == "t,n_a,n_total,commutator_check"


def test_evolve_json_and_svg(tmp_path):
    assert main(["evolve", "--set", "f0=0.1", "--set", "t_max=20", "--set", "t_count=3", "--format", "svg",
                 "--out", str(tmp_path)]) == 0
    assert (tmp_path / "timeseries.svg").exists()
    assert main(["evolve", "--set", "f0=0.1", "--set", "t_max=20", "--set", "t_count=3", "--format", "json",
                 "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "timeseries.json").read_text())
    assert rows[0] == {"t": 0.0, "n_a": 0.0, "n_total": 0.0, "commutator_check": 0.0}


def test_eigs_command(tmp_path):
    assert main(["eigs", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "eigs.csv").read_text().splitlines()
    assert len(lines) == 5


def test_spectrum_with_dynamics(tmp_path):
    assert main(["spectrum", "--figure", "7", "--set", "delta_count=41", "--set", "t_probe=100", "--oracle",
                 "--out", str(tmp_path)]) == 0
    kinds = {line.rsplit(",", 1)[1] for line in (tmp_path / "spectrum.csv").read_text().splitlines()[1:]}
    assert kinds == {"StationaryFormula", "OracleEstimate"}


def test_flux_command(tmp_path):
    assert main(["flux", "--set", "f0=0.1", "--set", "t_max=300", "--set", "t_count=31",
                 "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "flux_summary.json").read_text())
    assert data["oracle_plateau"] == pytest.approx(data["flux"], rel=0.02)


def test_fexp_command(tmp_path):
    assert main(["fexp", "--figure", "5", "--set", "delta_count=81", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "fexp_summary.json").read_text())
    assert data["gamma_fit"] == pytest.approx(data["gamma_I"], rel=0.05)


def test_usage_errors_exit_two(tmp_path, capsys):
    assert main(["threshold", "--set", "f0=abc", "--out", str(tmp_path)]) == 2
    assert main(["spectrum", "--out", str(tmp_path)]) == 2  # unstable defaults
    assert main(["evolve", "--backend", "oracle", "--set", "t_max=600", "--out", str(tmp_path)]) == 2
    assert main(["fexp", "--set", "f0=0.1", "--out", str(tmp_path)]) == 2
    assert "error:" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


def test_convergence_failure_exit_three(tmp_path):
    argv = ["evolve", "--set", "f0=0.1", "--set", "t_max=10", "--set", "t_count=2", "--set", "atol=1e-30",
            "--set", "rtol=0", "--out", str(tmp_path)]
    assert main(argv) == 3
    diag = json.loads((tmp_path / "diagnostic.json").read_text())
    assert diag["error"] == "AccuracyError"


def test_command_enum_complete():
    assert {c.value for c in Command} == {"eigs", "sweep", "evolve", "spectrum", "flux", "threshold", "fexp"}
