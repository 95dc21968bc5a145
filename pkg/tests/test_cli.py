import csv
import math
import os
import subprocess
import sys

import pytest

from collective_dephasing import __version__
from collective_dephasing.cli import (
    EXIT_DOMAIN,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    PRESETS,
    ConfigError,
    ScenarioConfig,
    format_config,
    main,
    parse_config,
    preset_configs,
    run_config,
)
from collective_dephasing.errors import DomainError


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def _write_config(tmp_path, text, name="scenario.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------------------
# parsing


def test_parse_minimal_defaults():
    cfg = parse_config("computation = threshold\ns = 6\n")
    assert cfg.name == "threshold" and cfg.s == [6.0]
    assert cfg.w_s_over_wbar == 1.0 and cfg.points_per_decade == 400


@pytest.mark.parametrize("text, expected", [
    ("n_list = log:1:3:2", [10, 32, 100, 316, 1000]),
    ("n_list = range:3:6, 4, 100", [3, 4, 5, 6, 100]),
    ("theta = lin:0:1:5", [0.0, 0.25, 0.5, 0.75, 1.0]),
    ("theta = 0.1, 2e-3", [0.1, 0.002]),
])
def test_parse_list_generators(text, expected):
    cfg = parse_config("computation = gamma_curve\n" + text + "\n")
    key = text.split("=")[0].strip()
    assert getattr(cfg, key) == expected


def test_parse_comments_and_version_key():
    cfg = parse_config("# header\nversion = 9.9\ncomputation = threshold  # trailing\n\n")
    assert cfg.computation == "threshold"


@pytest.mark.parametrize("text, fragment", [
    ("computation = threshold\nbogus = 1\n", ":2: unknown key 'bogus'"),
    ("computation = threshold\ns = 1\ns = 2\n", ":3: duplicate key 's'"),
    ("computation = threshold\nt_max = ten\n", ":2: field 't_max'"),
    ("computation = threshold\nn_list = 3.5\n", ":2: field 'n_list'"),
    ("computation = threshold\njust words\n", ":2: expected 'key = value'"),
    ("s = 4\n", "missing required key 'computation'"),
    ("computation = plot\n", ":1: computation must be one of"),
])
def test_parse_errors_carry_line_diagnostics(text, fragment):
    with pytest.raises(ConfigError) as info:
        parse_config(text, "cfg")
    assert fragment in str(info.value)


@pytest.mark.parametrize("overrides, fragment", [
    ({"s": [-1.0]}, "s > -1"),
    ({"coupling_combo": [-0.1]}, "coupling_combo >= 0"),
    ({"theta": [-1.0]}, "theta >= 0"),
    ({"n_list": [0]}, "n_list"),
    ({"t_max": 0.0}, "t_max > 0"),
    ({"s": [4.0, 2.0]}, "same number of entries"),
    ({"mode": ["both"]}, "mode entries"),
    ({"name": "bad name"}, "name must be"),
])
def test_validation_names_invariant(overrides, fragment):
    cfg = ScenarioConfig("gamma_curve", **overrides)
    with pytest.raises(DomainError) as info:
        cfg.validate()
    assert fragment in str(info.value)


# ---------------------------------------------------------------------------
# running scenarios


def test_threshold_config_s6(tmp_path):
    path = _write_config(tmp_path, "computation = threshold\ns = 6\n")
    assert main(["run", path, "--out", str(tmp_path / "out")]) == EXIT_OK
    rows = _rows(tmp_path / "out" / "threshold.csv")
    assert rows == [["s", "dimension", "temperature_class", "all_time", "zeno"],
                    ["6.0", "3D", "zero", "true", "true"]]


def test_threshold_config_ignores_coupling_list(tmp_path):
    path = _write_config(tmp_path, "computation = threshold\ns = 3, 4, 5, 6\ntemperature_class = finite\n")
    assert main(["run", path, "--out", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "threshold.csv")
    assert [r[3:] for r in rows[1:]] == [["false", "false"], ["false", "false"], ["false", "true"], ["false", "true"]]


def test_zero_coupling_gives_zero_gamma(tmp_path):
    path = _write_config(tmp_path, "computation = gamma_curve\ncoupling_combo = 0\ntheta = 0, 1\n"
                                   "t_min = 0.1\nt_max = 10\npoints_per_decade = 10\n")
    assert main(["run", path, "--out", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "gamma_curve.csv")
    assert rows[0] == ["w_t", "gamma_T0", "gamma_T1"]
    assert len(rows) == 22
    assert all(float(v) == 0.0 for r in rows[1:] for v in r[1:])


def test_sidecar_round_trip(tmp_path):
    text = ("computation = fisher_sweep\nname = rt\ns = 2\ncoupling_combo = 0.12\ntheta = 0.25\n"
            "n_list = 10, 1000\nmode = ghz_collective, one_by_one\nt_min = 0.1\nt_max = 5\n"
            "points_per_decade = 7\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", _write_config(tmp_path, text), "--out", str(a)]) == EXIT_OK
    meta = (a / "rt.meta").read_text(encoding="utf-8")
    assert meta.startswith(f"version = {__version__}\n")
    assert main(["run", str(a / "rt.meta"), "--out", str(b)]) == EXIT_OK
    for fname in ("rt.csv", "rt_maxima.csv", "rt.meta"):
        assert _read(a / fname) == _read(b / fname)


def test_format_config_round_trips_infinite_cutoff():
    cfg = ScenarioConfig("gamma_curve", w_s_over_wbar=math.inf, theta=[0.0, 0.5])
    again = parse_config(format_config(cfg))
    assert again == cfg


def test_outputs_use_lf_and_finite_cells(tmp_path):
    cfg = parse_config("computation = best_time_surface\ntheta = 0, 1\nn_list = 100, 10000\n"
                       "t_min = 0.02\nt_max = 20\npoints_per_decade = 50\n")
    paths = run_config(cfg, str(tmp_path))
    for p in paths:
        assert b"\r" not in _read(p)
    rows = _rows(paths[0])
    assert rows[0] == ["theta", "N", "t_best", "F_best", "t_best_zeno"]
    assert all(math.isfinite(float(v)) for r in rows[1:] for v in r)


def test_threads_do_not_change_output(tmp_path):
    text = "computation = best_time_surface\ntheta = 0, 0.5, 1\nn_list = 100, 1000\nt_max = 20\n" \
           "t_min = 0.02\npoints_per_decade = 40\n"
    path = _write_config(tmp_path, text)
    assert main(["run", path, "--out", str(tmp_path / "one")]) == EXIT_OK
    assert main(["run", path, "--out", str(tmp_path / "four"), "--threads", "4"]) == EXIT_OK
    csv1 = _read(tmp_path / "one" / "best_time_surface.csv")
    assert csv1 == _read(tmp_path / "four" / "best_time_surface.csv")


def test_oracle_config_is_seed_deterministic(tmp_path):
    text = "computation = oracle\nn_list = 16\nn_seeds = 4\nt_values = 0.5, 1\nseed = 3\n"
    path = _write_config(tmp_path, text)
    assert main(["run", path, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["run", path, "--out", str(tmp_path / "b")]) == EXIT_OK
    assert main(["run", path, "--out", str(tmp_path / "c"), "--seed", "4"]) == EXIT_OK
    a = _read(tmp_path / "a" / "oracle.csv")
    assert a == _read(tmp_path / "b" / "oracle.csv")
    assert a != _read(tmp_path / "c" / "oracle.csv")
    assert "seed = 4\n" in (tmp_path / "c" / "oracle.meta").read_text()


# ---------------------------------------------------------------------------
# exit codes


def test_exit_code_parse_error(tmp_path, capsys):
    path = _write_config(tmp_path, "computation = threshold\nwat = 1\n")
    assert main(["run", path, "--out", str(tmp_path)]) == EXIT_USAGE
    assert "unknown key 'wat'" in capsys.readouterr().err


def test_exit_code_missing_file(tmp_path):
    assert main(["run", str(tmp_path / "none.cfg"), "--out", str(tmp_path)]) == EXIT_USAGE


def test_exit_code_unknown_preset(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["preset", "fig9", "--out", str(tmp_path)])
    assert info.value.code == EXIT_USAGE


def test_exit_code_domain(tmp_path, capsys):
    path = _write_config(tmp_path, "computation = threshold\ns = -2\n")
    assert main(["run", path, "--out", str(tmp_path)]) == EXIT_DOMAIN
    assert "s > -1" in capsys.readouterr().err
    assert not os.path.exists(tmp_path / "threshold.csv")


def test_exit_code_numerical(tmp_path, capsys):
    path = _write_config(tmp_path, "computation = gamma_curve\nt_values = 50\nrel_tol = 1e-15\n"
                                   "abs_tol = 0\nmax_panels = 1\nmethod = quadrature\n")
    assert main(["run", path, "--out", str(tmp_path)]) == EXIT_NUMERICAL
    assert "numerical error" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    path = _write_config(tmp_path, "computation = threshold\ns = 4\ndimension = 1D\n")
    proc = subprocess.run([sys.executable, "-m", "collective_dephasing", "run", path, "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert proc.stdout.splitlines() == [str(tmp_path / "threshold.csv"), str(tmp_path / "threshold.meta")]


# ---------------------------------------------------------------------------
# presets


def test_presets_follow_captions():
    fig1 = preset_configs("fig1")[0]
    assert (fig1.s, fig1.coupling_combo, fig1.theta, fig1.n_list) == ([4.0], [0.12], [0.0, 0.5, 1.0], [1000])
    fig3 = preset_configs("fig3")[0]
    assert fig3.s == [4.0, 2.0] and fig3.coupling_combo == [0.12, 0.02] and fig3.t_max == 100.0
    assert 254 in fig3.n_list and 255 in fig3.n_list
    fig5 = preset_configs("fig5")[0]
    assert fig5.t_max == 20.0 and fig5.s == [4.0]
    assert sorted(PRESETS) == ["fig1", "fig2", "fig3", "fig4", "fig5"]


def test_fig1_preset_header(tmp_path):
    assert main(["preset", "fig1", "--out", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "fig1.csv")
    assert rows[0] == ["w_t", "gamma_T0", "gamma_T0.5", "gamma_T1"]
    # gamma is nondecreasing in temperature at every grid time
    for r in rows[1:]:
        g = [float(v) for v in r[1:]]
        assert g[0] <= g[1] <= g[2]
    inset = _rows(tmp_path / "fig1_inset.csv")
    assert inset[0] == ["theta", "gamma_stat_N100", "gamma_stat_N1000"]
    # finite cutoff w_s = w_bar: 1.2 (1 + N^(-2/3))^(-5/2) at N = 1000
    assert float(inset[1][2]) == pytest.approx(1.2 * 1.01 ** -2.5, rel=1e-9)


def test_config_replicating_fig3_is_byte_identical(tmp_path):
    assert main(["preset", "fig3", "--out", str(tmp_path / "preset")]) == EXIT_OK
    path = _write_config(tmp_path, PRESETS["fig3"][0])
    assert main(["run", path, "--out", str(tmp_path / "config")]) == EXIT_OK
    for fname in ("fig3.csv", "fig3.meta"):
        assert _read(tmp_path / "preset" / fname) == _read(tmp_path / "config" / fname)
    rows = _rows(tmp_path / "preset" / "fig3.csv")
    assert rows[0][:5] == ["N", "ratio_s4", "ratio_s2", "t_best_numeric", "t_best_zeno"]
    by_n = {int(r[0]): r for r in rows[1:]}
    assert float(by_n[254][3]) == 100.0
    assert float(by_n[255][3]) == pytest.approx(7.364, rel=1e-2)
