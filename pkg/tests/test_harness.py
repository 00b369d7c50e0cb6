import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from schromax.families import random_band_limited
from schromax.grid import GridSpec
from schromax.harness import ConfigError, load_config
from schromax.harness.cli import battery_configs, main
from schromax.harness.experiments import (
    convergence_experiment,
    predicted_boundary,
    scan_s,
    verify_cover_bound,
    verify_cube,
)
from schromax.harness.reports import dumps, read_spectrum_csv, spectrum_csv, write_atomic
from schromax.settools import CurveSpec, SequenceSpec, SetSpec

SMALL_GRID = ["grid.L=20", "grid.N=256"]


def cfg_with(*pairs, text=None):
    overrides = dict(p.split("=", 1) for p in (*SMALL_GRID, *pairs))
    return load_config(overrides=overrides, text=text)


def test_defaults():
    cfg = load_config()
    assert cfg.name == "verify-thm1" and cfg.grid == GridSpec(1, 40.0, 4096)
    assert cfg.set.kind == "curve_graph" and cfg.m_max == 10
    assert cfg.s_grid[0] == 0.5 and cfg.s_grid[-1] == 1.5 and len(cfg.s_grid) == 21


def test_time_only_default_depth():
    assert cfg_with("set.kind=time_interval").m_max == 20


def test_text_and_overrides():
    cfg = load_config(text="[params]\na = 3\n[set]\nkind = time_sequence\nsequence = geometric\n",
                      overrides={"params.s": "2"})
    assert cfg.a == 3 and cfg.s == 2 and cfg.set.sequence.kind == "geometric"


@pytest.mark.parametrize("override", [
    {"nosection.x": "1"}, {"params.nokey": "1"}, {"params.a": "-1"}, {"params.a": "abc"},
    {"experiment.name": "dance"}, {"params.mode": "thmB"}, {"grid.N": "100"},
    {"set.kind": "blob"}, {"params.s_max": "5"},
])
def test_bad_configs(override):
    with pytest.raises(ConfigError):
        load_config(overrides=override)


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/x.ini")


def test_dumps_formats_floats():
    text = dumps({"x": 0.1, "bad": math.inf, "arr": np.array([1.5, 2.0]), "flag": np.bool_(True)})
    doc = json.loads(text)
    assert doc == {"x": 0.1, "bad": None, "arr": [1.5, 2.0], "flag": True}
    assert "0.10000000000000001" in text


def test_spectrum_round_trip(tmp_path, small1, rng):
    F = random_band_limited(small1, 3.0, rng)
    p = write_atomic(tmp_path / "spec.csv", spectrum_csv(F))
    G = read_spectrum_csv(p, small1)
    assert np.array_equal(G.coefficients, F.coefficients)


def test_spectrum_file_family(tmp_path, small1, rng):
    F = random_band_limited(small1, 3.0, rng)
    p = write_atomic(tmp_path / "spec.csv", spectrum_csv(F))
    cfg = cfg_with("function.family=spectrum_file", f"function.path={p}")
    assert np.array_equal(cfg.function_for().coefficients, F.coefficients)


def test_verify_cube_preconditions(small1, rng):
    cfg = cfg_with()
    F = random_band_limited(small1, 4.0, rng)
    rep = verify_cube(cfg, [0.0], 0.0, 0.25, 4.0, F)
    assert rep.passed and rep.measured <= rep.bound
    with pytest.raises(ValueError):
        verify_cube(cfg, [0.0], 0.0, 0.5, 4.0, F)
    with pytest.raises(ValueError):
        verify_cube(cfg, [0.0], 0.0, 0.1, 2.0, F)


def test_verify_cover_needs_containment(small1, rng):
    cfg = cfg_with()
    F = random_band_limited(small1, 2.0, rng)
    with pytest.raises(ValueError):
        verify_cover_bound(cfg, [[5.0, 5.0]], 0.5, 2.0, F)


def test_predicted_boundaries():
    sqrt = CurveSpec("power", beta=0.5)
    assert predicted_boundary(SetSpec.curve_graph(sqrt), 2.0) == 1.0
    assert predicted_boundary(SetSpec.curve_graph(CurveSpec("power", beta=0.25)), 2.0) == 2.0
    harmonic = SequenceSpec("power", delta=1)
    assert predicted_boundary(SetSpec.curve_sequence(sqrt, harmonic), 2.0) == 0.5
    assert predicted_boundary(SetSpec.time_sequence(SequenceSpec("geometric")), 2.0) == 0.0
    assert predicted_boundary(SetSpec.time_sequence(SequenceSpec("explicit", values=(0.5,))), 2.0) is None


def test_scan_on_interval():
    cfg = cfg_with("set.kind=time_interval", "params.mode=thmA", "params.s_min=0.6",
                   "params.s_max=1.4", "params.s_step=0.1")
    rep = scan_s(cfg)
    assert rep.passed and rep.measured == pytest.approx(1.1)


def test_convergence_oracle(small1):
    cfg = cfg_with("set.kind=time_sequence", "set.sequence=geometric", "params.k_max=10")
    rep = convergence_experiment(cfg)
    assert rep.details["oracle_bound_holds"] and rep.passed
    with pytest.raises(ValueError):
        convergence_experiment(cfg_with("set.kind=time_interval"))


# ------------------------------------------------------------------- CLI

def invoke(args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


@pytest.mark.parametrize("cmd, extra", [
    ("cover", ["set.kind=time_sequence", "params.b=1", "params.m_max=8"]),
    ("rhs-sum", ["set.kind=time_interval", "params.mode=thmA"]),
    ("propagate", []),
    ("maximal", ["set.kind=time_interval", "params.resolution=0.05"]),
    ("verify-cube", ["experiment.trials=2", "params.cube_A=4"]),
    ("verify-cover", ["experiment.trials=2", "params.resolution=0.01"]),
    ("verify-thmA", ["set.kind=time_sequence", "params.m_max=8"]),
    ("verify-thm1", ["params.m_max=6", "params.resolution=0.01"]),
    ("scan-s", ["set.kind=time_interval", "params.mode=thmA", "params.m_max=12"]),
    ("converge", ["set.kind=time_sequence", "set.sequence=geometric", "params.k_max=6"]),
])
def test_cli_commands(tmp_path, cmd, extra):
    args = [cmd, "--out", str(tmp_path), "--emit-plot-data"]
    for kv in SMALL_GRID + extra:
        args += ["--set", kv]
    res = invoke(args)
    assert res.exit_code == 0, res.output
    doc = json.loads((tmp_path / f"{cmd}.json").read_text())
    assert doc["experiment"] == cmd and doc["passed"] is True
    assert (tmp_path / f"{cmd}.csv").read_text().count("\n") >= 2


def test_cli_reports_are_deterministic(tmp_path):
    args = ["scan-s", "--set", "set.kind=time_sequence", "--set", "params.mode=thmA",
            "--set", "grid.L=20", "--set", "grid.N=256", "--out", str(tmp_path)]
    invoke(args)
    first = (tmp_path / "scan-s.json").read_bytes()
    invoke(args)
    assert (tmp_path / "scan-s.json").read_bytes() == first


def test_cli_usage_errors(tmp_path):
    assert invoke(["cover", "--set", "params.bogus=1"]).exit_code == 2
    assert invoke(["cover", "--set", "noequals"]).exit_code == 2
    assert invoke(["run"]).exit_code == 2
    res = invoke(["verify-cube", "--set", "params.cube_r=1", "--out", str(tmp_path)])
    assert res.exit_code == 2 and "rA <= 1" in res.output


def test_cli_failure_exit_code(tmp_path):
    res = invoke(["cover", "--out", str(tmp_path), "--set", "set.kind=time_interval",
                  "--set", "params.b=1", "--set", "params.m_max=6", "--set", "params.slope_max=0.5"])
    assert res.exit_code == 1 and res.output.startswith("FAIL")


def test_run_config_file(tmp_path):
    ini = tmp_path / "exp.ini"
    ini.write_text("[experiment]\nname = cover\n[set]\nkind = time_interval\n"
                   "[params]\nb = 1\nm_max = 5\nslope_min = 0.9\nslope_max = 1.1\n")
    res = invoke(["run", str(ini), "--out", str(tmp_path / "o")])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "o" / "cover.json").exists()


def test_battery_ships_configs():
    names = {p.name for p in battery_configs()}
    assert {"cube.ini", "cover.ini", "thm1_graph.ini", "scan_graph.ini", "converge.ini"} <= names
    for p in battery_configs():
        load_config(p)
