import csv
import json
from pathlib import Path

import numpy as np
import pytest

from lloydgreen import cli
from lloydgreen.cli import (
    ConfigInvariantError,
    ConfigNotFoundError,
    ConfigSyntaxError,
    from_internal_length,
    main,
    parse_scenario,
    scenario_from_dict,
    to_internal_length,
)
from lloydgreen.corner_green import psi_exact

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

FREE = {
    "mode": "free-exact",
    "units": "internal",
    "geometry": {"y_sl": 20.0, "delta": 0.05, "screen_z": 600.0},
    "beam": {"amplitude_c": [1.0, 0.0]},
    "screen_grid": {"y_min": -60.0, "y_max": 60.0, "n_points": 9},
}

GRAV = {
    "mode": "gravity",
    "units": "internal",
    "geometry": {"y_sl": 3.0, "delta": 0.5, "screen_z": 10.0},
    "gravity": {"energy_e": 5.0},
    "screen_grid": {"y_min": -6.0, "y_max": 6.0, "n_points": 5, "x_min": 0.0, "x_max": 1.0, "n_x": 2},
}


def _write(tmp_path, data, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def _with(base, path, value):
    data = json.loads(json.dumps(base))
    *head, last = path.split(".")
    node = data
    for h in head:
        node = node[h]
    if value is None:
        del node[last]
    else:
        node[last] = value
    return data


def test_parse_free_defaults():
    sc = scenario_from_dict(FREE)
    assert sc.beam.k == 1.0 and sc.beam.amplitude_c == 1 + 0j
    assert sc.quadrature.abs_tol == 1e-10 and sc.quadrature.rel_tol == 1e-8
    assert sc.screen_grid.y_values()[0] == -60.0


def test_parse_errors_are_distinct(tmp_path):
    with pytest.raises(ConfigNotFoundError):
        parse_scenario(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    with pytest.raises(ConfigSyntaxError):
        parse_scenario(str(bad))
    with pytest.raises(ConfigInvariantError):
        parse_scenario(_write(tmp_path, _with(FREE, "geometry.delta", 100.0)))
    assert len({ConfigNotFoundError, ConfigSyntaxError, ConfigInvariantError}) == 3


@pytest.mark.parametrize("path,value,field", [
    ("geometry.delta", 50.0, "geometry.y_sl"),
    ("geometry.screen_z", -1.0, "geometry.screen_z"),
    ("screen_grid.n_points", 1, "screen_grid.n_points"),
    ("screen_grid.y_max", -100.0, "screen_grid.y_max"),
    ("mode", "fresnel", "mode"),
    ("units", "cgs", "units"),
    ("beam.k", 2.0, "beam.k"),
    ("quadrature", {"rel_tol": -1.0}, "quadrature"),
    ("extra", 1, "extra"),
    ("geometry.height", 1.0, "geometry.height"),
    ("screen_grid.n_x", 3, "screen_grid.n_x"),
    ("beam", None, "beam"),
])
def test_invariant_errors_name_field(path, value, field):
    with pytest.raises(ConfigInvariantError) as exc:
        scenario_from_dict(_with(FREE, path, value))
    assert str(exc.value).startswith(field)


def test_slit_message():
    with pytest.raises(ConfigInvariantError, match="slit entirely above the mirror plane"):
        scenario_from_dict(_with(FREE, "geometry.delta", 41.0))


def test_gravity_mismatch():
    with pytest.raises(ConfigInvariantError, match="gravity"):
        scenario_from_dict(_with(GRAV, "gravity", None))
    with pytest.raises(ConfigInvariantError):
        scenario_from_dict(_with(GRAV, "gravity.hbar", 1.0))
    with pytest.raises(ConfigInvariantError):
        scenario_from_dict(_with(GRAV, "screen_grid.n_x", 0))


def test_si_overrides_and_unit_round_trip():
    data = _with(GRAV, "units", "SI")
    data["gravity"].update({"hbar": 1.0, "mass_m": 2.0, "accel_g": 0.5, "energy_e": 3.0})
    sc = scenario_from_dict(data)
    assert sc.gravity.hbar == 1.0 and sc.gravity.mass_m == 2.0
    vals = np.array([1e-7, 3.3, 1234.5])
    back = from_internal_length(to_internal_length(vals, sc), sc)
    assert np.max(np.abs(back - vals) / vals) <= 1e-12
    neutron = scenario_from_dict(json.loads((SCENARIOS / "gravity_neutron_si.json").read_text()))
    y = neutron.screen_grid.y_values()
    assert np.max(np.abs(from_internal_length(to_internal_length(y, neutron), neutron) - y)) <= 1e-12 * np.max(np.abs(y))


def test_scan_free_csv(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["scan", "--config", _write(tmp_path, FREE), "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["y", "re_psi", "im_psi", "intensity", "flags"]
    assert len(rows) == 10
    sc = scenario_from_dict(FREE)
    for row in rows[1:]:
        y = float(row[0])
        psi = psi_exact(y, sc.geometry, sc.beam)
        assert float(row[1]) == psi.real and float(row[2]) == psi.imag
        assert row[4] == ""
    assert rows[5][1:4] == ["0", "0", "0"]


def test_scan_values_use_17_digits(tmp_path):
    out = tmp_path / "o.csv"
    main(["scan", "--config", _write(tmp_path, FREE), "--out", str(out)])
    cell = list(csv.reader(out.open()))[2][1]
    assert cell == format(float(cell), ".17g")


def test_scan_deterministic(tmp_path):
    cfg = _write(tmp_path, GRAV)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["scan", "--config", cfg, "--out", str(a)]) == 0
    assert main(["scan", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["x", "y", "re_psi", "im_psi", "intensity", "flags"]
    assert len(rows) == 1 + 2 * 5
    assert [r[0] for r in rows[1:]] == ["0"] * 5 + ["1"] * 5


def test_scan_lambda_override(tmp_path):
    cfg = _write(tmp_path, GRAV)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["scan", "--config", cfg, "--out", str(a)])
    assert main(["scan", "--config", cfg, "--out", str(b), "--lambda-re", "0.5", "--lambda-im", "0.25"]) == 0
    ra, rb = list(csv.reader(a.open())), list(csv.reader(b.open()))
    assert ra[2][3] == "0" and float(rb[2][3]) != 0.0
    assert main(["scan", "--config", _write(tmp_path, FREE, "f.json"), "--out", str(a),
                 "--lambda-re", "1"]) == 1


def test_scan_failed_point_row(tmp_path):
    data = _with(FREE, "quadrature", {"abs_tol": 1e-300, "rel_tol": 1e-300, "max_subdivisions": 8})
    data["geometry"] = {"y_sl": 20.0, "delta": 15.0, "screen_z": 30.0}
    out = tmp_path / "o.csv"
    assert main(["scan", "--config", _write(tmp_path, data), "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))[1:]
    flagged = [r for r in rows if r[4]]
    assert flagged
    for r in flagged:
        assert r[1:4] == ["", "", ""] and "nonconverged" in r[4].split(";")


def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "o.csv")
    assert main(["scan", "--config", str(tmp_path / "none.json"), "--out", out]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("[")
    assert main(["scan", "--config", str(bad), "--out", out]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["scan", "--out", out])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["validate", "--level", "huge"])
    assert exc.value.code == 1


def test_computation_failure_exit(tmp_path, monkeypatch):
    from lloydgreen.errors import QuadratureError

    def boom(*a, **k):
        raise QuadratureError("forced")
    monkeypatch.setattr(cli, "psi_gravity_scan", boom)
    assert main(["scan", "--config", _write(tmp_path, GRAV), "--out", str(tmp_path / "o.csv")]) == 2


def test_validate_output(tmp_path):
    out = tmp_path / "v.txt"
    code = main(["validate", "--level", "fast", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert len(lines) == 21
    parsed = [l.split(",") for l in lines]
    assert all(len(p) == 4 and p[3] in ("true", "false") for p in parsed)
    assert code == (0 if all(p[3] == "true" for p in parsed) else 3)


def test_validate_canary(tmp_path):
    out = tmp_path / "v.txt"
    assert main(["validate", "--level", "fast", "--canary", "--out", str(out)]) == 3
    row = next(l for l in out.read_text().splitlines() if l.startswith("airy_wronskian,"))
    assert row.endswith(",false")


@pytest.mark.parametrize("name", sorted(p.name for p in SCENARIOS.glob("*.json")))
def test_shipped_scenarios_parse(name):
    sc = parse_scenario(str(SCENARIOS / name))
    assert sc.mode in cli.MODES
