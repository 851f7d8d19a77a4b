import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pnmc_lab import cli, gridio
from pnmc_lab.errors import ValidationError
from pnmc_lab.pde import family_solution
from pnmc_lab.surface import ParamDomain


def run(tmp_path, *args):
    return cli.main(list(args) + ["--out", str(tmp_path / "out")])


def report(tmp_path, command):
    return json.loads((tmp_path / "out" / f"{command}.json").read_text())["result"]


@settings(max_examples=30)
@given(arrays(np.float64, (4, 5), elements=st.floats(-1e300, 1e300, allow_nan=False)))
def test_grid_round_trip_is_exact(values):
    import tempfile
    from pathlib import Path
    d = ParamDomain(0.1, 0.7, -1.0, 3.0, 4, 5)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "g.csv"
        gridio.write_grid(path, d, {"a": values, "b": -values})
        d2, cols = gridio.read_grid(path)
    assert d2 == d
    assert np.array_equal(cols["a"], values) and np.array_equal(cols["b"], -values)


def test_grid_file_layout(tmp_path):
    d = ParamDomain(0, 1, 0, 2, 3, 3)
    gridio.write_grid(tmp_path / "g.csv", d, {"f": np.arange(9.0).reshape(3, 3)})
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "# u v f"
    assert lines[1:4] == ["0 0 0", "0 1 1", "0 2 2"]
    with pytest.raises(ValidationError):
        gridio.write_grid(tmp_path / "bad.csv", d, {"f": np.zeros((2, 3))})


def test_invalid_grid_exits_2_without_files(tmp_path, capsys):
    assert run(tmp_path, "invariants", "--nu", "2") == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ValidationError"
    assert not (tmp_path / "out").exists()


def test_bad_kappa_and_epsilon(tmp_path):
    assert run(tmp_path, "classify", "--kappa", "wobbly") == 2
    assert run(tmp_path, "residuals", "--epsilon", "2") == 2


def test_numerical_failure_exits_3(tmp_path, capsys):
    code = run(tmp_path, "residuals", "--family", "parabolic_5_2", "--umin", "-1", "--umax", "0",
               "--vmin", "0", "--vmax", "1")
    assert code == 3
    assert json.loads(capsys.readouterr().err)["exit_code"] == 3


def test_classify(tmp_path):
    assert run(tmp_path, "classify", "--kappa", "sine", "--nu", "15", "--nv", "15") == 0
    r = report(tmp_path, "classify")
    assert r["tag"] == "pnmc_nonparallel_H" and r["sup_beta"] < 1e-6


def test_residuals_small_at_fine_spacing(tmp_path):
    assert run(tmp_path, "residuals", "--nu", "101", "--nv", "101") == 0
    r = report(tmp_path, "residuals")
    assert max(r[k]["sup"] for k in ("r1", "r2", "r3")) < 1e-4


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "parabolic_5_2", "nu": 12, "nv": 12, "kappa": "1,0.2"}))
    assert run(tmp_path, "classify", "--config", str(cfg), "--nu", "9") == 0
    params = json.loads((tmp_path / "out" / "classify.json").read_text())["parameters"]
    assert params["family"] == "parabolic_5_2"
    assert params["domain"]["n_u"] == 9 and params["domain"]["n_v"] == 12
    cfg.write_text(json.dumps({"colour": "red"}))
    assert run(tmp_path, "classify", "--config", str(cfg)) == 2


def test_sidecar_metadata(tmp_path):
    assert run(tmp_path, "meridian", "--nu", "5", "--nv", "5") == 0
    side = json.loads((tmp_path / "out" / "meridian.grid.json").read_text())
    assert side["anchor"].startswith("meridian surface")
    assert side["columns"][:4] == ["z1", "z2", "z3", "z4"]
    d, cols = gridio.read_grid(tmp_path / "out" / "meridian.csv")
    assert d.shape == (5, 5) and np.allclose(cols["E"], 1)


def test_fields_file_roundtrip(tmp_path):
    d = ParamDomain(1.5, 2.5, -1.0, 0.0, 25, 25)
    lam, mu, nu = family_solution("euclidean_5_1", None, d)
    path = tmp_path / "fields.csv"
    gridio.write_grid(path, d, {"lambda": lam.values, "mu": mu.values, "nu": nu.values})
    assert run(tmp_path, "roundtrip", "--fields", str(path)) == 0
    r = report(tmp_path, "roundtrip")
    assert not r["flagged"] and r["max_drift"] < 1e-6
    assert run(tmp_path, "reconstruct", "--fields", str(path)) == 0
    assert report(tmp_path, "reconstruct")["compatibility_defect"] < 1e-4


def test_canonical_command(tmp_path):
    assert run(tmp_path, "canonical", "--nu", "9", "--nv", "9") == 0
    r = report(tmp_path, "canonical")
    assert r["closed_form_chart"]["residual"] < 1e-6
    assert r["integral_chart"]["residual"] < 1e-5
    assert r["original_chart_residual"] > 0.1
