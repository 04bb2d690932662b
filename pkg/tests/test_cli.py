import csv
import io
import json

import numpy as np
import pytest

from ikchain import cli, lax
from ikchain.errors import ConfigError


def _run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# surface sweep\neta = 0.5\nn-list = 8, 12, 16\nperiodic = yes  # trailing comment\n")
    assert cli.read_config_file(str(path)) == {"eta": 0.5, "n_list": (8, 12, 16), "periodic": True}


@pytest.mark.parametrize("text", ["colour = blue\n", "eta = fast\n", "eta 0.5\n"])
def test_config_file_errors(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    with pytest.raises(ConfigError):
        cli.read_config_file(str(path))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        cli.read_config_file(str(tmp_path / "absent.cfg"))


def test_flags_override_config_file(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text("eta = 0.5\neps = 1.0\n")
    code, out = _run(capsys, "surface", "--config", str(path), "--eps", "3.0")
    assert code == cli.EXIT_OK
    params = json.loads(out)["params"]
    assert params["eta"] == 0.5
    assert params["eps"] == 3.0


def test_run_config_validation():
    with pytest.raises(ConfigError):
        cli.RunConfig(subcommand="verify", eta=-1.0)
    with pytest.raises(ConfigError):
        cli.RunConfig(subcommand="excite", channel="0")
    assert cli.RunConfig(subcommand="surface", n_list=(16, 8, 12)).n_list == (8, 12, 16)


def test_verify_defaults(capsys):
    code, out = _run(capsys, "verify")
    assert code == cli.EXIT_OK
    document = json.loads(out)
    assert document["schema"] == cli.SCHEMA
    assert document["regime"] == "II"
    results = document["results"]
    assert set(results["identities"]) == set(lax.IDENTITIES)
    assert all(v["passed"] for v in results["identities"].values())
    assert results["relations"]["max_residual"] < cli.RELATION_TOL
    assert results["hamiltonian"]["max_difference"] < cli.HAMILTONIAN_TOL
    assert results["failed"] == []


def test_verify_single_identity(capsys):
    code, out = _run(capsys, "verify", "--which", "re", "--points", "50")
    assert code == cli.EXIT_OK
    results = json.loads(out)["results"]
    assert list(results["identities"]) == ["re"]
    assert "relations" not in results


def test_verify_reports_corrupted_r_matrix(capsys, monkeypatch):
    original = lax.r_matrix

    def corrupted(params, u):
        r = original(params, u)
        r[1, 3] *= 1.1
        return r

    monkeypatch.setattr(lax, "r_matrix", corrupted)
    code, out = _run(capsys, "verify", "--which", "qybe", "--points", "20")
    assert code == cli.EXIT_RESIDUAL
    results = json.loads(out)["results"]
    assert results["failed"] == ["qybe"]
    assert results["identities"]["qybe"]["max_residual"] > 1e-3


def test_surface_needs_three_sizes(capsys):
    code, out = _run(capsys, "surface", "--n-list", "8")
    assert code == cli.EXIT_CONFIG
    assert out == ""


def test_bad_flag_is_a_config_error(capsys):
    assert cli.main(["verify", "--bogus"]) == cli.EXIT_CONFIG


def test_invalid_parameters(capsys):
    assert cli.main(["surface", "--eta", "-1"]) == cli.EXIT_CONFIG
    assert cli.main(["spectrum", "--sigma", "4"]) == cli.EXIT_CONFIG


def test_size_cap_is_a_config_error(capsys):
    assert cli.main(["spectrum", "--n", "9"]) == cli.EXIT_CONFIG


def test_help_exits_cleanly(capsys):
    assert cli.main(["--help"]) == cli.EXIT_OK


def test_surface_closed_form(capsys):
    code, out = _run(capsys, "surface", "--eps", "-3", "--eps-prime", "-2.5")
    assert code == cli.EXIT_OK
    surface = json.loads(out)["results"]["surface"]
    assert surface["regime"] == "VI"
    assert {"inner(chi1)", "inner(chi2)"} <= set(surface["breakdown"])


def test_json_output_is_deterministic(tmp_path):
    paths = [tmp_path / "first.json", tmp_path / "second.json"]
    for path in paths:
        assert cli.main(["spectrum", "--n", "1", "--out", str(path)]) == cli.EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert "time" not in paths[0].read_text()


def test_excite_menu(capsys):
    code, out = _run(capsys, "excite")
    assert code == cli.EXIT_OK
    entries = json.loads(out)["results"]["excitations"]
    assert [e["label"] for e in entries] == ["δe(χ+)", "δe(χ-)"]
    assert entries[0]["delta_e"] is None
    assert entries[0]["note"] == "requires χ < 3η"
    assert entries[1]["delta_e"] is not None


def test_sweep_csv(capsys):
    code, out = _run(capsys, "sweep", "--eps-range", "0:2:3", "--eps-prime-range", "0.3:0.3:1", "--format", "csv")
    assert code == cli.EXIT_OK
    meta, body = out.split("\n", 1)
    assert meta.startswith("# ")
    assert "tolerances:" in meta and "comparison=0.01" in meta
    rows = list(csv.DictReader(io.StringIO(body)))
    assert len(rows) == 3
    assert tuple(rows[0]) == cli.SWEEP_COLUMNS
    assert [float(r["eps"]) for r in rows] == [0.0, 1.0, 2.0]


def test_surface_extrapolation_matches_closed_form(capsys):
    code, out = _run(capsys, "surface", "--eta", "0.5", "--eps", "2.0", "--eps-prime", "1.8", "--n-list", "8,12,16")
    assert code == cli.EXIT_OK
    results = json.loads(out)["results"]
    assert [r["status"] for r in results["finite_size"]] == ["ok", "ok", "ok"]
    assert abs(results["extrapolated"] - results["closed_form"]["surface_energy"]) < 1e-2
    assert results["passed"]


def test_excite_sizes_converge(capsys):
    code, out = _run(capsys, "excite", "--channel", "-", "--n-list", "8,12,16")
    assert code in (cli.EXIT_OK, cli.EXIT_RESIDUAL)
    finite = json.loads(out)["results"]["finite_size"]
    assert [r["status"] for r in finite["rows"]] == ["ok", "ok", "ok"]
    assert np.isfinite(finite["extrapolated"])


def test_zeroes_of_the_ground_state(capsys):
    code, out = _run(capsys, "zeroes")
    assert code == cli.EXIT_OK
    state = json.loads(out)["results"]["states"]["0"]
    assert len(state["zbar"]) == 6
    assert state["energy"] == pytest.approx(state["ed_energy"], abs=1e-8)
    assert state["bae_residual"] < 1e-10


def test_periodic_zeroes(capsys):
    code, out = _run(capsys, "zeroes", "--periodic", "--n", "3")
    assert code == cli.EXIT_OK
    state = json.loads(out)["results"]["states"]["0"]
    assert len(state["zbar"]) == 6
    assert state["energy"] == pytest.approx(state["ed_energy"], abs=1e-8)
