import json
import subprocess
import sys
from pathlib import Path

import pytest

from conslaw.cli import main
from conslaw.scenario import (
    ScenarioError,
    load_scenario,
    parse_scenario,
    reproduce,
    reproductions,
    run_scenario,
)

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


def test_parse_scenario_rejects_malformed():
    with pytest.raises(ScenarioError):
        parse_scenario("operator wave")  # no '='
    with pytest.raises(ScenarioError):
        parse_scenario("operator = wave(dim=1)\n")  # missing keys
    with pytest.raises(ScenarioError):
        parse_scenario(
            "operator = wave(dim=1)\ngrid = modes:16\nprofile = random\ntimes = 0,1\nsymmetry = identity"
        )  # grid lacks length
    with pytest.raises(ScenarioError):
        parse_scenario(
            "operator = wave(dim=1)\ngrid = modes:16 length:6.0\nprofile = random\n"
            "times = 0,1\nsymmetry = identity expect=maybe"
        )


def test_shipped_scenarios_parse():
    for path in sorted(SCENARIOS.glob("*.scn")):
        scn = load_scenario(path)
        assert scn.symmetries


def test_shipped_scenarios_pass_from_disk():
    for path in sorted(SCENARIOS.glob("*.scn")):
        report = run_scenario(load_scenario(path), write_csv=False)
        assert report["pass"], (path.name, report["results"])


def test_unknown_catalog_entries_are_rejected():
    scn = parse_scenario(
        "operator = wave(dim=1)\ngrid = modes:16 length:6.28\n"
        "profile = random(seed=1, kmax=4)\ntimes = 0.0,0.5\nsymmetry = no.such.thing"
    )
    with pytest.raises(KeyError):
        run_scenario(scn, write_csv=False)
    scn = parse_scenario(
        "operator = wave(dim=1)\ngrid = modes:16 length:6.28\n"
        "profile = no_such_profile\ntimes = 0.0,0.5\nsymmetry = identity"
    )
    with pytest.raises(KeyError):
        run_scenario(scn, write_csv=False)


def test_run_wave_scenario_from_file(tmp_path):
    scn = load_scenario(SCENARIOS / "wave_energy.scn")
    report = run_scenario(scn, out_dir=tmp_path)
    assert report["pass"]
    assert (tmp_path / "wave_energy.json").exists()
    csvs = list(tmp_path.glob("*.csv"))
    assert csvs
    header = csvs[0].read_text().splitlines()[0]
    assert header == "t,re_kappa,im_kappa,drift"


def test_repeated_runs_are_bit_identical(tmp_path):
    scn = load_scenario(SCENARIOS / "wave_energy.scn")
    a = tmp_path / "a"
    b = tmp_path / "b"
    run_scenario(scn, out_dir=a)
    run_scenario(scn, out_dir=b)
    assert (a / "wave_energy.json").read_bytes() == (b / "wave_energy.json").read_bytes()


def test_cli_verify_and_exit_codes(tmp_path, capsys):
    rc = main(["--out-dir", str(tmp_path), "verify", str(SCENARIOS / "wave_energy.scn")])
    assert rc == 0
    out = capsys.readouterr().out
    report = json.loads(out)
    assert report["pass"]


def test_cli_parse_error_reports_position(capsys):
    rc = main(["adjoint", "Dt + Dq^2"])
    assert rc == 2
    err = capsys.readouterr().err
    assert "line 1" in err and "column" in err


def test_cli_unknown_reproduction(capsys):
    rc = main(["reproduce", "nope"])
    assert rc == 2


def test_cli_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "kdvkdv.Gamma_s" in out
    assert "heat-Es" in out


def test_cli_adjoint_and_current(capsys):
    assert main(["adjoint", "kdvkdv"]) == 0
    out = capsys.readouterr().out
    assert "skew_adjoint" in out
    assert main(["current", "wave(dim=1)"]) == 0
    out = capsys.readouterr().out
    assert "divergence defect: 0.000e+00" in out


def test_cli_conjugacy_json(capsys):
    assert main(["conjugacy", "dirac(m=1.0)"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["coefficient_residual"] <= 1e-12


def test_reproduction_registry_names():
    names = set(reproductions())
    for required in ("heat-Es", "dirac-cpt", "ns-adjoint", "wave-energy", "kdvkdv-all"):
        assert required in names


def test_reproduce_writes_named_json(tmp_path):
    report = reproduce("jordan-2x2", out_dir=tmp_path)
    assert report["pass"]
    data = json.loads((tmp_path / "jordan-2x2.json").read_text())
    assert data["certifies"]


def test_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "conslaw.cli", "list"],
        capture_output=True,
        text=True,
        cwd=ROOT,
    )
    assert proc.returncode == 0
    assert "reproductions:" in proc.stdout
