import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import PERTURBED_H, TORUS_H
from surftopo.cli import RunReport, main, run

DATA = Path(__file__).resolve().parents[1] / "data"


@pytest.mark.parametrize("argv,code", [
    (["classify", "a b a^-1 b^-1"], 0),
    (["classify", "a b"], 3),
    (["classify", "a ^ b"], 2),
    (["classify", ""], 2),
    (["pi1", str(DATA / "torus.cx")], 0),
    (["pi1", str(DATA / "disconnected.cx")], 4),
    (["pi1", str(DATA / "torus.cx"), "--basepoint", "nowhere"], 4),
    (["pi1", str(DATA / "missing.cx")], 2),
    (["morse", "u*", "--range", "-1:1"], 2),
    (["morse", "u", "--range", "0:1", "--periodic-u"], 5),
    (["morse", "u^2+v^2", "--range", "-1"], 2),
    (["flow", "1", "--range", "0:1"], 2),
])
def test_exit_codes(argv, code):
    assert run(argv).exit_code == code


def test_classify_report():
    r = run(["classify", "a b a^-1 b^-1"]).results
    assert (r["V"], r["E"], r["F"]) == (1, 2, 1)
    assert r["euler_characteristic"] == 0 and r["orientable"] is True
    assert r["surface"] == "orientable genus=1"
    r = run(["classify", "a a"]).results
    assert r["surface"] == "non-orientable crosscaps=1" and r["euler_characteristic"] == 1


def test_pi1_reports():
    r = run(["pi1", str(DATA / "torus.cx"), "--abelian"]).results
    assert r["presentation"] == "< a, b | a b a^-1 b^-1 >"
    assert r["abelian"]["free_rank"] == 2 and r["abelian"]["torsion"] == []
    r = run(["pi1", str(DATA / "rp2.cx"), "--abelian"]).results
    assert r["presentation"] == "< a | a a >" and r["abelian"]["torsion"] == [2]
    r = run(["pi1", str(DATA / "wedge.cx")]).results
    assert r["presentation"] == "< x, y, z | >"


def test_disconnected_error_names_cause():
    rep = run(["pi1", str(DATA / "disconnected.cx")])
    assert rep.error.startswith("NotConnected")


def test_morse_reports():
    r = run(["morse", TORUS_H, "--periodic-u", "--periodic-v", "--range", "0:6.2832"]).results
    assert r["n_critical_points"] == 4 and r["is_morse"] is True
    assert sorted(r["indices"]) == [0, 1, 1, 2]
    assert r["euler_from_indices"] == 0 and r["reeb_sphere"] is False
    r = run(["morse", "u^3+v^2", "--range", "-1:1"]).results
    assert r["is_morse"] is False and len(r["degenerate_positions"]) == 1
    r = run(["morse", "u^2+v^2", "--range", "-1:1"]).results
    assert r["indices"] == [0]


def test_range_accepts_expressions():
    r = run(["morse", "sin(u)", "--urange", "0:2*pi", "--vrange", "-1:1", "--periodic-u"]).results
    assert r["chart"]["u_range"][1] == pytest.approx(6.283185307179586)


def test_reports_are_deterministic_and_round_trip():
    argv = ["morse", TORUS_H, "--periodic-u", "--periodic-v", "--grid", "16"]
    a, b = run(argv), run(argv)
    assert a.to_text() == b.to_text() and a.to_json() == b.to_json()
    assert RunReport.from_text(a.to_text()) == a
    assert RunReport.from_json(a.to_json()) == a
    assert RunReport.from_text(run(["classify", "a b"]).to_text()) == run(["classify", "a b"])


def test_digest_tracks_inputs():
    a = run(["classify", "a a"]).inputs_digest
    assert a == run(["classify", "a a", "--json"]).inputs_digest
    assert a != run(["classify", "a a^-1"]).inputs_digest


def test_main_prints_json(capsys):
    code = main(["classify", "a a", "--json"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0 and out["results"]["surface"] == "non-orientable crosscaps=1"
    assert set(out) == {"command", "inputs_digest", "results", "warnings", "exit_code", "error"}


def test_flow_open_chart_caveat():
    r = run(["flow", "1", "0", "--range", "0:1", "--ms-check"]).results
    assert r["is_morse_smale"] is False and r["caveat"] == "NotClosedManifold"


def test_flow_singular_points_only():
    r = run(["flow", "u", "-v", "--range", "-1:1"]).results
    assert [p["kind"] for p in r["singular_points"]] == ["Saddle"]


def test_flow_torus_not_morse_smale(tmp_path):
    rep = run(["flow", "--gradient-of", TORUS_H, "--periodic-u", "--periodic-v", "--ms-check",
               "--graph", str(tmp_path / "g.txt")])
    assert rep.exit_code == 0
    assert rep.results["is_morse_smale"] is False and rep.results["saddle_connections"]
    assert rep.warnings == ["graph not written: field is not Morse-Smale"]
    assert not (tmp_path / "g.txt").exists()


def test_flow_perturbed_graph_and_dump(tmp_path):
    rep = run(["flow", "--gradient-of", PERTURBED_H, "--periodic-u", "--periodic-v", "--ms-check",
               "--graph", str(tmp_path / "g.dot"), "--dump-trajectories", str(tmp_path / "traj")])
    r = rep.results
    assert r["is_morse_smale"] is True
    assert r["graph"]["kinds"] == {"Saddle": 2, "Sink": 1, "Source": 1} and r["graph"]["edges"] == 8
    assert (tmp_path / "g.dot").read_text().startswith("digraph")
    files = sorted((tmp_path / "traj").glob("*.csv"))
    assert len(files) == 8
    assert files[0].read_text().splitlines()[0] == "t,u,v"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "surftopo.cli", "classify", "a b"],
                          capture_output=True, text=True)
    assert proc.returncode == 3
    assert "exit_code = 3" in proc.stdout
