import csv
import io
import json
import math
import subprocess
import sys

import pytest

from curvlink.cli import parse_int_list, run_capture
from curvlink.links import ArtinDefiningGraph
from curvlink.metric_graph import graph_from_dict, systole


def write_graph(tmp_path, g, name="g.json"):
    path = tmp_path / name
    path.write_text(json.dumps(g.to_dict()))
    return str(path)


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_int_list():
    assert parse_int_list("3..5,18") == [3, 4, 5, 18]
    assert parse_int_list(" 7 ") == [7]


def test_table1_csv():
    code, out, _ = run_capture(["table1", "--m", "3..13", "--format", "csv"])
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 11
    assert list(rows[0]) == ["m", "theta_deg", "cos_theta", "cos_alpha", "alpha_deg"]
    assert rows[0]["m"] == "3" and rows[0]["alpha_deg"] == "98.213"


def test_table1_precision_and_json():
    _, out, _ = run_capture(["table1", "--m", "4", "--precision", "5"])
    assert rows_of(out)[0]["theta_deg"] == "90.00000"
    code, out, _ = run_capture(["table1", "--m", "44", "--format", "json"])
    doc = json.loads(out)
    assert code == 0 and doc["command"] == "table1" and doc["params"]["m"] == [44]
    row = doc["rows"][0]
    assert math.radians(row["alpha_deg"]) == pytest.approx(row["alpha_rad"], abs=1e-12)


def test_enumerate_thresholds():
    code, out, _ = run_capture(["enumerate", "--family", "amn2", "--n", "3..8", "--csv"])
    assert code == 0
    assert [r["minimal_m"] for r in rows_of(out)] == ["44", "19", "12", "10", "8", "8"]
    code, _, err = run_capture(["enumerate", "--family", "bogus"])
    assert code == 2 and "family" in err


def test_check_exit_codes(tmp_path):
    good = write_graph(tmp_path, ArtinDefiningGraph.triangle(44, 3, 2), "good.json")
    bad = write_graph(tmp_path, ArtinDefiningGraph.triangle(43, 3, 2), "bad.json")
    code, out, _ = run_capture(["check", "--input", good])
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = run_capture(["triples-check", "--input", bad])
    doc = json.loads(out)
    assert code == 1 and doc["pass"] is False and doc["slack_deg"] < 0


def test_input_errors(tmp_path):
    code, _, err = run_capture(["check", "--input", str(tmp_path / "missing.json")])
    assert code == 2 and "no such file" in err
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run_capture(["check", "--input", str(broken)])[0] == 2
    shape = tmp_path / "shape.json"
    shape.write_text(json.dumps({"relations": []}))
    assert run_capture(["check", "--input", str(shape)])[0] == 2
    assert run_capture(["frobnicate"])[0] == 2
    assert run_capture(["diam-l", "--rho-deg", "120", "--sigma-deg", "90"])[0] == 2
    assert run_capture(["block-link", "--m", "4", "--delta-deg", "95"])[0] == 2


def test_explicit_deltas_file(tmp_path):
    g = ArtinDefiningGraph.triangle(4, 4, 5)
    gpath = write_graph(tmp_path, g)
    dpath = tmp_path / "d.json"
    dpath.write_text(json.dumps({"deltas_deg": {"a,b": 81.5, "b,c": 81.5, "c,a": 89.5}}))
    code, out, _ = run_capture(["triples-check", "--input", gpath, "--deltas", str(dpath)])
    doc = json.loads(out)
    assert code == 0 and doc["deltas"]["deltas_deg"]["a,b"] == pytest.approx(81.5, abs=1e-12)


def test_tolerance_env(tmp_path, monkeypatch):
    gpath = write_graph(tmp_path, ArtinDefiningGraph.triangle(5, 5, 5))
    code, out, _ = run_capture(["check", "--input", gpath])
    slack = -math.radians(json.loads(out)["slack_deg"])
    monkeypatch.setenv("CURVLINK_TOL", repr(slack + 1e-6))
    code, out, _ = run_capture(["check", "--input", gpath])
    assert code == 0 and json.loads(out)["tolerance"] == pytest.approx(slack + 1e-6)
    monkeypatch.setenv("CURVLINK_TOL", "lots")
    assert run_capture(["check", "--input", gpath])[0] == 2


def test_block_link_round_trip():
    code, out, _ = run_capture(["block-link", "--m", "7", "--delta-deg", "40"])
    doc = json.loads(out)
    g = graph_from_dict(doc["graph"])
    assert code == 0 and len(g.edges) == 6
    assert math.degrees(systole(g).length) == pytest.approx(doc["systole_deg"], abs=1e-12)
    alpha = [e for e in doc["graph"]["edges"] if e["tag"].startswith("alpha")][0]
    assert math.degrees(alpha["len_rad"]) == pytest.approx(80.0, abs=1e-12)


def test_excluded_triples_csv():
    code, out, _ = run_capture(["excluded-triples", "--max", "8", "--csv"])
    rows = rows_of(out)
    assert code == 0 and {"m1": "7", "m2": "7", "m3": "2"} in rows
    assert {"m1": "8", "m2": "8", "m3": "2"} not in rows


def test_diam_l():
    code, out, _ = run_capture(["diam-l", "--rho-deg", "60", "--sigma-deg", "60"])
    doc = json.loads(out)
    assert code == 0
    assert doc["diameter_deg"] == pytest.approx(300.0, abs=1e-6)
    assert doc["formula_deg"] == pytest.approx(300.0)
    assert doc["cross_distances"]["d(r+,s-)_deg"] == pytest.approx(60.0)


def test_solve_deltas(tmp_path):
    ok = write_graph(tmp_path, ArtinDefiningGraph.triangle(4, 4, 5), "ok.json")
    code, out, _ = run_capture(["solve-deltas", "--input", ok, "--json"])
    doc = json.loads(out)
    assert code == 0 and doc["feasible"] and doc["slack_deg"] > 1.5
    no = write_graph(tmp_path, ArtinDefiningGraph.triangle(4, 4, 4), "no.json")
    code, out, _ = run_capture(["solve-deltas", "--input", no])
    assert code == 1 and out.startswith("infeasible")
    assert run_capture(["solve-deltas", "--input", ok, "--grid-deg", "0"])[0] == 2


def test_coxeter_order():
    code, out, _ = run_capture(["coxeter-order", "--indices", "3,3,2", "--json"])
    assert code == 0 and json.loads(out)["order"] == 4
    code, out, _ = run_capture(["coxeter-order", "--indices", "7,3,2"])
    assert code == 0 and "order infinite" in out and "spectral" in out
    assert run_capture(["coxeter-order", "--indices", "3,3"])[0] == 2
    assert run_capture(["coxeter-order", "--indices", "3,3,3", "--cap", "20"])[0] == 1


@pytest.mark.parametrize("argv", [
    ["table1"],
    ["enumerate", "--n", "5,6"],
    ["diam-l", "--rho-deg", "35", "--sigma-deg", "80", "--n-r", "2", "--n-s", "0"],
    ["coxeter-order", "--indices", "5,4,2", "--json"],
])
def test_deterministic(argv):
    assert run_capture(argv) == run_capture(argv)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "curvlink", "table1", "--m", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("3,60.000,0.500000,-0.142857,98.213")
