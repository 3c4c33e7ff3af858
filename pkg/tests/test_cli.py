import csv
import io
import json
import subprocess
import sys

import pytest

from rusarith import cli


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_json(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 0, err
    return json.loads(out)


@pytest.mark.parametrize("table", ["multerror", "cheb", "multiplier", "reciprocals"])
def test_reproduce_tables(table, capsys):
    rep = run_json(["reproduce", table, "--trials", "200"], capsys)
    assert rep["schema_version"] == 1
    assert rep["rows"]
    assert {"table", "row", "column", "computed", "published", "match"} <= set(rep["rows"][0])


def test_reproduce_multerror_values(capsys):
    rows = run_json(["reproduce", "multerror"], capsys)["rows"]
    m4 = {r["column"]: r for r in rows if r["row"] == "m4"}
    assert float(m4["0.01"]["computed"]) == pytest.approx(6.6667e-9, rel=1e-4)
    assert m4["0.05"]["match"] is False


def test_csv_output(capsys):
    code, out, _ = run(["reproduce", "cheb", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0].keys() >= {"table", "row", "computed"}
    assert "e" in rows[0]["computed"]


@pytest.mark.parametrize("prim, angles", [("gb", "0.3,0.4"), ("par", "0.3,0.4"),
                                          ("oaa", "0.3,0.4"), ("nonrus", "0.3")])
def test_simulate_primitives(prim, angles, capsys):
    rep = run_json(["simulate", prim, "--angles", angles, "--trials", "2000"], capsys)
    assert rep["rotations_mean"] > 0
    assert abs(sum(r["frequency"] for r in rep["rows"]) - 1) < 1e-9
    if "analytic_mean" in rep:
        assert rep["rotations_mean"] == pytest.approx(rep["analytic_mean"], rel=0.1)


def test_simulate_expression(capsys):
    rep = run_json(["simulate", "expr", "--expr", "PAR(aff(0,1,0), aff(1,1,0))",
                    "--inputs", "0.3,0.2", "--trials", "3000"], capsys)
    assert rep["rotations_mean"] == pytest.approx(rep["analytic_mean"], rel=0.1)


def test_nonrus_rejects_two_angles(capsys):
    assert run(["simulate", "nonrus", "--angles", "0.3,0.4"], capsys)[0] == 1


def test_simulate_is_deterministic(capsys):
    argv = ["simulate", "gb", "--angles", "0.5,0.7", "--trials", "500", "--seed", "3"]
    a = run(argv, capsys)[1]
    b = run(argv, capsys)[1]
    assert a == b
    assert run(argv[:-1] + ["4"], capsys)[1] != a


def test_sqwave_reciprocal(capsys):
    rep = run_json(["sqwave", "--eval-interval", "0", "0.5"], capsys)
    assert rep["max_relative_error"] < 0.03
    assert rep["mean_relative_error"] < 0.005
    assert len(rep["rows"]) == 2001


def test_sqwave_basis_is_unit_vector(capsys):
    rep = run_json(["sqwave", "--function", "basis", "--basis-index", "3", "--n", "8"], capsys)
    coeffs = rep["fit"]["coefficients"]
    assert coeffs[2] == pytest.approx(1.0, abs=1e-9)
    assert sum(abs(c) for c in coeffs) == pytest.approx(1.0, abs=1e-8)


def test_sqwave_mesh_file(tmp_path, capsys):
    f = tmp_path / "mesh.txt"
    f.write_text("1.0\n2.0\n3.0\n")
    rep = run_json(["sqwave", "--function", "mesh", "--mesh-file", str(f), "--n", "3"], capsys)
    assert len(rep["fit"]["coefficients"]) == 3
    mids = rep["fit"]["midpoints"]
    code, out, _ = run(["sqwave", "--function", "mesh", "--mesh-file", str(f), "--n", "3",
                        "--points", "3", "--eval-interval", str(mids[0]), str(mids[2])], capsys)
    assert [r["approx"] for r in json.loads(out)["rows"]] == pytest.approx([1.0, 2.0, 3.0])


@pytest.mark.parametrize("argv", [
    ["cost", "gb", "--angles", "0.1", "--model", "rotations"],
    ["cost", "par", "--angles", "0.3,0.4", "--model", "synthesis:1e-3"],
    ["cost", "expr", "--expr", "GB(aff(0), const(0.6))", "--inputs", "0.2", "--model", "encoded:4"],
    ["cost", "baseline", "--method", "euclid", "--n", "4"],
    ["cost", "cache", "--kappa", "1", "--eps", "0.1", "--delta", "0.25", "--n1", "10", "--n2", "3"],
])
def test_cost_commands(argv, capsys):
    rep = run_json(argv, capsys)
    assert rep["rows"]


def test_cost_gb_value(capsys):
    rep = run_json(["cost", "gb", "--angles", "0.1", "--model", "rotations"], capsys)
    assert rep["mean"] == pytest.approx(2.0403, abs=1e-4)


@pytest.mark.parametrize("argv", [
    ["sqwave", "--n", "0"],
    ["simulate", "gb"],
    ["cost", "baseline", "--n", "4"],
    ["cost", "gb", "--angles", "0.1", "--model", "bogus:1"],
    ["reproduce", "table9"],
    ["simulate", "gb", "--angles", "0.1", "--trials", "0"],
])
def test_usage_errors_exit_1(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert err


def test_parse_error_reports_position(capsys):
    code, _, err = run(["simulate", "expr", "--expr", "GB(aff(0)", "--inputs", "0.1"], capsys)
    assert code == 1
    assert "position 9" in err


def test_exhaustion_exits_2(capsys):
    code, _, err = run(["simulate", "par", "--angles", "1.5607963,0.01", "--trials", "200",
                        "--max-attempts", "2"], capsys)
    assert code == 2
    assert "numerical failure" in err


def test_config_file_sets_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nangles = 0.5,0.7\ntrials = 300\nseed=3\n")
    base = run_json(["simulate", "gb", "--angles", "0.5,0.7", "--trials", "300", "--seed", "3"], capsys)
    via = run_json(["simulate", "gb", "--config", str(cfg)], capsys)
    assert via == base
    # explicit flags override the file
    over = run_json(["simulate", "gb", "--config", str(cfg), "--trials", "200"], capsys)
    assert sum(r["count"] for r in over["rows"]) == 200


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = red\n")
    assert run(["simulate", "gb", "--config", str(cfg)], capsys)[0] == 1


def test_out_file(tmp_path, capsys):
    target = tmp_path / "o.json"
    assert run(["cost", "gb", "--angles", "0.2", "--out", str(target)], capsys)[0] == 0
    assert json.loads(target.read_text())["command"] == "cost"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rusarith.cli", "cost", "baseline",
                           "--method", "carry_ripple", "--n", "2", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0].startswith("method")
