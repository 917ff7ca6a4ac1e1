import json
import subprocess
import sys

import pytest

from jrplab.cli import main


@pytest.fixture
def linear_file(tmp_path):
    path = tmp_path / "lin.json"
    assert main(["gen", "--variant", "linear", "--retailers", "3", "--orders", "5", "--seed", "3",
                 "--out", str(path)]) == 0
    return path


@pytest.fixture
def deadline_file(tmp_path):
    path = tmp_path / "dl.json"
    assert main(["gen", "--variant", "deadline", "--retailers", "3", "--orders", "5", "--seed", "2",
                 "--out", str(path)]) == 0
    return path


def run(argv, capsys):
    rc = main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_constants(capsys):
    rc, out, _ = run(["constants"], capsys)
    vals = dict(line.split(" = ") for line in out.splitlines())
    assert rc == 0 and float(vals["c"]) == pytest.approx(0.754877666247)
    assert float(vals["R"]) == pytest.approx(1.790712499, abs=1e-9)


def test_solve_exact_and_lp(linear_file, capsys):
    rc, out, _ = run(["solve-exact", "--instance", str(linear_file)], capsys)
    exact = json.loads(out)
    rc2, out2, _ = run(["solve-lp", "--instance", str(linear_file), "--mode", "float"], capsys)
    lp = json.loads(out2)
    assert rc == rc2 == 0
    assert lp["objective"] <= exact["cost"]["total"] + 1e-9


def test_round_single_and_many(linear_file, capsys):
    rc, out, _ = run(["round", "--alg", "2srp", "--instance", str(linear_file), "--seed", "4"], capsys)
    assert rc == 0 and "shipments" in json.loads(out)
    rc, out, _ = run(["round", "--alg", "1srp", "--instance", str(linear_file), "--trials", "5"], capsys)
    doc = json.loads(out)
    assert rc == 0 and doc["trials"] == 5 and set(doc["mean"]) == set(doc["lp"])


def test_online_and_adversary(deadline_file, capsys):
    rc, out, _ = run(["online", "--policy", "algorithm-g", "--instance", str(deadline_file)], capsys)
    assert rc == 0 and json.loads(out)["policy"] == "algorithm-g"
    rc, out, _ = run(["adversary", "--game", "jrpd", "--policy", "solo", "--N", "10", "--events"], capsys)
    doc = json.loads(out)
    assert rc == 0 and doc["ratio"] == pytest.approx(21 / 11) and len(doc["events"]) == 11
    rc, out, _ = run(["adversary", "--game", "jrpl", "--policy", "threshold-balance", "--N", "8"], capsys)
    assert rc == 0 and json.loads(out)["extrapolated_ratio"] is None


def test_pace_table(tmp_path, capsys):
    out = tmp_path / "pace.csv"
    assert main(["pace-table", "--step", "0.5", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "z,G_1SRP,D,G_combined" and len(lines) == 4


def test_bench_from_files(linear_file, tmp_path, capsys):
    csv_path = tmp_path / "b.csv"
    rc, out, _ = run(["bench", "--instances", str(linear_file), "--trials", "5", "--algorithms", "2srp",
                      "--csv", str(csv_path)], capsys)
    assert rc == 0 and csv_path.read_text().startswith("instance,algorithm")


def test_perturb_flag(linear_file, capsys):
    rc, out, _ = run(["--perturb", "online", "--policy", "immediate", "--instance", str(linear_file)], capsys)
    assert rc == 0


def test_missing_file_exits_one(tmp_path, capsys):
    rc, _, err = run(["solve-exact", "--instance", str(tmp_path / "nope.json")], capsys)
    assert rc == 1 and "error" in err


def test_infeasible_input_exits_one(tmp_path, capsys):
    path = tmp_path / "big.json"
    main(["gen", "--orders", "20", "--horizon", "10", "--out", str(path)])
    rc, _, err = run(["solve-exact", "--instance", str(path), "--limit", "4"], capsys)
    assert rc == 1


def test_bad_parameters_exit_one(linear_file, capsys):
    rc, _, _ = run(["round", "--alg", "full", "--instance", str(linear_file), "--c", "0.9"], capsys)
    assert rc == 1
    rc, _, _ = run(["online", "--policy", "psychic", "--instance", str(linear_file)], capsys)
    assert rc == 1


def test_internal_violation_exits_two(monkeypatch, linear_file, capsys):
    import jrplab.cli as cli

    def broken(*a, **k):
        raise AssertionError("simulated invariant failure")

    monkeypatch.setattr(cli, "solve_exact", broken)
    rc, _, err = run(["solve-exact", "--instance", str(linear_file)], capsys)
    assert rc == 2 and "invariant" in err


def test_console_script_entry_point(linear_file):
    proc = subprocess.run([sys.executable, "-m", "jrplab.cli", "solve-exact", "--instance", str(linear_file)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["cost"]["total"] > 0
