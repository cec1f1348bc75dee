import csv
import io
import json


from darkstates.cli import EXIT_CONSTRAINT, EXIT_FAILED, EXIT_OK, EXIT_USAGE, SCAN_COLUMNS, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_text_and_json(capsys):
    code, out, _ = run(capsys, "classify", "--transition", "2:1")
    assert code == EXIT_OK and "Lambda" in out
    code, out, _ = run(capsys, "classify", "--transition", "3/2:3/2", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["schema_version"] == 1
    kinds = sorted(c["kind"] for c in doc["chains"])
    assert kinds == ["NMinus", "NPlus"]


def test_classify_rejects_bad_transition(capsys):
    assert run(capsys, "classify", "--transition", "1:3")[0] == EXIT_USAGE
    assert run(capsys, "classify", "--transition", "x")[0] == EXIT_USAGE


def test_gds_v_chain(capsys, tmp_path):
    path = tmp_path / "v.json"
    code, _, err = run(capsys, "gds", "--transition", "1:2", "--chain-index", "0", "--type", "v",
                       "--m", "1", "--mprime", "1", "--output", str(path))
    doc = json.loads(path.read_text())
    assert code == EXIT_OK, err
    assert doc["schema_version"] == 1 and doc["darkness"]["dark"]
    assert doc["chain"]["kind"] == "V"


def test_gds_constraint_exit_codes(capsys):
    code, _, err = run(capsys, "gds", "--transition", "3/2:3/2", "--type", "n", "--n", "1", "--m", "2")
    assert code == EXIT_CONSTRAINT and "(m ≤ L)" in err
    code, _, err = run(capsys, "gds", "--transition", "1:2", "--chain-index", "1", "--type", "v", "--m", "1")
    assert code == EXIT_CONSTRAINT and "L=0" in err
    assert run(capsys, "gds", "--transition", "1:2", "--type", "v", "--m", "1")[0] == EXIT_CONSTRAINT
    assert run(capsys, "gds", "--transition", "2:1", "--type", "lambda", "--n", "1")[0] == EXIT_CONSTRAINT
    assert run(capsys, "gds", "--transition", "2:1", "--chain-index", "9", "--type", "lambda",
               "--n", "1", "--phi", "1,1")[0] == EXIT_USAGE


def test_gds_lambda_and_polariton(capsys):
    code, out, _ = run(capsys, "gds", "--transition", "2:1", "--type", "lambda", "--n", "1", "--phi", "2,1")
    assert code == EXIT_OK and json.loads(out)["darkness"]["residual"] <= 1e-10
    code, _, _ = run(capsys, "gds", "--transition", "1:1", "--type", "polariton", "--m", "1",
                     "--force-equal-g", "--truncation", "12")
    assert code == EXIT_OK


def test_scan_agrees(capsys):
    code, out, _ = run(capsys, "scan", "--max-2f", "3", "--caps", "2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and rows
    assert list(rows[0].keys()) == list(SCAN_COLUMNS)
    assert all(r["analytic_count"] == r["oracle_dimension"] for r in rows)
    assert run(capsys, "scan", "--atoms", "2")[0] == EXIT_USAGE


def test_filter_command(capsys, tmp_path):
    cfg = tmp_path / "f.cfg"
    cfg.write_text("transition = 3/2:3/2\nn_plus = 1\nn_minus = 2\nt_max = 10\n")
    out = tmp_path / "summary.json"
    ts = tmp_path / "ts"
    code, _, _ = run(capsys, "filter", "--config", str(cfg), "--trajectories", "3", "--seed", "5",
                     "--output", str(out), "--timeseries", str(ts))
    doc = json.loads(out.read_text())
    assert code == EXIT_OK and doc["schema_version"] == 1 and doc["trajectories"] == 3
    assert sorted(p.name for p in ts.iterdir()) == [f"trajectory_{i:04d}.csv" for i in range(3)]
    assert run(capsys, "filter", "--config", str(cfg), "--trajectories", "0")[0] == EXIT_USAGE
    assert run(capsys, "filter", "--config", str(tmp_path / "missing.cfg"))[0] == EXIT_USAGE


def test_usage_errors(capsys):
    assert run(capsys)[0] == EXIT_USAGE
    assert run(capsys, "nonsense")[0] == EXIT_USAGE
    assert EXIT_FAILED == 1
