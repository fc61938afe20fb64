import json
import subprocess
import sys

import pytest

from cube_pisier.cli import main, parse_range


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--n", "6", "--d", "2", "--seed", "0")
    assert code == 0
    report = json.loads(out)
    assert report["max_discrepancy"] <= 1e-10
    assert report["sign"] == 1
    assert set(report) >= {"n", "d", "t_grid", "max_discrepancy", "sign"}


def test_verify_caps_and_smallest_cube(capsys):
    code, _, err = run(capsys, "verify", "--n", "15")
    assert code == 1 and "outside" in err
    code, _, _ = run(capsys, "verify", "--n", "1")
    assert code == 0


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["estimate", "--ineq", "nope", "--n", "2"])
    assert exc.value.code == 1
    code, _, _ = run(capsys, "estimate", "--ineq", "pisier", "--norm", "weird", "--n", "2")
    assert code == 1
    code, _, _ = run(capsys, "estimate", "--ineq", "df", "--n", "9")
    assert code == 1
    with pytest.raises(Exception):
        parse_range("a..b")


def test_estimate_pisier_scalar(capsys):
    code, out, _ = run(capsys, "estimate", "--ineq", "pisier", "--norm", "scalar", "--n", "4",
                       "--p", "2", "--restarts", "8")
    assert code == 0
    est = json.loads(out)
    assert abs(est["value"] - 1) <= 1e-3
    assert est["witness"]["n"] == 4


def test_estimate_df_hilbert(capsys):
    code, out, _ = run(capsys, "estimate", "--ineq", "df", "--norm", "ellq:d=4,q=2", "--n", "5",
                       "--p", "2", "--restarts", "8")
    assert code == 0 and abs(json.loads(out)["value"] - 1) <= 1e-3


def test_estimate_f1_writes_witness(tmp_path, capsys):
    path = tmp_path / "est.json"
    code, out, _ = run(capsys, "estimate", "--ineq", "f1", "--norm", "l1cube:k=3", "--n", "3",
                       "--p", "2", "--restarts", "64", "--max-iter", "150", "--output", str(path))
    assert code == 0 and str(path) in out
    est = json.loads(path.read_text())
    assert est["value"] >= 1 - 1e-9
    assert len(est["witness"]["values"]) == 64


def test_scan_and_config_file(tmp_path, capsys):
    code, out, _ = run(capsys, "scan", "--ineq", "pisier", "--norm", "scalar", "--p", "2",
                       "--n", "1..6", "--restarts", "8")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,kind,norm,p,estimate,converged,seed"
    assert [abs(float(l.split(",")[4]) - 1) <= 1e-3 for l in lines[1:]] == [True] * 6

    cfg = tmp_path / "scan.json"
    cfg.write_text(json.dumps({"ineq": "df", "norm": "ellq:d=2,q=2", "n": "1..2", "restarts": 4,
                               "format": "json"}))
    code, out, _ = run(capsys, "scan", "--config", str(cfg), "--n", "1..3")
    assert code == 0
    rows = [json.loads(l) for l in out.strip().splitlines()]
    assert [r["n"] for r in rows] == [1, 2, 3]
    assert all(r["restarts"] == 4 or r["restarts"] == 5 for r in rows)


def test_bound(capsys):
    code, out, _ = run(capsys, "bound", "--n", "1", "--p", "1")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "n,p,r_star,bound,ratio"
    assert abs(float(row.split(",")[3]) - 2.0) <= 1e-6
    code, out, _ = run(capsys, "bound", "--p", "2", "--n", "4..4096")
    ratios = [float(l.split(",")[4]) for l in out.strip().splitlines()[1:]]
    assert len(ratios) == 4093 and 0 < min(ratios) and max(ratios) < 10


def test_moduli(capsys):
    code, out, _ = run(capsys, "moduli", "--modulus", "cotype", "--norm", "ellq:d=4,q=inf",
                       "--m", "4", "--restarts", "4")
    assert code == 0 and json.loads(out)["value"] >= 2 - 1e-3
    code, out, _ = run(capsys, "moduli", "--modulus", "kconvex", "--norm", "ellq:d=2,q=2",
                       "--n", "3", "--restarts", "3", "--format", "csv")
    assert code == 0 and out.startswith("modulus,")


def test_byte_identical_outputs(tmp_path):
    paths = [tmp_path / f"run{i}.csv" for i in range(2)]
    for path in paths:
        assert main(["scan", "--ineq", "f1", "--norm", "l1cube:k=n", "--n", "1..2",
                     "--restarts", "4", "--seed", "7", "--output", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cube_pisier.cli", "verify", "--n", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["passed"]
