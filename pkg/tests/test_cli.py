import json

import numpy as np
import pytest

from nkcp3.algebra import matrix_to_json
from nkcp3.cli import main
from nkcp3.linear_model import w_theta


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_verify_exotic(capsys):
    code, out = run(capsys, "verify", "exotic")
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == 1 and rep["pass"]
    theta = next(c for c in rep["checks"] if c["name"] == "exotic.orbit_theta")
    assert abs(theta["value"] - 0.5 * np.arccos(7 * np.sqrt(2) / (5 * np.sqrt(5)))) < 1e-9


def test_verify_unknown_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["verify", "torus"])
    assert e.value.code == 2


def test_scan_k3_json_and_csv(capsys, tmp_path):
    code, out = run(capsys, "scan", "k3", "--out-dir", str(tmp_path))
    assert code == 0 and len(json.loads(out)["roots"]) == 3
    csv_text = (tmp_path / "scan_k3.csv").read_text().splitlines()
    assert csv_text[0].startswith("group,r,s,mu1,mu2,mu3,nu,polish_iterations,residual")
    assert len(csv_text) == 4
    code, out = run(capsys, "scan", "k3", "--output", "csv")
    assert code == 0 and out.splitlines()[0] == csv_text[0]


def test_scan_k2_and_k1(capsys):
    assert run(capsys, "scan", "k2")[0] == 0
    assert run(capsys, "scan", "k1", "--n", "4")[0] == 0


def test_identities_pass_empty_and_corrupted(capsys):
    code, out = run(capsys, "identities", "--samples", "3", "--seed", "42")
    assert code == 0
    code, out = run(capsys, "identities", "--samples", "0")
    rep = json.loads(out)
    assert code == 0 and rep["empty"] and rep["checks"] == []
    code, out = run(capsys, "identities", "--samples", "2", "--corrupt-sign")
    assert code == 1 and not json.loads(out)["pass"]


def test_reports_are_deterministic(capsys):
    a = run(capsys, "identities", "--samples", "2", "--seed", "5")[1]
    b = run(capsys, "identities", "--samples", "2", "--seed", "5")[1]
    assert a == b


def test_flag_small(capsys, tmp_path):
    code, out = run(capsys, "flag", "--n", "40", "--samples", "200", "--out-dir", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "flag_jacobian.csv").read_text().splitlines()
    assert lines[0] == "lam,mu,det,zero" and len(lines) == 1 + 40 * 40


def test_canon(capsys, tmp_path):
    f = tmp_path / "w.json"
    f.write_text(json.dumps({"basis": matrix_to_json(w_theta(0.2))}))
    code, out = run(capsys, "canon", "--basis", str(f), "--expect-theta", "0.2")
    rep = json.loads(out)
    assert code == 0 and abs(rep["theta"] - 0.2) < 1e-9
    g = tmp_path / "r.json"
    g.write_text(json.dumps({"basis": matrix_to_json(np.eye(3) + 0j)}))
    rep = json.loads(run(capsys, "canon", "--basis", str(g))[1])
    assert abs(rep["theta"] - np.pi / 4) < 1e-12 and rep["n_w"] == 2


def test_canon_bad_input(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    assert main(["canon", "--basis", str(f)]) == 2
    f.write_text(json.dumps({"basis": [[1, 2], [3, 4]]}))
    assert main(["canon", "--basis", str(f)]) == 2
    assert main(["canon", "--basis", str(tmp_path / "missing.json")]) == 2
    f.write_text(json.dumps({"basis": matrix_to_json(np.zeros((3, 3)))}))
    assert main(["canon", "--basis", str(f)]) == 2
    nonsl = np.eye(3, dtype=complex)
    nonsl[:, 1] = 1j * nonsl[:, 0] + 0.1
    f.write_text(json.dumps({"basis": matrix_to_json(nonsl)}))
    assert main(["canon", "--basis", str(f)]) == 1
