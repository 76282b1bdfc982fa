import json
import subprocess
import sys

import numpy as np
import pytest

from cohnonlocal.cli import run
from cohnonlocal.qstate import ghz_state, matrix_from_dict, matrix_to_dict


def write_state(tmp_path, matrix, dims=None, name="state.json"):
    p = tmp_path / name
    p.write_text(json.dumps(matrix_to_dict(np.asarray(matrix, dtype=complex), dims)))
    return str(p)


PLUS = [[0.5, 0.5], [0.5, 0.5]]


def test_coherence(tmp_path, capsys):
    assert run(["coherence", "--in", write_state(tmp_path, PLUS)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["c_l1"] == pytest.approx(1) and out["c_rel_ent"] == pytest.approx(1)
    assert out["is_incoherent"] is False


def test_pure_state_input(tmp_path, capsys):
    path = write_state(tmp_path, np.array([[1], [1]]) / np.sqrt(2))
    assert run(["coherence", "--in", path]) == 0
    assert json.loads(capsys.readouterr().out)["c_l1"] == pytest.approx(1)


def test_convert_round_trip(tmp_path, capsys):
    out = tmp_path / "ghz.json"
    assert run(["convert", "--in", write_state(tmp_path, PLUS), "--n", "3", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["dims"] == [2, 2, 2]
    np.testing.assert_allclose(matrix_from_dict(data)[0], ghz_state(3).density().matrix, atol=1e-15)
    assert run(["coherence", "--in", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["c_l1"] == pytest.approx(1)


def test_convert_dimension_mismatch(tmp_path, capsys):
    assert run(["convert", "--in", write_state(tmp_path, PLUS), "--d", "3"]) == 1
    assert "does not match" in capsys.readouterr().err


def test_chsh(tmp_path, capsys):
    assert run(["chsh", "--in", write_state(tmp_path, PLUS), "--expect-violation"]) == 0
    reports = json.loads(capsys.readouterr().out)
    assert reports[0]["name"] == "chsh_max"
    assert reports[0]["value"] == pytest.approx(2 * np.sqrt(2))
    assert reports[1]["value"] == pytest.approx(2 * np.sqrt(2), abs=1e-9)
    assert run(["chsh", "--in", write_state(tmp_path, np.eye(2) / 2), "--expect-violation"]) == 2


def test_chsh_qutrit(tmp_path, capsys):
    m = np.diag([0.4, 0.4, 0.2]).astype(complex)
    m[0, 1] = m[1, 0] = 0.31
    assert run(["chsh", "--in", write_state(tmp_path, m), "--expect-violation"]) == 0
    reports = json.loads(capsys.readouterr().out)
    assert [r["name"] for r in reports] == ["projected_chsh", "theorem2_witness"]
    assert reports[1]["detail"]["pair"] == [0, 1]


def test_svetlichny_and_tns(tmp_path, capsys):
    path = write_state(tmp_path, PLUS)
    assert run(["svetlichny", "--in", path, "--resolution", "8", "--expect-violation"]) == 0
    rep = json.loads(capsys.readouterr().out)[0]
    assert rep["detail"]["lambda1"] == pytest.approx(np.sqrt(2))
    assert run(["tns", "--in", path, "--resolution", "8"]) == 0
    t, t_orc, ns = json.loads(capsys.readouterr().out)
    assert t["value"] == pytest.approx(1 + 2 * np.sqrt(2))
    assert ns["value"] <= 3 + 1e-6
    mixed = write_state(tmp_path, np.eye(2) / 2, name="mixed.json")
    assert run(["svetlichny", "--in", mixed, "--expect-violation"]) == 2


def test_gme(tmp_path, capsys):
    psi = np.sqrt([0.5, 0.3, 0.2]).reshape(3, 1)
    assert run(["gme", "--in", write_state(tmp_path, psi)]) == 0
    assert json.loads(capsys.readouterr().out)[0]["value"] == pytest.approx(2 * np.sqrt(0.31))
    assert run(["gme", "--in", write_state(tmp_path, np.eye(3) / 3)]) == 1


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"rows": 2, "cols": 2, "data": [[1, 0], [0, 0], [0, 0]', "malformed JSON at line 1"),
        ('{"rows": 1, "cols": 2, "data": [[1, 0], [0]]}', "data[1]"),
        ('{"rows": 2, "cols": 2, "data": [[0.5, 0], [0.7, 0], [0.7, 0], [0.5, 0]]}', "psd"),
        ('{"rows": 2, "cols": 2, "data": [[0.6, 0], [0, 0], [0, 0], [0.6, 0]]}', "trace"),
    ],
)
def test_input_errors(tmp_path, capsys, text, fragment):
    p = tmp_path / "bad.json"
    p.write_text(text)
    assert run(["coherence", "--in", str(p)]) == 1
    assert fragment in capsys.readouterr().err


def test_psd_error_names_eigenvalue(tmp_path, capsys):
    assert run(["chsh", "--in", write_state(tmp_path, [[0.5, 0.7], [0.7, 0.5]])]) == 1
    assert "eigenvalue -2.000000e-01" in capsys.readouterr().err


def test_missing_file(capsys):
    assert run(["coherence", "--in", "/nonexistent/state.json"]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_stdin_via_subprocess(tmp_path):
    data = json.dumps(matrix_to_dict(np.array(PLUS, dtype=complex)))
    proc = subprocess.run([sys.executable, "-m", "cohnonlocal", "coherence", "--in", "-"],
                          input=data, capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["c_l1"] == pytest.approx(1)


def test_verify_deterministic(capsys):
    assert run(["verify", "--theorem", "4", "--trials", "20", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert run(["verify", "--theorem", "4", "--trials", "20", "--seed", "7"]) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)[0]["theorem_id"] == "theorem4"


def test_fig2_cli(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    assert run(["fig2", "--a-steps", "3", "--b-steps", "3", "--resolution", "4", "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["artifacts"] == [str(out)]
    assert out.read_text().splitlines()[3].startswith("a,b,c_l1")
    assert run(["fig2", "--a-steps", "3", "--b-steps", "3", "--resolution", "4"]) == 0
    assert capsys.readouterr().out == out.read_text()
    assert run(["fig2", "--a-steps", "1"]) == 1


def test_bad_trials_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run(["verify", "--trials", "0"])
    assert exc.value.code == 2
