"""Command-line driver: exit codes and report contents."""

from __future__ import annotations

import json

import pytest

from achcr.cli import EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_VALIDATION, main
from achcr.frame import heisenberg, su2, twisted_heisenberg_literal


def _write(tmp_path, doc, name="doc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(tmp_path, capsys):
    code, out, _ = _run(capsys, ["validate", _write(tmp_path, heisenberg(1).to_document())])
    assert code == EXIT_OK
    assert json.loads(out)["validation"]["ok"] is True


def test_validate_autocompletes_conjugates(tmp_path, capsys):
    doc = su2().to_document()
    doc["brackets"] = [b for b in doc["brackets"] if not (b["x"] == "T" and b["y"] == "Zb1")]
    code, out, _ = _run(capsys, ["validate", _write(tmp_path, doc)])
    assert code == EXIT_OK
    notes = json.loads(out)["validation"]["notes"]
    assert any("auto-completed" in s for s in notes)


def test_validate_reports_jacobi_witnesses(tmp_path, capsys):
    code, out, _ = _run(capsys, ["validate", _write(tmp_path, twisted_heisenberg_literal(2, 1).to_document())])
    assert code == EXIT_VALIDATION
    rep = json.loads(out)["validation"]
    assert rep["checks"]["jacobi"] is False
    assert rep["witnesses"]["jacobi"]


def test_validate_bad_json(tmp_path, capsys):
    code, _, err = _run(capsys, ["validate", _write(tmp_path, "{not json")])
    assert code == EXIT_PARSE
    assert "parse error" in err


def test_missing_and_conflicting_input(tmp_path, capsys):
    assert _run(capsys, ["validate"])[0] == EXIT_PARSE
    assert _run(capsys, ["validate", "builtin:su2", "--input", "builtin:heisenberg1"])[0] == EXIT_PARSE
    assert _run(capsys, ["validate", "--input", "builtin:su2"])[0] == EXIT_OK
    assert _run(capsys, ["validate", str(tmp_path / "missing.json")])[0] == EXIT_PARSE


def test_unknown_builtin(capsys):
    assert _run(capsys, ["solve", "builtin:nope"])[0] == EXIT_VALIDATION


def test_solve_flat(capsys):
    code, out, _ = _run(capsys, ["solve", "builtin:heisenberg2"])
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["phi"] == {}
    assert all(v == {"re": "0/1", "im": "0/1"} for v in rep["O"].values())
    assert "timing_seconds" not in rep


def test_solve_su2(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = _run(capsys, ["solve", "builtin:su2", "--output", str(target), "--timing"])
    assert code == EXIT_OK and out == ""
    rep = json.loads(target.read_text())
    assert rep["seed"]["Phi_hermitian"]["1,1"] == {"re": "-1/1", "im": "0/1"}
    assert all(v == {"re": "0/1", "im": "0/1"} for v in rep["O"].values())
    assert all(rep["checks"].values())
    assert "timing_seconds" in rep


def test_solve_truncation_too_small(capsys):
    code, _, err = _run(capsys, ["solve", "builtin:heisenberg1", "--truncation", "3"])
    assert code == EXIT_SOLVER
    assert "TruncationTooSmall" in err


def test_verify_all_on_su2(capsys):
    code, out, _ = _run(capsys, ["verify", "builtin:su2"])
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["ok"] and set(rep["checks"]) == {"bianchi", "divergence", "scaling", "table1", "second-obstruction"}


def test_verify_selected_checks(capsys):
    code, out, _ = _run(capsys, ["verify", "builtin:twisted_heisenberg2", "--checks", "divergence,scaling", "--lambda", "9/4"])
    assert code == EXIT_OK
    assert set(json.loads(out)["checks"]) == {"divergence", "scaling"}


def test_verify_options_from_document(tmp_path, capsys):
    doc = heisenberg(1).to_document()
    doc["options"] = {"checks": ["table1"], "truncation": 7}
    code, out, _ = _run(capsys, ["verify", _write(tmp_path, doc)])
    assert code == EXIT_OK
    assert set(json.loads(out)["checks"]) == {"table1"}


@pytest.mark.parametrize("argv", [["--checks", "nonsense"], ["--lambda", "-1"], ["--lambda", "x"]])
def test_verify_bad_arguments(capsys, argv):
    assert _run(capsys, ["verify", "builtin:heisenberg1", *argv])[0] == EXIT_VALIDATION


def test_sphere_coeff(capsys):
    code, out, _ = _run(capsys, ["sphere-coeff", "--n", "2"])
    assert code == EXIT_OK
    assert out.splitlines() == ["c_1 = 1", "c_2 = -1/2", "a_3 = 1/4  OK"]
    code, out, _ = _run(capsys, ["sphere-coeff", "--n", "1"])
    assert out.splitlines()[-1] == "a_2 = -1  OK"
    assert _run(capsys, ["sphere-coeff", "--n", "0"])[0] == EXIT_VALIDATION
    assert _run(capsys, ["sphere-coeff", "--n", "9"])[0] == EXIT_VALIDATION
