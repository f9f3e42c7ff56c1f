from __future__ import annotations

import hashlib
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from liesym.cli import main
from liesym.workspace import bundled_path, load_workspace

ABELIAN = str(bundled_path("abelian.json"))


def _run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _workspace(tmp_path: Path, basis: list[dict]) -> str:
    doc = {"name": "tmp", "coordinates": ["t", "x", "u", "f", "g"], "basis": basis}
    p = tmp_path / "ws.json"
    p.write_text(json.dumps(doc))
    return str(p)


@pytest.mark.parametrize(
    "argv, code",
    [
        (["commutators"], 0),
        (["adjoint"], 0),
        (["adjoint", "--at-zero"], 0),
        (["determine", "--field", "Y2"], 0),
        (["determine", "--field", "Y1"], 0),
        (["determine", "--field", "generic"], 0),
        (["equivalence-check"], 1),
        (["optimal", "--vector", "0,0,0,0,1"], 0),
        (["optimal", "--vector", "4,0,0,1,0"], 1),
        (["optimal", "--survey", "10", "--seed", "7"], 1),
        (["optimal"], 1),
        (["classify"], 1),
        (["commutators", "--workspace", ABELIAN], 0),
        (["adjoint", "--workspace", ABELIAN], 0),
        (["equivalence-check", "--workspace", ABELIAN], 0),
    ],
)
def test_exit_codes(capsys, argv, code) -> None:
    got, out, _ = _run(capsys, *argv)
    assert got == code
    assert out


def test_commutators_pass_line(capsys) -> None:
    _, out, _ = _run(capsys, "commutators")
    assert "PASS: 25/25 cells match the printed commutator table" in out


def test_adjoint_pass_line(capsys) -> None:
    _, out, _ = _run(capsys, "adjoint")
    assert "PASS: 25/25 cells match the printed adjoint table" in out
    assert "Y4 - s*Y2" in out and "exp(s)*Y3" in out


def test_determine_with_coefficients(capsys) -> None:
    code, out, _ = _run(capsys, "determine", "--coeff", "x=1", "--f", "exp(2*x)*Phi(u)", "--g", "Psi(u)")
    assert code == 0
    assert "residual: -2*u_x^2*exp(2*x)*Phi(u)" in out


def test_equivalence_family_report(capsys) -> None:
    code, out, _ = _run(capsys, "equivalence-check", "--family")
    assert code == 1
    assert "DELTA mu" in out and "DELTA constraint" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["determine"],
        ["nonsense"],
        ["determine", "--field", "Y9"],
        ["determine", "--coeff", "x=y+"],
        ["optimal", "--vector", "1,2"],
        ["equivalence-check", "--format", "latex"],
        ["commutators", "--workspace", "/nonexistent/ws.json"],
    ],
)
def test_usage_errors(capsys, argv) -> None:
    # argparse problems exit inside the parser; workspace and expression problems return
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 64
    assert "error" in capsys.readouterr().err


def test_non_closing_workspace_is_algebra_error(capsys, tmp_path) -> None:
    ws = _workspace(tmp_path, [{"name": "A", "coefficients": {"x": "1"}}, {"name": "B", "coefficients": {"x": "x^2"}}])
    code, _, err = _run(capsys, "commutators", "--workspace", ws)
    assert code == 2
    assert "[A, B]" in err


def test_irrational_spectrum_is_unsupported(capsys, tmp_path) -> None:
    ws = _workspace(
        tmp_path,
        [
            {"name": "A", "coefficients": {"x": "1"}},
            {"name": "B", "coefficients": {"u": "1"}},
            {"name": "C", "coefficients": {"x": "x + 2*u", "u": "x + u"}},
        ],
    )
    code, _, err = _run(capsys, "adjoint", "--workspace", ws)
    assert code == 3
    assert "unsupported" in err


def test_small_algebra_cannot_run_audit(capsys) -> None:
    code, _, _ = _run(capsys, "optimal", "--workspace", ABELIAN)
    assert code == 2


@pytest.mark.parametrize("command", ["commutators", "adjoint", "classify"])
def test_latex_and_json_formats(capsys, command) -> None:
    _, latex, _ = _run(capsys, command, "--format", "latex")
    assert "\\begin{tabular}" in latex
    _, text, _ = _run(capsys, command, "--format", "json")
    json.loads(text)


def test_workspace_not_mutated(capsys) -> None:
    path = bundled_path()
    before = hashlib.sha256(path.read_bytes()).hexdigest()
    for argv in (["commutators"], ["classify"], ["optimal", "--survey", "5", "--seed", "1"]):
        _run(capsys, *argv)
    assert hashlib.sha256(path.read_bytes()).hexdigest() == before


def test_output_independent_of_hash_seed() -> None:
    outputs = set()
    for seed in ("0", "1", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run(
            [sys.executable, "-m", "liesym.cli", "classify"],
            capture_output=True, text=True, env=env, check=False,
        )
        outputs.add(proc.stdout)
        proc = subprocess.run(
            [sys.executable, "-m", "liesym.cli", "optimal", "--survey", "30", "--seed", "7", "--format", "json"],
            capture_output=True, text=True, env=env, check=False,
        )
        outputs.add(proc.stdout)
    assert len(outputs) == 2


def test_hyphenated_permutation_key(tmp_path) -> None:
    doc = json.loads(bundled_path().read_text())
    doc["labeling-permutation"] = doc.pop("labeling_permutation")
    doc["fixtures"] = None
    p = tmp_path / "ws.json"
    p.write_text(json.dumps(doc))
    assert load_workspace(p).permutation == (2, 1, 3, 4, 5)
