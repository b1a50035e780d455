import json
import subprocess
import sys

import jsonschema
import pytest

from radialop.cli import REPORT_SCHEMA, main, parse_range, UsageError
from radialop.expr import evaluate


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def operator_blocks(node):
    """Every rendered operator object inside a report."""
    if isinstance(node, dict):
        if {"ascii", "terms"} <= node.keys():
            yield node
        for value in node.values():
            yield from operator_blocks(value)
    elif isinstance(node, list):
        for value in node:
            yield from operator_blocks(value)


def check_operator_blocks(doc):
    blocks = list(operator_blocks(doc))
    assert blocks
    for block in blocks:
        op = evaluate(block["ascii"])
        rebuilt = {
            str(k): {str(e): [str(p.coefficient(d)) for d in range(p.degree + 1)] for e, p in c.items()}
            for k, c in op.items()
        }
        assert rebuilt == block["terms"]


def test_derive_symbolic_json(capsys):
    code, out, _ = run(capsys, "derive", "--n", "symbolic", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    sections = {s["name"]: s for s in doc["sections"]}
    disc = sections["discrepancy"]["operator"]
    assert evaluate(disc["ascii"]) == evaluate("-(1/4)*(n-1)*(n-3)*r^-2")
    assert disc["terms"] == {"0": {"-2": ["-3/4", "1", "-1/4"]}}
    assert sections["correction_term"]["value"] == "hbar^2*(n-1)*(n-3)/(2*m*4*r^2)"
    assert sections["physical_forms"]["momentum"].startswith("P_r = (-i*hbar) * [")
    assert sections["physical_forms"]["hamiltonian"].startswith("H = -hbar^2/(2*m) * [")
    check_operator_blocks(doc)


def test_derive_text(capsys):
    code, out, _ = run(capsys, "derive", "--n", "3")
    assert code == 0
    assert "discrepancy: 0" in out.splitlines()
    code, out, _ = run(capsys, "derive")
    assert "discrepancy: -(1/4*n^2 - 1*n + 3/4)*r^-2" in out
    assert "H = P_r^2/(2*m) + L^2/(2*m*r^2) + hbar^2*(n-1)*(n-3)/(2*m*4*r^2)" in out


@pytest.mark.parametrize("bad", ["0", "-1", "2.5", "abc"])
def test_derive_rejects_bad_dimension(capsys, bad):
    code, _, err = run(capsys, "derive", "--n", bad)
    assert code == 2 and "error" in err


def test_verify_all_passes(capsys):
    code, out, _ = run(capsys, "verify", "--n", "1..7", "--suite", "all", "--seed", "42", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["records"] and all(r["pass"] for r in doc["records"])
    assert doc["sections"][0]["all_passed"] is True


def test_verify_json_is_byte_identical(capsys):
    argv = ("verify", "--n", "2..4", "--suite", "all", "--seed", "9", "--format", "json")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_verify_laplacian_2d_shows_gap(capsys):
    code, out, _ = run(capsys, "verify", "--n", "2..2", "--suite", "laplacian", "--format", "json")
    assert code == 0
    gaps = [
        r["details"]["max_abs_laplacian_minus_momentum_squared"]
        for r in json.loads(out)["records"]
        if r["check_name"].startswith("momentum_squared_gap")
    ]
    assert len(gaps) == 5 and all(g > 1e-3 for g in gaps)


def test_verify_adjoint_3d(capsys):
    code, out, _ = run(capsys, "verify", "--n", "3..3", "--suite", "adjoint", "--format", "json")
    assert code == 0
    records = {r["check_name"]: r for r in json.loads(out)["records"]}
    skew = records["skew[reduced_momentum]"]
    assert abs(skew["details"]["lhs"] + skew["details"]["rhs"]) <= 1e-8


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--n", "3..3", "--suite", "divergence", "--tol", "1e-30")
    assert code == 1 and out.startswith("FAIL")


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--n", "0..3"),
        ("verify", "--n", "5..2"),
        ("verify", "--n", "1..11"),
        ("verify", "--n", "a..b"),
        ("verify", "--suite", "bogus"),
        ("verify", "--tol", "-1"),
        ("frobnicate",),
        (),
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_parse_range():
    assert parse_range("1..7") == list(range(1, 8))
    assert parse_range("4") == [4]
    with pytest.raises(UsageError):
        parse_range("3..")


def test_eval_examples(capsys):
    code, out, _ = run(capsys, "eval", "[d,(n-1)/2*r^-1]")
    assert code == 0
    assert evaluate(out.strip()) == evaluate("-(n-1)/2*r^-2")
    assert run(capsys, "eval", "d*r - r*d")[1] == "1\n"
    assert run(capsys, "eval", "(d + (n-1)/2*r^-1)^2", "--n", "5")[1] == "d^2 + 4*r^-1*d + 2*r^-2\n"


def test_eval_json(capsys):
    code, out, _ = run(capsys, "eval", "(d + (n-1)/2*r^-1)^2", "--n", "5", "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert [s["name"] for s in doc["sections"]] == ["canonical", "specialized"]
    check_operator_blocks(doc)


def test_eval_parse_error_has_caret(capsys):
    code, out, err = run(capsys, "eval", "(d + r")
    assert code == 2 and out == ""
    lines = err.splitlines()
    assert "expected ')'" in lines[0]
    assert lines[1] == "  (d + r"
    assert lines[2] == "        ^"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "radialop", "eval", "d*r - r*d"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "1\n"
