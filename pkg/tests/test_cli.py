import json
import subprocess
import sys
from pathlib import Path

import pytest

from crbidisk.cli import main
from crbidisk.report import analyze, emit

from generators import CUBIC_TEXT, QUADRIC_TEXT

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "crbidisk" / "fixtures"
JSON_FIELDS = [
    "version",
    "input",
    "order",
    "signature",
    "verdict",
    "torsions_at_origin",
    "t1_at_origin",
    "t2_at_origin",
    "u2_min",
    "u2_argmin_angles",
    "checks",
    "timings_ms",
]


def run(capsysbinary, *argv):
    code = main(list(argv))
    return code, capsysbinary.readouterr().out


def test_quadric_json(capsysbinary):
    code, out = run(capsysbinary, "analyze", "-e", QUADRIC_TEXT, "--json")
    assert code == 0
    rec = json.loads(out)
    assert list(rec) == JSON_FIELDS
    assert rec["verdict"] == "NO_OBSTRUCTION_FOUND"
    assert rec["signature"] == [2, 2]
    assert rec["torsions_at_origin"] == {n: "0" for n in "ABCDEFGHIJ"}
    assert rec["t1_at_origin"] == "0" and rec["u2_min"] == 0.0
    assert len(rec["u2_argmin_angles"]) == 4
    assert rec["timings_ms"] == {}


def test_cubic_example_text_report(capsysbinary):
    code, out = run(capsysbinary, "analyze", "-e", CUBIC_TEXT)
    text = out.decode()
    assert code == 0
    assert "A = 1" in text
    assert "a1 = (1 + zb1 + z1 - 1/2*zb1^2 - z1*zb1 - 1/2*z1^2 + O(3))*dz1" in text
    assert "a2 = (1)*dz2" in text
    assert "verdict: NO_OBSTRUCTION_FOUND" in text
    assert "necessary" in text


@pytest.mark.parametrize(
    "expr, code, kind",
    [
        ("z1", 3, "NotReal"),
        ("z1^(-1)", 2, "NegativeExponent"),
        ("abs2(z1) + 0.5", 2, "DecimalLiteral"),
        ("abs2(z1) + abs2(z2) + abs2(z3) - abs2(z4)", 4, "WrongSignature"),
        ("abs2(z1) + abs2(z2) - abs2(z3)", 4, "LeviDegenerate"),
        ("1 + abs2(z1) + abs2(z2) - abs2(z3) - abs2(z4)", 2, "InvalidDefiningFunction"),
        ("z1^9 + conj(z1)^9", 2, "DegreeTooHigh"),
    ],
)
def test_error_exit_codes(capsysbinary, expr, code, kind):
    got, out = run(capsysbinary, "analyze", "-e", expr, "--json")
    assert got == code
    rec = json.loads(out)
    assert rec["error"]["kind"] == kind


def test_wrong_signature_verdict(capsysbinary):
    _, out = run(capsysbinary, "analyze", "-e", "abs2(z1) + abs2(z2) + abs2(z3) - abs2(z4)", "--json")
    rec = json.loads(out)
    assert rec["verdict"] == "WRONG_SIGNATURE" and rec["signature"] == [3, 1]


def test_parse_error_location_in_text(capsysbinary):
    code, out = run(capsysbinary, "analyze", "-e", "z1^(-1)")
    assert code == 2
    assert b"line 1, column 5" in out


def test_missing_file(capsysbinary, tmp_path):
    code, out = run(capsysbinary, "analyze", str(tmp_path / "nope.txt"), "--json")
    assert code == 2
    assert json.loads(out)["error"]["kind"] == "InputError"


def test_fixture_file_comments_keep_line_numbers(capsysbinary, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("# comment\nabs2(z1) +\n  zz\n")
    code, out = run(capsysbinary, "analyze", str(p), "--json")
    rec = json.loads(out)
    assert code == 2
    assert (rec["error"]["line"], rec["error"]["column"]) == (3, 3)


def test_several_files_and_max_exit_code(capsysbinary, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("z1\n")
    code, out = run(capsysbinary, "analyze", str(FIXTURES / "quadric.txt"), str(bad), "--json")
    assert code == 3
    assert len(out.decode().strip().split("\n")) == 2


def test_check_structure_and_timings(capsysbinary):
    code, out = run(capsysbinary, "analyze", str(FIXTURES / "cubic_example.txt"), "--json", "--check-structure", "--timings", "--order", "6")
    rec = json.loads(out)
    assert code == 0
    assert rec["checks"] and all(rec["checks"].values())
    assert set(rec["timings_ms"]) == {"parse", "pipeline", "u2_search", "checks"}


def test_usage_errors():
    with pytest.raises(SystemExit) as info:
        main(["analyze"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["analyze", "-e", QUADRIC_TEXT, "--grid", "2"])


def test_jobs_matches_sequential(capsysbinary):
    files = [str(p) for p in sorted(FIXTURES.glob("*.txt"))]
    _, seq = run(capsysbinary, "analyze", *files, "--json")
    _, par = run(capsysbinary, "analyze", *files, "--json", "--jobs", "2")
    assert seq == par


def test_emit_is_deterministic():
    a = emit(analyze(CUBIC_TEXT), "json")
    b = emit(analyze(CUBIC_TEXT), "json")
    assert a == b
    assert emit(analyze(CUBIC_TEXT), "text") == emit(analyze(CUBIC_TEXT), "text")
    with pytest.raises(ValueError):
        emit(analyze(CUBIC_TEXT), "xml")


def test_python_dash_m():
    proc = subprocess.run(
        [sys.executable, "-m", "crbidisk", "analyze", "-e", QUADRIC_TEXT, "--json"],
        capture_output=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "NO_OBSTRUCTION_FOUND"
