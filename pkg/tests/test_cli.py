import json
import subprocess
import sys

import pytest

from submodcheck.check import ViolationCertificate, verify_certificate
from submodcheck.cli import parse_text, run
from submodcheck.setfn import parse_function


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_iou_reports_certificate(capsys):
    code, out, _ = invoke(capsys, "check", "--builtin", "iou", "--m", "3", "--y", "1", "--json")
    assert code == 1
    cert = json.loads(out)["certificate"]
    assert (cert["A"], cert["B"], cert["x"], cert["gap"]) == ([1], [1, 2], 3, "-1/3")
    assert set(cert) == {"mode", "m", "function", "A", "B", "x", "lhs", "rhs", "gap"}


def test_check_cardinality_holds(capsys):
    code, out, _ = invoke(capsys, "check", "--builtin", "cardinality", "--m", "4")
    assert code == 0
    assert "verdict: submodular" in out


@pytest.mark.parametrize("mode", ["standard", "paper-literal", "lattice"])
@pytest.mark.parametrize(
    "fn",
    [["--builtin", "iou", "--m", "4", "--y", "1,2"], ["--builtin", "neg_iou", "--m", "4", "--y", "2"],
     ["--builtin", "truncation", "--m", "4", "--cap", "2", "--negate"]],
)
def test_text_and_json_agree_and_certificates_reload(capsys, mode, fn):
    code_t, text, _ = invoke(capsys, "check", *fn, "--mode", mode)
    code_j, js, _ = invoke(capsys, "check", *fn, "--mode", mode, "--json")
    assert code_t == code_j
    report = json.loads(js)
    assert parse_text(text) == report
    if code_j == 1:
        cert_doc = report["certificate"]
        f = parse_function(cert_doc["function"])
        assert verify_certificate(f, ViolationCertificate.from_dict(cert_doc))


def test_check_from_file(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"kind": "table", "m": 2, "values": ["0", "1", "1", "3"]}))
    code, out, _ = invoke(capsys, "check", "--function", str(path), "--json")
    assert code == 1
    assert json.loads(out)["certificate"]["gap"] == "-1"
    code, out, _ = invoke(capsys, "check", "--function", str(path), "--negate")
    assert code == 0


def test_monotone(capsys):
    code, out, _ = invoke(capsys, "monotone", "--builtin", "iou", "--m", "2", "--y", "1", "--json")
    assert code == 1
    assert json.loads(out) == {
        "command": "monotone",
        "function": {"kind": "iou", "m": 2, "y": [1]},
        "verdict": "violated",
        "A": [1],
        "x": 2,
        "gap": "-1/2",
    }
    assert invoke(capsys, "monotone", "--builtin", "cardinality", "--m", "3")[0] == 0


def test_extension(capsys, tmp_path):
    code, out, _ = invoke(capsys, "extension", "--builtin", "iou", "--m", "3", "--y", "1", "--point", "1,0.5,0.5", "--trace", "--json")
    assert code == 0
    report = json.loads(out)
    assert float(report["value"]) == pytest.approx(2 / 3, abs=1e-15)
    assert [s["prefix"] for s in report["chain"]] == [[1], [1, 2], [1, 2, 3]]
    assert [s["prefix_value"] for s in report["chain"]] == ["1", "1/2", "1/3"]
    code, text, _ = invoke(capsys, "extension", "--builtin", "iou", "--m", "3", "--y", "1", "--point", "1,0.5,0.5", "--trace")
    assert parse_text(text) == report


def test_probe(capsys):
    code, out, _ = invoke(capsys, "probe", "--builtin", "iou", "--m", "3", "--y", "1", "--samples", "100", "--json")
    assert code == 1
    report = json.loads(out)
    assert report["seed"] == 0
    assert float(report["witness"]["deficit"]) >= 1 / 6 - 1e-9
    code, _, _ = invoke(capsys, "probe", "--builtin", "cardinality", "--m", "3", "--samples", "100")
    assert code == 0


def test_reproduce(capsys):
    code, out, _ = invoke(capsys, "reproduce", "paper", "--json")
    assert code == 1
    report = json.loads(out)
    outside = report["iou_not_submodular"]
    inside = report["neg_iou_not_submodular"]
    assert outside["example"]["case"] == "outside-yb" and outside["example"]["r"].startswith("-")
    assert inside["example"]["case"] == "inside-y" and not inside["example"]["r"].startswith("-")
    assert outside["all_signs_hold"] and inside["all_signs_hold"]
    assert outside["certificate_verified"] and inside["certificate_verified"]
    p11 = report["property11_refutation"]
    assert p11["n_B"] > p11["n_A"]
    code, text, _ = invoke(capsys, "reproduce", "paper")
    assert parse_text(text) == report


def test_scan(capsys):
    code, out, _ = invoke(capsys, "scan", "--builtin", "iou", "--max-m", "5", "--json")
    assert code == 1
    rows = json.loads(out)["results"]
    assert len(rows) == 3 + 4 + 5
    for row in rows:
        expected = "violated" if row["y_size"] <= row["m"] - 2 else "submodular"
        assert row["verdict"] == expected


def test_refute(capsys):
    code, out, _ = invoke(capsys, "refute-p11", "--json")
    assert code == 1
    report = json.loads(out)
    assert (report["Y"], report["B"], report["A"], report["n_B"], report["n_A"]) == ([1], [], [1], 1, 0)


@pytest.mark.parametrize(
    "argv",
    [
        ["check"],
        ["check", "--builtin", "iou", "--m", "3"],
        ["check", "--builtin", "iou", "--m", "3", "--y", "4"],
        ["check", "--builtin", "cardinality", "--m", "21"],
        ["check", "--builtin", "cardinality", "--m", "3", "--bogus"],
        ["check", "--function", "/nonexistent.json"],
        ["check", "--builtin", "truncation", "--m", "3"],
        ["extension", "--builtin", "cardinality", "--m", "3", "--point", "1,2"],
        ["extension", "--builtin", "cardinality", "--m", "2", "--point", "a,b"],
        ["reproduce", "paper", "--m", "2"],
        ["scan", "--builtin", "iou", "--max-m", "2"],
        ["probe", "--builtin", "cardinality", "--m", "2", "--workers", "0"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err


def test_malformed_function_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"kind": "iou", "m": 3, "y": []}')
    code, _, err = invoke(capsys, "check", "--function", str(path))
    assert code == 2 and "nonempty" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "submodcheck", "check", "--builtin", "iou", "--m", "3", "--y", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert "certificate.gap: -1/3" in proc.stdout
