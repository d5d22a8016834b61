import json
import subprocess
import sys

import pytest

from filterlab.cli import main, run

COLUMNS = '{"gen":"colset","cols":{"gen":"ap","first":1,"step":1}}'


def _strip(report):
    return {k: v for k, v in report.items() if k != "elapsed_ms"}


def test_refuted_exit_code():
    code, report, _ = run(["check-block-respecting", "--filter", "statistical", "--blocking", "dyadic",
                           "--horizon", "65536"])
    assert code == 10 and report["verdict"] == "Refuted" and report["exit_code"] == 10


def test_proved_exit_code():
    code, report, _ = run(["check-convergence", "--filter", "frechet", "--seq", "harmonic", "--mode", "scalar",
                           "--limit", "0", "--epsilon", "1/10"])
    assert code == 0 and report["verdict"] == "Proved"


def test_malformed_json_reports_location():
    code, report, _ = run(["check-convergence", "--filter", "statistical", "--seq", '{"name":"indicator"',
                           "--limit", "0"])
    assert code == 2
    assert report["error"]["kind"] == "usage" and "--seq:1:20" in report["error"]["message"]


def test_precondition_failure_names_index():
    code, report, _ = run(["extract-gliding-hump", "--filter", "fd", "--seq", "remark_sequence", "--set", COLUMNS,
                           "--horizon", "2000"])
    assert code == 2
    assert report["error"]["kind"] == "precondition" and report["error"]["index"] == 1


def test_unknown_subcommand():
    code, report, _ = run(["frobnicate"])
    assert code == 2 and report["error"]["kind"] == "usage"
    code, _, _ = run([])
    assert code == 2


def test_reports_are_deterministic():
    argv = ["demo", "theorem15", "--horizon", "20000", "--seed", "3"]
    a, b = run(argv)[1], run(argv)[1]
    assert _strip(a) == _strip(b)
    assert len(a["inputs_digest"]) == 64


def test_demo_theorem15():
    code, report, _ = run(["demo", "theorem15"])
    assert code == 0 and report["verdict"] == "Proved"


def test_horizon_cap(monkeypatch):
    monkeypatch.setenv("FILTERLAB_MAX_HORIZON", "5000")
    _, report, _ = run(["check-block-respecting", "--filter", "statistical", "--blocking", "dyadic",
                        "--horizon", "1048576"])
    assert report["horizon"] == 5000
    monkeypatch.setenv("FILTERLAB_MAX_HORIZON", "lots")
    code, _, _ = run(["check-block-respecting", "--filter", "statistical", "--blocking", "dyadic"])
    assert code == 2


def test_verify_certificate_round_trip(tmp_path, capsys):
    out = tmp_path / "claim.json"
    code = main(["extract-gliding-hump", "--claim", "--seq", "canonical_basis", "--horizon", "3000",
                 "--samples", "20", "--out", str(out)])
    assert code == 0
    assert main(["verify-certificate", "--in", str(out)]) == 0
    doc = json.loads(out.read_text())
    text = json.dumps(doc)
    # break the first recorded inequality
    rec = _first_record(doc)
    rec["lhs"], rec["rhs"], rec["relation"] = "1", "0", "<"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["verify-certificate", "--in", str(bad)]) == 10
    report = json.loads(capsys.readouterr().out)
    ff = report["verdicts"]
    assert "first_failure" in json.dumps(ff)
    assert text != bad.read_text()


def _first_record(x):
    if isinstance(x, dict):
        if {"lhs", "rhs", "relation"} <= x.keys():
            return x
        vals = x.values()
    elif isinstance(x, list):
        vals = x
    else:
        return None
    for v in vals:
        r = _first_record(v)
        if r is not None:
            return r
    return None


@pytest.mark.parametrize("argv,code", [(["demo", "nope"], 2), (["cesaro", "--seq", "squares_indicator",
                                                                 "--candidate", "0", "--horizon", "10000"], 0)])
def test_misc_commands(argv, code):
    assert run(argv)[0] == code


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "filterlab", "check-convergence", "--filter", "frechet", "--seq",
                        "alternating", "--mode", "scalar", "--limit", "1"], capture_output=True, text=True)
    assert p.returncode == 10
    assert json.loads(p.stdout)["verdict"] == "Refuted"
