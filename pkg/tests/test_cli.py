import json
import os
import subprocess
import sys

import pytest

from dispcat import fixtures as fx
from dispcat.cli import corpus_files, run
from dispcat.displayed import constant_display, slice_display
from dispcat.dsl import parse_files
from dispcat.fibrations import classify_fibration
from dispcat.report import Report
from dispcat.univalence import is_univalent_display, sip_univalence_check

BAD_CATEGORY = """\
category Bad
  obj a
  mor e : a -> a
  mor k : a -> a
  comp e e = k
  comp e k = k
  comp k e = e
  comp k k = k
end
"""


def stable(report: Report) -> dict:
    d = report.to_dict()
    d.pop("timing")
    return d


@pytest.mark.parametrize("argv,code", [
    (["check"], 0),
    (["fibration", "--display", "Slice_Div12"], 0),
    (["fibration", "--display", "ParallelCollapse"], 1),
    (["univalence", "--display", "ConstWIso"], 1),
    (["limits", "--diagram", "Prod46"], 0),
    (["limits", "--diagram", "NoProduct"], 1),
    (["compcat", "--cwa", "DivCwA"], 0),
    (["compcat", "--cwa", "SquashCwA", "--counterexamples"], 1),
    (["amnestic", "--functor", "Bang_WIso"], 1),
    (["limits", "--diagram", "Missing"], 2),
    (["frobnicate"], 2),
    ([], 2),
])
def test_exit_codes(argv, code):
    assert run(argv)[1] == code


def test_check_corpus_details():
    report, code, _ = run(["check", "--mutations"])
    assert code == 0
    assert report.details["checked"]["display"] >= 10
    assert report.details["mutants"]["Div12"] == 170


def test_fibration_reports_weak_fibration():
    report, _, _ = run(["fibration", "--display", "Slice_Div12"])
    assert report.details["weak_fibration"] is True


def test_univalence_witness_is_an_iso():
    report, _, _ = run(["univalence", "--display", "ConstWIso"])
    assert report.findings[0].code == "fibre-not-gaunt"
    assert report.witness[1:] == ("i", "j")


def test_verdicts_match_library():
    ws = parse_files(corpus_files())
    assert ws.displays["Slice_Two"] == slice_display(fx.two())
    assert ws.displays["ConstWIso"] == constant_display(fx.div12(), fx.walking_iso())
    pairs = [
        (["fibration", "--display", "Slice_Two"], classify_fibration(ws.displays["Slice_Two"])),
        (["univalence", "--display", "ConstTwo"], is_univalent_display(ws.displays["ConstTwo"])),
        (["sip", "--structure", "Loose2"], sip_univalence_check(ws.structures["Loose2"])),
    ]
    for argv, lib in pairs:
        report = run(argv)[0]
        assert report.verdict == lib.verdict
        assert report.findings == lib.findings


def test_json_schema_and_round_trip():
    _, _, text = run(["--json", "sip", "--structure", "Magma"])
    data = json.loads(text)
    assert data["schema"] == 1
    assert data["verdict"] == "pass"
    assert Report.from_json(text).to_dict() == data


def test_reports_stable_across_runs():
    argv = ["fibration", "--display", "Arrow_Two", "--json"]
    a, b = run(argv)[0], run(argv)[0]
    assert stable(a) == stable(b)
    assert a.to_json(timing=False) == b.to_json(timing=False)


def test_emit_writes_reparseable_declarations(tmp_path):
    out = tmp_path / "fibre.dc"
    report, code, _ = run(["fibre", "--display", "Slice_Div12", "--at", "6", "--emit", str(out)])
    assert code == 0
    ws = parse_files([out])
    assert set(ws.categories["Fibre_Slice_Div12_6"].objects) == {"d1_6", "d2_6", "d3_6", "id_6"}
    report2, code2, _ = run(["check", "--no-corpus", str(out)])
    assert code2 == 0


def test_parse_error_reports_span(tmp_path):
    bad = tmp_path / "bad.dc"
    bad.write_text("category X\n  obj a\n  mor f : a -> b\nend\n")
    report, code, text = run(["check", "--no-corpus", "--json", str(bad)])
    assert code == 2
    finding = json.loads(text)["findings"][0]
    assert finding["code"] == "UnresolvedReference"
    assert finding["span"] == f"{bad}:3:16"


def test_fail_fast_on_unlawful_input(tmp_path):
    bad = tmp_path / "bad.dc"
    bad.write_text(BAD_CATEGORY)
    report, code, _ = run(["check", "--no-corpus", str(bad)])
    assert code == 1
    assert report.findings[0].code == "associativity"
    report, code, _ = run(["univalence", "--category", "Bad", "--no-corpus", str(bad)])
    assert code == 2
    assert report.findings[0].code == "invalid-workspace"
    assert report.findings[0].span.endswith("bad.dc:1:10")


def test_bound_is_enforced_and_scoped(monkeypatch):
    monkeypatch.delenv("DISPCAT_BOUND", raising=False)
    report, code, _ = run(["creates", "--display", "Alg_Gcd6", "--shape", "Cospan", "--bound", "5"])
    assert code == 2
    assert report.findings[0].code == "ResourceLimit"
    assert "DISPCAT_BOUND" not in os.environ
    assert run(["creates", "--display", "Alg_Gcd6", "--shape", "Cospan"])[1] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dispcat", "lifts", "--display", "Slice_Div12", "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["details"]["cleavings"] == 1
