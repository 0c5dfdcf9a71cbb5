import json

import pytest

from cubedescent.cli import emit, main, run, table
from cubedescent.complexes import ZComplex
from cubedescent.kweight import nodal_cubic, smooth_doc


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_kd_nodal_table(capsys):
    code, out, _ = call(capsys, "kd", "nodal", "--range", "-2..1")
    assert code == 0
    lines = out.splitlines()
    assert lines[1].split() == ["n", "KD_n", "gr_0", "gr_1"]
    assert lines[3].split() == ["0", "Z^2", "Z^2", "0"]
    assert lines[4].split() == ["-1", "Z", "0", "Z"]
    assert lines[5].split() == ["-2", "0", "0", "0"]


def test_kd_json(capsys):
    code, out, _ = call(capsys, "kd", "nodal.json", "--range", "-2..1", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["exit_code"] == 0
    rows = {r["n"]: r for r in rep["results"]["kd"]["rows"]}
    assert rows[-1]["group"] == {"rank": 1, "torsion": []}
    assert rows[-1]["weights"]["1"]["rank"] == 1
    assert rows[-2]["group"]["rank"] == 0


def test_reports_are_byte_identical():
    a = run(["kd", "nodal", "--format", "json"])[1]
    b = run(["kd", "nodal", "--format", "json"])[1]
    assert a == b
    assert run(["ss", "nodal"])[1] == run(["ss", "nodal"])[1]


def test_digest_tracks_bytes(tmp_path):
    p = tmp_path / "doc.json"
    p.write_text(json.dumps(nodal_cubic().to_json()))
    d1 = run(["kd", str(p), "--format", "json"])[0].inputs[0]["sha256"]
    p.write_text(json.dumps(nodal_cubic().to_json(), indent=2))
    d2 = run(["kd", str(p), "--format", "json"])[0].inputs[0]["sha256"]
    p.write_text(json.dumps(nodal_cubic().to_json()))
    d3 = run(["kd", str(p), "--format", "json"])[0].inputs[0]["sha256"]
    assert d1 != d2 and d1 == d3


def test_validate_bad_document(capsys):
    code, out, _ = call(capsys, "validate", "bad.json")
    assert code == 1
    assert "face 100->{110,101}->111" in out


def test_validate_good_documents(capsys):
    code, out, _ = call(capsys, "validate", "nodal", "cusp", "a1", "blowup_p3")
    assert code == 0 and "invalid" not in out


def test_malformed_json(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{"cube": 1,\n "vertices": ')
    code, out, _ = call(capsys, "kd", str(p))
    assert code == 1 and "line 2" in out


def test_schema_violation_names_location(tmp_path, capsys):
    obj = nodal_cubic().to_json()
    obj["edges"]["10->11"]["f"]["0"] = [[1, 1, 1]]
    p = tmp_path / "doc.json"
    p.write_text(json.dumps(obj))
    code, out, _ = call(capsys, "kd", str(p))
    assert code == 1 and "edges.10->11" in out


def test_wrong_kind(capsys):
    code, out, _ = call(capsys, "blowup", "nodal")
    assert code == 1 and "expected a blowup document" in out


def test_unknown_command(capsys):
    code, _, err = call(capsys, "frobnicate")
    assert code == 1 and "invalid choice" in err


def test_missing_document(capsys):
    assert call(capsys, "kd", "no_such_doc")[0] == 1
    assert call(capsys, "compare", "nodal")[0] == 1


def test_check_axioms_small(capsys):
    code, out, _ = call(capsys, "check-axioms", "--seed", "7", "--max-cube", "2", "--trials", "10")
    assert code == 0 and "product        10/10" in out


def test_blowup_commands(capsys):
    code, out, _ = call(capsys, "blowup", "blowup_p2")
    assert code == 0 and "Z^3     Z^5             Z^2" in out
    code, out, _ = call(capsys, "blowup", "blowup_broken", "--format", "json")
    rep = json.loads(out)
    assert code == 2
    assert {f["property"] for f in rep["failures"]} == {"front_acyclic", "short_exact"}


def test_compare_commands(capsys):
    assert call(capsys, "compare", "nodal", "nodal_inflated", "--range", "-2..1")[0] == 0
    code, out, _ = call(capsys, "compare", "nodal", "cusp", "--format", "json")
    rep = json.loads(out)
    assert code == 2
    assert ["KD", -1] in rep["failures"][0]["witness"]["mismatches"]


def test_kdc_commands(capsys):
    code, out, _ = call(capsys, "kdc", "a1", "--range", "-1..0")
    assert code == 0
    assert [l.split() for l in out.splitlines()[2:4]] == [["0", "Z"], ["-1", "0"]]
    code, out, _ = call(capsys, "kdc", "p1_minus_2pts", "--format", "json")
    rep = json.loads(out)
    assert rep["results"]["compact_support"]["-1"]["rank"] == 1 and rep["results"]["sequence"]["ok"]


def test_ss_nodal_e2_has_two_cells(capsys):
    code, out, _ = call(capsys, "ss", "nodal", "--pages", "2", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    e2 = rep["results"]["pages"][1]
    assert [(e["p"], e["q"]) for e in e2["entries"]] == [(0, 0), (1, 0)]


def test_simple_of_augmented_document(capsys):
    code, out, _ = call(capsys, "simple", "blowup_p2_doc")
    assert code == 0
    code, out, _ = call(capsys, "simple", "nodal")
    assert code == 0 and "Z^2" in out


def test_f2_single_and_corpus(capsys):
    code, out, _ = call(capsys, "f2", "blowup_p2", "blowup_broken", "nodal")
    assert code == 0
    rows = [l.split() for l in out.splitlines()[1:]]
    assert rows[0][-3:] == ["yes", "yes", "yes"]
    assert rows[1][-3:] == ["no", "no", "yes"]
    code, out, _ = call(capsys, "f2", "--format", "json")
    assert code == 0 and len(json.loads(out)["results"]["f2"]) == 50


def test_out_flag(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = call(capsys, "kd", "cusp", "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["results"]["kd"]["name"] == "cuspidal cubic"


def test_torsion_text(tmp_path, capsys):
    c = ZComplex({0: 3, 1: 1}, {1: [[2], [0], [0]]})
    p = tmp_path / "t.json"
    p.write_text(json.dumps(smooth_doc("torsion", c).to_json()))
    code, out, _ = call(capsys, "kd", str(p), "--range", "0..0")
    assert code == 0 and "Z^2 + Z/2" in out


def test_timing_is_opt_in():
    rep, out, _ = run(["kd", "nodal", "--format", "json"])
    assert "timing_seconds" not in json.loads(out)
    rep, out, _ = run(["kd", "nodal", "--format", "json", "--timing"])
    assert "timing_seconds" in json.loads(out)


def test_table_alignment():
    assert table(["a", "bb"], [[1, 2], [333, 4]]) == ["a    bb", "1    2", "333  4"]


def test_emit_trivial_group_json():
    rep, _, _ = run(["kd", "point", "--range", "-1..-1", "--format", "json"])
    js = json.loads(emit(rep, "json"))
    assert js["results"]["kd"]["rows"][0]["group"] == {"rank": 0, "torsion": []}


@pytest.mark.parametrize("bad", ["x", "1", "1..b"])
def test_bad_range(capsys, bad):
    assert call(capsys, "kd", "nodal", "--range", bad)[0] == 1
