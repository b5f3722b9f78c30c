import json

import pytest

from hyperholo.cli import COMMANDS, main, run
from hyperholo.courant import Section
from hyperholo.endo import nijenhuis
from hyperholo.errors import ConstructionError, SchemaError, UnresolvedReference
from hyperholo.fixtures import nonint
from hyperholo.scalars import parse
from hyperholo.scene import bundled_scenes, load_scene, scene_from_dict

SCENES = bundled_scenes()

MINIMAL = {
    "schema": 1,
    "name": "R2",
    "chart": ["x0", "x1"],
    "tangent_endos": {"j": [["0", "-1"], ["1", "0"]]},
    "endos": {"J": {"lift": "j"}},
    "checks": [{"command": "verify-axioms", "args": []}],
}


def write(tmp_path, doc, name="scene.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_all_bundled_scenes_are_listed():
    assert len(SCENES) == 13
    assert {"flatq.json", "nonint.json", "hpt.json", "twist_c3_neg.json"} <= set(SCENES)


@pytest.mark.parametrize("name", SCENES)
def test_report_all_meets_every_expectation(name):
    code, doc = run("report-all", name, timing=False)
    assert code == 0, [c["name"] for c in doc["report"]["checks"] if c["status"] != "pass"]


def test_sphere_command_emits_the_matrix():
    code, doc = run("sphere", "flatq.json", ["3/5", "4/5", "0"], timing=False)
    assert code == 0
    rows = doc["result"]["matrix"]
    assert rows[0][:3] == ["0", "-3/5", "-4/5"]
    assert len(rows) == 8


def test_nonint_hypercomplex_check_fails_with_witness():
    code, doc = run("check-hypercomplex", "nonint.json", ["I", "J", "K"], timing=False)
    assert code == 1
    failed = [c for c in doc["report"]["checks"] if c["status"] == "fail"]
    assert failed and all("witness" in c for c in failed)


def test_serialized_witness_reparses():
    code, doc = run("nijenhuis", "nonint.json", ["I", "I"], timing=False)
    assert code == 1
    w = doc["report"]["checks"][0]["witness"]
    a, b = (int(t) for t in w["pair"].split(","))
    fx = nonint()
    B = fx.backend
    value = Section(B, [parse(t, B.vars) for t in w["value"]["vec"] + w["value"]["form"]])
    I = fx.triple.I
    assert value == nijenhuis(I, I, Section.basis(B, a), Section.basis(B, b))


def test_verify_axioms_on_a_minimal_scene(tmp_path):
    path = write(tmp_path, MINIMAL)
    assert run("verify-axioms", path, timing=False)[0] == 0
    assert run("check-complex", path, ["J"], timing=False)[0] == 0
    assert run("report-all", path, timing=False)[0] == 0


def test_unknown_identifier_is_an_input_error(tmp_path):
    doc = json.loads(json.dumps(MINIMAL))
    doc["tangent_endos"]["j"][0][1] = "-1 + z"
    code, out = run("verify-axioms", write(tmp_path, doc), timing=False)
    assert code == 2
    assert out["status"] == "input-error"
    assert "'z'" in out["error"]["message"]


def test_non_closed_twist_is_an_input_error(tmp_path):
    doc = {"schema": 1, "name": "bad", "chart": ["x0", "x1", "x2", "x3"], "twist": {"comps": {"0,1,2": "x3"}}}
    code, out = run("verify-axioms", write(tmp_path, doc), timing=False)
    assert code == 2 and out["error"]["type"] == "ConstructionError"
    with pytest.raises(ConstructionError):
        scene_from_dict(doc)
    doc["twist"] = {"comps": {"0,1,2": "x0"}}
    assert run("verify-axioms", write(tmp_path, doc), timing=False)[0] == 0
    doc["twist"] = {"0,1,2": "x0"}
    with pytest.raises(SchemaError):
        scene_from_dict(doc)


def test_schema_errors(tmp_path):
    with pytest.raises(SchemaError):
        scene_from_dict(dict(MINIMAL, extra=1))
    with pytest.raises(SchemaError):
        scene_from_dict(dict(MINIMAL, schema=2))
    with pytest.raises(UnresolvedReference):
        scene_from_dict(dict(MINIMAL, endos={"J": {"lift": "nope"}})).validate()
    assert run("verify-axioms", str(tmp_path / "missing.json"), timing=False)[0] == 2
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    assert run("verify-axioms", str(bad), timing=False)[0] == 2


def test_unknown_command_and_name():
    assert run("frobnicate", "flatq.json", timing=False)[0] == 2
    assert run("check-complex", "flatq.json", ["Q"], timing=False)[0] == 2
    assert len(COMMANDS) == 17


def test_main_exit_codes_and_output(tmp_path, capsys):
    assert main(["verify-axioms", "flatq.json", "--no-timing"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "pass" and "seconds" not in out
    assert main(["--bogus", "verify-axioms", "flatq.json"]) == 2
    assert main(["verify-axioms"]) == 2
    capsys.readouterr()
    assert main(["--fixtures"]) == 0
    assert capsys.readouterr().out.split() == SCENES
    target = tmp_path / "out.json"
    assert main(["torsion", "nonint.json", "--out", str(target)]) == 1
    assert json.loads(target.read_text())["status"] == "fail"


def test_reports_are_deterministic():
    first = run("report-all", "flatq_b.json", timing=False)[1]
    second = run("report-all", "flatq_b.json", timing=False)[1]
    assert json.dumps(first) == json.dumps(second)
    assert "seconds" in run("verify-axioms", "hpt.json")[1]


def test_witness_limit_truncates():
    _, doc = run("nijenhuis", "nonint.json", ["I", "I"], timing=False, witness_limit=1)
    assert doc["status"] == "fail"


def test_load_scene_resolves_bundled_names():
    scene = load_scene("c2lag.json")
    assert scene.name == "C2LAG"
