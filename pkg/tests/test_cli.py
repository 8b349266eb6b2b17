import json

import pytest

from groupoidal.cli import (ModelSyntaxError, TypeMismatch, UnknownCommand,
                            UnresolvedName, build_model, format_report,
                            main, parse_model, run_command, serialize_model)


MODEL = """\
# a small universe of fixtures
finset PT = {x}
finset S2 = {a, b}
finset S3 = {c, d, e}
map p2 : S2 -> PT { a->x, b->x }
map p3 : S3 -> PT { c->x, d->x, e->x }
map aS2 : S2 -> PT { a->x, b->x }
groupoid C2 = cech(p2)
groupoid C3 = cech(p3)
groupoid Z2 = cyclic(2)
groupoid PTG = unit(PT)
action SWAP = right(Z2, aS2) { a|0->a, a|1->b, b|0->b, b|1->a }
bibundle E63 = equiv(p2)
bibundle EQ23 = equiv(p2, p3)
bibundle UZ2 = unit(Z2)
bibundle EQ32 = dual(EQ23)
bibundle RT = compose(EQ23, EQ32)
anafunctor AE = of(EQ23)
simplex T = horn2(EQ23, EQ32)
"""


def test_parse_serialize_round_trip():
    model = parse_model(MODEL)
    assert len(model.declarations) == 18
    text = serialize_model(model)
    assert parse_model(text) == model


def test_parse_errors():
    with pytest.raises(ModelSyntaxError):
        parse_model("finset A = a, b}")
    with pytest.raises(ModelSyntaxError):
        parse_model("widget W = {a}")
    with pytest.raises(ModelSyntaxError):
        parse_model("finset S = {a}\nmap f : S -> S { a }")
    with pytest.raises(ModelSyntaxError) as exc:
        parse_model("finspace X = {a} opens [oops]")
    assert "opens" in str(exc.value)


def test_duplicate_name_rejected():
    with pytest.raises(UnresolvedName):
        parse_model("finset A = {a}\nfinset A = {b}")


def test_build_model_resolves():
    env, kinds = build_model(parse_model(MODEL))
    assert kinds["SWAP"] == "action"
    assert len(env["EQ23"].X) == 6
    assert len(env["RT"].X) == 4
    assert env["T"].n == 2


def test_build_model_missing_map_entry():
    with pytest.raises(ModelSyntaxError) as exc:
        build_model(parse_model(
            "finset PT = {x}\nfinset S = {a, b}\n"
            "map p : S -> PT { a->x }"))
    assert "b" in str(exc.value)


def test_build_model_unresolved_reference():
    with pytest.raises(UnresolvedName):
        build_model(parse_model("groupoid G = cech(nosuch)"))


def test_build_model_type_mismatch():
    with pytest.raises(TypeMismatch):
        build_model(parse_model(
            "finset S = {a}\ngroupoid G = cech(S)"))


def test_finspace_model():
    env, _ = build_model(parse_model(
        'finspace SIER = {0, 1} opens [[], ["1"], ["0", "1"]]'))
    assert env["SIER"].backend == "fintop"
    assert env["SIER"].nbhd["0"] == frozenset(["0", "1"])


def test_validate_command():
    env, kinds = build_model(parse_model(MODEL))
    rep = run_command("validate", ["C2", "SWAP", "EQ23", "p2", "AE", "T"],
                      env, kinds)
    assert rep["status"] == "pass"
    ids = {f["check-id"] for f in rep["findings"]}
    assert {"groupoid-axioms", "action-axioms", "bibundle-axioms",
            "map-is-cover", "simplex-valid"} <= ids
    for f in rep["findings"]:
        assert f["paper-ref"]


def test_compose_and_equiv_commands():
    env, kinds = build_model(parse_model(MODEL))
    rep = run_command("compose", ["EQ23", "EQ32"], env, kinds)
    assert rep["status"] == "pass"
    carrier = next(f for f in rep["findings"]
                   if f["check-id"] == "compose-carrier")
    assert carrier["witness"] == "4"
    rep2 = run_command("equiv", ["EQ23"], env, kinds)
    assert rep2["status"] == "pass"
    rep3 = run_command("equiv", ["C2", "C3"], env, kinds)
    assert rep3["status"] == "pass"


def test_decompose_and_orbit_commands():
    env, kinds = build_model(parse_model(MODEL))
    rep = run_command("decompose", ["UZ2"], env, kinds)
    assert rep["status"] == "pass"
    k = next(f for f in rep["findings"] if f["check-id"] == "decompose-k")
    assert k["witness"] == "(1, 2)"
    rep2 = run_command("orbit", ["SWAP"], env, kinds)
    assert rep2["status"] == "pass"
    base = next(f for f in rep2["findings"] if f["check-id"] == "orbit-base")
    assert base["witness"] == "['a']"


def test_nerve_command():
    env, kinds = build_model(parse_model(MODEL))
    rep = run_command("nerve", ["EQ23", "EQ32"], env, kinds)
    assert rep["status"] == "pass"


def test_axioms_command():
    rep = run_command("axioms", [], backend="finset", max_size=2)
    assert rep["status"] == "pass"


def test_unknown_command():
    with pytest.raises(UnknownCommand):
        run_command("frobnicate", [])


def test_format_report():
    rep = run_command("axioms", [], backend="finset", max_size=2)
    text = format_report(rep)
    assert text.splitlines()[-1] == "status: pass"
    assert "PASS pretopology-axioms" in text


def test_main_exit_codes(tmp_path, capsys):
    model = tmp_path / "m.gpd"
    model.write_text(MODEL)
    assert main(["validate", "C2", "--model", str(model)]) == 0
    out = capsys.readouterr().out
    assert "status: pass" in out
    # unresolved name is an error, exit 2
    assert main(["validate", "NOPE", "--model", str(model)]) == 2
    err = capsys.readouterr().err
    assert "error:" in err


def test_main_failing_report(tmp_path, capsys):
    model = tmp_path / "m.gpd"
    model.write_text("finset PT = {x}\nfinset S = {a, b}\n"
                     "map down : PT -> S { x->a }\n")
    assert main(["validate", "down", "--model", str(model)]) == 1
    out = capsys.readouterr().out
    assert "FAIL map-is-cover" in out


def test_main_json_sidecar(tmp_path, capsys):
    model = tmp_path / "m.gpd"
    model.write_text(MODEL)
    sidecar = tmp_path / "report.json"
    assert main(["compose", "EQ23", "EQ32", "--model", str(model),
                 "--json", str(sidecar)]) == 0
    capsys.readouterr()
    rep = json.loads(sidecar.read_text())
    assert rep["command"] == "compose"
    assert rep["status"] == "pass"
    assert all("paper-ref" in f for f in rep["findings"])


def test_max_size_env(monkeypatch):
    monkeypatch.setenv("GROUPOIDAL_MAX", "2")
    rep = run_command("axioms", [], backend="finset")
    assert rep["status"] == "pass"
