import json

import pytest

from triposforge.certificate import Certificate
from triposforge.cli import canonical_order, exit_code, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "timing"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


@pytest.mark.parametrize("argv, code", [
    (["check", "supercompactifiable", "localic(chain2)", "--universe", "2"], 0),
    (["check", "supercompactifiable", "trivial(chain2cat)"], 3),
    (["check", "RC", "trivial(square)"], 1),
    (["check", "hyperdoctrine", "localic(diamond)"], 0),
    (["check", "points-wdp", "localic(chain2)", "--budget-competitors", "2"], 4),
    (["check", "downset-completion", "diamond"], 0),
    (["check", "category-laws", "T(localic(chain2))"], 0),
    (["check", "lex-primary", "chain2.json"], 0),
    (["equiv", "comparison_ex", "trivial(C1)"], 0),
    (["equiv", "prefasci-e-fasci", "localic(chain2)"], 0),
    (["equiv", "prefasci-e-fasci", "trivial(C1)"], 3),
    (["complete", "compex", "localic(chain3)"], 0),
    (["demo", "chain3"], 0),
])
def test_exit_codes(capsys, argv, code):
    got, out, _ = run(capsys, *argv)
    assert got == code
    assert out.strip().splitlines()[-1].startswith("verdict:")


@pytest.mark.parametrize("argv, fragment", [
    (["check", "no-such-property", "localic(chain2)"], "unknown property"),
    (["check", "RC", "localic(chain2"], "unbalanced"),
    (["check", "RC", "localic(nowhere)"], "unresolved reference 'nowhere'"),
    (["check", "RC", "chain2"], "not a doctrine"),
    (["demo", "localic(nowhere)"], "unknown library instance"),
    (["check", "RC", "missing.json"], "no built-in instance"),
    (["check", "RC", "localic(chain2)", "--universe", "0"], "budgets must be positive"),
])
def test_usage_errors_exit_2(capsys, argv, fragment):
    code, out, err = run(capsys, *argv)
    assert code == 2 and fragment in err and out == ""


def test_json_report_records_seed_and_budget(capsys):
    code, out, _ = run(capsys, "complete", "T", "localic(chain2)", "--format", "json", "--seed", "11")
    data = json.loads(out)
    assert code == 0 and data["seed"] == 11 and data["universe"] == 2
    (cert,) = data["certificates"]
    assert cert["seed"] == 11
    laws = cert["subs"][0]
    assert laws["seed"] == 11 and laws["checks"]["triples"] == 200


def test_output_is_deterministic(capsys):
    argv = ["demo", "trivial(chain2cat)", "--format", "json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert strip_timing(json.loads(first)) == strip_timing(json.loads(second))


def test_demo_output_is_canonically_ordered(capsys):
    _, out, _ = run(capsys, "demo", "trivial(C1)", "--format", "json")
    certs = json.loads(out)["certificates"]
    keys = [(c["instance"], c["property"]) for c in certs]
    assert keys == sorted(keys) and len(keys) == 7


def test_canonical_order_sorts_by_instance_then_property():
    certs = [Certificate("b", "y"), Certificate("a", "y"), Certificate("z", "x")]
    assert [(c.instance, c.property) for c in canonical_order(certs)] == [("x", "z"), ("y", "a"), ("y", "b")]


def test_exit_code_takes_worst_verdict():
    ok, absent, failed = Certificate("a"), Certificate("b"), Certificate("c")
    absent.fail("none", "absent-at-budget")
    failed.fail("bad")
    assert exit_code([]) == 0
    assert exit_code([ok, absent]) == 3
    assert exit_code([ok, absent, failed]) == 1


def test_report_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "check", "supercompactifiable", "trivial(chain2cat)", "--format", "json")
    path = tmp_path / "report.json"
    path.write_text(out, encoding="utf-8")
    rcode, text, _ = run(capsys, "report", str(path))
    assert rcode == code == 3
    assert text.strip().endswith("verdict: absent-at-budget")
    jcode, again, _ = run(capsys, "report", str(path), "--format", "json")
    assert json.loads(again) == json.loads(out)


def test_report_rejects_garbage(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{}", encoding="utf-8")
    code, _, err = run(capsys, "report", str(path))
    assert code == 2 and "cannot read report" in err


def test_sheafify_prints_closure_table_and_empty_discrepancies(capsys):
    code, out, _ = run(capsys, "sheafify", "localic(chain2)")
    assert code == 0
    assert "closure on" in out and "discrepancies: none" in out and "seed: 0" in out


def test_instance_option_adds_names(capsys, tmp_path):
    inst = {"posets": {"v3": {"elems": ["lo", "mid", "hi"], "leq": [[0, 0], [1, 1], [2, 2], [0, 1], [1, 2], [0, 2]]}}}
    path = tmp_path / "v3.json"
    path.write_text(json.dumps(inst), encoding="utf-8")
    code, out, _ = run(capsys, "check", "tripos", "localic(v3)", "--instance", str(path))
    assert code == 0 and "localic(v3)" in out


def test_instance_file_target_uses_main(capsys, tmp_path):
    inst = {"posets": {"two": {"elems": ["0", "1"], "leq": [[0, 0], [1, 1], [0, 1]]}}, "main": "localic(two)"}
    path = tmp_path / "two.json"
    path.write_text(json.dumps(inst), encoding="utf-8")
    code, out, _ = run(capsys, "check", "existential", str(path))
    assert code == 0 and "localic(two)" in out
    del inst["main"]
    path.write_text(json.dumps(inst), encoding="utf-8")
    code, _, err = run(capsys, "check", "existential", str(path))
    assert code == 2 and "no 'main'" in err
