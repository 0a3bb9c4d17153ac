import json

import pytest
from hypothesis import given

from oracles import posets
from triposforge.completions import PointsCategory
from triposforge.doctrine import Doctrine, ExplicitDoctrine
from triposforge.instances import (LIBRARY_DOCTRINES, Environment, InstanceError, InstanceFile, UnresolvedReference,
                                   builtin_instance, dumps, loads, parse, parse_expr, serialize)
from triposforge.order import FinPoset, find_isomorphism
from triposforge.relational import RegCategory, TCategory


def test_builtin_chain2_loads_semilattice():
    inst = parse(builtin_instance("chain2.json"))
    assert inst.semilattices["chain2"] == FinPoset.chain(2)
    assert inst.main == "L"


@pytest.mark.parametrize("name", ["chain2.json", "chain3.json", "diamond.json"])
def test_builtin_round_trip(name, tmp_path):
    inst = parse(builtin_instance(name))
    out = tmp_path / name
    serialize(inst, out)
    assert parse(out) == inst
    assert dumps(parse(out)) == dumps(inst)


def test_unknown_builtin():
    with pytest.raises(InstanceError, match="no built-in"):
        builtin_instance("nope.json")


@given(posets(5))
def test_poset_stanza_round_trip(p):
    inst = InstanceFile(posets={"p": p})
    assert loads(dumps(inst)) == inst


def test_unresolved_poset_reference_is_named():
    text = json.dumps({"doctrines": {"D": {"kind": "localic", "values": "nope"}}})
    with pytest.raises(UnresolvedReference) as exc:
        loads(text)
    assert exc.value.name == "nope" and "unresolved reference 'nope'" in str(exc.value)
    assert exc.value.stanza == "doctrines" and exc.value.element == "D"


def test_unresolved_category_reference():
    with pytest.raises(UnresolvedReference, match="missing"):
        loads(json.dumps({"categories": {"C": {"poset": "missing"}}}))


def test_antisymmetry_error_names_the_pair():
    text = json.dumps({"posets": {"p": {"elems": ["x", "y"], "leq": [[0, 0], [1, 1], [0, 1], [1, 0]]}}})
    with pytest.raises(InstanceError) as exc:
        loads(text)
    assert "antisymmetric" in str(exc.value) and "'x' and 'y'" in str(exc.value)
    assert (exc.value.stanza, exc.value.element) == ("posets", "p")


@pytest.mark.parametrize("text, fragment", [
    ("[1, 2]", "JSON object"),
    ("{", "invalid JSON"),
    ('{"extras": {}}', "unknown stanzas"),
    ('{"posets": {"p": {"elems": ["x"], "leq": [[0, 3]]}}}', "bad leq pair"),
    ('{"frames": {"m3": {"elems": ["0", "a", "b", "c", "1"], "leq": [[0,0],[1,1],[2,2],[3,3],[4,4],[0,1],[0,2],'
     '[0,3],[0,4],[1,4],[2,4],[3,4]]}}}', "frames/m3"),
    ('{"posets": {"p": {"elems": ["x"], "leq": [[0,0]]}}, "frames": {"p": {"elems": ["x"], "leq": [[0,0]]}}}',
     "name defined twice"),
    ('{"doctrines": {"D": {"kind": "mystery"}}}', "unknown doctrine kind"),
    ('{"budgets": {"b": {"max_fibre": 0}}}', "invalid budget"),
])
def test_located_validation_errors(text, fragment):
    with pytest.raises(InstanceError, match=fragment):
        loads(text)


def test_explicit_doctrine_table_errors_surface_on_load():
    text = json.dumps({
        "posets": {"two": {"elems": ["0", "1"], "leq": [[0, 0], [1, 1], [0, 1]]}},
        "categories": {"c": {"poset": "two"}},
        "doctrines": {"D": {"kind": "explicit", "base": "c", "fibres": {"0": "two", "1": "two"}, "reindex": {}}},
    })
    with pytest.raises(InstanceError, match="doctrines/D"):
        loads(text)


def test_explicit_doctrine_builds():
    ident = [["0", "0"], ["1", "1"]]
    text = json.dumps({
        "posets": {"one": {"elems": ["*"], "leq": [[0, 0]]}, "two": {"elems": ["0", "1"], "leq": [[0, 0], [1, 1], [0, 1]]}},
        "categories": {"c": {"poset": "one"}},
        "doctrines": {"D": {"kind": "explicit", "base": "c", "fibres": {"*": "two"}, "reindex": {"*<=*": ident}}},
        "main": "D",
    })
    d = Environment(loads(text)).main()
    assert isinstance(d, ExplicitDoctrine) and d.name == "D"


def test_parse_reports_missing_file(tmp_path):
    with pytest.raises(InstanceError, match="cannot read"):
        parse(tmp_path / "absent.json")


@pytest.mark.parametrize("text", ["T(compex(localic(chain2)))", "slice(localic(chain3), 1)", "exlex(C1)"])
def test_expression_printing_round_trip(text):
    assert str(parse_expr(text)) == text.replace(" ", "")


@pytest.mark.parametrize("text, fragment", [
    ("localic(chain2", "unbalanced"),
    ("localic(chain2))", "trailing"),
    ("(x)", "expected a name"),
    ("frobnicate(chain2)", "unknown constructor"),
    ("localic(chain2, chain3)", "takes 1 argument"),
    ("localic(C1)", "not a poset"),
    ("T(chain2)", "not a doctrine"),
    ("slice(localic(chain2), 7)", "slice index"),
])
def test_expression_errors(env, text, fragment):
    with pytest.raises(InstanceError, match=fragment):
        env.eval(text)


def test_unresolved_name_in_expression(env):
    with pytest.raises(UnresolvedReference, match="nowhere"):
        env.eval("localic(nowhere)")


def test_expression_values(env):
    assert isinstance(env.eval("localic(chain2)"), Doctrine)
    assert isinstance(env.eval("points(localic(chain2))"), PointsCategory)
    assert isinstance(env.eval("T(localic(chain2))"), TCategory)
    assert isinstance(env.eval("reg(trivial(C1))"), RegCategory)
    assert find_isomorphism(env.eval("downsets(chain2)"), FinPoset.chain(3)) is not None
    assert env.eval("compex(localic(chain2))").name == "compex(localic(chain2))"
    assert env.eval("localic(chain2)") is env.eval("localic( chain2 )")


@pytest.mark.parametrize("expr", LIBRARY_DOCTRINES)
def test_library_doctrines_evaluate(env, expr):
    d = env.eval(expr)
    assert isinstance(d, Doctrine) and d.name == expr


def test_instance_file_names_join_library():
    env = Environment(parse(builtin_instance("diamond.json")))
    assert isinstance(env.main(), Doctrine)
    assert "diamond" in env.inst.ordered()


def test_environment_without_main():
    with pytest.raises(InstanceError, match="no 'main'"):
        Environment().main()
