import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES
from relrep.algebra import FULL, FiniteAlgebra, Signature
from relrep.errors import ParseError
from relrep.formats import (
    algebra_from_json, algebra_to_json, dumps, load_algebra, load_partial_group,
    load_representation, loads, partial_group_from_json, partial_group_to_json,
    representation_from_json, representation_to_json,
)
from relrep.relations import Relation, full_algebra
from relrep.representation import Representation, inclusion_representation


def minimal_doc():
    return {"elements": ["u"], "tables": {"compose": [["u"]]}}


def test_minimal_algebra_parses():
    af = algebra_from_json(minimal_doc())
    assert af.algebra.n == 1 and af.algebra.compose == ((0,),)
    assert af.signature is None
    assert load_algebra(FIXTURES / "minimal.alg.json").algebra.constants == {"e": 0}


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d["tables"]["compose"][0].__setitem__(0, "zz"), "tables.compose[0][0]"),
    (lambda d: d.__setitem__("elements", ["u", "u"]), "elements"),
    (lambda d: d.pop("tables"), "<root>"),
    (lambda d: d["tables"].__setitem__("meet", [["u", "u"]]), "tables.meet[0]"),
    (lambda d: d.__setitem__("constants", {"e": "nope"}), "constants.e"),
    (lambda d: d.__setitem__("constants", {"one": "u"}), "constants"),
    (lambda d: d["tables"].__setitem__("converse", {}), "tables"),
    (lambda d: d["tables"].__setitem__("order", [["u"]]), "tables.order[0]"),
    (lambda d: d.__setitem__("signature", ["compose", "spin"]), "signature"),
])
def test_algebra_errors_cite_field(mutate, where):
    doc = minimal_doc()
    mutate(doc)
    with pytest.raises(ParseError) as info:
        algebra_from_json(doc)
    assert info.value.where == where


def test_json_syntax_error_has_position(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "elements": [,]\n}\n')
    with pytest.raises(ParseError) as info:
        load_algebra(p)
    assert info.value.where.endswith(":2:16")  # the stray comma
    with pytest.raises(ParseError):
        load_algebra(tmp_path / "missing.json")


def test_full16_fixture_roundtrips_byte_identically():
    text = (FIXTURES / "full16.alg.json").read_text()
    af = algebra_from_json(loads(text))
    assert dumps(algebra_to_json(af.algebra, af.signature)) == text
    assert af.algebra == full_algebra(2, FULL).algebra
    assert af.signature == FULL


def test_representation_fixture_roundtrip():
    path = FIXTURES / "full16.rep.json"
    text = path.read_text()
    rf = load_representation(path)
    assert rf.algebra_path == "full16.alg.json"
    assert dumps(representation_to_json(rf.representation, rf.algebra_path)) == text
    assert rf.representation == inclusion_representation(full_algebra(2, FULL), FULL)


def test_inline_algebra_roundtrip():
    rep = Representation(FiniteAlgebra([[0]], names=["x"]), 2, [Relation.from_pairs(2, [(1, 0), (0, 1)])],
                         Signature.of())
    doc = representation_to_json(rep)
    assert doc["map"]["x"] == [[0, 1], [1, 0]]
    back = representation_from_json(json.loads(dumps(doc)))
    assert back.representation == rep and back.algebra_path is None


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d["map"].__setitem__("x", [[0, 2]]), "map.x[0]"),
    (lambda d: d["map"].__setitem__("x", [[0]]), "map.x[0]"),
    (lambda d: d["map"].__setitem__("y", []), "map"),
    (lambda d: d.__setitem__("map", {}), "map"),
    (lambda d: d.__setitem__("base_size", 0), "base_size"),
    (lambda d: d.__setitem__("algebra", 3), "algebra"),
    (lambda d: d["algebra"]["tables"]["compose"][0].__setitem__(0, "q"), "algebra.tables.compose[0][0]"),
])
def test_representation_errors_cite_field(mutate, where):
    rep = Representation(FiniteAlgebra([[0]], names=["x"]), 2, [Relation.empty(2)], Signature.of())
    doc = representation_to_json(rep)
    mutate(doc)
    with pytest.raises(ParseError) as info:
        representation_from_json(doc)
    assert info.value.where == where


def test_partial_group_roundtrip():
    path = FIXTURES / "z4-restriction.pg.json"
    text = path.read_text()
    pg = load_partial_group(path)
    assert pg.table == ((0, 1, None), (1, 2, None), (None, None, None))
    assert pg.sqrt == {0, 1}
    assert dumps(partial_group_to_json(pg)) == text
    doc = json.loads(text)
    doc["table"][0][0] = "k"
    with pytest.raises(ParseError) as info:
        partial_group_from_json(doc)
    assert info.value.where == "table[0][0]"


names = st.lists(st.text("abcxyz", min_size=1, max_size=3), min_size=1, max_size=4, unique=True)


@settings(max_examples=100, deadline=None)
@given(names, st.data())
def test_algebra_roundtrip_property(elems, data):
    n = len(elems)
    comp = data.draw(st.lists(st.lists(st.integers(0, n - 1), min_size=n, max_size=n), min_size=n, max_size=n))
    comp_c = data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    order = data.draw(st.lists(st.lists(st.booleans(), min_size=n, max_size=n), min_size=n, max_size=n))
    alg = FiniteAlgebra(comp, names=elems, complement=comp_c, order=order,
                        constants={"e": data.draw(st.integers(0, n - 1))})
    text = dumps(algebra_to_json(alg))
    back = algebra_from_json(json.loads(text)).algebra
    assert back == alg
    assert dumps(algebra_to_json(back)) == text
