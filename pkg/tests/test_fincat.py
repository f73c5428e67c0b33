"""有限范畴、函子、切片与极限"""

import pytest

from equicat.error_handler import (AssocFailure, MixedDegree, NotLoopFree, TypeMismatch, UnitLawFailure,
                                   UnknownObject, ValidationError, WitnessFailure)
from equicat.fincat import (CatDiagram, DegreeFiltration, Functor, IsoWitness, cat_limit,
                            connected_components, constant_diagram, cospan_index, degree_filtration, discrete_category,
                            enumerate_functors, enumerate_transformations, from_poset, identity_functor,
                            initial_object, over_category, powerset_category, product_category,
                            slice_families, terminal_object, under_category, validate_category)


def arrow():
    return from_poset(["a", "b"], lambda x, y: x == y or (x, y) == ("a", "b"), "[1]")


ARROW_JSON = {
    "objects": ["a", "b"],
    "morphisms": [{"id": "1a", "src": "a", "tgt": "a"},
                  {"id": "1b", "src": "b", "tgt": "b"},
                  {"id": "f", "src": "a", "tgt": "b"}],
    "identities": {"a": "1a", "b": "1b"},
}


def monoid(table):
    """单对象范畴，table 为 [(first, second, result)]"""
    return {
        "objects": ["x"],
        "morphisms": [{"id": m, "src": "x", "tgt": "x"} for m in ("1", "p", "q")],
        "identities": {"x": "1"},
        "compose": [{"first": f, "second": g, "result": h} for f, g, h in table],
    }


def test_validate_arrow_category():
    C = validate_category(ARROW_JSON)
    assert C.objects == ("a", "b")
    assert len(C.morphisms) == 3
    assert C.is_loop_free()
    assert C.nerve_dimension() == 1
    assert C.compose("f", "1a") == "f"


@pytest.mark.parametrize("patch, error", [
    ({"identities": {"a": "1a"}}, UnitLawFailure),
    ({"objects": ["a", "a"]}, ValidationError),
    ({"morphisms": ARROW_JSON["morphisms"] + [{"id": "g", "src": "a", "tgt": "z"}]}, UnknownObject),
    ({"compose": [{"first": "f", "second": "1a", "result": "f"}]}, TypeMismatch),
])
def test_validate_category_errors(patch, error):
    with pytest.raises(error):
        validate_category({**ARROW_JSON, **patch})


def test_missing_composite_is_rejected():
    raw = {
        "objects": ["a", "b", "c"],
        "morphisms": [{"id": f"1{x}", "src": x, "tgt": x} for x in "abc"]
        + [{"id": "f", "src": "a", "tgt": "b"}, {"id": "g", "src": "b", "tgt": "c"}],
        "identities": {x: f"1{x}" for x in "abc"},
    }
    with pytest.raises(TypeMismatch):
        validate_category(raw)


def test_non_associative_table_is_rejected():
    table = [("p", "p", "q"), ("p", "q", "p"), ("q", "p", "p"), ("q", "q", "p")]
    with pytest.raises(AssocFailure):
        validate_category(monoid(table))


def test_idempotent_monoid_is_not_loop_free():
    # 复合结果总是先作用的态射
    table = [("p", "p", "p"), ("p", "q", "p"), ("q", "p", "q"), ("q", "q", "q")]
    C = validate_category(monoid(table))
    assert not C.is_loop_free()
    with pytest.raises(NotLoopFree):
        degree_filtration(C)


def test_category_json_round_trip():
    P = powerset_category([0, 1])
    C = validate_category(P.to_json())
    assert len(C.objects) == 4
    assert len(C.morphisms) == 9
    assert "{0,1}" in C.objects


@pytest.mark.parametrize("variant, objects", [("P", 8), ("P_0", 7), ("P_1", 7)])
def test_powerset_variants(variant, objects):
    C = powerset_category([0, 1, 2], variant)
    assert len(C.objects) == objects
    sizes = [len(U) for U in C.objects]
    assert sizes == sorted(sizes)


def test_powerset_shape():
    P = powerset_category([0, 1, 2])
    assert len(P.morphisms) == 27
    assert P.nerve_dimension() == 3
    assert initial_object(P) == frozenset()
    assert terminal_object(P) == frozenset({0, 1, 2})
    with pytest.raises(ValidationError):
        powerset_category([0], "Q")


def test_cospan_ends():
    I = cospan_index()
    assert terminal_object(I) == "b"
    assert initial_object(I) is None
    assert initial_object(I.opposite()) == "b"
    assert connected_components(discrete_category([1, 2, 3])) == [[1], [2], [3]]
    assert connected_components(I) == [["a", "b", "c"]]


def test_product_category():
    C = product_category(arrow(), arrow())
    assert len(C.objects) == 4
    assert len(C.morphisms) == 9
    assert C.nerve_dimension() == 2


def test_degree_filtration_directions():
    I = cospan_index()
    under = degree_filtration(I, "under")
    assert under.degrees == {"a": 1, "b": 0, "c": 1}
    assert under.to_json()["levels"] == {"0": ["b"], "1": ["a", "c"]}
    over = degree_filtration(I, "over")
    assert over.degrees == {"a": 0, "b": 1, "c": 0}
    assert degree_filtration(powerset_category([0, 1])).degrees[frozenset()] == 2
    assert [x for x in under.up_to(0).objects] == ["b"]
    with pytest.raises(ValidationError):
        degree_filtration(I, "sideways")


def test_over_and_under_categories():
    I = cospan_index()
    over, proj = over_category(identity_functor(I), "b")
    assert len(over.objects) == 3
    assert len(over.morphisms) == 5
    assert terminal_object(over) == ("b", ("b", "b"))
    assert proj.check() is proj
    under, _ = under_category(identity_functor(I), "b")
    assert len(under.objects) == 1
    with pytest.raises(UnknownObject):
        over_category(identity_functor(I), "z")


def test_slice_families():
    I = cospan_index()
    family = slice_families(I, ["a", "c"])
    assert family.members == ("a", "c")
    assert len(family.under.objects) == 4
    assert len(family.strict.objects) == 2
    assert family.inclusion.check() is family.inclusion
    with pytest.raises(MixedDegree):
        slice_families(I, ["a", "b"])


def test_enumerate_functors():
    C = arrow()
    assert len(list(enumerate_functors(C, C))) == 3
    assert len(list(enumerate_functors(C, discrete_category([0, 1])))) == 2
    assert len(list(enumerate_functors(C, C, limit=1))) == 1
    for F in enumerate_functors(C, powerset_category([0, 1])):
        F.check()


def test_enumerate_transformations():
    C = arrow()
    ident = identity_functor(C)
    assert len(list(enumerate_transformations(ident, ident))) == 1
    const_a = Functor(C, C, {"a": "a", "b": "a"}, {m: ("a", "a") for m in C.morphisms})
    const_b = Functor(C, C, {"a": "b", "b": "b"}, {m: ("b", "b") for m in C.morphisms})
    assert list(enumerate_transformations(const_a, const_b)) == [(("a", "b"), ("a", "b"))]
    assert list(enumerate_transformations(const_b, const_a)) == []


def test_functor_check_rejects_bad_endpoints():
    C = arrow()
    bad = Functor(C, C, {"a": "b", "b": "a"}, {m: m for m in C.morphisms}, "bad")
    with pytest.raises(TypeMismatch):
        bad.check()


def test_cat_limit_products_and_constants():
    C = arrow()
    L, projections = cat_limit(constant_diagram(discrete_category([0, 1]), C))
    assert len(L.objects) == 4
    assert len(L.morphisms) == 9
    assert projections[0].check() is projections[0]
    L, _ = cat_limit(constant_diagram(C, C))
    assert len(L.objects) == 2
    assert len(L.morphisms) == 3


def test_diagram_identity_edge_must_be_identity():
    I = arrow()
    D = discrete_category([0, 1])
    swap = Functor(D, D, {0: 1, 1: 0}, {(0, 0): (1, 1), (1, 1): (0, 0)}, "swap")
    ident = identity_functor(D)
    edge = {("a", "a"): swap, ("a", "b"): ident, ("b", "b"): ident}
    with pytest.raises(UnitLawFailure):
        CatDiagram(I, {"a": D, "b": D}, edge).check()


def test_iso_witness():
    C = arrow()
    ident = identity_functor(C)
    witness = IsoWitness(C, C, ident, ident).verify()
    assert witness.ledger["verified"]
    const_a = Functor(C, C, {"a": "a", "b": "a"}, {m: ("a", "a") for m in C.morphisms})
    with pytest.raises(WitnessFailure):
        IsoWitness(C, C, const_a, ident).verify()


def test_left_finite_flag_follows_degrees():
    I = cospan_index()
    under = degree_filtration(I, "under")
    assert under.left_finite
    assert under.to_json()["left_finite"]
    assert degree_filtration(I, "over").left_finite
    flat = DegreeFiltration(I, "under", {"a": 0, "b": 0, "c": 0})
    assert not flat.left_finite
    assert not DegreeFiltration(I, "under", {"a": 5, "b": 0, "c": 1}).left_finite
