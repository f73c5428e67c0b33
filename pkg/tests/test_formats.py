"""JSON 输入格式的读取与校验"""

import copy

import pytest

from equicat.constructions import comma_bk
from equicat.equivariant import GDiagram
from equicat.error_handler import GroupTooLarge, SizeCap, TypeMismatch, UnknownObject, ValidationError
from equicat.fincat import CatDiagram
from equicat.formats import (find_objects, functor_from_json, load_category, load_cospan, load_diagram,
                             load_gcategory, load_group, load_subgroup)

POINT = {
    "objects": ["*"],
    "morphisms": [{"id": "1", "src": "*", "tgt": "*"}],
    "identities": {"*": "1"},
}

ARROW = {
    "objects": ["a", "b"],
    "morphisms": [{"id": "1a", "src": "a", "tgt": "a"},
                  {"id": "1b", "src": "b", "tgt": "b"},
                  {"id": "f", "src": "a", "tgt": "b"}],
    "identities": {"a": "1a", "b": "1b"},
}

TWO_POINTS = {
    "objects": ["x", "y"],
    "morphisms": [{"id": "1x", "src": "x", "tgt": "x"}, {"id": "1y", "src": "y", "tgt": "y"}],
    "identities": {"x": "1x", "y": "1y"},
}

ARROW_DIAGRAM = {
    "name": "X",
    "index": ARROW,
    "vertices": {"a": ARROW, "b": ARROW},
    "edges": {"f": {"objects": {"a": "a", "b": "b"}, "morphisms": {"f": "f"}}},
}

SWAPPED_POINTS = {
    "name": "Y",
    "index": TWO_POINTS,
    "vertices": {"x": POINT, "y": POINT},
    "group": "Z2",
    "action": {"r": {"objects": {"x": "y", "y": "x"}, "morphisms": {"1x": "1y", "1y": "1x"}}},
    "structure": {"r": {"x": {"objects": {"*": "*"}}, "y": {"objects": {"*": "*"}}}},
}


def test_load_group_by_name_and_cap(isolated_config):
    assert load_group("S3").order == 6
    isolated_config.override('caps.group_order', 2)
    with pytest.raises(GroupTooLarge):
        load_group("Z3")


def test_load_subgroup_defaults_to_whole(s3):
    assert load_subgroup(s3, None).is_whole()
    assert load_subgroup(s3, "{e}").is_trivial()


def test_load_plain_diagram_fills_identity_edges():
    X = load_diagram(ARROW_DIAGRAM)
    assert isinstance(X, CatDiagram)
    assert len(X.edge) == 3
    assert X.edge["1a"].obj_map == {"a": "a", "b": "b"}


def test_missing_edge_is_rejected():
    raw = copy.deepcopy(ARROW_DIAGRAM)
    del raw["edges"]["f"]
    with pytest.raises(TypeMismatch):
        load_diagram(raw)


def test_diagram_needs_index():
    with pytest.raises(ValidationError):
        load_diagram({"vertices": {}})


def test_vertex_cap(isolated_config):
    isolated_config.override('caps.vertex_objects', 1)
    with pytest.raises(SizeCap):
        load_diagram(ARROW_DIAGRAM)


def test_load_g_diagram():
    Y = load_diagram(SWAPPED_POINTS)
    assert isinstance(Y, GDiagram)
    assert Y.group.order == 2
    assert Y.action.act_obj(Y.group.index("r"), "x") == "y"


def test_g_diagram_needs_structure_for_every_element():
    raw = copy.deepcopy(SWAPPED_POINTS)
    del raw["structure"]
    with pytest.raises(ValidationError):
        load_diagram(raw)


def test_load_cospan():
    f, g = load_cospan({"A": POINT, "B": ARROW, "C": POINT, "f": {"objects": {"*": "*"}},
                        "g": {"objects": {"a": "*", "b": "*"}, "morphisms": {"f": "1"}}})
    assert f.cod is g.cod
    assert len(comma_bk(f, g).cat.objects) == 2
    with pytest.raises(ValidationError):
        load_cospan({"A": POINT, "B": POINT})


def test_load_gcategory():
    a = load_gcategory({"group": "Z2", "category": TWO_POINTS})
    assert a.stabilizer("x").is_whole()
    with pytest.raises(ValidationError):
        load_gcategory({"category": TWO_POINTS})


def test_functor_from_json_errors():
    A, C = load_category(ARROW), load_category(POINT)
    with pytest.raises(UnknownObject):
        functor_from_json(A, C, {"objects": {"a": "z", "b": "*"}})
    with pytest.raises(TypeMismatch):
        functor_from_json(A, C, {"objects": {"a": "*"}})
    with pytest.raises(TypeMismatch):
        functor_from_json(A, C, {"objects": {"a": "*", "b": "*"}})


def test_find_objects():
    I = load_category(ARROW)
    assert find_objects(I, ["b", "a"]) == ["b", "a"]
    with pytest.raises(UnknownObject):
        find_objects(I, ["z"])
