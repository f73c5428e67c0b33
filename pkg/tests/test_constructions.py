"""Grothendieck 构造、Hom 范畴、匹配函子与各类见证"""

import pytest

from equicat.constructions import (brute_force_families, comma_bk, cylinder_diagram,
                                   fixed_grothendieck_witness, functor_certificate, grothendieck,
                                   hom_category, hpb_certificate, indgrot_witness, m_over, matching_functor,
                                   overcat_diagram, quillen_b_base, reedy_quasi_fibrant,
                                   total_fiber_model, twisted_limit_witness)
from equicat.equivariant import powerset_action
from equicat.error_handler import IndexMismatch, InvalidTransformation, SizeCap, ValidationError
from equicat.fincat import (CatDiagram, Functor, check_category, constant_diagram, cospan_index,
                            discrete_category, from_poset, functor_from_callables, identity_functor,
                            inclusion_functor, powerset_category, terminal_category)
from equicat.gsets import regular_gset
from equicat.instances import (make_rng, random_gdiagram_pair, random_iso_diagram, regular_z2_cube,
                               support_gdiagram)


def arrow(name="[1]"):
    return from_poset(["a", "b"], lambda x, y: x == y or (x, y) == ("a", "b"), name)


@pytest.fixture
def constant_arrow():
    """[1] 上的常值图，顶点都是 [1]"""
    return constant_diagram(arrow("I"), arrow("C"), "X")


@pytest.fixture
def split_arrow():
    """X_a 为两点离散范畴，X_b 为 [1]，边把两点分开送到两端"""
    I, D, C = arrow("I"), discrete_category([0, 1]), arrow("C")
    edge = Functor(D, C, {0: "a", 1: "b"}, {(0, 0): ("a", "a"), (1, 1): ("b", "b")}, "split")
    return CatDiagram(I, {"a": D, "b": C},
                      {("a", "a"): identity_functor(D), ("a", "b"): edge, ("b", "b"): identity_functor(C)},
                      "Y").check()


def test_grothendieck_of_constant_diagram_is_product(constant_arrow):
    total, action = grothendieck(constant_arrow)
    assert action is None
    assert len(total.objects) == 4
    assert len(total.morphisms) == 9
    check_category(total)


def test_grothendieck_of_regular_cube_carries_action():
    X = regular_z2_cube()
    total, action = grothendieck(X)
    assert len(total.objects) == 8
    assert action.check() is action


@pytest.mark.parametrize("subgroup", ["whole", "trivial"])
def test_fixed_grothendieck_witness(subgroup):
    X = regular_z2_cube()
    witness = fixed_grothendieck_witness(X, getattr(X.group, subgroup)())
    assert witness.ledger["verified"]
    assert witness.ledger["subgroup"] == getattr(X.group, subgroup)().label


def test_hom_category_counts(constant_arrow):
    hom = hom_category(constant_arrow, constant_arrow)
    assert len(hom.cat.objects) == 3
    assert len(hom.cat.morphisms) == 6
    assert brute_force_families(constant_arrow, constant_arrow) == 3
    assert brute_force_families(cylinder_diagram(constant_arrow), constant_arrow) == 6
    check_category(hom.cat)
    assert hom.to_json()["objects"] == 3


def test_hom_category_rejects_different_index(constant_arrow):
    other = constant_diagram(discrete_category(["a", "b"]), arrow("C"))
    with pytest.raises(IndexMismatch):
        hom_category(constant_arrow, other)


def test_hom_category_candidate_cap(isolated_config, constant_arrow):
    isolated_config.override('caps.hom_candidates', 2)
    with pytest.raises(SizeCap):
        hom_category(constant_arrow, constant_arrow)


def test_hom_category_of_cube_has_fixed_identity():
    X = regular_z2_cube()
    hom = hom_category(X, X)
    assert hom.action is not None
    n = hom.require({i: identity_functor(X.diagram.vertex[i]) for i in X.index.objects})
    fixed, _ = hom.fixed(X.group.whole())
    assert n in fixed.objects
    with pytest.raises(ValidationError):
        hom_category(X.diagram, X.diagram).fixed(X.group.whole())


def test_overcategory_diagrams():
    I = arrow("I")
    D = overcat_diagram(I)
    assert [len(D.vertex[i].objects) for i in I.objects] == [1, 2]
    assert D.check() is D
    assert len(m_over(identity_functor(I), "b").objects) == 2
    X = regular_z2_cube()
    GD = overcat_diagram(X.action)
    assert GD.group is X.group
    assert len(GD.structure) == 8


def test_matching_functors(constant_arrow):
    m_a = matching_functor(constant_arrow, "a")
    assert len(m_a.cod.objects) == 2
    assert m_a.is_isomorphism()
    m_b = matching_functor(constant_arrow, "b")
    assert len(m_b.cod.objects) == 1


@pytest.mark.parametrize("members", [["a"], ["b"]])
def test_indgrot_witness_on_constant_diagram(constant_arrow, members):
    witness = indgrot_witness(constant_arrow, members)
    assert witness.ledger["members"] == members
    assert witness.ledger["verified"]


def test_indgrot_witness_on_cospan():
    X = constant_diagram(cospan_index(), arrow("C"))
    witness = indgrot_witness(X, ["a", "c"])
    assert witness.ledger["members"] == ["a", "c"]


def test_equivariant_indgrot_on_regular_cube():
    X = regular_z2_cube()
    witness = indgrot_witness(X, [frozenset({0}), frozenset({1})], equivariant=True)
    assert witness.ledger["equivariant"] == X.group.whole().label


def test_twisted_limit_witness(z2):
    K, X = random_gdiagram_pair(make_rng(0), z2)
    witness = twisted_limit_witness(K, X)
    assert witness.ledger["group"] == 2
    assert witness.ledger["twisted_objects"] == 4


def test_comma_models_agree():
    C = arrow("C")
    ident = identity_functor(C)
    model = comma_bk(ident, ident)
    assert len(model.cat.objects) == 5
    assert model.hom_witness.ledger["verified"]
    assert model.grothendieck_witness.ledger["verified"]
    assert model.to_json()["objects"] == 5


def test_comma_requires_common_codomain():
    with pytest.raises(IndexMismatch):
        comma_bk(identity_functor(arrow()), identity_functor(arrow()))


def test_functor_certificates():
    C = arrow()
    assert functor_certificate(identity_functor(C)) == "isomorphism"
    top = C.full_subcategory(["b"], "b")
    assert functor_certificate(inclusion_functor(top, C)) == "left_adjoint"
    collapse = functor_from_callables(C, terminal_category(), lambda x: "*", lambda m: ("*", "*"))
    assert functor_certificate(collapse) == "right_adjoint"
    P = powerset_category(range(3))
    circle = P.full_subcategory([U for U in P.objects if 0 < len(U) < 3])
    to_point = functor_from_callables(circle, terminal_category(), lambda x: "*", lambda m: ("*", "*"))
    assert functor_certificate(to_point) is None


def test_constant_diagram_is_quasi_fibrant(constant_arrow):
    report = reedy_quasi_fibrant(constant_arrow)
    assert report.verdict == "PASS"
    assert len(report.checks) == 1
    assert report.checks[0].obj == "a"


def test_split_diagram_is_not_quasi_fibrant(split_arrow):
    report = reedy_quasi_fibrant(split_arrow)
    assert report.verdict == "FAIL"
    failure = report.failures()[0]
    assert failure.obj == "a"
    assert failure.failing_degree == 0
    assert report.to_json()["verdict"] == "FAIL"


@pytest.fixture
def zigzag_cone():
    """X_a 是折线 x → y ← z → w 加上最大元 t，边把 t 送到 b、其余送到 a"""
    I, C = arrow("I"), arrow("C")
    order = {("x", "y"), ("z", "y"), ("z", "w")}
    D = from_poset(["x", "y", "z", "w", "t"], lambda p, q: p == q or (p, q) in order or q == "t", "D")
    side = {x: "b" if x == "t" else "a" for x in D.objects}
    edge = functor_from_callables(D, C, lambda x: side[x], lambda m: (side[m[0]], side[m[1]]))
    return CatDiagram(I, {"a": D, "b": C},
                      {("a", "a"): identity_functor(D), ("a", "b"): edge, ("b", "b"): identity_functor(C)},
                      "Z").check()


def test_homology_only_comparison_is_inconclusive(zigzag_cone):
    # 折线 → 锥 是同调等价，但两侧都没有伴随证书
    report = reedy_quasi_fibrant(zigzag_cone)
    assert len(report.checks) == 1
    check = report.checks[0]
    assert check.obj == "a"
    assert check.certificate == "homology"
    assert check.verdict == "INCONCLUSIVE"
    assert report.verdict == "INCONCLUSIVE"
    assert not report.failures()


def test_quasi_fibrancy_modes(constant_arrow):
    with pytest.raises(ValidationError):
        reedy_quasi_fibrant(constant_arrow, mode="sideways")
    with pytest.raises(ValidationError):
        reedy_quasi_fibrant(constant_arrow, mode="equivariant")


def test_equivariant_quasi_fibrancy_of_top_cube():
    # m_∅ 落在 Hom 的最大元上，其余 Φ 的逗号范畴为空
    report = reedy_quasi_fibrant(regular_z2_cube(), mode="equivariant")
    assert report.verdict == "FAIL"
    failing = {(c.obj, c.subgroup) for c in report.failures()}
    assert ("{}", "{e}") in failing
    assert ("{}", "{e,r}") in failing
    assert all(c.failing_degree == 0 for c in report.failures() if c.obj == "{}")


def bottom_cube(z2):
    """与 regular_z2_cube 相同，但 * 在每个顶点的底部"""
    J = regular_gset(z2)
    a = powerset_action(J)
    return support_gdiagram(a.cat, a, J, lambda U: frozenset(U), "bottom", "X")


def test_top_cube_fibers_are_not_all_points():
    certificate = hpb_certificate(regular_z2_cube())
    assert not certificate["certified"]
    assert len(certificate["fibers"]) == 4
    assert sum(f["point"] for f in certificate["fibers"]) == 1


def test_total_fibers_of_bottom_cube(z2):
    X = bottom_cube(z2)
    certificate = hpb_certificate(X)
    assert certificate["certified"]
    assert len(certificate["fibers"]) == 5
    model = total_fiber_model(X, 0)
    assert model.stabilizer is not None
    assert model.homology().is_point()
    with pytest.raises(InvalidTransformation):
        total_fiber_model(X, 10 ** 6)


def test_quillen_b_base():
    assert quillen_b_base(random_iso_diagram(make_rng(3)))["verdict"] == "PASS"
    assert quillen_b_base(constant_diagram(arrow("I"), arrow("C")))["verdict"] == "PASS"


def test_quillen_b_base_requires_isomorphisms(split_arrow):
    with pytest.raises(ValidationError):
        quillen_b_base(split_arrow)
