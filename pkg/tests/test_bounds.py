"""扩展整数与各个连通度界"""

from itertools import product

import pytest

from equicat.bounds import (INF, NEG_INF, POINT, CocartData, ConnFunction, ExtInt, ObjectTable,
                            PointTable, VertexConn, bm_bound, bm_value, classical_range, configuration_bound,
                            dual_bm_bound, dual_bm_value, holim_connectivity_bound,
                            mapping_space_connectivity_bound, overcat_mapping_data, pi0_condition,
                            restriction_connectivity_bound, submanifold_bound, suspension_closed_form,
                            suspension_via_bm)
from equicat.equivariant import trivial_action
from equicat.error_handler import (DimensionMismatch, InfinityClash, MissingEntry, MonotonicityViolation,
                                   ValidationError)
from equicat.fincat import from_poset
from equicat.groups import standard_group, subgroup_lattice
from equicat.gsets import coset_gset, disjoint_union, regular_gset, trivial_gset
from equicat.instances import (SMALL_GROUPS, cone_index, make_rng, random_cocart, random_conn,
                               random_gset, random_vertex_conn)


# ---------------------------------------------------------------- ExtInt

def test_extint_arithmetic():
    assert ExtInt(2) + 3 == 5
    assert INF + 7 == INF
    assert NEG_INF - 1 == NEG_INF
    assert INF * 0 == 0
    assert ExtInt(3) * 2 + 1 == 7
    assert min(INF, ExtInt(4)) == 4
    with pytest.raises(InfinityClash):
        INF + NEG_INF


@pytest.mark.parametrize("raw, expected", [("inf", INF), ("+inf", INF), ("-inf", NEG_INF), ("∞", INF),
                                           ("5", ExtInt(5)), (-2, ExtInt(-2))])
def test_extint_parse(raw, expected):
    assert ExtInt.parse(raw) == expected


@pytest.mark.parametrize("raw", [1.5, "abc", True, None])
def test_extint_rejects(raw):
    with pytest.raises(ValidationError):
        ExtInt.parse(raw)


def test_extint_json():
    assert INF.to_json() == "+inf"
    assert NEG_INF.to_json() == "-inf"
    assert ExtInt(3).to_json() == 3


# ---------------------------------------------------------------- 连通度函数与表

def test_conn_function_routes_by_class(s3):
    lattice = subgroup_lattice(s3)
    order_two = [S for S in lattice.subgroups if S.order == 2]
    conn = ConnFunction.from_mapping(lattice, {"e": 0, order_two[1].label: 2, "G": 5,
                                               lattice.subgroups[-2].label: 1})
    assert {conn(S) for S in order_two} == {ExtInt(2)}
    assert conn(s3.whole()) == 5


def test_conn_function_missing_class(s3):
    with pytest.raises(MissingEntry):
        ConnFunction.from_mapping(subgroup_lattice(s3), {"e": 0, "G": 1})


def test_cocart_monotonicity_violation(trivial_points):
    J = trivial_points(2)
    e = J.group.trivial()
    nu = CocartData(J, {(frozenset({0}), e.members): 3, (frozenset({1}), e.members): 0,
                        (frozenset({0, 1}), e.members): 1})
    with pytest.raises(MonotonicityViolation):
        nu.check_monotone()


def test_cocart_json_keys(z2_regular, z2):
    data = {"3": {"G": 4, "e": 5}, "{e}": {"e": 1}, "2": {"e": 1}}
    nu = CocartData.from_json(z2_regular, data)
    assert nu.value(frozenset({0, 1}), z2.whole()) == 4
    assert nu.value(frozenset({0}), z2.trivial()) == 1
    with pytest.raises(MissingEntry):
        nu.value(frozenset({1}), z2.whole())


def test_random_tables_are_conjugation_compatible(s3):
    rng = make_rng(3)
    J = coset_gset(s3, next(S for S in subgroup_lattice(s3).subgroups if S.order == 2))
    random_cocart(rng, J).check_conjugation().check_monotone()
    random_vertex_conn(rng, J).check_conjugation()


# ---------------------------------------------------------------- 构形空间界

def test_configuration_bound_sharp_example(z2):
    lattice = subgroup_lattice(z2)
    J = regular_gset(z2)
    m = ConnFunction.from_mapping(lattice, {"e": 2, "G": 1})
    result = configuration_bound(J, m, ConnFunction.constant(lattice, 0))
    assert result(z2.whole()) == -1
    assert result(z2.trivial()) == 1
    assert result.first_terms(z2.whole()) == 1
    assert result.second_terms(z2.whole()) == -1
    assert result.witnesses[z2.whole().label]["L"] == "{e}"


def test_configuration_is_submanifold_with_point_dimensions():
    rng = make_rng(11)
    for _ in range(100):
        G = standard_group(rng.choice(SMALL_GROUPS))
        J = random_gset(rng, G, max_points=4)
        m, connM = random_conn(rng, G), random_conn(rng, G)
        conf = configuration_bound(J, m, connM).function
        sub = submanifold_bound(J, m, PointTable.constant(J, 0), connM).function
        assert conf == sub


def test_submanifold_dimension_mismatch(z2_regular, z2):
    lattice = subgroup_lattice(z2)
    with pytest.raises(DimensionMismatch):
        submanifold_bound(z2_regular, ConnFunction.constant(lattice, 1), PointTable.constant(z2_regular, 2),
                          ConnFunction.constant(lattice, 0))


# ---------------------------------------------------------------- 悬挂

@pytest.mark.parametrize("a, b", list(product(range(4), repeat=2)))
def test_suspension_regular_z2_by_hand(z2, a, b):
    conn = ConnFunction(subgroup_lattice(z2), [a, b])
    J = regular_gset(z2)
    assert suspension_closed_form(z2, J, conn) == min(2 * b + 1, a)
    assert suspension_via_bm(z2, J, conn)(z2.whole()) == min(2 * b + 1, a)


def test_suspension_trivial_action(z3):
    conn = ConnFunction(subgroup_lattice(z3), [1, 2])
    J = trivial_gset(z3, 3)
    assert suspension_closed_form(z3, J, conn) == 5
    assert suspension_via_bm(z3, J, conn)(z3.whole()) == 5


@pytest.mark.parametrize("name", SMALL_GROUPS)
def test_suspension_coherence_sampled(name):
    G = standard_group(name)
    rng = make_rng(len(name))
    for _ in range(25):
        J = random_gset(rng, G, max_orbits=6)
        conn = random_conn(rng, G, 0, 4)
        assert suspension_via_bm(G, J, conn)(G.whole()) == suspension_closed_form(G, J, conn)


@pytest.mark.parametrize("value", [0, 2])
def test_suspension_on_six_points(s3, z2, value):
    regular = regular_gset(s3)
    conn = ConnFunction.constant(subgroup_lattice(s3), value)
    assert regular.size == 6
    assert suspension_closed_form(s3, regular, conn) == value
    assert suspension_via_bm(s3, regular, conn)(s3.whole()) == value
    three_orbits = disjoint_union(disjoint_union(regular_gset(z2), regular_gset(z2)), trivial_gset(z2, 2))
    conn2 = ConnFunction.constant(subgroup_lattice(z2), value)
    assert three_orbits.size == 6
    assert suspension_via_bm(z2, three_orbits, conn2)(z2.whole()) == suspension_closed_form(z2, three_orbits, conn2)


def test_suspension_negative_connectivity_warns(z2):
    conn = ConnFunction(subgroup_lattice(z2), [-1, 0])
    result = suspension_via_bm(z2, regular_gset(z2), conn)
    assert "NegativeConnectivity" in result.warnings


# ---------------------------------------------------------------- Blakers–Massey

@pytest.mark.parametrize("a, b", [(a, b) for a in range(4) for b in range(4) if a <= b])
def test_bm_two_points_trivial_group(trivial_points, a, b):
    J = trivial_points(2)
    e = J.group.trivial()
    nu = CocartData.from_callable(J, lambda U, L: a if len(U) == 1 else b)
    vc = VertexConn.from_callable(J, lambda U, L: 0)
    assert bm_bound(J, nu, vc)(e) == min(b - 1, 2 * a - 1)
    assert classical_range(J, nu) == min(b - 1, 2 * a - 1)


@pytest.mark.parametrize("weights", [w for w in product(range(3), repeat=3) if w[0] <= w[1] <= w[2]])
def test_bm_matches_classical_range_three_points(trivial_points, weights):
    J = trivial_points(3)
    nu = CocartData.from_callable(J, lambda U, L: weights[len(U) - 1])
    vc = VertexConn.from_callable(J, lambda U, L: 0)
    assert bm_bound(J, nu, vc)(J.group.trivial()) == classical_range(J, nu)


def test_bm_second_term_uses_effective_subgroups(z2_regular, z2):
    nu = CocartData.from_callable(z2_regular, lambda U, L: 10)
    vc = VertexConn.from_callable(z2_regular, lambda U, L: 1)
    terms = bm_value(z2_regular, nu, vc, z2.whole())
    # Pa_G(J) 只有 {J}：10 − 1 + 1
    assert terms.first == 10
    # U = {e}：Eff = {e}，1 − 1 + 1；U = J：Eff = {e}，1 − 2 + 1
    assert terms.second == 0
    assert terms.witness["L"] == "{e}"


def test_dual_bm_on_regular_z2(z2_regular, z2):
    nu = CocartData.from_callable(z2_regular, lambda U, L: 3)
    vc = VertexConn.from_callable(z2_regular, lambda U, L: 5)
    terms = dual_bm_value(z2_regular, nu, vc, z2.whole())
    # 0 + min{3, min(5−1+1, 5−2+1)}
    assert terms.value == 3
    result = dual_bm_bound(z2_regular, nu, vc)
    # H = e：{J} 给出 1 + 3，{e}{r} 给出 1 + 3 + 3
    assert result(z2.trivial()) == 4


def _raised(table, key, cls):
    values = dict(table.materialize()._values)
    values[key] = values[key] + 1
    return cls(table.J, values)


def test_bounds_are_monotone_in_every_input():
    rng = make_rng(5)
    for _ in range(20):
        G = standard_group(rng.choice(("Z2", "Z3", "S3")))
        J = random_gset(rng, G, max_points=3, max_orbits=2)
        nu, vc = random_cocart(rng, J).materialize(), random_vertex_conn(rng, J).materialize()
        base_bm = bm_bound(J, nu, vc, check=False).function
        base_dual = dual_bm_bound(J, nu, vc, check=False).function
        key = rng.choice(sorted(nu._values, key=repr))
        nu2 = _raised(nu, key, CocartData)
        vkey = rng.choice(sorted(vc._values, key=repr))
        vc2 = _raised(vc, vkey, VertexConn)
        for a, b in zip(base_bm.values, bm_bound(J, nu2, vc2, check=False).function.values):
            assert b >= a
        for a, b in zip(base_dual.values, dual_bm_bound(J, nu2, vc2, check=False).function.values):
            assert b >= a


def test_bounds_agree_on_conjugate_subgroups(s3):
    rng = make_rng(8)
    lattice = subgroup_lattice(s3)
    for _ in range(5):
        J = random_gset(rng, s3, max_points=5, max_orbits=2)
        nu, vc = random_cocart(rng, J), random_vertex_conn(rng, J)
        for members in lattice.conj_classes:
            values = {bm_value(J, nu, vc, lattice.subgroups[k]).value for k in members}
            duals = {dual_bm_value(J, nu, vc, lattice.subgroups[k]).value for k in members}
            assert len(values) == 1
            assert len(duals) == 1


# ---------------------------------------------------------------- 同伦极限与限制映射

def test_holim_bound_on_arrow():
    G = standard_group("trivial")
    I = from_poset(["a", "b"], lambda x, y: x == y or (x, y) == ("a", "b"), "arrow")
    a = trivial_action(G, I)
    conn = ObjectTable(lambda i, H: 3)
    assert holim_connectivity_bound(a, conn) == 2


def test_holim_and_restriction_on_cone(z2_regular, z2):
    I, a = cone_index(z2_regular)
    conn = ObjectTable(lambda i, H: 4)
    assert holim_connectivity_bound(a, conn) == 3
    result = restriction_connectivity_bound(a, conn)
    assert result.value == 4
    assert result.witness == {"i": "*", "H": "{e}"}
    assert result.flags == ["Pi0ConditionHolds"]
    assert pi0_condition(a, ObjectTable(lambda i, H: -1)) == (False, ["*"])


def test_mapping_space_bound_skips_points():
    data = {("x", (0,)): (2, 5), ("y", (0,)): (POINT, 0)}
    assert mapping_space_connectivity_bound(data) == 3
    assert mapping_space_connectivity_bound({("y", (0,)): (POINT, 0)}) == INF


def test_mapping_space_bound_for_overcategories(z2_regular):
    _, a = cone_index(z2_regular)
    data = overcat_mapping_data(a, ObjectTable(lambda i, H: 4))
    assert mapping_space_connectivity_bound(data, a) == 3
    data.pop(next(iter(data)))
    with pytest.raises(MissingEntry):
        mapping_space_connectivity_bound(data, a)
