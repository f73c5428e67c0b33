"""G-集合：轨道、不变划分与有效子群"""

import pytest

from equicat.error_handler import EmptySubset, SizeCap, ValidationError
from equicat.groups import subgroup_lattice
from equicat.gsets import (add_fixed_point, build_gset, coset_gset, disjoint_union, eff_subgroups,
                           gset_from_json, invariant_partitions, orbit_count, orbit_quotient_map,
                           orbits, subset_stabilizer)


def test_regular_orbits(s3_regular, s3):
    assert orbit_count(s3_regular, s3.whole()) == 1
    assert orbit_count(s3_regular, s3.trivial()) == 6
    data = orbits(s3_regular, s3.whole())
    assert data.count == 1
    assert all(S.is_trivial() for S in data.stabilizers)


def test_coset_gset_stabilizers(s3):
    lattice = subgroup_lattice(s3)
    H = next(S for S in lattice.subgroups if S.order == 2)
    J = coset_gset(s3, H)
    assert J.size == 3
    data = orbits(J, s3.whole())
    assert data.count == 1
    assert sorted(S.order for S in data.stabilizers) == [2, 2, 2]


def test_build_gset_rejects_non_action(z2):
    with pytest.raises(ValidationError):
        build_gset(z2, ["a", "b"], [[0, 1], [0, 0]])
    with pytest.raises(ValidationError):
        build_gset(z2, ["a", "b"], [[1, 0], [0, 1]])


def test_gset_json_and_cap(isolated_config, z2):
    raw = {"group": z2.to_json(), "points": ["a", "b", "c"], "action": {"r": [1, 0, 2]}}
    J = gset_from_json(raw)
    assert orbit_count(J, z2.whole()) == 2
    isolated_config.override('caps.gset_points', 2)
    with pytest.raises(SizeCap):
        gset_from_json(raw)


def test_partitions_are_coarsenings(z2_regular, z2, trivial_points):
    # 两点正则 ℤ/2-集合只有一个 G-轨道
    assert invariant_partitions(z2_regular, z2.whole()) == [(frozenset({0, 1}),)]
    assert len(invariant_partitions(z2_regular, z2.trivial())) == 2
    J = trivial_points(4)
    # Bell 数 B_4
    assert len(invariant_partitions(J, J.group.whole())) == 15
    assert invariant_partitions(J, J.group.whole())[0] == (frozenset(range(4)),)


def test_eff_when_stabilizer_is_proper(z2_regular, z2):
    # {e} 不被 r 固定：H_U = e ≠ G，Eff 为 H_U 的全部子群
    U = frozenset({0})
    assert subset_stabilizer(z2_regular, U, z2.whole()).is_trivial()
    assert eff_subgroups(z2_regular, U, z2.whole()) == (z2.trivial(),)


def test_eff_when_orbit_count_changes(z2_regular, z2):
    U = frozenset({0, 1})
    assert eff_subgroups(z2_regular, U, z2.whole()) == (z2.trivial(),)
    assert eff_subgroups(z2_regular, U, z2.trivial()) == ()


def test_eff_with_trivial_action_is_empty(z2):
    J = build_gset(z2, ["a", "b"], [[0, 1], [0, 1]])
    assert eff_subgroups(J, frozenset({0, 1}), z2.whole()) == ()


def test_eff_rejects_empty(z2_regular, z2):
    with pytest.raises(EmptySubset):
        eff_subgroups(z2_regular, frozenset(), z2.whole())


def test_constructions_of_gsets(z2_regular, z2):
    Jp = add_fixed_point(z2_regular)
    assert Jp.size == 3
    assert orbit_count(Jp, z2.whole()) == 2
    both = disjoint_union(z2_regular, z2_regular)
    assert both.size == 4
    assert len(set(both.points)) == 4
    assert orbit_count(both, z2.whole()) == 2


def test_orbit_quotient_map(z2_regular, z2):
    quotient = orbit_quotient_map(z2_regular, z2.whole())
    assert quotient == {frozenset(): frozenset(), frozenset({0, 1}): frozenset({0})}
