"""有限群与子群格"""

import pytest

from equicat.error_handler import GroupTooLarge, NoIdentity, NoInverse, NotAssociative, ValidationError
from equicat.groups import (build_group, cyclic_group, direct_product, group_from_json, standard_group,
                            subgroup_lattice)


def test_cyclic_group_inverse_and_names():
    G = cyclic_group(3)
    assert G.elements == ("e", "r", "r2")
    assert G.order == 3
    assert G.mul[G.index("r")][G.inverse(G.index("r"))] == G.identity
    assert G.is_abelian


@pytest.mark.parametrize("table, error", [
    ([[0, 0], [0, 0]], NoIdentity),
    ([[0, 1], [1, 1]], NoInverse),
    ([[0, 1, 2], [1, 0, 1], [2, 2, 0]], NotAssociative),
    ([[0, 1], [1]], ValidationError),
    ([[0, 5], [5, 0]], ValidationError),
])
def test_build_group_rejects_bad_tables(table, error):
    with pytest.raises(error):
        build_group(table)


def test_group_json_round_trip(s3):
    assert group_from_json(s3.to_json()) == s3


def test_unknown_standard_group():
    with pytest.raises(ValidationError):
        standard_group("Q8")


@pytest.mark.parametrize("name, subgroups, classes", [
    ("trivial", 1, 1),
    ("Z2", 2, 2),
    ("Z6", 4, 4),
    ("Z2xZ2", 5, 5),
    ("S3", 6, 4),
    ("S4", 30, 11),
])
def test_lattice_sizes(name, subgroups, classes):
    lattice = subgroup_lattice(standard_group(name))
    assert len(lattice) == subgroups
    assert len(lattice.conj_classes) == classes


def test_lattice_order_ends(s3):
    lattice = subgroup_lattice(s3)
    assert lattice.subgroups[0].is_trivial()
    assert lattice.subgroups[-1].is_whole()
    assert lattice.find("G") == s3.whole()
    assert lattice.find("e") == s3.trivial()


def test_find_accepts_any_member_order():
    G = cyclic_group(4)
    lattice = subgroup_lattice(G)
    assert lattice.find("{r2,e}").members == (G.index("e"), G.index("r2"))
    with pytest.raises(ValidationError):
        lattice.find("{e,r}")


def test_conjugacy_classes_of_s3(s3):
    lattice = subgroup_lattice(s3)
    sizes = sorted(len(c) for c in lattice.conj_classes)
    assert sizes == [1, 1, 1, 3]
    order_two = [S for S in lattice.subgroups if S.order == 2]
    classes = {lattice.class_of(S) for S in order_two}
    assert len(classes) == 1
    for S in order_two:
        for g in range(s3.order):
            assert lattice.class_of(S.conjugate(g)) == lattice.class_of(S)


def test_direct_product_is_cyclic_six():
    G = direct_product(cyclic_group(2), cyclic_group(3))
    assert G.order == 6
    assert G.is_abelian
    assert len(subgroup_lattice(G)) == 4


def test_group_order_cap(isolated_config, s3):
    isolated_config.override('caps.group_order', 4)
    with pytest.raises(GroupTooLarge):
        subgroup_lattice(s3)


def test_lattice_without_cache(isolated_config, klein):
    isolated_config.override('performance.cache_lattices', False)
    assert len(subgroup_lattice(klein)) == 5
