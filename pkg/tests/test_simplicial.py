"""神经与整系数同调"""

from itertools import combinations

import pytest
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from equicat.equivariant import powerset_action
from equicat.error_handler import BoundaryNotSquareZero, NotLoopFree
from equicat.fincat import (discrete_category, from_poset, functor_from_callables, identity_functor,
                            inclusion_functor, powerset_category, terminal_category, validate_category)
from equicat.simplicial import (ChainComplex, chain_map, euler_characteristic, fixed_chains, homology,
                                homology_equivalence, mapping_cone, nerve, nerve_report, rational_ranks)

# 六顶点射影平面的三角剖分
PROJECTIVE_PLANE = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2),
                    (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4)]


def sphere(n):
    """{0..n-1} 的非空真子集，神经是 n-2 维球面"""
    P = powerset_category(range(n))
    return P.full_subcategory([U for U in P.objects if 0 < len(U) < n], f"∂Δ{n - 1}")


def face_poset(triangles):
    faces = set()
    for t in triangles:
        for r in (1, 2, 3):
            faces.update(frozenset(c) for c in combinations(t, r))
    return from_poset(sorted(faces, key=lambda f: (len(f), sorted(f))), lambda a, b: a <= b, "faces")


@pytest.mark.parametrize("n, betti", [(3, [1, 1]), (4, [1, 0, 1])])
def test_sphere_homology(n, betti):
    K = nerve(sphere(n))
    H = homology(K)
    assert H.betti == betti
    assert not any(H.torsion)
    assert rational_ranks(K) == betti
    assert euler_characteristic(K.sizes) == euler_characteristic(betti)


def test_two_sphere_simplex_counts():
    K = nerve(sphere(4))
    assert K.sizes == [14, 36, 24]
    assert euler_characteristic(K.sizes) == 2


def test_projective_plane_has_two_torsion():
    K = nerve(face_poset(PROJECTIVE_PLANE))
    H = homology(K)
    assert H.betti == [1, 0, 0]
    assert H.torsion == [[], [2], []]
    assert rational_ranks(K) == [1, 0, 0]
    assert not H.is_point()


def test_contractible_and_discrete():
    assert homology(nerve(powerset_category(range(3)))).is_point()
    H = homology(nerve(discrete_category(["x", "y", "z"])))
    assert H.betti == [3]
    assert H.degree(5) == (0, ())


def test_truncated_nerve():
    K = nerve(powerset_category(range(3)), max_dim=1)
    assert K.truncated
    assert K.top == 1


def test_nerve_requires_loop_free():
    raw = {
        "objects": ["x"],
        "morphisms": [{"id": "1", "src": "x", "tgt": "x"}, {"id": "p", "src": "x", "tgt": "x"}],
        "identities": {"x": "1"},
        "compose": [{"first": "p", "second": "p", "result": "p"}],
    }
    with pytest.raises(NotLoopFree):
        nerve(validate_category(raw))


def test_square_zero_is_checked():
    one = DomainMatrix([[ZZ(1)]], (1, 1), ZZ)
    with pytest.raises(BoundaryNotSquareZero):
        ChainComplex([1, 1, 1], {1: one, 2: one}).check_square_zero()


def test_homology_equivalence_passes_for_point_inclusion():
    arrow = from_poset(["a", "b"], lambda x, y: x == y or (x, y) == ("a", "b"), "[1]")
    top = arrow.full_subcategory(["b"], "b")
    verdict = homology_equivalence(inclusion_functor(top, arrow), 2)
    assert verdict.verdict == "PASS"
    assert verdict.pi0_bijective


def test_homology_equivalence_finds_first_failing_degree():
    C = sphere(3)
    T = terminal_category()
    F = functor_from_callables(C, T, lambda x: "*", lambda m: ("*", "*"), "collapse")
    verdict = homology_equivalence(F, 2)
    assert verdict.verdict == "FAIL"
    assert verdict.failing_degree == 1
    assert verdict.to_json()["dom_homology"]["betti"] == [1, 1]


def test_homology_equivalence_inconclusive_when_truncated():
    P = powerset_category(range(3))
    verdict = homology_equivalence(identity_functor(P), 1)
    assert verdict.verdict == "INCONCLUSIVE"
    assert verdict.truncated


def test_fixed_chains_of_swapped_square(z2, z2_regular):
    a = powerset_action(z2_regular)
    chains = fixed_chains(a.cat, a, z2.whole())
    assert chains[0] == [frozenset(), frozenset({0, 1})]
    assert chains[1] == [((frozenset(), frozenset({0, 1})),)]
    assert len(chains) == 2


def test_nerve_report():
    report = nerve_report(discrete_category(["x", "y"]))
    assert report["betti"] == [2]
    assert report["components"] == [["x"], ["y"]]
    assert report["dimension"] == 0
    assert not report["truncated"]


def test_mapping_cone_of_identity_is_acyclic():
    arrow = from_poset(["a", "b"], lambda x, y: x == y or (x, y) == ("a", "b"), "[1]")
    A = nerve(arrow)
    f = chain_map(identity_functor(arrow), A, A)
    assert f[0].to_list() == [[1, 0], [0, 1]]
    cone = mapping_cone(A, A, f, A.top + 1)
    assert cone.sizes == [2, 3, 1]
    H = homology(cone)
    assert H.betti == [0, 0, 0]
    assert not any(H.torsion)


def test_truncated_report_keeps_top_boundary():
    cube = powerset_category(range(3))
    report = nerve_report(cube, 1)
    assert report["betti"] == [1, 0]
    assert report["rational_betti"] == [1, 0]
    assert report["dimension"] == 1
    assert report["truncated"]
    assert report["simplices"][0] == 8
    assert nerve_report(cube)["betti"] == [1, 0, 0, 0]
