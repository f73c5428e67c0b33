"""
随机实例模块
由种子确定的随机群、G-集合、连通度表、带作用的指标范畴与 G-图、偏序集余跨度和同构值图
"""

import random
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from .bounds import CocartData, ConnFunction, VertexConn
from .config_manager import enforce_cap, get_caps_config
from .error_handler import ValidationError
from .equivariant import GAction, GDiagram, action_from_callables, powerset_action, validate_g_structure
from .fincat import CatDiagram, FinCat, Functor, Obj, from_poset, label
from .groups import Group, Subgroup, standard_group, subgroup_lattice
from .gsets import GSet, _orbit_blocks, coset_gset, disjoint_union, orbit_count, regular_gset

SMALL_GROUPS = ("Z2", "Z3", "Z2xZ2", "S3")


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def random_group(rng: random.Random, names: Sequence[str] = SMALL_GROUPS) -> Group:
    return standard_group(rng.choice(list(names)))


def random_subgroup(rng: random.Random, G: Group, within: Optional[Subgroup] = None) -> Subgroup:
    lattice = subgroup_lattice(G)
    pool = lattice.subgroups_of(within) if within is not None else list(lattice.subgroups)
    return rng.choice(pool)


def random_gset(rng: random.Random, G: Group, max_points: Optional[int] = None, max_orbits: int = 4) -> GSet:
    """若干陪集 G/H 的无交并，总点数不超过 max_points（默认取 gset_points 上限）"""
    if max_points is None:
        max_points = int(get_caps_config().get('gset_points', 6))
    lattice = subgroup_lattice(G)
    fitting = [H for H in lattice.subgroups if G.order // H.order <= max_points]
    J = coset_gset(G, rng.choice(fitting))
    for _ in range(rng.randint(0, max_orbits - 1)):
        options = [H for H in fitting if J.size + G.order // H.order <= max_points]
        if not options:
            break
        J = disjoint_union(J, coset_gset(G, rng.choice(options)))
    enforce_cap('gset_points', J.size, "G-集合")
    return J


def random_conn(rng: random.Random, G: Group, low: int = 0, high: int = 4) -> ConnFunction:
    lattice = subgroup_lattice(G)
    return ConnFunction(lattice, [rng.randint(low, high) for _ in lattice.conj_classes])


def _invariant_weights(rng: random.Random, J: GSet, high: int) -> Dict[Tuple[int, ...], int]:
    """每个 (子群, 轨道大小) 一个非负权；只依赖共轭类，保证共轭相容"""
    lattice = subgroup_lattice(J.group)
    by_class = {c: rng.randint(0, high) for c in range(len(lattice.conj_classes))}
    return {L.members: by_class[lattice.class_of(L)] for L in lattice.subgroups}


def random_cocart(rng: random.Random, J: GSet, high: int = 3) -> CocartData:
    """
    ν^U(L) = a(L) + Σ_{L-轨道 O ⊆ U} w(|O|) + k·|U|

    对 U 单调，且只依赖共轭类与轨道结构，因此共轭相容。
    """
    base = _invariant_weights(rng, J, high)
    orbit_weight = {n: rng.randint(0, high) for n in range(1, J.size + 1)}
    slope = rng.randint(0, 1)

    def nu(U: FrozenSet[int], L: Subgroup):
        inside = [b for b in _orbit_blocks(J, L.members) if b[0] in U]
        return base[L.members] + sum(orbit_weight[len(b)] for b in inside) + slope * len(U)

    return CocartData.from_callable(J, nu)


def random_vertex_conn(rng: random.Random, J: GSet, high: int = 4) -> VertexConn:
    base = _invariant_weights(rng, J, high)
    by_size = {n: rng.randint(0, high) for n in range(J.size + 1)}
    return VertexConn.from_callable(J, lambda U, L: base[L.members] + by_size[len(U)] + orbit_count(J, L, U))


# ---------------------------------------------------------------- 偏序集与函子

def random_poset(rng: random.Random, n: int, density: float = 0.4, name: str = "P") -> FinCat:
    """0..n-1 上的随机偏序（先取随机 DAG 再做传递闭包）"""
    below = {x: {x} for x in range(n)}
    for y in range(n):
        for x in range(y):
            if rng.random() < density:
                below[y] |= below[x]
    return from_poset(list(range(n)), lambda a, b: a in below[b], name)


def _leq(P: FinCat, a, b) -> bool:
    return bool(P.hom(a, b))


def random_monotone(rng: random.Random, P: FinCat, Q: FinCat, name: str = "f") -> Functor:
    """按对象顺序逐个选像，保持 a ≤ b ⇒ f(a) ≤ f(b)；无可选像时退化为常值映射"""
    image: Dict[Obj, Obj] = {}
    for x in P.objects:
        lower = [image[y] for y in P.objects if y in image and _leq(P, y, x)]
        upper = [image[y] for y in P.objects if y in image and _leq(P, x, y)]
        options = [d for d in Q.objects
                   if all(_leq(Q, a, d) for a in lower) and all(_leq(Q, d, b) for b in upper)]
        if not options:
            target = Q.objects[0]
            image = {y: target for y in P.objects}
            break
        image[x] = rng.choice(options)
    return Functor(P, Q, image, {m: (image[m[0]], image[m[1]]) for m in P.morphisms}, name).check()


@dataclass
class Cospan:
    f: Functor
    g: Functor


def random_cospan(rng: random.Random, max_objects: int = 3) -> Cospan:
    """f: C → D ← E: g，三个都是小偏序集"""
    D = random_poset(rng, rng.randint(1, max_objects), name="D")
    C = random_poset(rng, rng.randint(1, max_objects), name="C")
    E = random_poset(rng, rng.randint(1, max_objects), name="E")
    return Cospan(random_monotone(rng, C, D, "f"), random_monotone(rng, E, D, "g"))


# ---------------------------------------------------------------- 带作用的指标范畴

def cone_index(J: GSet, name: str = "") -> Tuple[FinCat, GAction]:
    """J 的点加一个顶点 *，每个点有唯一态射到 *；G 通过 J 作用，* 固定"""
    objects: List[Obj] = list(range(J.size)) + ["*"]
    C = from_poset(objects, lambda a, b: a == b or b == "*", name or f"cone({J.size})")

    def move(g, x):
        return x if x == "*" else J.act[g][x]

    action = action_from_callables(J.group, C, move, lambda g, m: (move(g, m[0]), move(g, m[1])))
    return C, action


def discrete_index(J: GSet) -> Tuple[FinCat, GAction]:
    C = from_poset(list(range(J.size)), lambda a, b: a == b, f"points({J.size})")
    action = action_from_callables(J.group, C, lambda g, x: J.act[g][x],
                                   lambda g, m: (J.act[g][m[0]], J.act[g][m[1]]))
    return C, action


def random_index(rng: random.Random, J: GSet, kinds: Sequence[str] = ("powerset", "cone", "points")
                 ) -> Tuple[FinCat, GAction, Callable[[Obj], FrozenSet[int]]]:
    """
    随机的带作用指标范畴及等变、单调的支撑映射 s: Ob I → J 的子集

    Returns:
        (I, 作用, 支撑映射)
    """
    kind = rng.choice(list(kinds))
    if kind == "powerset":
        a = powerset_action(J, rng.choice(["P", "P_0"]))
        return a.cat, a, lambda U: frozenset(U)
    if kind == "cone":
        I, a = cone_index(J)
        whole = J.all_points
        return I, a, lambda x: whole if x == "*" else frozenset([x])
    I, a = discrete_index(J)
    return I, a, lambda x: frozenset([x])


# ---------------------------------------------------------------- 支撑图

SHAPES = ("discrete", "top", "bottom")


def support_category(points: Sequence[int], shape: str, name: str = "") -> FinCat:
    """
    支撑点加基点 * 的小偏序集：discrete 时 * 孤立，top 时 * 在所有点之上，bottom 时在之下
    """
    objects: List[Obj] = sorted(points) + ["*"]
    if shape == "discrete":
        leq = lambda a, b: a == b
    elif shape == "top":
        leq = lambda a, b: a == b or b == "*"
    elif shape == "bottom":
        leq = lambda a, b: a == b or a == "*"
    else:
        raise ValidationError(f"未知的形状: {shape}")
    return from_poset(objects, leq, name)


def support_gdiagram(I: FinCat, a: GAction, J: GSet, support: Callable[[Obj], FrozenSet[int]],
                     shape: str, name: str = "X") -> GDiagram:
    """
    X_i = support(i) ∪ {*}，边为包含，结构映射为 J 上的平移

    要求 support 单调且等变；返回的 G-图经过 validate_g_structure。
    """
    vertex = {i: support_category(support(i), shape, f"{name}_{label(i)}") for i in I.objects}
    edge = {}
    for m in I.morphisms:
        s, t = vertex[I.src[m]], vertex[I.tgt[m]]
        edge[m] = Functor(s, t, {x: x for x in s.objects}, {f: f for f in s.morphisms}, label(m))
    diagram = CatDiagram(I, vertex, edge, name)
    G = J.group

    def move(g, x):
        return x if x == "*" else J.act[g][x]

    structure = {}
    for g in a.acting.members:
        for i in I.objects:
            s, t = vertex[i], vertex[a.act_obj(g, i)]
            structure[(g, i)] = Functor(s, t, {x: move(g, x) for x in s.objects},
                                        {f: (move(g, f[0]), move(g, f[1])) for f in s.morphisms},
                                        G.elements[g])
    return validate_g_structure(a, diagram.check(), structure)


def random_gdiagram(rng: random.Random, G: Optional[Group] = None, max_index: int = 5,
                    max_vertex: int = 3, kinds: Sequence[str] = ("powerset", "cone", "points")) -> GDiagram:
    """
    随机的已校验 G-图

    Args:
        max_index: |Ob I| 的上界
        max_vertex: |Ob X_i| 的上界
    """
    G = G if G is not None else random_group(rng, ("trivial", "Z2", "Z3"))
    for _ in range(64):
        J = random_gset(rng, G, max_points=max(1, max_vertex - 1), max_orbits=2)
        I, a, support = random_index(rng, J, kinds)
        if len(I.objects) <= max_index and all(len(support(i)) + 1 <= max_vertex for i in I.objects):
            break
    else:
        J = coset_gset(G, G.whole())
        I, a = discrete_index(J)
        support = lambda x: frozenset([x])
    enforce_cap('index_objects', len(I.objects), "指标范畴")
    return support_gdiagram(I, a, J, support, rng.choice(SHAPES))


def random_gdiagram_pair(rng: random.Random, G: Group, max_index: int = 3,
                         max_vertex: int = 3) -> Tuple[GDiagram, GDiagram]:
    """同一指标范畴与作用上的两个 G-图 K, X"""
    for _ in range(64):
        J = random_gset(rng, G, max_points=max(1, max_vertex - 1), max_orbits=2)
        I, a, support = random_index(rng, J, ("cone", "points"))
        if len(I.objects) <= max_index and all(len(support(i)) + 1 <= max_vertex for i in I.objects):
            break
    else:
        J = coset_gset(G, G.whole())
        I, a = discrete_index(J)
        support = lambda x: frozenset([x])
    K = support_gdiagram(I, a, J, support, rng.choice(SHAPES), "K")
    X = support_gdiagram(I, a, J, support, rng.choice(SHAPES), "X")
    return K, X


# ---------------------------------------------------------------- 非等变图

def random_diagram(rng: random.Random, max_index: int = 3, max_vertex: int = 3, name: str = "X",
                   I: Optional[FinCat] = None) -> CatDiagram:
    """
    随机偏序集 I 上的随机图：先在底集 B 上取随机偏序，再取沿 I 单调增长的支撑子集，
    X_i 为诱导子偏序集，边为包含；给出 I 时沿用它
    """
    if I is None:
        I = random_poset(rng, rng.randint(1, max_index), name="I")
    base = random_poset(rng, max_vertex, density=0.5, name="B")
    support: Dict[Obj, FrozenSet[int]] = {}
    for j in I.objects:
        inherited = frozenset().union(*(support[i] for i in I.objects if i in support and I.hom(i, j)))
        extra = frozenset(x for x in base.objects if rng.random() < 0.35)
        chosen = inherited | extra
        support[j] = chosen if chosen else frozenset([base.objects[0]])
    vertex = {i: base.full_subcategory(sorted(support[i]), f"{name}_{label(i)}") for i in I.objects}
    edge = {m: Functor(vertex[I.src[m]], vertex[I.tgt[m]], {x: x for x in vertex[I.src[m]].objects},
                       {f: f for f in vertex[I.src[m]].morphisms}, label(m))
            for m in I.morphisms}
    return CatDiagram(I, vertex, edge, name).check()


def random_diagram_pair(rng: random.Random, max_index: int = 3,
                        max_vertex: int = 2) -> Tuple[CatDiagram, CatDiagram]:
    """同一随机指标偏序集上的两个图 K, X"""
    I = random_poset(rng, rng.randint(1, max_index), name="I")
    K = random_diagram(rng, max_vertex=max_vertex, name="K", I=I)
    return K, random_diagram(rng, max_vertex=max_vertex, I=I)


def random_iso_diagram(rng: random.Random, max_index: int = 3, max_vertex: int = 3) -> CatDiagram:
    """
    每条边都是同构的图：Y_d 是同一偏序集 C 按 d 重新命名的副本，边把 (d, c) 送到 (d', c)
    """
    D = random_poset(rng, rng.randint(1, max_index), name="D")
    C = random_poset(rng, rng.randint(1, max_vertex), density=0.5, name="C")
    vertex = {}
    for d in D.objects:
        order = list(C.objects)
        rng.shuffle(order)
        objects = [(d, c) for c in order]
        vertex[d] = from_poset(objects, lambda x, y: bool(C.hom(x[1], y[1])), f"Y_{label(d)}")
    edge = {}
    for m in D.morphisms:
        s, t = vertex[D.src[m]], vertex[D.tgt[m]]
        d2 = D.tgt[m]
        edge[m] = Functor(s, t, {x: (d2, x[1]) for x in s.objects},
                          {f: ((d2, f[0][1]), (d2, f[1][1])) for f in s.morphisms}, label(m))
    return CatDiagram(D, vertex, edge, "Y").check()


def regular_z2_cube() -> GDiagram:
    """ℤ/2 交换两点的 P(J)-立方体，顶点为支撑加顶点 *"""
    G = standard_group("Z2")
    J = regular_gset(G)
    a = powerset_action(J, "P")
    return support_gdiagram(a.cat, a, J, lambda U: frozenset(U), "top", "X")
