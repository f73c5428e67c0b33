"""
等变结构模块
范畴上的群作用、G-图及其结构映射、不动点范畴与不动点图、轨道范畴、扭曲箭头范畴与沿轨道映射的输运
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from .error_handler import (CocycleFailure, InvalidCoset, NaturalityFailure, NonEquivariantEdge,
                            SubgroupMismatch, TypeMismatch, UnitAxiomFailure, ValidationError,
                            log_debug)
from .fincat import (CatDiagram, FinCat, Functor, IsoWitness, Mor, Obj, compose_functors,
                     identity_functor, inclusion_functor, label, over_category, powerset_category,
                     restrict_diagram)
from .groups import Group, Subgroup, SubgroupLattice, subgroup_lattice
from .gsets import GSet, orbit_count, orbit_quotient_map


class GAction:
    """
    群在有限范畴上的作用

    acting 为实际作用的子群（默认全群），obj_act[g]、mor_act[g] 只对 g ∈ acting 给出。
    """

    def __init__(self, group: Group, cat: FinCat,
                 obj_act: Mapping[int, Mapping[Obj, Obj]],
                 mor_act: Mapping[int, Mapping[Mor, Mor]],
                 acting: Optional[Subgroup] = None):
        self.group = group
        self.cat = cat
        self.acting = acting if acting is not None else group.whole()
        self.obj_act: Dict[int, Dict[Obj, Obj]] = {g: dict(obj_act[g]) for g in self.acting.members}
        self.mor_act: Dict[int, Dict[Mor, Mor]] = {g: dict(mor_act[g]) for g in self.acting.members}

    def __repr__(self):
        return f"GAction(|G|={self.group.order} on {self.cat.name})"

    def act_obj(self, g: int, x: Obj) -> Obj:
        return self.obj_act[g][x]

    def act_mor(self, g: int, m: Mor) -> Mor:
        return self.mor_act[g][m]

    def functor(self, g: int) -> Functor:
        return Functor(self.cat, self.cat, self.obj_act[g], self.mor_act[g], self.group.elements[g])

    def require_subgroup(self, H: Subgroup):
        if not H.member_set <= self.acting.member_set:
            raise SubgroupMismatch(f"子群 {H.label} 不在作用子群 {self.acting.label} 中")

    def stabilizer(self, x, kind: str = "object") -> Subgroup:
        """G_x，x 为对象或态射"""
        table = self.obj_act if kind == "object" else self.mor_act
        return Subgroup(self.group, tuple(g for g in self.acting.members if table[g][x] == x))

    def fixes(self, H: Subgroup, x: Obj) -> bool:
        return all(self.obj_act[h][x] == x for h in H.members)

    def check(self) -> "GAction":
        """
        校验作用公理

        Raises:
            UnitAxiomFailure: 单位元不作用为恒等
            CocycleFailure: (hg)·x ≠ h·(g·x)，消息给出 g, h 与单元
        """
        G, C = self.group, self.cat
        for g in self.acting.members:
            self.functor(g).check()
        e = G.identity
        if any(self.obj_act[e][x] != x for x in C.objects) or any(self.mor_act[e][m] != m for m in C.morphisms):
            raise UnitAxiomFailure("单位元的作用不是恒等函子")
        for g in self.acting.members:
            for h in self.acting.members:
                hg = G.mul[h][g]
                for x in C.objects:
                    if self.obj_act[hg][x] != self.obj_act[h][self.obj_act[g][x]]:
                        raise CocycleFailure(
                            f"作用在 g={G.elements[g]}, h={G.elements[h]}, 对象 {label(x)} 处不相容")
                for m in C.morphisms:
                    if self.mor_act[hg][m] != self.mor_act[h][self.mor_act[g][m]]:
                        raise CocycleFailure(
                            f"作用在 g={G.elements[g]}, h={G.elements[h]}, 态射 {label(m)} 处不相容")
        return self

    def to_json(self) -> dict:
        return {
            self.group.elements[g]: {
                "objects": {label(x): label(y) for x, y in self.obj_act[g].items()},
                "morphisms": {label(m): label(n) for m, n in self.mor_act[g].items()},
            }
            for g in self.acting.members
        }


def action_from_callables(group: Group, cat: FinCat, on_obj: Callable[[int, Obj], Obj],
                          on_mor: Callable[[int, Mor], Mor], acting: Optional[Subgroup] = None) -> GAction:
    acting = acting if acting is not None else group.whole()
    return GAction(group, cat,
                   {g: {x: on_obj(g, x) for x in cat.objects} for g in acting.members},
                   {g: {m: on_mor(g, m) for m in cat.morphisms} for g in acting.members},
                   acting)


def trivial_action(group: Group, cat: FinCat) -> GAction:
    return action_from_callables(group, cat, lambda g, x: x, lambda g, m: m)


def action_from_json(group: Group, cat: FinCat, data: dict) -> GAction:
    """gaction.json：每个群元素给出对象与态射的置换，未列出的单元不动；未列出的群元素平凡作用"""
    by_label_obj = {label(x): x for x in cat.objects}
    by_label_mor = {label(m): m for m in cat.morphisms}
    obj_act, mor_act = {}, {}
    for g, name in enumerate(group.elements):
        entry = data.get(name) or {}
        try:
            obj_act[g] = {x: by_label_obj[entry.get('objects', {}).get(label(x), label(x))] for x in cat.objects}
            mor_act[g] = {m: by_label_mor[entry.get('morphisms', {}).get(label(m), label(m))]
                          for m in cat.morphisms}
        except KeyError as e:
            raise ValidationError(f"群元素 {name} 的作用引用了未知单元 {e}") from None
    return GAction(group, cat, obj_act, mor_act).check()


def restrict_action(a: GAction, S: Subgroup) -> GAction:
    """限制到子群 S 的作用"""
    a.require_subgroup(S)
    return GAction(a.group, a.cat, a.obj_act, a.mor_act, S)


def powerset_action(J: GSet, variant: str = "P") -> GAction:
    """G 在 P(J)、P_0(J) 或 P_1(J) 上的诱导作用"""
    C = powerset_category(range(J.size), variant)
    return action_from_callables(J.group, C,
                                 lambda g, U: J.translate(g, U),
                                 lambda g, m: (J.translate(g, m[0]), J.translate(g, m[1])))


def slice_action(a: GAction, F: Functor, cod_action: GAction, d: Obj, slice_cat: FinCat,
                 S: Optional[Subgroup] = None) -> GAction:
    """
    F/d 上由等变函子 F 诱导的 S-作用，S ≤ G_d

    g·(i, α) = (g·i, g·α)，g·(u, α, α') = (g·u, g·α, g·α')。
    """
    S = S if S is not None else cod_action.stabilizer(d)
    return action_from_callables(
        a.group, slice_cat,
        lambda g, x: (a.act_obj(g, x[0]), cod_action.act_mor(g, x[1])),
        lambda g, m: (a.act_mor(g, m[0]), cod_action.act_mor(g, m[1]), cod_action.act_mor(g, m[2])),
        S)


def overcat_action(a: GAction, i: Obj, S: Optional[Subgroup] = None) -> Tuple[FinCat, GAction]:
    """I/i 及其 G_i（或给定 S ≤ G_i）作用"""
    ident = identity_functor(a.cat)
    C, _ = over_category(ident, i)
    return C, slice_action(a, ident, a, i, C, S)


def check_equivariant(F: Functor, dom_action: GAction, cod_action: GAction,
                      elements: Optional[Tuple[int, ...]] = None) -> bool:
    """F(g·x) = g·F(x) 对对象与态射成立"""
    elements = elements if elements is not None else dom_action.acting.members
    for g in elements:
        for x in F.dom.objects:
            if F.ob(dom_action.act_obj(g, x)) != cod_action.act_obj(g, F.ob(x)):
                return False
        for m in F.dom.morphisms:
            if F.mor(dom_action.act_mor(g, m)) != cod_action.act_mor(g, F.mor(m)):
                return False
    return True


def fixed_category(a: GAction, H: Subgroup, name: str = "") -> Tuple[FinCat, Functor]:
    """
    I^H：被 H 严格固定的对象与态射

    Returns:
        (I^H, 包含函子 ι^H)
    """
    a.require_subgroup(H)
    C = a.cat
    objects = [x for x in C.objects if all(a.obj_act[h][x] == x for h in H.members)]
    morphisms = [m for m in C.morphisms if all(a.mor_act[h][m] == m for h in H.members)]
    fixed = C.subcategory(objects, morphisms, name or f"{C.name}^{H.label}")
    return fixed, inclusion_functor(fixed, C, f"ι^{H.label}")


# ---------------------------------------------------------------- G-图

class GDiagram:
    """
    G-图：I 上的作用 a、范畴图 X 与结构函子 φ_{g,i}: X_i → X_{g·i}
    """

    def __init__(self, action: GAction, diagram: CatDiagram, structure: Mapping[Tuple[int, Obj], Functor]):
        self.action = action
        self.diagram = diagram
        self.structure: Dict[Tuple[int, Obj], Functor] = dict(structure)

    @property
    def group(self) -> Group:
        return self.action.group

    @property
    def index(self) -> FinCat:
        return self.diagram.index

    def __repr__(self):
        return f"GDiagram({self.diagram.name}, |G|={self.group.order})"

    def phi(self, g: int, i: Obj) -> Functor:
        return self.structure[(g, i)]

    def vertex_action(self, i: Obj, S: Optional[Subgroup] = None) -> GAction:
        """φ 在 X_i 上诱导的 G_i-作用"""
        S = S if S is not None else self.action.stabilizer(i)
        return GAction(self.group, self.diagram.vertex[i],
                       {g: self.structure[(g, i)].obj_map for g in S.members},
                       {g: self.structure[(g, i)].mor_map for g in S.members}, S)


def validate_g_structure(action: GAction, diagram: CatDiagram,
                         structure: Mapping[Tuple[int, Obj], Functor]) -> GDiagram:
    """
    校验 G-结构的单位与上闭链公理以及 φ_g 的自然性

    Raises:
        TypeMismatch: 形状不匹配
        UnitAxiomFailure: φ_{1,i} 不是恒等
        CocycleFailure: φ_{hg,i} ≠ φ_{h,g·i}∘φ_{g,i}，消息给出 g, h, i
        NaturalityFailure: X(g·α)∘φ_{g,i} ≠ φ_{g,j}∘X(α)
    """
    G, I = action.group, diagram.index
    if action.cat is not I:
        raise TypeMismatch("作用所在范畴与图的指标范畴不是同一个")
    X = diagram
    elements = action.acting.members
    for g in elements:
        for i in I.objects:
            F = structure.get((g, i))
            if F is None:
                raise TypeMismatch(f"缺少结构函子 φ_({G.elements[g]},{label(i)})")
            if F.dom is not X.vertex[i] or F.cod is not X.vertex[action.act_obj(g, i)]:
                raise TypeMismatch(f"φ_({G.elements[g]},{label(i)}) 的端点范畴错误")
            F.check()

    for i in I.objects:
        if not structure[(G.identity, i)].is_identity_functor():
            raise UnitAxiomFailure(f"φ_(1,{label(i)}) 不是恒等函子")

    for g in elements:
        for h in elements:
            hg = G.mul[h][g]
            for i in I.objects:
                lhs = structure[(hg, i)]
                rhs = compose_functors(structure[(h, action.act_obj(g, i))], structure[(g, i)])
                if not lhs.same_as(rhs):
                    raise CocycleFailure(
                        f"上闭链条件在 g={G.elements[g]}, h={G.elements[h]}, i={label(i)} 处不成立")

    for g in elements:
        for m in I.non_identity():
            i, j = I.src[m], I.tgt[m]
            lhs = compose_functors(X.edge[action.act_mor(g, m)], structure[(g, i)])
            rhs = compose_functors(structure[(g, j)], X.edge[m])
            if not lhs.same_as(rhs):
                raise NaturalityFailure(f"φ_{G.elements[g]} 在态射 {label(m)} 处不自然")

    log_debug(f"G-结构校验通过: {X.name}, {len(elements)} 个群元素, {len(I.objects)} 个顶点")
    return GDiagram(action, diagram, structure)


def constant_gdiagram(action: GAction, C: FinCat, vertex_action: Optional[GAction] = None,
                      name: str = "const") -> GDiagram:
    """常值 G-图；vertex_action 给出时 φ_{g,i} 为 C 上 g 的作用，否则为恒等"""
    I = action.cat
    ident = identity_functor(C)
    X = CatDiagram(I, {i: C for i in I.objects}, {m: ident for m in I.morphisms}, name)
    structure = {}
    for g in action.acting.members:
        F = vertex_action.functor(g) if vertex_action is not None else ident
        for i in I.objects:
            structure[(g, i)] = F
    return GDiagram(action, X, structure)


def pullback_gdiagram(X: GDiagram, F: Functor, dom_action: GAction, name: str = "") -> GDiagram:
    """等变函子 F: J → I 上的拉回 X∘F，结构 φ_{g,j} = φ_{g,F(j)}"""
    Y = restrict_diagram(X.diagram, F, name)
    structure = {(g, j): X.structure[(g, F.ob(j))]
                 for g in dom_action.acting.members for j in F.dom.objects}
    return GDiagram(dom_action, Y, structure)


def restrict_gdiagram(X: GDiagram, S: Subgroup) -> GDiagram:
    a = restrict_action(X.action, S)
    return GDiagram(a, X.diagram, {k: v for k, v in X.structure.items() if k[0] in S.member_set})


def fixed_diagram(X: GDiagram, H: Subgroup) -> Tuple[CatDiagram, FinCat]:
    """
    X^H：I^H 上的图，顶点为 X_i 中被 φ_{h,i}（h ∈ H）严格固定的子范畴

    Returns:
        (X^H, I^H)

    Raises:
        NonEquivariantEdge: 某条边把固定单元送出固定子范畴
    """
    IH, _ = fixed_category(X.action, H)
    vertex: Dict[Obj, FinCat] = {}
    for i in IH.objects:
        Xi = X.diagram.vertex[i]
        phis = [X.structure[(h, i)] for h in H.members]
        objs = [x for x in Xi.objects if all(F.obj_map[x] == x for F in phis)]
        mors = [m for m in Xi.morphisms if all(F.mor_map[m] == m for F in phis)]
        vertex[i] = Xi.subcategory(objs, mors, f"{Xi.name}^{H.label}")
    edge: Dict[Mor, Functor] = {}
    for m in IH.morphisms:
        E = X.diagram.edge[m]
        s, t = vertex[IH.src[m]], vertex[IH.tgt[m]]
        obj_map = {x: E.obj_map[x] for x in s.objects}
        mor_map = {f: E.mor_map[f] for f in s.morphisms}
        if any(y not in t.object_set for y in obj_map.values()) or \
                any(n not in t.morphism_set for n in mor_map.values()):
            raise NonEquivariantEdge(f"边 {label(m)} 没有把 {H.label}-固定单元送到固定单元")
        edge[m] = Functor(s, t, obj_map, mor_map, E.name)
    return CatDiagram(IH, vertex, edge, f"{X.diagram.name}^{H.label}"), IH


# ---------------------------------------------------------------- 轨道范畴与扭曲箭头

@dataclass
class OrbitCategory:
    """
    O_G：对象为子群在格中的下标（代表 G/H），
    态射 ("orb", L, H, r) 表示 xL ↦ x r H，r 为陪集 rH 的最小元素且 r⁻¹ L r ⊆ H
    """
    group: Group
    lattice: SubgroupLattice
    cat: FinCat

    def subgroup(self, k: int) -> Subgroup:
        return self.lattice.subgroups[k]

    def representative(self, m: Mor) -> int:
        return m[3]

    def hom_count(self, L: int, H: int) -> int:
        return len(self.cat.hom(L, H))

    def to_json(self) -> dict:
        G = self.group
        names = {k: f"G/{self.lattice.label(k)}" for k in range(len(self.lattice))}
        return {
            "objects": [names[k] for k in self.cat.objects],
            "morphisms": [{"src": names[m[1]], "tgt": names[m[2]], "coset": G.elements[m[3]]}
                          for m in self.cat.morphisms],
        }


def _coset_rep(G: Group, g: int, H: Subgroup) -> int:
    return min(G.mul[g][h] for h in H.members)


def orbit_category(G: Group) -> OrbitCategory:
    """构造轨道范畴 O_G"""
    lattice = subgroup_lattice(G)
    subs = lattice.subgroups
    morphisms = []
    for li, L in enumerate(subs):
        for hi, H in enumerate(subs):
            reps = sorted({_coset_rep(G, g, H) for g in range(G.order)})
            for r in reps:
                r_inv = G.inverse(r)
                if all(G.mul[G.mul[r_inv][x]][r] in H for x in L.members):
                    morphisms.append(("orb", li, hi, r))

    def compose(second, first):
        H = subs[second[2]]
        return ("orb", first[1], second[2], _coset_rep(G, G.mul[first[3]][second[3]], H))

    objects = list(range(len(subs)))
    identities = {k: ("orb", k, k, _coset_rep(G, G.identity, subs[k])) for k in objects}
    cat = FinCat(objects, morphisms, {m: m[1] for m in morphisms}, {m: m[2] for m in morphisms},
                 identities, compose, "O_G")
    return OrbitCategory(G, lattice, cat)


def twisted_arrow(C: FinCat) -> FinCat:
    """
    Tw(C)：对象为 C 的态射；f → f' 为 (f, f', u, v)，其中 f = v∘f'∘u
    """
    morphisms = []
    for f in C.morphisms:
        c, d = C.src[f], C.tgt[f]
        for f2 in C.morphisms:
            c2, d2 = C.src[f2], C.tgt[f2]
            for u in C.hom(c, c2):
                f2u = C.compose(f2, u)
                for v in C.hom(d2, d):
                    if C.compose(v, f2u) == f:
                        morphisms.append((f, f2, u, v))

    def compose(second, first):
        return (first[0], second[1], C.compose(second[2], first[2]), C.compose(first[3], second[3]))

    identities = {f: (f, f, C.identities[C.src[f]], C.identities[C.tgt[f]]) for f in C.morphisms}
    return FinCat(C.morphisms, morphisms, {m: m[0] for m in morphisms}, {m: m[1] for m in morphisms},
                  identities, compose, f"Tw({C.name})")


def transport(a: GAction, L: Subgroup, H: Subgroup, g: int,
              fixed_H: Optional[FinCat] = None, fixed_L: Optional[FinCat] = None) -> Functor:
    """
    沿 f: G/L → G/H（陪集 gH，L ⊆ gHg⁻¹）的输运 f^*: I^H → I^L，i ↦ g·i

    Raises:
        InvalidCoset: L 不包含于 gHg⁻¹
    """
    G = a.group
    if not all(G.conjugate(G.inverse(g), x) in H for x in L.members):
        raise InvalidCoset(f"{L.label} 不包含于 {G.elements[g]}·{H.label}·{G.elements[g]}⁻¹")
    if fixed_H is None:
        fixed_H, _ = fixed_category(a, H)
    if fixed_L is None:
        fixed_L, _ = fixed_category(a, L)
    obj_map = {x: a.act_obj(g, x) for x in fixed_H.objects}
    mor_map = {m: a.act_mor(g, m) for m in fixed_H.morphisms}
    for y in obj_map.values():
        if y not in fixed_L.object_set:
            raise InvalidCoset(f"g·i = {label(y)} 不在 I^{L.label} 中")
    return Functor(fixed_H, fixed_L, obj_map, mor_map, f"({G.elements[g]}{H.label})^*")


def transport_diagram(Y: CatDiagram, fstar: Functor) -> CatDiagram:
    """f_! Y = Y∘f^*"""
    return restrict_diagram(Y, fstar, f"f_!{Y.name}")


def powerset_fixed_iso(J: GSet, H: Subgroup) -> IsoWitness:
    """P(J)^H ≅ P(J/H) 的显式见证"""
    a = powerset_action(J, "P")
    fixed, _ = fixed_category(a, H)
    quotient = orbit_quotient_map(J, H)
    n_orbits = orbit_count(J, H)
    target = powerset_category(range(n_orbits), "P")
    back = {v: k for k, v in quotient.items()}
    forward = Functor(fixed, target, {U: quotient[U] for U in fixed.objects},
                      {m: (quotient[m[0]], quotient[m[1]]) for m in fixed.morphisms}, "J→J/H")
    backward = Functor(target, fixed, {V: back[V] for V in target.objects},
                       {m: (back[m[0]], back[m[1]]) for m in target.morphisms}, "J/H→J")
    return IsoWitness(fixed, target, forward, backward).verify()


def conjugation_functor(a: GAction, H: Subgroup, g: int) -> Functor:
    """g·−: I^H → I^{gHg⁻¹}"""
    K = H.conjugate(g)
    IH, _ = fixed_category(a, H)
    IK, _ = fixed_category(a, K)
    return Functor(IH, IK, {x: a.act_obj(g, x) for x in IH.objects},
                   {m: a.act_mor(g, m) for m in IH.morphisms}, f"{a.group.elements[g]}·−")


def fixed_slice(a: GAction, i: Obj, H: Subgroup) -> FinCat:
    """(I/i)^H，H ≤ G_i"""
    C, act = overcat_action(a, i, H)
    fixed, _ = fixed_category(act, H)
    return fixed


def orbit_representatives(a: GAction) -> List[Obj]:
    """每个对象轨道中顺序最靠前的对象"""
    seen = set()
    reps = []
    for x in a.cat.objects:
        if x in seen:
            continue
        reps.append(x)
        seen.update(a.obj_act[g][x] for g in a.acting.members)
    return reps
