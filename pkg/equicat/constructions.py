"""
构造模块
Grothendieck 构造、自然变换范畴、匹配函子与 U≤I 分解、逗号范畴模型、扭曲箭头极限、拟纤维性检查与总纤维模型
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .config_manager import enforce_cap, get_caps_config
from .equivariant import (GAction, GDiagram, action_from_callables, check_equivariant, fixed_category,
                          fixed_diagram, orbit_category, pullback_gdiagram, slice_action, transport,
                          transport_diagram, twisted_arrow)
from .error_handler import (EmptySubset, IndexMismatch, InvalidTransformation, NaturalityFailure,
                            ValidationError, WitnessFailure, log_debug, log_info)
from .fincat import (CatDiagram, FinCat, Functor, IsoWitness, Mor, Obj, SliceFamily, cat_limit, cospan_index,
                     enumerate_functors, enumerate_transformations, from_poset, identity_functor,
                     initial_object, label, over_category, product_categories, product_category,
                     restrict_diagram, slice_families, terminal_object, under_category)
from .groups import Subgroup, subgroup_lattice
from .simplicial import HomologyResult, homology, homology_equivalence, nerve, truncated_homology
from .workers import run_parallel

Diagram = Union[CatDiagram, GDiagram]

__all__ = [
    'IsoWitness', 'HomCategory', 'MatchingData', 'CommaModel', 'FibrancyCheck', 'FibrancyReport',
    'TotalFiber', 'grothendieck', 'fixed_grothendieck_witness', 'over_diagram', 'overcat_diagram',
    'hom_category', 'matching_data', 'matching_functor', 'fixed_matching', 'm_over', 'comma_functor',
    'indgrot_witness', 'twisted_limit_witness', 'comma_bk', 'functor_certificate',
    'reedy_quasi_fibrant', 'total_fiber_model', 'hpb_certificate', 'quillen_b_base',
    'brute_force_families', 'cylinder_diagram', 'setwise_stabilizer',
]


def _plain(X: Diagram) -> CatDiagram:
    return X.diagram if isinstance(X, GDiagram) else X


def _only(items):
    items = list(items)
    if len(items) != 1:
        raise WitnessFailure(f"期望唯一的态射，实际 {len(items)} 个")
    return items[0]


# ---------------------------------------------------------------- Grothendieck 构造

def grothendieck(X: Diagram, name: str = "") -> Tuple[FinCat, Optional[GAction]]:
    """
    I≀X

    对象 (i, x)，x ∈ X_i；态射 (α, x, γ)，α: i→j，γ: α_*x → y 是 X_j 中的态射。
    X 为 G-图时同时返回诱导作用 g·(i, x) = (gi, φ_{g,i}x)。
    """
    D = _plain(X)
    I = D.index
    objects = [(i, x) for i in I.objects for x in D.vertex[i].objects]
    morphisms = []
    for i, x in objects:
        for a in I.out_of(i):
            Xj = D.vertex[I.tgt[a]]
            for c in Xj.out_of(D.push_obj(a, x)):
                morphisms.append((a, x, c))
    src = {m: (I.src[m[0]], m[1]) for m in morphisms}
    tgt = {m: (I.tgt[m[0]], D.vertex[I.tgt[m[0]]].tgt[m[2]]) for m in morphisms}
    identities = {(i, x): (I.identities[i], x, D.vertex[i].identities[x]) for i, x in objects}

    def compose(g, f):
        b = g[0]
        return (I.compose(b, f[0]), f[1], D.vertex[I.tgt[b]].compose(g[2], D.push_mor(b, f[2])))

    cat = FinCat(objects, morphisms, src, tgt, identities, compose, name or f"{I.name}≀{D.name}")
    if not isinstance(X, GDiagram):
        return cat, None
    a = X.action
    action = action_from_callables(
        X.group, cat,
        lambda g, o: (a.act_obj(g, o[0]), X.phi(g, o[0]).ob(o[1])),
        lambda g, m: (a.act_mor(g, m[0]), X.phi(g, I.src[m[0]]).ob(m[1]), X.phi(g, I.tgt[m[0]]).mor(m[2])),
        a.acting)
    return cat, action


def fixed_grothendieck_witness(X: GDiagram, H: Subgroup) -> IsoWitness:
    """
    (I≀X)^H ≅ I^H≀X^H

    两侧单元的 id 相同，见证函子在 id 上是恒等映射，核验的是两个范畴确实相同。

    Raises:
        WitnessFailure: 第一个不一致的单元
    """
    whole, action = grothendieck(X)
    left, _ = fixed_category(action, H, f"({whole.name})^{H.label}")
    XH, _ = fixed_diagram(X, H)
    right, _ = grothendieck(XH)
    forward = Functor(left, right, {x: x for x in left.objects}, {m: m for m in left.morphisms}, "fix→≀")
    backward = Functor(right, left, {x: x for x in right.objects}, {m: m for m in right.morphisms}, "≀→fix")
    return IsoWitness(left, right, forward, backward, {"subgroup": H.label}).verify()


# ---------------------------------------------------------------- F/− 图

def over_diagram(F: Functor, dom_action: Optional[GAction] = None, cod_action: Optional[GAction] = None,
                 name: str = "") -> Diagram:
    """
    F/−：d ↦ F/d，边为后复合

    给出 cod_action 时返回 G-图，结构映射 (i, α) ↦ (g·i, g·α)；dom_action 缺省时与 cod_action 相同。
    """
    D = F.cod
    vertex = {d: over_category(F, d)[0] for d in D.objects}
    edge = {}
    for b in D.morphisms:
        s, t = vertex[D.src[b]], vertex[D.tgt[b]]
        edge[b] = Functor(s, t, {x: (x[0], D.compose(b, x[1])) for x in s.objects},
                          {m: (m[0], D.compose(b, m[1]), D.compose(b, m[2])) for m in s.morphisms},
                          label(b))
    diagram = CatDiagram(D, vertex, edge, name or f"{F.name}/−")
    if cod_action is None:
        return diagram
    dom_action = dom_action if dom_action is not None else cod_action
    structure = {}
    for g in cod_action.acting.members:
        for d in D.objects:
            s, t = vertex[d], vertex[cod_action.act_obj(g, d)]
            structure[(g, d)] = Functor(
                s, t,
                {x: (dom_action.act_obj(g, x[0]), cod_action.act_mor(g, x[1])) for x in s.objects},
                {m: (dom_action.act_mor(g, m[0]), cod_action.act_mor(g, m[1]), cod_action.act_mor(g, m[2]))
                 for m in s.morphisms},
                cod_action.group.elements[g])
    return GDiagram(cod_action, diagram, structure)


def overcat_diagram(a: Union[GAction, FinCat]) -> Diagram:
    """I/−；给出作用时带 G-结构"""
    if isinstance(a, FinCat):
        return over_diagram(identity_functor(a), name=f"{a.name}/−")
    return over_diagram(identity_functor(a.cat), a, a, f"{a.cat.name}/−")


# ---------------------------------------------------------------- Hom(K, X)

def _maps(value) -> Tuple[Mapping, Mapping]:
    if isinstance(value, Functor):
        return value.obj_map, value.mor_map
    return value


class HomCategory:
    """
    Hom(K, X)

    对象是严格交换的函子族 Φ_i: K_i → X_i，用枚举序号表示；
    态射是修饰 ("mod", s, t, comps)，comps 按指标对象顺序、再按 K_i 对象顺序排列分量。
    """

    def __init__(self, lower: CatDiagram, upper: CatDiagram, families: List[Dict[Obj, Functor]],
                 cat: FinCat, action: Optional[GAction] = None):
        self.lower = lower
        self.upper = upper
        self.families = families
        self.cat = cat
        self.action = action
        self._lookup = {self._key(fam): n for n, fam in enumerate(families)}

    def __repr__(self):
        return f"HomCategory({len(self.families)} 个对象, {len(self.cat.morphisms)} 个态射)"

    @property
    def index(self) -> FinCat:
        return self.lower.index

    def _key(self, maps: Mapping[Obj, Any]) -> tuple:
        key = []
        for i in self.index.objects:
            obj_map, mor_map = _maps(maps[i])
            Ki = self.lower.vertex[i]
            key.append((tuple(obj_map[x] for x in Ki.objects), tuple(mor_map[m] for m in Ki.morphisms)))
        return tuple(key)

    def find(self, maps: Mapping[Obj, Any]) -> Optional[int]:
        """按每个顶点的 (对象映射, 态射映射) 查找对象序号"""
        try:
            return self._lookup.get(self._key(maps))
        except KeyError:
            return None

    def require(self, maps: Mapping[Obj, Any]) -> int:
        n = self.find(maps)
        if n is None:
            raise InvalidTransformation("给定的函子族不是严格自然变换 K ⇒ X")
        return n

    def family(self, n: int) -> Dict[Obj, Functor]:
        return self.families[n]

    def components(self, mod: Mor) -> Dict[Obj, Dict[Obj, Mor]]:
        return {i: dict(zip(self.lower.vertex[i].objects, comps))
                for i, comps in zip(self.index.objects, mod[3])}

    def modification(self, s: int, t: int, comps: Mapping[Obj, Mapping[Obj, Mor]]) -> Mor:
        return ("mod", s, t, tuple(tuple(comps[i][k] for k in self.lower.vertex[i].objects)
                                  for i in self.index.objects))

    def fixed(self, H: Subgroup) -> Tuple[FinCat, Functor]:
        """Hom(K, X)^H：严格等变的变换与修饰"""
        if self.action is None:
            raise ValidationError("只有 G-图之间的 Hom 范畴才有共轭作用")
        return fixed_category(self.action, H, f"{self.cat.name}^{H.label}")

    def to_json(self) -> dict:
        return {
            "objects": len(self.cat.objects),
            "morphisms": len(self.cat.morphisms),
            "transformations": [
                {label(i): {label(k): label(F.ob(k)) for k in self.lower.vertex[i].objects}
                 for i, F in fam.items()}
                for fam in self.families
            ],
        }


def _same_index(I: FinCat, J: FinCat) -> bool:
    return I is J or (I.objects == J.objects and I.morphisms == J.morphisms)


def hom_category(K: Diagram, X: Diagram, name: str = "Hom") -> HomCategory:
    """
    自然变换与修饰的范畴；K、X 都是 G-图时带共轭作用
    (g·Φ)_i = φ^X_{g, g⁻¹i} ∘ Φ_{g⁻¹i} ∘ φ^K_{g⁻¹, i}

    Raises:
        IndexMismatch: 指标范畴不同
        SizeCap: 候选函子或变换个数超过 hom_candidates
    """
    lower, upper = _plain(K), _plain(X)
    I = lower.index
    if not _same_index(I, upper.index):
        raise IndexMismatch(f"{lower.name} 与 {upper.name} 的指标范畴不同")
    cap = int(get_caps_config().get('hom_candidates', 200000))
    order = list(I.objects)
    position = {i: k for k, i in enumerate(order)}
    candidates = {}
    for i in order:
        found = list(enumerate_functors(lower.vertex[i], upper.vertex[i], limit=cap + 1))
        enforce_cap('hom_candidates', len(found), f"顶点 {label(i)} 处的候选函子")
        candidates[i] = found

    edges = I.non_identity()
    checks: Dict[int, List[Mor]] = {k: [] for k in range(len(order))}
    for m in edges:
        checks[max(position[I.src[m]], position[I.tgt[m]])].append(m)

    def commutes(m, Fs: Functor, Ft: Functor) -> bool:
        Km, Xm = lower.edge[m], upper.edge[m]
        return (all(Ft.ob(Km.ob(x)) == Xm.ob(Fs.ob(x)) for x in Km.dom.objects)
                and all(Ft.mor(Km.mor(f)) == Xm.mor(Fs.mor(f)) for f in Km.dom.morphisms))

    families: List[Dict[Obj, Functor]] = []
    chosen: List[Functor] = []

    def extend(k: int):
        if k == len(order):
            families.append(dict(zip(order, chosen)))
            return
        for F in candidates[order[k]]:
            chosen.append(F)
            if all(commutes(m, chosen[position[I.src[m]]], chosen[position[I.tgt[m]]]) for m in checks[k]):
                extend(k + 1)
            chosen.pop()

    extend(0)
    enforce_cap('hom_candidates', len(families), "严格自然变换")

    slot = {i: {k: n for n, k in enumerate(lower.vertex[i].objects)} for i in order}

    def compatible(m, combo) -> bool:
        i, j = I.src[m], I.tgt[m]
        Km, Xm = lower.edge[m], upper.edge[m]
        li, lj = combo[position[i]], combo[position[j]]
        return all(Xm.mor(li[n]) == lj[slot[j][Km.ob(k)]] for n, k in enumerate(lower.vertex[i].objects))

    morphisms = []
    for s, Fs in enumerate(families):
        for t, Ft in enumerate(families):
            options = [list(enumerate_transformations(Fs[i], Ft[i])) for i in order]
            if any(not o for o in options):
                continue
            for combo in product(*options):
                if all(compatible(m, combo) for m in edges):
                    morphisms.append(("mod", s, t, combo))

    identities = {
        n: ("mod", n, n, tuple(tuple(upper.vertex[i].identities[fam[i].ob(k)] for k in lower.vertex[i].objects)
                               for i in order))
        for n, fam in enumerate(families)
    }

    def compose(g, f):
        return ("mod", f[1], g[2], tuple(tuple(upper.vertex[i].compose(b, a) for a, b in zip(fa, gb))
                                         for i, fa, gb in zip(order, f[3], g[3])))

    cat = FinCat(range(len(families)), morphisms, {m: m[1] for m in morphisms}, {m: m[2] for m in morphisms},
                 identities, compose, name)
    hom = HomCategory(lower, upper, families, cat)
    if isinstance(K, GDiagram) and isinstance(X, GDiagram):
        hom.action = _conjugation_action(K, X, hom)
    log_debug(f"{name}: {len(families)} 个变换, {len(morphisms)} 个修饰")
    return hom


def _conjugation_action(K: GDiagram, X: GDiagram, hom: HomCategory) -> GAction:
    a = K.action
    G = a.group
    I = hom.index
    components = {m: hom.components(m) for m in hom.cat.morphisms}
    obj_act: Dict[int, Dict[int, int]] = {}
    mor_act: Dict[int, Dict[Mor, Mor]] = {}
    for g in a.acting.members:
        ginv = G.inverse(g)
        moves = {}
        for i in I.objects:
            j = a.act_obj(ginv, i)
            moves[i] = (j, K.phi(ginv, i), X.phi(g, j))
        obj_act[g] = {}
        for n, fam in enumerate(hom.families):
            maps = {}
            for i, (j, pK, pX) in moves.items():
                F, Ki = fam[j], hom.lower.vertex[i]
                maps[i] = ({k: pX.ob(F.ob(pK.ob(k))) for k in Ki.objects},
                           {f: pX.mor(F.mor(pK.mor(f))) for f in Ki.morphisms})
            image = hom.find(maps)
            if image is None:
                raise NaturalityFailure(f"共轭 {G.elements[g]}·Φ 不是严格自然变换")
            obj_act[g][n] = image
        mor_act[g] = {}
        for m, comps in components.items():
            moved = {i: {k: pX.mor(comps[j][pK.ob(k)]) for k in hom.lower.vertex[i].objects}
                     for i, (j, pK, pX) in moves.items()}
            mor_act[g][m] = hom.modification(obj_act[g][m[1]], obj_act[g][m[2]], moved)
    return GAction(G, hom.cat, obj_act, mor_act, a.acting)


def brute_force_families(K: CatDiagram, X: CatDiagram) -> int:
    """不剪枝地数严格交换的函子族，用于交叉检验"""
    I = K.index
    order = list(I.objects)
    pools = [list(enumerate_functors(K.vertex[i], X.vertex[i])) for i in order]
    position = {i: k for k, i in enumerate(order)}
    count = 0
    for combo in product(*pools):
        ok = True
        for m in I.non_identity():
            Fs, Ft = combo[position[I.src[m]]], combo[position[I.tgt[m]]]
            Km, Xm = K.edge[m], X.edge[m]
            if any(Ft.ob(Km.ob(x)) != Xm.ob(Fs.ob(x)) for x in Km.dom.objects) or \
                    any(Ft.mor(Km.mor(f)) != Xm.mor(Fs.mor(f)) for f in Km.dom.morphisms):
                ok = False
                break
        count += ok
    return count


def cylinder_diagram(K: CatDiagram) -> CatDiagram:
    """K × Δ¹；其严格变换到 X 与 Hom(K, X) 的态射一一对应"""
    interval = from_poset([0, 1], lambda a, b: a <= b, "Δ1")
    vertex = {i: product_category(C, interval) for i, C in K.vertex.items()}
    edge = {}
    for m, F in K.edge.items():
        s, t = vertex[K.index.src[m]], vertex[K.index.tgt[m]]
        edge[m] = Functor(s, t, {x: (F.ob(x[0]), x[1]) for x in s.objects},
                          {f: (F.mor(f[0]), f[1]) for f in s.morphisms}, F.name)
    return CatDiagram(K.index, vertex, edge, f"{K.name}×Δ1")


# ---------------------------------------------------------------- 匹配函子

def setwise_stabilizer(a: GAction, U: Sequence[Obj]) -> Subgroup:
    """G_U = {g | g·U = U}"""
    U = set(U)
    return Subgroup(a.group, tuple(g for g in a.acting.members if {a.act_obj(g, u) for u in U} == U))


def _slice_action(a: GAction, cat: FinCat, S: Subgroup) -> GAction:
    """S 在 U≤I 或 U<I 上的作用：g·α = gα，g·(w, α, α') = (gw, gα, gα')"""
    return action_from_callables(
        a.group, cat, lambda g, x: a.act_mor(g, x),
        lambda g, m: (a.act_mor(g, m[0]), a.act_mor(g, m[1]), a.act_mor(g, m[2])), S)


def _local_diagrams(X: Diagram, cat: FinCat, proj: Functor, S: Optional[Subgroup]) -> Tuple[Diagram, Diagram]:
    """cat/− 与 X∘proj，S 给出时带 S-结构"""
    if S is None or not isinstance(X, GDiagram):
        return overcat_diagram(cat), restrict_diagram(_plain(X), proj)
    act = _slice_action(X.action, cat, S)
    return over_diagram(identity_functor(cat), act, act, f"{cat.name}/−"), pullback_gdiagram(X, proj, act)


@dataclass
class MatchingData:
    """
    m_U: X_U → Hom((U<I)/−, X_{U<})

    |U| = 1 时 X_U 就是 X_u，否则是 Π_{u∈U} X_u（对象为按 U 顺序的元组）。
    """
    members: Tuple[Obj, ...]
    family: SliceFamily
    hom: HomCategory
    source: FinCat
    functor: Functor
    tupled: bool
    source_action: Optional[GAction] = None

    def part(self, x, u):
        return x[self.members.index(u)] if self.tupled else x

    def join(self, values: Mapping[Obj, Any]):
        return tuple(values[u] for u in self.members) if self.tupled else values[self.members[0]]

    @property
    def stabilizer(self) -> Optional[Subgroup]:
        return self.hom.action.acting if self.hom.action is not None else None


def matching_data(X: Diagram, U: Sequence[Obj], equivariant: bool = False) -> MatchingData:
    """
    构造 U<I、(U<I)/−、Hom((U<I)/−, X_{U<}) 以及 m_U(x) = (α ↦ 常值 α_*x_u)

    equivariant 为真且 X 是 G-图时，所有数据带 G_U-作用。

    Raises:
        EmptySubset: U 为空
        MixedDegree: U 中对象度数不同
    """
    D = _plain(X)
    I = D.index
    if not list(U):
        raise EmptySubset("匹配函子需要非空的对象集合 U")
    fam = slice_families(I, U)
    members = fam.members
    S = setwise_stabilizer(X.action, members) if equivariant and isinstance(X, GDiagram) else None
    lower, upper = _local_diagrams(X, fam.strict, fam.proj_strict, S)
    hom = hom_category(lower, upper, f"Hom({fam.strict.name}/−, X)")

    tupled = len(members) != 1
    if tupled:
        source = product_categories([D.vertex[u] for u in members], "×".join(f"X_{label(u)}" for u in members))
    else:
        source = D.vertex[members[0]]
    slot = {u: k for k, u in enumerate(members)}

    def part(x, u):
        return x[slot[u]] if tupled else x

    strict = fam.strict
    obj_map = {}
    for x in source.objects:
        maps = {}
        for alpha in strict.objects:
            y = D.push_obj(alpha, part(x, I.src[alpha]))
            Xj, Ka = D.vertex[I.tgt[alpha]], hom.lower.vertex[alpha]
            maps[alpha] = ({k: y for k in Ka.objects}, {f: Xj.identities[y] for f in Ka.morphisms})
        obj_map[x] = hom.require(maps)
    mor_map = {}
    for f in source.morphisms:
        comps = {alpha: {k: D.push_mor(alpha, part(f, I.src[alpha])) for k in hom.lower.vertex[alpha].objects}
                 for alpha in strict.objects}
        mor_map[f] = hom.modification(obj_map[source.src[f]], obj_map[source.tgt[f]], comps)
    m = Functor(source, hom.cat, obj_map, mor_map, "m_" + "".join(label(u) for u in members))

    source_action = None
    if S is not None:
        a, G = X.action, X.group

        def move(g, x, kind):
            if not tupled:
                F = X.phi(g, members[0])
                return F.ob(x) if kind == "ob" else F.mor(x)
            ginv = G.inverse(g)
            values = []
            for u in members:
                v = a.act_obj(ginv, u)
                F = X.phi(g, v)
                values.append(F.ob(x[slot[v]]) if kind == "ob" else F.mor(x[slot[v]]))
            return tuple(values)

        source_action = action_from_callables(G, source, lambda g, x: move(g, x, "ob"),
                                              lambda g, f: move(g, f, "mor"), S)
    return MatchingData(tuple(members), fam, hom, source, m, tupled, source_action)


def matching_functor(X: Diagram, i: Obj) -> Functor:
    """m_i: X_i → Hom((i<I)/−, X_{i<})"""
    return matching_data(X, [i]).functor


def fixed_matching(md: MatchingData, H: Optional[Subgroup]) -> Functor:
    """m_U^H: X_U^H → Hom(...)^H；H 为空或平凡且无作用时就是 m_U"""
    if md.source_action is None:
        if H is None or H.is_trivial():
            return md.functor
        raise ValidationError("非等变的匹配数据没有不动点")
    src, _ = fixed_category(md.source_action, H)
    tgt, _ = md.hom.fixed(H)
    m = md.functor
    return Functor(src, tgt, {x: m.ob(x) for x in src.objects}, {f: m.mor(f) for f in src.morphisms},
                   f"{m.name}^{H.label}")


def m_over(m: Functor, phi: Obj) -> FinCat:
    """逗号范畴 m/Φ"""
    return over_category(m, phi)[0]


def comma_functor(m: Functor, lam: Mor, source: FinCat, target: FinCat) -> Functor:
    """Λ: Φ → Φ' 诱导的 m/Φ → m/Φ'，(x, λ) ↦ (x, Λ∘λ)"""
    M = m.cod
    return Functor(source, target,
                   {x: (x[0], M.compose(lam, x[1])) for x in source.objects},
                   {f: (f[0], M.compose(lam, f[1]), M.compose(lam, f[2])) for f in source.morphisms},
                   f"{label(lam)}_*")


# ---------------------------------------------------------------- U≤I 分解

def indgrot_witness(X: Diagram, U: Sequence[Obj], equivariant: bool = False) -> IsoWitness:
    """
    Hom((U≤I)/−, X_{U≤}) ≅ Hom((U<I)/−, X_{U<}) ≀ F_U，F_U(Φ) = m_U/Φ

    左侧的 Ψ 在 id_u 处给出 x_u，在非恒等 α 处限制到 (U<I)/α 给出 Φ，
    从锥点 (id_u, α) 出发的态射给出修饰 λ: m_U(x) → Φ。

    Raises:
        MixedDegree: U 中对象度数不同
        WitnessFailure: 第一个不一致的单元，或等变性失败
    """
    D = _plain(X)
    I = D.index
    md = matching_data(X, U, equivariant)
    fam, members = md.family, md.members
    S = md.stabilizer
    lower_u, upper_u = _local_diagrams(X, fam.under, fam.proj_under, S)
    left = hom_category(lower_u, upper_u, f"Hom({fam.under.name}/−, X)")
    FU = over_diagram(md.functor, md.source_action, md.hom.action, "F_U")
    right, right_action = grothendieck(FU, f"{md.hom.cat.name}≀F_U")

    M = md.hom.cat
    strict = fam.strict
    Kl, Ks = left.lower, md.hom.lower
    base = {u: I.identities[u] for u in members}
    point = {u: Kl.vertex[base[u]].objects[0] for u in members}
    cone = {alpha: next(k for k in Kl.vertex[alpha].objects if I.is_identity(k[0])) for alpha in strict.objects}

    def fwd_obj(n):
        psi = left.family(n)
        x = md.join({u: psi[base[u]].ob(point[u]) for u in members})
        phi = md.hom.require({alpha: ({k: psi[alpha].ob(k) for k in Ks.vertex[alpha].objects},
                                      {f: psi[alpha].mor(f) for f in Ks.vertex[alpha].morphisms})
                              for alpha in strict.objects})
        lam = md.hom.modification(md.functor.ob(x), phi, {
            alpha: {k: psi[alpha].mor(_only(Kl.vertex[alpha].hom(cone[alpha], k)))
                    for k in Ks.vertex[alpha].objects}
            for alpha in strict.objects})
        return (phi, (x, lam))

    def bwd_obj(o):
        phi, (x, lam) = o
        family = md.hom.family(phi)
        lam_c = md.hom.components(lam)
        maps = {}
        for u in members:
            xu, P = md.part(x, u), Kl.vertex[base[u]]
            maps[base[u]] = ({k: xu for k in P.objects}, {f: D.vertex[u].identities[xu] for f in P.morphisms})
        for alpha in strict.objects:
            Ka, Xj, c = Kl.vertex[alpha], D.vertex[I.tgt[alpha]], cone[alpha]
            y = D.push_obj(alpha, md.part(x, I.src[alpha]))
            Fa = family[alpha]
            mor_map = {}
            for f in Ka.morphisms:
                if Ka.src[f] != c:
                    mor_map[f] = Fa.mor(f)
                elif Ka.tgt[f] == c:
                    mor_map[f] = Xj.identities[y]
                else:
                    mor_map[f] = lam_c[alpha][Ka.tgt[f]]
            maps[alpha] = ({k: y if k == c else Fa.ob(k) for k in Ka.objects}, mor_map)
        n = left.find(maps)
        if n is None:
            raise WitnessFailure(f"对象 {label(o)} 的逆像不是 Hom({fam.under.name}/−, X) 的对象")
        return n

    try:
        forward_obj = {n: fwd_obj(n) for n in left.cat.objects}
    except InvalidTransformation as e:
        raise WitnessFailure(f"正向映射失败: {e}") from e
    backward_obj = {o: bwd_obj(o) for o in right.objects}

    def fwd_mor(m):
        comps = left.components(m)
        s, t = forward_obj[m[1]], forward_obj[m[2]]
        f = md.join({u: comps[base[u]][point[u]] for u in members})
        lam = md.hom.modification(s[0], t[0], {alpha: {k: comps[alpha][k] for k in Ks.vertex[alpha].objects}
                                               for alpha in strict.objects})
        return (lam, s[1], (f, M.compose(lam, s[1][1]), t[1][1]))

    def bwd_mor(m):
        lam, (x, low), (f, _, high) = m
        s = backward_obj[(M.src[lam], (x, low))]
        t = backward_obj[(M.tgt[lam], (md.source.tgt[f], high))]
        lam_c = md.hom.components(lam)
        comps = {base[u]: {point[u]: md.part(f, u)} for u in members}
        for alpha in strict.objects:
            push = D.push_mor(alpha, md.part(f, I.src[alpha]))
            comps[alpha] = {k: push if k == cone[alpha] else lam_c[alpha][k] for k in Kl.vertex[alpha].objects}
        return left.modification(s, t, comps)

    forward = Functor(left.cat, right, forward_obj, {m: fwd_mor(m) for m in left.cat.morphisms}, "split")
    backward = Functor(right, left.cat, backward_obj, {m: bwd_mor(m) for m in right.morphisms}, "glue")
    witness = IsoWitness(left.cat, right, forward, backward,
                         {"members": [label(u) for u in members], "fibers": len(M.objects)})
    witness.verify()
    if S is not None:
        if not check_equivariant(forward, left.action, right_action):
            raise WitnessFailure(f"分解同构不是 {S.label}-等变的")
        witness.ledger["equivariant"] = S.label
    return witness


# ---------------------------------------------------------------- 扭曲箭头极限

def twisted_limit_witness(K: GDiagram, X: GDiagram) -> IsoWitness:
    """
    Hom(K, X)^G ≅ lim_{Tw(O_G)^op} Hom_{I^H}(K^H, f_!X^L)

    f: G/L → G/H（陪集 gH）处的顶点用 f^*: I^H → I^L，i ↦ g·i；
    Tw 态射 f' = b∘f∘a（a 代表 r，b 代表 s）诱导 Ψ ↦ φ^X_r ∘ Ψ_{s·−} ∘ φ^K_s。

    Raises:
        WitnessFailure: 第一个不一致的单元
    """
    a = K.action
    G = a.group
    enforce_cap('group_order', G.order, "群")
    whole = hom_category(K, X, "Hom(K,X)")
    left, _ = whole.fixed(G.whole())
    orbit = orbit_category(G)
    subs = orbit.lattice.subgroups
    tw = twisted_arrow(orbit.cat).opposite()

    fixed_K = {k: fixed_diagram(K, H) for k, H in enumerate(subs)}
    fixed_X = {k: fixed_diagram(X, H) for k, H in enumerate(subs)}
    vertex_hom: Dict[Mor, HomCategory] = {}
    for f in tw.objects:
        _, L, H, g = f
        KH, IH = fixed_K[H]
        XL, IL = fixed_X[L]
        fstar = transport(a, subs[L], subs[H], g, IH, IL)
        vertex_hom[f] = hom_category(KH, transport_diagram(XL, fstar), f"Hom_{label(f)}")

    edge = {}
    for m in tw.morphisms:
        f, f2 = tw.src[m], tw.tgt[m]
        r, s, g = m[2][3], m[3][3], f[3]
        Zs, Zt = vertex_hom[f], vertex_hom[f2]
        moves = {i2: (a.act_obj(s, i2), K.phi(s, i2)) for i2 in Zt.index.objects}
        obj_map = {}
        for n, fam in enumerate(Zs.families):
            maps = {}
            for i2, (i, pK) in moves.items():
                pX, F, Kt = X.phi(r, a.act_obj(g, i)), fam[i], Zt.lower.vertex[i2]
                maps[i2] = ({k: pX.ob(F.ob(pK.ob(k))) for k in Kt.objects},
                            {h: pX.mor(F.mor(pK.mor(h))) for h in Kt.morphisms})
            image = Zt.find(maps)
            if image is None:
                raise WitnessFailure(f"Tw 边 {label(m)} 把变换 {n} 送出了目标 Hom 范畴")
            obj_map[n] = image
        mor_map = {}
        for mod in Zs.cat.morphisms:
            comps = Zs.components(mod)
            moved = {}
            for i2, (i, pK) in moves.items():
                pX = X.phi(r, a.act_obj(g, i))
                moved[i2] = {k: pX.mor(comps[i][pK.ob(k)]) for k in Zt.lower.vertex[i2].objects}
            mor_map[mod] = Zt.modification(obj_map[mod[1]], obj_map[mod[2]], moved)
        edge[m] = Functor(Zs.cat, Zt.cat, obj_map, mor_map, label(m))

    Z = CatDiagram(tw, {f: vertex_hom[f].cat for f in tw.objects}, edge, "Tw-diagram")
    try:
        Z.check()
    except ValidationError as e:
        raise WitnessFailure(f"Tw 图不是函子: {e}") from e
    limit, _ = cat_limit(Z)

    order = list(tw.objects)

    def restrict_to(f, fam):
        Zf, g = vertex_hom[f], f[3]
        maps = {}
        for i in Zf.index.objects:
            pX, F, Ki = X.phi(g, i), fam[i], Zf.lower.vertex[i]
            maps[i] = ({k: pX.ob(F.ob(k)) for k in Ki.objects}, {h: pX.mor(F.mor(h)) for h in Ki.morphisms})
        return Zf.find(maps)

    forward_obj = {n: tuple(restrict_to(f, whole.family(n)) for f in order) for n in left.objects}
    forward_mor = {}
    for mod in left.morphisms:
        comps = whole.components(mod)
        parts = []
        for k, f in enumerate(order):
            Zf, g = vertex_hom[f], f[3]
            parts.append(Zf.modification(forward_obj[mod[1]][k], forward_obj[mod[2]][k], {
                i: {x: X.phi(g, i).mor(comps[i][x]) for x in Zf.lower.vertex[i].objects}
                for i in Zf.index.objects}))
        forward_mor[mod] = tuple(parts)

    trivial = next(k for k, H in enumerate(subs) if H.is_trivial())
    base = order.index(orbit.cat.identities[trivial])
    Z0 = vertex_hom[order[base]]

    def bwd_obj(y):
        return whole.find({i: F for i, F in Z0.family(y[base]).items()})

    backward_obj = {y: bwd_obj(y) for y in limit.objects}
    backward_mor = {mu: whole.modification(backward_obj[limit.src[mu]], backward_obj[limit.tgt[mu]],
                                           Z0.components(mu[base]))
                    for mu in limit.morphisms}
    forward = Functor(left, limit, forward_obj, forward_mor, "restrict")
    backward = Functor(limit, left, backward_obj, backward_mor, "evaluate")
    return IsoWitness(left, limit, forward, backward,
                      {"twisted_objects": len(order), "group": G.order}).verify()


# ---------------------------------------------------------------- 同伦拉回模型

@dataclass
class CommaModel:
    """f↓g 及其两个同构见证"""
    cat: FinCat
    hom_witness: IsoWitness
    grothendieck_witness: IsoWitness

    def to_json(self) -> dict:
        return {
            "objects": len(self.cat.objects),
            "morphisms": len(self.cat.morphisms),
            "hom": self.hom_witness.ledger,
            "grothendieck": self.grothendieck_witness.ledger,
        }


def comma_bk(f: Functor, g: Functor) -> CommaModel:
    """
    f↓g：对象 (c, e, d, α: f(c)→d, β: g(e)→d)，态射 (源, 目标, u, v, δ)，
    满足 α'∘f(u) = δ∘α 与 β'∘g(v) = δ∘β

    Raises:
        IndexMismatch: f 与 g 的陪域不同
        WitnessFailure: 任一同构见证失败
    """
    if f.cod is not g.cod:
        raise IndexMismatch("f 与 g 必须有同一个陪域")
    C, E, D = f.dom, g.dom, f.cod
    objects = [(c, e, d, al, be) for d in D.objects for c in C.objects for al in D.hom(f.ob(c), d)
               for e in E.objects for be in D.hom(g.ob(e), d)]
    by_corner: Dict[Tuple, List[Tuple]] = {}
    for o in objects:
        by_corner.setdefault(o[:3], []).append(o)
    morphisms = []
    for s in objects:
        c, e, d, al, be = s
        for u in C.out_of(c):
            for v in E.out_of(e):
                for dl in D.out_of(d):
                    for t in by_corner.get((C.tgt[u], E.tgt[v], D.tgt[dl]), ()):
                        if D.compose(t[3], f.mor(u)) == D.compose(dl, al) and \
                                D.compose(t[4], g.mor(v)) == D.compose(dl, be):
                            morphisms.append((s, t, u, v, dl))
    identities = {o: (o, o, C.identities[o[0]], E.identities[o[1]], D.identities[o[2]]) for o in objects}

    def compose(second, first):
        return (first[0], second[1], C.compose(second[2], first[2]), E.compose(second[3], first[3]),
                D.compose(second[4], first[4]))

    comma = FinCat(objects, morphisms, {m: m[0] for m in morphisms}, {m: m[1] for m in morphisms},
                   identities, compose, f"{f.name}↓{g.name}")
    return CommaModel(comma, _comma_hom_witness(comma, f, g), _comma_grothendieck_witness(comma, f, g))


def _comma_hom_witness(comma: FinCat, f: Functor, g: Functor) -> IsoWitness:
    C, E, D = f.dom, g.dom, f.cod
    I = cospan_index()
    X = CatDiagram(I, {"a": C, "b": D, "c": E}, {
        ("a", "a"): identity_functor(C), ("b", "b"): identity_functor(D), ("c", "c"): identity_functor(E),
        ("a", "b"): f, ("c", "b"): g}, "cospan")
    hom = hom_category(overcat_diagram(I), X, "Hom(cospan/−, X)")
    Kv = hom.lower.vertex
    ka, kc = Kv["a"].objects[0], Kv["c"].objects[0]
    kb = ("b", ("b", "b"))
    from_a = (("a", "b"), ("a", "b"), ("b", "b"))
    from_c = (("c", "b"), ("c", "b"), ("b", "b"))
    tip = {("a", ("a", "b")): "a", kb: "b", ("c", ("c", "b")): "c"}

    def fwd_obj(o):
        c, e, d, al, be = o
        at = {"a": f.ob(c), "b": d, "c": g.ob(e)}
        image = {m: al if m == from_a else be if m == from_c else D.identities[at[tip[Kv["b"].src[m]]]]
                 for m in Kv["b"].morphisms}
        return hom.find({
            "a": ({ka: c}, {Kv["a"].morphisms[0]: C.identities[c]}),
            "b": ({k: at[tip[k]] for k in Kv["b"].objects}, image),
            "c": ({kc: e}, {Kv["c"].morphisms[0]: E.identities[e]}),
        })

    def fwd_mor(m):
        s, t, u, v, dl = m
        at = {"a": f.mor(u), "b": dl, "c": g.mor(v)}
        return hom.modification(forward_obj[s], forward_obj[t], {
            "a": {ka: u}, "b": {k: at[tip[k]] for k in Kv["b"].objects}, "c": {kc: v}})

    def bwd_obj(n):
        fam = hom.family(n)
        return (fam["a"].ob(ka), fam["c"].ob(kc), fam["b"].ob(kb), fam["b"].mor(from_a), fam["b"].mor(from_c))

    def bwd_mor(m):
        comps = hom.components(m)
        return (backward_obj[m[1]], backward_obj[m[2]], comps["a"][ka], comps["c"][kc], comps["b"][kb])

    forward_obj = {o: fwd_obj(o) for o in comma.objects}
    if any(n is None for n in forward_obj.values()):
        raise WitnessFailure("某个 f↓g 对象不对应严格自然变换")
    backward_obj = {n: bwd_obj(n) for n in hom.cat.objects}
    forward = Functor(comma, hom.cat, forward_obj, {m: fwd_mor(m) for m in comma.morphisms}, "to_hom")
    backward = Functor(hom.cat, comma, backward_obj, {m: bwd_mor(m) for m in hom.cat.morphisms}, "from_hom")
    return IsoWitness(comma, hom.cat, forward, backward, {"model": "Hom(cospan/−, X)"}).verify()


def _comma_grothendieck_witness(comma: FinCat, f: Functor, g: Functor) -> IsoWitness:
    D = f.cod
    Fo, Go = over_diagram(f), over_diagram(g)
    vertex = {d: product_category(Fo.vertex[d], Go.vertex[d]) for d in D.objects}
    edge = {}
    for b in D.morphisms:
        s, t = vertex[D.src[b]], vertex[D.tgt[b]]
        A, B = Fo.edge[b], Go.edge[b]
        edge[b] = Functor(s, t, {x: (A.ob(x[0]), B.ob(x[1])) for x in s.objects},
                          {m: (A.mor(m[0]), B.mor(m[1])) for m in s.morphisms}, label(b))
    P = CatDiagram(D, vertex, edge, "f/−×g/−")
    right, _ = grothendieck(P, f"{D.name}≀(f/−×g/−)")

    def fwd_mor(m):
        s, t, u, v, dl = m
        c, e, d, al, be = s
        return (dl, ((c, al), (e, be)), ((u, D.compose(dl, al), t[3]), (v, D.compose(dl, be), t[4])))

    def bwd_mor(m):
        dl, ((c, al), (e, be)), ((u, _, al2), (v, _, be2)) = m
        s = (c, e, D.src[dl], al, be)
        t = (f.dom.tgt[u], g.dom.tgt[v], D.tgt[dl], al2, be2)
        return (s, t, u, v, dl)

    forward = Functor(comma, right, {o: (o[2], ((o[0], o[3]), (o[1], o[4]))) for o in comma.objects},
                      {m: fwd_mor(m) for m in comma.morphisms}, "to_grothendieck")
    backward = Functor(right, comma, {o: (o[1][0][0], o[1][1][0], o[0], o[1][0][1], o[1][1][1])
                                      for o in right.objects},
                       {m: bwd_mor(m) for m in right.morphisms}, "from_grothendieck")
    return IsoWitness(comma, right, forward, backward, {"model": "D≀(f/−×g/−)"}).verify()


# ---------------------------------------------------------------- 拟纤维性

def functor_certificate(F: Functor) -> Optional[str]:
    """
    同伦等价的严格证书

    Returns:
        "isomorphism"、"right_adjoint"（每个 F/d 有终对象）、"left_adjoint"（每个 d/F 有始对象）或 None
    """
    if F.is_isomorphism():
        return "isomorphism"
    if all(terminal_object(over_category(F, d)[0]) is not None for d in F.cod.objects):
        return "right_adjoint"
    if all(initial_object(under_category(F, d)[0]) is not None for d in F.cod.objects):
        return "left_adjoint"
    return None


@dataclass
class FibrancyCheck:
    obj: str
    subgroup: str
    source: int
    target: int
    verdict: str
    certificate: Optional[str] = None
    failing_degree: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "object": self.obj, "subgroup": self.subgroup, "source": self.source, "target": self.target,
            "verdict": self.verdict, "certificate": self.certificate, "failing_degree": self.failing_degree,
        }


@dataclass
class FibrancyReport:
    mode: str
    max_dim: int
    checks: List[FibrancyCheck] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        verdicts = {c.verdict for c in self.checks}
        if "FAIL" in verdicts:
            return "FAIL"
        if "INCONCLUSIVE" in verdicts:
            return "INCONCLUSIVE"
        return "PASS"

    def failures(self) -> List[FibrancyCheck]:
        return [c for c in self.checks if c.verdict == "FAIL"]

    def to_json(self) -> dict:
        return {"mode": self.mode, "max_dim": self.max_dim, "verdict": self.verdict,
                "checks": [c.to_json() for c in self.checks]}


def _judge(m: Functor, lam: Mor, source: FinCat, target: FinCat, max_dim: int) -> Tuple[str, Optional[str], Optional[int]]:
    F = comma_functor(m, lam, source, target)
    certificate = functor_certificate(F)
    if certificate is not None:
        return "PASS", certificate, None
    verdict = homology_equivalence(F, max_dim)
    if verdict.passed:
        return "INCONCLUSIVE", "homology", None
    return verdict.verdict, None, verdict.failing_degree


def reedy_quasi_fibrant(X: Diagram, max_dim: int = 2, mode: str = "plain",
                        max_workers: Optional[int] = None) -> FibrancyReport:
    """
    对每个 i（等变模式下再对每个 H ≤ G_i）和 Hom((i<I)/−, X_{i<})^H 的每个非恒等态射 Λ: Φ → Φ'，
    检查诱导函子 m_i^H/Φ → m_i^H/Φ' 是否为弱等价

    判定顺序：同构或伴随证书 → PASS；否则用同调等价，只有同调通过或截断时为 INCONCLUSIVE。

    Raises:
        NotLoopFree: I 或某个逗号范畴不是无圈的
    """
    if mode not in ("plain", "equivariant"):
        raise ValidationError(f"未知的拟纤维性模式: {mode}")
    equivariant = mode == "equivariant"
    if equivariant and not isinstance(X, GDiagram):
        raise ValidationError("等变模式需要 G-图")
    I = _plain(X).index
    I.require_loop_free()

    keys: List[Tuple[str, str, int, int]] = []
    tasks = []
    for i in I.objects:
        md = matching_data(X, [i], equivariant)
        if equivariant:
            subgroups = subgroup_lattice(X.group).subgroups_of(md.stabilizer)
        else:
            subgroups = [None]
        for H in subgroups:
            m = fixed_matching(md, H)
            M = m.cod
            slices = {phi: m_over(m, phi) for phi in M.objects}
            for lam in M.non_identity():
                keys.append((label(i), H.label if H is not None else "{e}", M.src[lam], M.tgt[lam]))
                tasks.append(lambda m=m, lam=lam, s=slices[M.src[lam]], t=slices[M.tgt[lam]]:
                             _judge(m, lam, s, t, max_dim))

    results = run_parallel(tasks, max_workers)
    report = FibrancyReport(mode, max_dim)
    for (obj, sub, s, t), (verdict, certificate, failing) in zip(keys, results):
        report.checks.append(FibrancyCheck(obj, sub, s, t, verdict, certificate, failing))
    log_info(f"拟纤维性检查 ({mode}): {len(report.checks)} 个态射, 结论 {report.verdict}")
    return report


# ---------------------------------------------------------------- 总纤维

@dataclass
class TotalFiber:
    """m_∅/Φ 及其 G_Φ-作用"""
    cat: FinCat
    transformation: int
    action: Optional[GAction] = None
    stabilizer: Optional[Subgroup] = None

    def homology(self, max_dim: Optional[int] = None) -> HomologyResult:
        return truncated_homology(self.cat, max_dim)[1]

    def to_json(self) -> dict:
        data = {"transformation": self.transformation, "objects": len(self.cat.objects),
                "morphisms": len(self.cat.morphisms)}
        if self.stabilizer is not None:
            data["stabilizer"] = self.stabilizer.label
        return data


def _cube_matching(X: Diagram) -> MatchingData:
    I = _plain(X).index
    bottom = initial_object(I)
    if bottom is None:
        raise ValidationError("立方体图的指标范畴需要始对象 ∅")
    return matching_data(X, [bottom], equivariant=isinstance(X, GDiagram))


def total_fiber_model(X: Diagram, phi: int, md: Optional[MatchingData] = None) -> TotalFiber:
    """
    立方体图的总纤维模型 m_∅/Φ

    Raises:
        InvalidTransformation: Φ 不是 Hom(P_0(J)/−, X_{∅<}) 的对象
    """
    md = md if md is not None else _cube_matching(X)
    M = md.hom.cat
    if phi not in M.object_set:
        raise InvalidTransformation(f"没有编号为 {phi} 的变换（共 {len(M.objects)} 个）")
    cat, _ = over_category(md.functor, phi)
    if md.hom.action is None:
        return TotalFiber(cat, phi)
    stabilizer = md.hom.action.stabilizer(phi)
    action = slice_action(md.source_action, md.functor, md.hom.action, phi, cat, stabilizer)
    return TotalFiber(cat, phi, action, stabilizer)


def hpb_certificate(X: Diagram) -> dict:
    """每个总纤维模型都有点的同调时，报告立方体同伦笛卡尔（只报告，不断言）"""
    md = _cube_matching(X)
    fibers = []
    for phi in md.hom.cat.objects:
        model = total_fiber_model(X, phi, md)
        H = model.homology()
        fibers.append({"transformation": phi, "homology": H.to_json(), "point": H.is_point()})
    return {"certified": all(f["point"] for f in fibers), "fibers": fibers}


def quillen_b_base(Y: CatDiagram) -> dict:
    """
    π: D≀Y → D，Y 把每个态射送到同构时比较 N(π/d) 与 N(Y_d) 的同调

    Raises:
        ValidationError: 某条边不是范畴同构
    """
    D = Y.index
    for m in D.morphisms:
        if not Y.edge[m].is_isomorphism():
            raise ValidationError(f"边 {label(m)} 不是同构")
    total, _ = grothendieck(Y)
    pi = Functor(total, D, {o: o[0] for o in total.objects}, {m: m[0] for m in total.morphisms}, "π")
    rows = []
    for d in D.objects:
        over = homology(nerve(over_category(pi, d)[0]))
        fiber = homology(nerve(Y.vertex[d]))
        rows.append({"object": label(d), "over": over.to_json(), "fiber": fiber.to_json(),
                     "equal": over.agrees_with(fiber)})
    return {"verdict": "PASS" if all(r["equal"] for r in rows) else "FAIL", "objects": rows}
