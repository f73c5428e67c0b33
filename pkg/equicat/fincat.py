"""
有限范畴模块
带精确复合表的有限范畴、函子、自然变换、切片构造、度滤过与范畴图的极限
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import (Any, Callable, Dict, Hashable, Iterable, Iterator, List, Mapping,
                    Optional, Sequence, Tuple)

import networkx as nx
from networkx.utils import UnionFind

from .error_handler import (AssocFailure, MixedDegree, NaturalityFailure, NotLoopFree,
                            TypeMismatch, UnitLawFailure, UnknownObject, ValidationError,
                            log_debug)

Obj = Hashable
Mor = Hashable


def label(x: Any) -> str:
    """对象或态射的可读标签，用于 JSON 输出"""
    if isinstance(x, str):
        return x
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(label(y) for y in x)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(label(y) for y in x) + ")"
    return str(x)


class FinCat:
    """
    有限范畴

    对象与态射是任意可哈希值；复合由字典 {(先, 后): 结果} 或可调用对象给出，
    compose(g, f) 表示 g∘f。
    """

    def __init__(self, objects: Sequence[Obj], morphisms: Sequence[Mor],
                 src: Mapping[Mor, Obj], tgt: Mapping[Mor, Obj],
                 identities: Mapping[Obj, Mor],
                 composition, name: str = ""):
        self.objects: Tuple[Obj, ...] = tuple(objects)
        self.morphisms: Tuple[Mor, ...] = tuple(morphisms)
        self.src: Dict[Mor, Obj] = dict(src)
        self.tgt: Dict[Mor, Obj] = dict(tgt)
        self.identities: Dict[Obj, Mor] = dict(identities)
        self.name = name
        if callable(composition):
            self._table = None
            self._compose_fn = composition
        else:
            self._table = dict(composition)
            self._compose_fn = None

    def __repr__(self):
        return f"FinCat({self.name or '?'}: {len(self.objects)} 个对象, {len(self.morphisms)} 个态射)"

    @cached_property
    def object_set(self) -> frozenset:
        return frozenset(self.objects)

    @cached_property
    def morphism_set(self) -> frozenset:
        return frozenset(self.morphisms)

    @cached_property
    def identity_set(self) -> frozenset:
        return frozenset(self.identities.values())

    @cached_property
    def _hom(self) -> Dict[Tuple[Obj, Obj], Tuple[Mor, ...]]:
        table: Dict[Tuple[Obj, Obj], List[Mor]] = {}
        for m in self.morphisms:
            table.setdefault((self.src[m], self.tgt[m]), []).append(m)
        return {k: tuple(v) for k, v in table.items()}

    @cached_property
    def _out(self) -> Dict[Obj, Tuple[Mor, ...]]:
        table: Dict[Obj, List[Mor]] = {x: [] for x in self.objects}
        for m in self.morphisms:
            table[self.src[m]].append(m)
        return {k: tuple(v) for k, v in table.items()}

    @cached_property
    def _in(self) -> Dict[Obj, Tuple[Mor, ...]]:
        table: Dict[Obj, List[Mor]] = {x: [] for x in self.objects}
        for m in self.morphisms:
            table[self.tgt[m]].append(m)
        return {k: tuple(v) for k, v in table.items()}

    def has_object(self, x: Obj) -> bool:
        return x in self.object_set

    def require_object(self, x: Obj):
        if x not in self.object_set:
            raise UnknownObject(f"范畴 {self.name or ''} 中没有对象 {label(x)}")

    def hom(self, x: Obj, y: Obj) -> Tuple[Mor, ...]:
        return self._hom.get((x, y), ())

    def out_of(self, x: Obj) -> Tuple[Mor, ...]:
        return self._out.get(x, ())

    def into(self, y: Obj) -> Tuple[Mor, ...]:
        return self._in.get(y, ())

    def identity(self, x: Obj) -> Mor:
        return self.identities[x]

    def is_identity(self, m: Mor) -> bool:
        return m in self.identity_set

    def non_identity(self) -> List[Mor]:
        return [m for m in self.morphisms if m not in self.identity_set]

    def compose(self, g: Mor, f: Mor) -> Mor:
        """g∘f（先 f 后 g）"""
        if self.tgt[f] != self.src[g]:
            raise TypeMismatch(f"不可复合: {label(f)} 的目标不是 {label(g)} 的源")
        if f in self.identity_set:
            return g
        if g in self.identity_set:
            return f
        if self._compose_fn is not None:
            return self._compose_fn(g, f)
        try:
            return self._table[(f, g)]
        except KeyError:
            raise TypeMismatch(f"复合表缺少 ({label(f)}, {label(g)})") from None

    def compose_path(self, path: Sequence[Mor]) -> Mor:
        """按顺序复合 path[0], path[1], ..."""
        result = path[0]
        for m in path[1:]:
            result = self.compose(m, result)
        return result

    @cached_property
    def _graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.objects)
        for m in self.morphisms:
            if m not in self.identity_set:
                graph.add_edge(self.src[m], self.tgt[m])
        return graph

    def is_loop_free(self) -> bool:
        """不存在非恒等自同态，且“存在非恒等 i→j”关系无圈"""
        graph = self._graph
        if any(graph.has_edge(x, x) for x in self.objects):
            return False
        return nx.is_directed_acyclic_graph(graph)

    def require_loop_free(self, what: str = ""):
        if not self.is_loop_free():
            raise NotLoopFree(f"{what or self.name or '范畴'} 不是无圈范畴，神经不是有限维的")

    def nerve_dimension(self) -> int:
        """非恒等可复合链的最大长度；空范畴为 -1"""
        self.require_loop_free()
        if not self.objects:
            return -1
        return nx.dag_longest_path_length(self._graph)

    def full_subcategory(self, objects: Iterable[Obj], name: str = "") -> "FinCat":
        keep = set(objects)
        objs = [x for x in self.objects if x in keep]
        mors = [m for m in self.morphisms if self.src[m] in keep and self.tgt[m] in keep]
        return self.subcategory(objs, mors, name)

    def subcategory(self, objects: Iterable[Obj], morphisms: Iterable[Mor], name: str = "") -> "FinCat":
        """子范畴，调用者保证对复合与恒等封闭"""
        objs = list(objects)
        mors = list(morphisms)
        return FinCat(objs, mors,
                      {m: self.src[m] for m in mors}, {m: self.tgt[m] for m in mors},
                      {x: self.identities[x] for x in objs},
                      self.compose, name or self.name)

    def opposite(self) -> "FinCat":
        return FinCat(self.objects, self.morphisms, self.tgt, self.src, self.identities,
                      lambda g, f: self.compose(f, g), f"{self.name}^op")

    def is_thin(self) -> bool:
        return all(len(v) <= 1 for v in self._hom.values())

    def to_json(self) -> dict:
        compose = []
        for f in self.non_identity():
            for g in self.out_of(self.tgt[f]):
                if g in self.identity_set:
                    continue
                compose.append({"first": label(f), "second": label(g),
                                "result": label(self.compose(g, f))})
        return {
            "objects": [label(x) for x in self.objects],
            "morphisms": [{"id": label(m), "src": label(self.src[m]), "tgt": label(self.tgt[m])}
                          for m in self.morphisms],
            "identities": {label(x): label(self.identities[x]) for x in self.objects},
            "compose": compose,
        }


def check_category(C: FinCat) -> FinCat:
    """
    校验范畴公理

    Raises:
        TypeMismatch: 源、目标或复合结果的端点不匹配
        UnitLawFailure: 单位律失败
        AssocFailure: 结合律失败
    """
    for x, e in C.identities.items():
        if C.src.get(e) != x or C.tgt.get(e) != x:
            raise TypeMismatch(f"恒等态射 {label(e)} 的端点不是 {label(x)}")
    for m in C.morphisms:
        if C.src[m] not in C.object_set or C.tgt[m] not in C.object_set:
            raise TypeMismatch(f"态射 {label(m)} 的端点不是对象")

    composites: Dict[Tuple[Mor, Mor], Mor] = {}
    for f in C.morphisms:
        for g in C.out_of(C.tgt[f]):
            h = _raw_compose(C, g, f)
            if h not in C.morphism_set or C.src[h] != C.src[f] or C.tgt[h] != C.tgt[g]:
                raise TypeMismatch(f"{label(g)}∘{label(f)} 的结果端点错误")
            composites[(f, g)] = h

    for f in C.morphisms:
        if composites[(f, C.identities[C.tgt[f]])] != f or composites[(C.identities[C.src[f]], f)] != f:
            raise UnitLawFailure(f"单位律在 {label(f)} 处不成立")

    for f in C.morphisms:
        for g in C.out_of(C.tgt[f]):
            gf = composites[(f, g)]
            for h in C.out_of(C.tgt[g]):
                if composites[(gf, h)] != composites[(f, composites[(g, h)])]:
                    raise AssocFailure(f"结合律在 ({label(f)}, {label(g)}, {label(h)}) 处不成立")
    return C


def _raw_compose(C: FinCat, g: Mor, f: Mor) -> Mor:
    if C._table is not None and (f, g) in C._table:
        return C._table[(f, g)]
    return C.compose(g, f)


def validate_category(raw: dict) -> FinCat:
    """
    从 JSON 表构造并校验有限范畴

    恒等态射参与的复合可以省略；其余可复合对必须出现在 compose 中。
    """
    if not isinstance(raw, dict):
        raise ValidationError("范畴 JSON 必须是对象")
    objects = [str(x) for x in raw.get('objects', [])]
    if len(set(objects)) != len(objects):
        raise ValidationError("对象名重复")
    known = set(objects)
    src, tgt, morphisms = {}, {}, []
    for entry in raw.get('morphisms', []):
        m = str(entry['id'])
        if m in src:
            raise ValidationError(f"态射 id 重复: {m}")
        s, t = str(entry['src']), str(entry['tgt'])
        for x in (s, t):
            if x not in known:
                raise UnknownObject(f"态射 {m} 引用了未知对象 {x}")
        src[m], tgt[m] = s, t
        morphisms.append(m)

    identities = {}
    for x in objects:
        e = raw.get('identities', {}).get(x)
        if e is None:
            raise UnitLawFailure(f"对象 {x} 没有恒等态射")
        e = str(e)
        if e not in src:
            raise UnknownObject(f"恒等态射 {e} 不在态射列表中")
        identities[x] = e
    identity_set = set(identities.values())

    table = {}
    for entry in raw.get('compose', []):
        f, g, h = str(entry['first']), str(entry['second']), str(entry['result'])
        for m in (f, g, h):
            if m not in src:
                raise UnknownObject(f"复合表引用了未知态射 {m}")
        if tgt[f] != src[g]:
            raise TypeMismatch(f"复合表项 ({f}, {g}) 不可复合")
        if src[h] != src[f] or tgt[h] != tgt[g]:
            raise TypeMismatch(f"{g}∘{f} = {h} 的端点错误")
        if f in identity_set and h != g or g in identity_set and h != f:
            raise UnitLawFailure(f"单位律在 ({f}, {g}) 处不成立")
        table[(f, g)] = h

    for f in morphisms:
        for g in morphisms:
            if tgt[f] != src[g] or (f, g) in table:
                continue
            if f in identity_set:
                table[(f, g)] = g
            elif g in identity_set:
                table[(f, g)] = f
            else:
                raise TypeMismatch(f"复合表缺少可复合对 ({f}, {g})")

    C = check_category(FinCat(objects, morphisms, src, tgt, identities, table, raw.get('name', '')))
    log_debug(f"范畴校验通过: {len(objects)} 个对象, {len(morphisms)} 个态射, 无圈={C.is_loop_free()}")
    return C


# ---------------------------------------------------------------- 常用范畴

def from_poset(elements: Sequence[Obj], leq: Callable[[Obj, Obj], bool], name: str = "") -> FinCat:
    """偏序集作为范畴，态射 (a, b) 表示 a ≤ b"""
    elements = list(elements)
    morphisms = [(a, b) for a in elements for b in elements if leq(a, b)]
    return FinCat(elements, morphisms,
                  {m: m[0] for m in morphisms}, {m: m[1] for m in morphisms},
                  {a: (a, a) for a in elements},
                  lambda g, f: (f[0], g[1]), name)


def _subset_key(U: frozenset):
    return (len(U), sorted(U))


def powerset_category(points: Iterable[int], variant: str = "P", name: str = "") -> FinCat:
    """
    P(J)、P_0(J)（非空子集）或 P_1(J)（真子集）

    对象是点下标的 frozenset，按 (大小, 成员) 排序。
    """
    points = sorted(points)
    subsets = [frozenset(c for k, c in enumerate(points) if mask >> k & 1)
               for mask in range(1 << len(points))]
    whole = frozenset(points)
    if variant == "P_0":
        subsets = [U for U in subsets if U]
    elif variant == "P_1":
        subsets = [U for U in subsets if U != whole]
    elif variant != "P":
        raise ValidationError(f"未知的幂集变体: {variant}")
    subsets.sort(key=_subset_key)
    return from_poset(subsets, lambda a, b: a <= b, name or variant)


def discrete_category(objects: Iterable[Obj], name: str = "") -> FinCat:
    objects = list(objects)
    return FinCat(objects, [(x, x) for x in objects],
                  {(x, x): x for x in objects}, {(x, x): x for x in objects},
                  {x: (x, x) for x in objects}, {}, name or "discrete")


def terminal_category(obj: Obj = "*") -> FinCat:
    return discrete_category([obj], "terminal")


def empty_category() -> FinCat:
    return discrete_category([], "empty")


def cospan_index() -> FinCat:
    """a → b ← c"""
    order = {("a", "b"), ("c", "b")}
    return from_poset(["a", "b", "c"], lambda x, y: x == y or (x, y) in order, "cospan")


def product_category(C: FinCat, D: FinCat) -> FinCat:
    objects = list(product(C.objects, D.objects))
    morphisms = list(product(C.morphisms, D.morphisms))
    return FinCat(objects, morphisms,
                  {m: (C.src[m[0]], D.src[m[1]]) for m in morphisms},
                  {m: (C.tgt[m[0]], D.tgt[m[1]]) for m in morphisms},
                  {(x, y): (C.identities[x], D.identities[y]) for x, y in objects},
                  lambda g, f: (C.compose(g[0], f[0]), D.compose(g[1], f[1])),
                  f"{C.name}×{D.name}")


def product_categories(cats: Sequence[FinCat], name: str = "") -> FinCat:
    """n 元积，对象与态射都是分量元组"""
    cats = list(cats)
    objects = list(product(*(C.objects for C in cats)))
    morphisms = list(product(*(C.morphisms for C in cats)))
    return FinCat(objects, morphisms,
                  {m: tuple(C.src[c] for C, c in zip(cats, m)) for m in morphisms},
                  {m: tuple(C.tgt[c] for C, c in zip(cats, m)) for m in morphisms},
                  {x: tuple(C.identities[c] for C, c in zip(cats, x)) for x in objects},
                  lambda g, f: tuple(C.compose(b, a) for C, a, b in zip(cats, f, g)),
                  name or "×".join(C.name for C in cats))


def terminal_object(C: FinCat) -> Optional[Obj]:
    for t in C.objects:
        if all(len(C.hom(x, t)) == 1 for x in C.objects):
            return t
    return None


def initial_object(C: FinCat) -> Optional[Obj]:
    for s in C.objects:
        if all(len(C.hom(s, x)) == 1 for x in C.objects):
            return s
    return None


def connected_components(C: FinCat) -> List[List[Obj]]:
    """连通分支，分支内与分支间都保持对象顺序"""
    uf = UnionFind(C.objects)
    for m in C.morphisms:
        uf.union(C.src[m], C.tgt[m])
    position = {x: k for k, x in enumerate(C.objects)}
    components: Dict[Obj, List[Obj]] = {}
    for x in C.objects:
        components.setdefault(uf[x], []).append(x)
    return sorted(components.values(), key=lambda c: position[c[0]])


# ---------------------------------------------------------------- 函子与自然变换

class Functor:
    """保持恒等、端点与复合的映射"""

    def __init__(self, dom: FinCat, cod: FinCat, obj_map: Mapping[Obj, Obj],
                 mor_map: Mapping[Mor, Mor], name: str = ""):
        self.dom = dom
        self.cod = cod
        self.obj_map: Dict[Obj, Obj] = dict(obj_map)
        self.mor_map: Dict[Mor, Mor] = dict(mor_map)
        self.name = name

    def __repr__(self):
        return f"Functor({self.name or '?'}: {self.dom.name} → {self.cod.name})"

    def ob(self, x: Obj) -> Obj:
        return self.obj_map[x]

    def mor(self, m: Mor) -> Mor:
        return self.mor_map[m]

    def same_as(self, other: "Functor") -> bool:
        return self.obj_map == other.obj_map and self.mor_map == other.mor_map

    def key(self) -> Tuple[Tuple[Obj, ...], Tuple[Mor, ...]]:
        """按定义域对象与态射顺序排列的像，可作为函子的结构化 id"""
        return (tuple(self.obj_map[x] for x in self.dom.objects),
                tuple(self.mor_map[m] for m in self.dom.morphisms))

    def check(self) -> "Functor":
        """
        校验函子性

        Raises:
            TypeMismatch: 像的端点不对或映射不完整
            UnitLawFailure: 不保持恒等
            AssocFailure: 不保持复合
        """
        dom, cod = self.dom, self.cod
        for x in dom.objects:
            if x not in self.obj_map or self.obj_map[x] not in cod.object_set:
                raise TypeMismatch(f"{self.name}: 对象 {label(x)} 没有合法的像")
        for m in dom.morphisms:
            if m not in self.mor_map or self.mor_map[m] not in cod.morphism_set:
                raise TypeMismatch(f"{self.name}: 态射 {label(m)} 没有合法的像")
            fm = self.mor_map[m]
            if cod.src[fm] != self.obj_map[dom.src[m]] or cod.tgt[fm] != self.obj_map[dom.tgt[m]]:
                raise TypeMismatch(f"{self.name}: 态射 {label(m)} 的像端点错误")
        for x in dom.objects:
            if self.mor_map[dom.identities[x]] != cod.identities[self.obj_map[x]]:
                raise UnitLawFailure(f"{self.name}: 不保持 {label(x)} 的恒等")
        for f in dom.non_identity():
            for g in dom.out_of(dom.tgt[f]):
                if dom.is_identity(g):
                    continue
                if self.mor_map[dom.compose(g, f)] != cod.compose(self.mor_map[g], self.mor_map[f]):
                    raise AssocFailure(f"{self.name}: 不保持复合 {label(g)}∘{label(f)}")
        return self

    def is_isomorphism(self) -> bool:
        return (len(set(self.obj_map.values())) == len(self.dom.objects) == len(self.cod.objects)
                and len(set(self.mor_map.values())) == len(self.dom.morphisms) == len(self.cod.morphisms))

    def inverse(self) -> "Functor":
        if not self.is_isomorphism():
            raise ValidationError(f"{self.name} 不是同构，没有逆")
        return Functor(self.cod, self.dom,
                       {v: k for k, v in self.obj_map.items()},
                       {v: k for k, v in self.mor_map.items()}, f"{self.name}⁻¹")

    def is_identity_functor(self) -> bool:
        return (all(k == v for k, v in self.obj_map.items())
                and all(k == v for k, v in self.mor_map.items()))


def identity_functor(C: FinCat) -> Functor:
    return Functor(C, C, {x: x for x in C.objects}, {m: m for m in C.morphisms}, f"id_{C.name}")


def compose_functors(G: Functor, F: Functor) -> Functor:
    """G∘F"""
    return Functor(F.dom, G.cod,
                   {x: G.obj_map[y] for x, y in F.obj_map.items()},
                   {m: G.mor_map[n] for m, n in F.mor_map.items()},
                   f"{G.name}∘{F.name}")


def inclusion_functor(sub: FinCat, ambient: FinCat, name: str = "ι") -> Functor:
    return Functor(sub, ambient, {x: x for x in sub.objects}, {m: m for m in sub.morphisms}, name)


def functor_from_callables(dom: FinCat, cod: FinCat, on_obj: Callable, on_mor: Callable,
                           name: str = "") -> Functor:
    return Functor(dom, cod, {x: on_obj(x) for x in dom.objects},
                   {m: on_mor(m) for m in dom.morphisms}, name)


@dataclass
class NatTrans:
    """自然变换 src ⇒ tgt，components[x]: src(x) → tgt(x)"""
    src: Functor
    tgt: Functor
    components: Dict[Obj, Mor] = field(default_factory=dict)

    def check(self) -> "NatTrans":
        """
        Raises:
            NaturalityFailure: 某个态射处的自然性方块不交换
        """
        F, G = self.src, self.tgt
        cod = F.cod
        for x in F.dom.objects:
            c = self.components.get(x)
            if c is None or cod.src[c] != F.ob(x) or cod.tgt[c] != G.ob(x):
                raise TypeMismatch(f"自然变换在 {label(x)} 处的分量端点错误")
        for m in F.dom.morphisms:
            x, y = F.dom.src[m], F.dom.tgt[m]
            if cod.compose(G.mor(m), self.components[x]) != cod.compose(self.components[y], F.mor(m)):
                raise NaturalityFailure(f"自然性在态射 {label(m)} 处不成立")
        return self


def enumerate_functors(C: FinCat, D: FinCat, obj_choices: Optional[Mapping[Obj, Sequence[Obj]]] = None,
                       limit: Optional[int] = None) -> Iterator[Functor]:
    """
    回溯枚举全部函子 C → D

    Args:
        obj_choices: 可选，限制每个对象的像
        limit: 最多产生的函子个数
    """
    objects = list(C.objects)
    moves = C.non_identity()
    index = {m: k for k, m in enumerate(moves)}
    # 对每个非恒等态射记录以它为最后赋值项的复合约束 (f, g, g∘f)
    constraints: Dict[int, List[Tuple[Mor, Mor, Mor]]] = {k: [] for k in range(len(moves))}
    for f in moves:
        for g in C.out_of(C.tgt[f]):
            if C.is_identity(g):
                continue
            h = C.compose(g, f)
            parts = [index[f], index[g]] + ([] if C.is_identity(h) else [index[h]])
            constraints[max(parts)].append((f, g, h))

    count = 0
    obj_map: Dict[Obj, Obj] = {}
    mor_map: Dict[Mor, Mor] = {}

    def assign_morphisms(k: int) -> Iterator[Functor]:
        nonlocal count
        if k == len(moves):
            full = dict(mor_map)
            for x in objects:
                full[C.identities[x]] = D.identities[obj_map[x]]
            count += 1
            yield Functor(C, D, dict(obj_map), full)
            return
        m = moves[k]
        for candidate in D.hom(obj_map[C.src[m]], obj_map[C.tgt[m]]):
            mor_map[m] = candidate
            ok = True
            for f, g, h in constraints[k]:
                image_h = D.identities[obj_map[C.src[h]]] if C.is_identity(h) else mor_map[h]
                if D.compose(mor_map[g], mor_map[f]) != image_h:
                    ok = False
                    break
            if ok:
                yield from assign_morphisms(k + 1)
                if limit is not None and count >= limit:
                    return
        mor_map.pop(m, None)

    def assign_objects(k: int) -> Iterator[Functor]:
        if k == len(objects):
            yield from assign_morphisms(0)
            return
        x = objects[k]
        choices = obj_choices.get(x, D.objects) if obj_choices else D.objects
        for y in choices:
            obj_map[x] = y
            yield from assign_objects(k + 1)
            if limit is not None and count >= limit:
                return
        obj_map.pop(x, None)

    yield from assign_objects(0)


def enumerate_transformations(F: Functor, G: Functor) -> Iterator[Tuple[Mor, ...]]:
    """枚举自然变换 F ⇒ G，分量按 dom 对象顺序排成元组"""
    C, D = F.dom, F.cod
    objects = list(C.objects)
    position = {x: k for k, x in enumerate(objects)}
    checks: Dict[int, List[Mor]] = {k: [] for k in range(len(objects))}
    for m in C.non_identity():
        checks[max(position[C.src[m]], position[C.tgt[m]])].append(m)
    current: List[Mor] = []

    def extend(k: int) -> Iterator[Tuple[Mor, ...]]:
        if k == len(objects):
            yield tuple(current)
            return
        x = objects[k]
        for c in D.hom(F.ob(x), G.ob(x)):
            current.append(c)
            if all(D.compose(G.mor(m), current[position[C.src[m]]])
                   == D.compose(current[position[C.tgt[m]]], F.mor(m)) for m in checks[k]):
                yield from extend(k + 1)
            current.pop()

    yield from extend(0)


# ---------------------------------------------------------------- 范畴图

class CatDiagram:
    """范畴值图 X: I → Cat"""

    def __init__(self, index: FinCat, vertex: Mapping[Obj, FinCat], edge: Mapping[Mor, Functor],
                 name: str = "X"):
        self.index = index
        self.vertex: Dict[Obj, FinCat] = dict(vertex)
        self.edge: Dict[Mor, Functor] = dict(edge)
        self.name = name

    def __repr__(self):
        return f"CatDiagram({self.name}: {len(self.index.objects)} 个顶点)"

    def push_obj(self, m: Mor, x: Obj) -> Obj:
        """α_* x"""
        return self.edge[m].obj_map[x]

    def push_mor(self, m: Mor, f: Mor) -> Mor:
        return self.edge[m].mor_map[f]

    def check(self) -> "CatDiagram":
        """
        校验函子性：edge(id)=id, edge(β∘α)=edge(β)∘edge(α)

        Raises:
            TypeMismatch / UnitLawFailure / AssocFailure
        """
        I = self.index
        for i in I.objects:
            if i not in self.vertex:
                raise TypeMismatch(f"{self.name}: 缺少顶点 {label(i)}")
        for m in I.morphisms:
            F = self.edge.get(m)
            if F is None:
                raise TypeMismatch(f"{self.name}: 缺少边 {label(m)}")
            if F.dom is not self.vertex[I.src[m]] or F.cod is not self.vertex[I.tgt[m]]:
                raise TypeMismatch(f"{self.name}: 边 {label(m)} 的端点范畴不匹配")
            F.check()
        for i in I.objects:
            if not self.edge[I.identities[i]].is_identity_functor():
                raise UnitLawFailure(f"{self.name}: 恒等 {label(i)} 的像不是恒等函子")
        for f in I.non_identity():
            for g in I.out_of(I.tgt[f]):
                if I.is_identity(g):
                    continue
                if not self.edge[I.compose(g, f)].same_as(compose_functors(self.edge[g], self.edge[f])):
                    raise AssocFailure(f"{self.name}: 复合 {label(g)}∘{label(f)} 处函子性失败")
        return self


def constant_diagram(I: FinCat, C: FinCat, name: str = "const") -> CatDiagram:
    ident = identity_functor(C)
    return CatDiagram(I, {i: C for i in I.objects}, {m: ident for m in I.morphisms}, name)


def restrict_diagram(X: CatDiagram, F: Functor, name: str = "") -> CatDiagram:
    """X∘F"""
    return CatDiagram(F.dom, {j: X.vertex[F.ob(j)] for j in F.dom.objects},
                      {m: X.edge[F.mor(m)] for m in F.dom.morphisms}, name or f"{X.name}∘{F.name}")


# ---------------------------------------------------------------- 切片

def over_category(F: Functor, d: Obj) -> Tuple[FinCat, Functor]:
    """
    F/d

    对象 (i, α: F(i)→d)，态射 (u, α, α')，其中 u: i→i' 且 α'∘F(u) = α。

    Returns:
        (F/d, 到 dom F 的投影)

    Raises:
        UnknownObject: d 不是 cod F 的对象
    """
    I, D = F.dom, F.cod
    D.require_object(d)
    objects = [(i, a) for i in I.objects for a in D.hom(F.ob(i), d)]
    by_source: Dict[Obj, List[Tuple[Obj, Mor]]] = {}
    for i, a in objects:
        by_source.setdefault(i, []).append((i, a))
    morphisms = []
    for i, a in objects:
        for u in I.out_of(i):
            j = I.tgt[u]
            Fu = F.mor(u)
            for _, b in by_source.get(j, ()):
                if D.compose(b, Fu) == a:
                    morphisms.append((u, a, b))
    return _slice(objects, morphisms, I, f"{F.name}/{label(d)}")


def under_category(F: Functor, d: Obj) -> Tuple[FinCat, Functor]:
    """
    d/F

    对象 (i, α: d→F(i))，态射 (u, α, α')，其中 F(u)∘α = α'。
    """
    I, D = F.dom, F.cod
    D.require_object(d)
    objects = [(i, a) for i in I.objects for a in D.hom(d, F.ob(i))]
    by_source: Dict[Obj, List[Tuple[Obj, Mor]]] = {}
    for i, a in objects:
        by_source.setdefault(i, []).append((i, a))
    morphisms = []
    for i, a in objects:
        for u in I.out_of(i):
            j = I.tgt[u]
            Fu_a = D.compose(F.mor(u), a)
            for _, b in by_source.get(j, ()):
                if Fu_a == b:
                    morphisms.append((u, a, b))
    return _slice(objects, morphisms, I, f"{label(d)}/{F.name}")


def _slice(objects, morphisms, I: FinCat, name: str) -> Tuple[FinCat, Functor]:
    src = {m: (I.src[m[0]], m[1]) for m in morphisms}
    tgt = {m: (I.tgt[m[0]], m[2]) for m in morphisms}
    identities = {(i, a): (I.identities[i], a, a) for i, a in objects}

    def compose(g, f):
        return (I.compose(g[0], f[0]), f[1], g[2])

    C = FinCat(objects, morphisms, src, tgt, identities, compose, name)
    proj = Functor(C, I, {x: x[0] for x in objects}, {m: m[0] for m in morphisms}, "proj")
    return C, proj


@dataclass
class SliceFamily:
    """
    U≤I 与 U<I

    under 的对象是源在 U 中的态射 α: u→j，按 u 分块；strict 只含非恒等 α。
    态射 (w, α, α') 满足 w∘α = α'，不同 u 的分块之间没有态射。
    """
    members: Tuple[Obj, ...]
    under: FinCat
    strict: FinCat
    inclusion: Functor
    proj_under: Functor
    proj_strict: Functor


def slice_families(I: FinCat, U: Iterable[Obj], check_degree: bool = True) -> SliceFamily:
    """
    构造 U≤I、U<I 及包含函子

    Raises:
        UnknownObject: U 含未知对象
        MixedDegree: U 中对象的 under 度不同
    """
    members = [x for x in I.objects if x in set(U)]
    for x in U:
        I.require_object(x)
    if check_degree and len(members) > 1:
        degrees = degree_filtration(I, "under").degrees
        if len({degrees[u] for u in members}) > 1:
            raise MixedDegree("U 中的对象度数不同: " + ", ".join(f"{label(u)}:{degrees[u]}" for u in members))

    objects = [a for u in members for a in I.out_of(u)]
    morphisms = []
    for a in objects:
        j = I.tgt[a]
        for w in I.out_of(j):
            b = I.compose(w, a)
            morphisms.append((w, a, b))
    src = {m: m[1] for m in morphisms}
    tgt = {m: m[2] for m in morphisms}
    identities = {a: (I.identities[I.tgt[a]], a, a) for a in objects}

    def compose(g, f):
        return (I.compose(g[0], f[0]), f[1], g[2])

    name = "{" + ",".join(label(u) for u in members) + "}"
    under = FinCat(objects, morphisms, src, tgt, identities, compose, f"{name}≤I")
    strict_objects = [a for a in objects if not I.is_identity(a)]
    strict = under.full_subcategory(strict_objects, f"{name}<I")
    proj_under = Functor(under, I, {a: I.tgt[a] for a in objects}, {m: m[0] for m in morphisms}, "proj")
    proj_strict = Functor(strict, I, {a: I.tgt[a] for a in strict.objects},
                          {m: m[0] for m in strict.morphisms}, "proj")
    return SliceFamily(tuple(members), under, strict, inclusion_functor(strict, under),
                       proj_under, proj_strict)


@dataclass
class DegreeFiltration:
    """度函数与滤过子范畴"""
    category: FinCat
    direction: str
    degrees: Dict[Obj, int]

    @property
    def max_degree(self) -> int:
        return max(self.degrees.values(), default=-1)

    @property
    def left_finite(self) -> bool:
        """度数有界，且每个非恒等态射严格降低（under）或升高（over）度数"""
        C = self.category
        if any(d < 0 or d > C.nerve_dimension() for d in self.degrees.values()):
            return False
        sign = 1 if self.direction == "under" else -1
        return all(sign * (self.degrees[C.src[m]] - self.degrees[C.tgt[m]]) > 0 for m in C.non_identity())

    def level(self, n: int) -> List[Obj]:
        """I_n"""
        return [x for x in self.category.objects if self.degrees[x] == n]

    def up_to(self, n: int) -> FinCat:
        """I_{≤n}"""
        return self.category.full_subcategory([x for x in self.category.objects if self.degrees[x] <= n],
                                              f"{self.category.name}_≤{n}")

    def to_json(self) -> dict:
        return {
            "direction": self.direction,
            "degrees": {label(x): d for x, d in self.degrees.items()},
            "levels": {str(n): [label(x) for x in self.level(n)] for n in range(self.max_degree + 1)},
            "left_finite": self.left_finite,
        }


def degree_filtration(I: FinCat, direction: str = "under") -> DegreeFiltration:
    """
    under 度为从对象出发的最长非恒等链长度，over 度为到达对象的最长链长度

    Raises:
        NotLoopFree: I 有非恒等自同态或态射圈
    """
    if direction not in ("under", "over"):
        raise ValidationError(f"未知的度方向: {direction}")
    I.require_loop_free()
    graph = I._graph
    degrees: Dict[Obj, int] = {}
    if direction == "under":
        for x in reversed(list(nx.topological_sort(graph))):
            degrees[x] = max((degrees[y] + 1 for y in graph.successors(x)), default=0)
    else:
        for x in nx.topological_sort(graph):
            degrees[x] = max((degrees[y] + 1 for y in graph.predecessors(x)), default=0)
    ordered = {x: degrees[x] for x in I.objects}
    return DegreeFiltration(I, direction, ordered)


# ---------------------------------------------------------------- 极限

def cat_limit(D: CatDiagram) -> Tuple[FinCat, Dict[Obj, Functor]]:
    """
    范畴图的极限

    对象是在每条边下相容的顶点对象族，态射是相容的态射族，id 为按指标对象顺序的分量元组。

    Returns:
        (极限范畴, 每个指标对象处的投影)
    """
    I = D.index
    order = list(I.objects)
    position = {i: k for k, i in enumerate(order)}
    # 对每个位置 k，列出两端都不晚于 k 且至少一端为 k 的非恒等边
    checks: Dict[int, List[Mor]] = {k: [] for k in range(len(order))}
    for m in I.non_identity():
        checks[max(position[I.src[m]], position[I.tgt[m]])].append(m)

    def families(choices: Callable[[int, Obj], Sequence], push: Callable[[Mor, Any], Any]) -> List[tuple]:
        found: List[tuple] = []
        current: List[Any] = []

        def extend(k: int):
            if k == len(order):
                found.append(tuple(current))
                return
            for candidate in choices(k, order[k]):
                current.append(candidate)
                if all(push(m, current[position[I.src[m]]]) == current[position[I.tgt[m]]]
                       for m in checks[k]):
                    extend(k + 1)
                current.pop()

        extend(0)
        return found

    objects = families(lambda k, i: D.vertex[i].objects, D.push_obj)
    morphisms = []
    for x in objects:
        for y in objects:
            morphisms.extend(families(lambda k, i: D.vertex[i].hom(x[k], y[k]), D.push_mor))

    src = {m: tuple(D.vertex[i].src[c] for i, c in zip(order, m)) for m in morphisms}
    tgt = {m: tuple(D.vertex[i].tgt[c] for i, c in zip(order, m)) for m in morphisms}
    identities = {x: tuple(D.vertex[i].identities[c] for i, c in zip(order, x)) for x in objects}

    def compose(g, f):
        return tuple(D.vertex[i].compose(a, b) for i, a, b in zip(order, g, f))

    L = FinCat(objects, morphisms, src, tgt, identities, compose, f"lim {D.name}")
    projections = {
        i: Functor(L, D.vertex[i], {x: x[k] for x in objects}, {m: m[k] for m in morphisms}, f"pr_{label(i)}")
        for k, i in enumerate(order)
    }
    log_debug(f"极限 {D.name}: {len(objects)} 个对象, {len(morphisms)} 个态射")
    return L, projections


# ---------------------------------------------------------------- 同构见证

@dataclass
class IsoWitness:
    """一对互逆函子 forward: left → right, backward: right → left 及其核验记录"""
    left: FinCat
    right: FinCat
    forward: Functor
    backward: Functor
    ledger: Dict[str, Any] = field(default_factory=dict)

    def verify(self) -> "IsoWitness":
        """
        逐单元核验两个复合都是恒等

        Raises:
            WitnessFailure: 带第一个不一致的单元
        """
        from .error_handler import WitnessFailure

        for name, F in (("forward", self.forward), ("backward", self.backward)):
            try:
                F.check()
            except ValidationError as e:
                raise WitnessFailure(f"{name} 不是函子: {e}") from e
        for x in self.left.objects:
            y = self.backward.obj_map.get(self.forward.obj_map.get(x))
            if y != x:
                raise WitnessFailure(f"backward∘forward 在对象 {label(x)} 处不是恒等")
        for m in self.left.morphisms:
            if self.backward.mor_map.get(self.forward.mor_map.get(m)) != m:
                raise WitnessFailure(f"backward∘forward 在态射 {label(m)} 处不是恒等")
        for x in self.right.objects:
            if self.forward.obj_map.get(self.backward.obj_map.get(x)) != x:
                raise WitnessFailure(f"forward∘backward 在对象 {label(x)} 处不是恒等")
        for m in self.right.morphisms:
            if self.forward.mor_map.get(self.backward.mor_map.get(m)) != m:
                raise WitnessFailure(f"forward∘backward 在态射 {label(m)} 处不是恒等")
        self.ledger.update({
            "objects": len(self.left.objects),
            "morphisms": len(self.left.morphisms),
            "verified": True,
        })
        return self

    def to_json(self) -> dict:
        return {
            "left": self.left.name,
            "right": self.right.name,
            "objects": {label(x): label(y) for x, y in self.forward.obj_map.items()},
            "morphisms": {label(m): label(n) for m, n in self.forward.mor_map.items()},
            "ledger": dict(self.ledger),
        }
