"""
输入格式模块
把命令行读入的 JSON 转换为群、G-集合、范畴、函子与（G-）图，并在读入时检查尺寸上限
"""

from typing import Any, Dict, List, Mapping, Optional, Union

from .bounds import _parse_subset
from .config_manager import enforce_cap
from .error_handler import TypeMismatch, UnknownObject, ValidationError
from .equivariant import GAction, GDiagram, action_from_json, validate_g_structure
from .fincat import CatDiagram, FinCat, Functor, identity_functor, label, validate_category
from .groups import Group, Subgroup, group_from_json, standard_group, subgroup_lattice
from .gsets import GSet, gset_from_json

Diagram = Union[CatDiagram, GDiagram]


def load_group(raw: Any) -> Group:
    """标准群名（"Z3"、"S3"…）或 group.json 对象"""
    if isinstance(raw, str):
        G = standard_group(raw)
    else:
        G = group_from_json(raw)
    enforce_cap('group_order', G.order, "群")
    return G


def load_subgroup(G: Group, key: Optional[str]) -> Subgroup:
    """子群标签；None 表示整个群"""
    if key is None:
        return G.whole()
    return subgroup_lattice(G).find(key)


def load_gset(raw: Any, group: Optional[Group] = None) -> GSet:
    if not isinstance(raw, dict):
        raise ValidationError("G-集合 JSON 必须是对象")
    if group is None and 'group' in raw:
        group = load_group(raw['group'])
    return gset_from_json(raw, group)


def load_category(raw: Any, name: str = "") -> FinCat:
    C = validate_category(raw)
    if name:
        C.name = name
    return C


def functor_from_json(dom: FinCat, cod: FinCat, raw: Mapping[str, Any], name: str = "") -> Functor:
    """
    {"objects": {a: b}, "morphisms": {m: n}}；恒等态射可省略，取像对象的恒等

    Raises:
        UnknownObject: 引用了不存在的对象或态射
        TypeMismatch: 缺少非恒等态射的像
    """
    dom_obj = {label(x): x for x in dom.objects}
    dom_mor = {label(m): m for m in dom.morphisms}
    cod_obj = {label(x): x for x in cod.objects}
    cod_mor = {label(m): m for m in cod.morphisms}

    obj_map = {}
    for key, value in (raw.get('objects') or {}).items():
        if key not in dom_obj or str(value) not in cod_obj:
            raise UnknownObject(f"{name}: 对象映射 {key} ↦ {value} 引用了未知对象")
        obj_map[dom_obj[key]] = cod_obj[str(value)]
    missing = [label(x) for x in dom.objects if x not in obj_map]
    if missing:
        raise TypeMismatch(f"{name}: 缺少对象的像: {', '.join(missing)}")

    mor_map = {}
    for key, value in (raw.get('morphisms') or {}).items():
        if key not in dom_mor or str(value) not in cod_mor:
            raise UnknownObject(f"{name}: 态射映射 {key} ↦ {value} 引用了未知态射")
        mor_map[dom_mor[key]] = cod_mor[str(value)]
    for x in dom.objects:
        mor_map.setdefault(dom.identities[x], cod.identities[obj_map[x]])
    missing = [label(m) for m in dom.morphisms if m not in mor_map]
    if missing:
        raise TypeMismatch(f"{name}: 缺少态射的像: {', '.join(missing)}")
    return Functor(dom, cod, obj_map, mor_map, name).check()


def functor_to_json(F: Functor) -> Dict[str, Dict[str, str]]:
    return {"objects": {label(x): label(y) for x, y in F.obj_map.items()},
            "morphisms": {label(m): label(n) for m, n in F.mor_map.items()}}


def load_diagram(raw: Any) -> Diagram:
    """
    diagram.json:
        {"name": "X", "index": category, "vertices": {i: category},
         "edges": {α: functor},
         "group": ..., "action": gaction, "structure": {g: {i: functor}}}

    恒等边与单位元的结构函子可省略。给出 group 时返回校验过的 G-图。

    Raises:
        SizeCap: 指标范畴或顶点范畴超过上限
        ValidationError: 图或 G-结构不满足公理
    """
    if not isinstance(raw, dict) or 'index' not in raw:
        raise ValidationError("图 JSON 需要 index 字段")
    name = str(raw.get('name', 'X'))
    I = load_category(raw['index'], "I")
    enforce_cap('index_objects', len(I.objects), "指标范畴")

    vertices_raw = raw.get('vertices') or {}
    vertex = {}
    for i in I.objects:
        if label(i) not in vertices_raw:
            raise TypeMismatch(f"{name}: 缺少顶点 {label(i)} 的范畴")
        C = load_category(vertices_raw[label(i)], f"{name}_{label(i)}")
        enforce_cap('vertex_objects', len(C.objects), f"顶点 {label(i)}")
        vertex[i] = C

    edges_raw = raw.get('edges') or {}
    edge = {}
    for m in I.morphisms:
        dom, cod = vertex[I.src[m]], vertex[I.tgt[m]]
        entry = edges_raw.get(label(m))
        if entry is None:
            if m not in I.identity_set:
                raise TypeMismatch(f"{name}: 缺少边 {label(m)}")
            entry = functor_to_json(identity_functor(dom))
        edge[m] = functor_from_json(dom, cod, entry, f"{name}({label(m)})")
    X = CatDiagram(I, vertex, edge, name).check()

    if 'group' not in raw:
        return X
    G = load_group(raw['group'])
    action = action_from_json(G, I, raw.get('action') or {})
    return validate_g_structure(action, X, _structure_from_json(G, action, X, raw.get('structure') or {}))


def _structure_from_json(G: Group, action: GAction, X: CatDiagram, raw: Mapping[str, Any]):
    structure = {}
    for g, element in enumerate(G.elements):
        rows = raw.get(element)
        if rows is None and g != G.identity:
            raise ValidationError(f"缺少群元素 {element} 的结构函子")
        for i in X.index.objects:
            dom, cod = X.vertex[i], X.vertex[action.act_obj(g, i)]
            entry = (rows or {}).get(label(i))
            if entry is None:
                if g != G.identity:
                    raise ValidationError(f"缺少结构函子 φ_({element},{label(i)})")
                entry = functor_to_json(identity_functor(dom))
            structure[(g, i)] = functor_from_json(dom, cod, entry, f"φ_({element},{label(i)})")
    return structure


def find_objects(I: FinCat, labels: List[str]) -> List[Any]:
    by_label = {label(x): x for x in I.objects}
    try:
        return [by_label[str(x)] for x in labels]
    except KeyError as e:
        raise UnknownObject(f"指标范畴中没有对象 {e}") from None


def load_cospan(raw: Any):
    """{"A": category, "B": category, "C": category, "f": functor A→C, "g": functor B→C}"""
    if not isinstance(raw, dict):
        raise ValidationError("余跨 JSON 必须是对象")
    try:
        A, B, C = (load_category(raw[k], k) for k in ("A", "B", "C"))
        return functor_from_json(A, C, raw['f'], "f"), functor_from_json(B, C, raw['g'], "g")
    except KeyError as e:
        raise ValidationError(f"余跨 JSON 缺少字段 {e}") from None


def load_gcategory(raw: Any) -> GAction:
    """{"group": ..., "category": category, "action": gaction}；没有 action 时为平凡作用"""
    if not isinstance(raw, dict) or 'group' not in raw or 'category' not in raw:
        raise ValidationError("G-范畴 JSON 需要 group 与 category 字段")
    G = load_group(raw['group'])
    C = load_category(raw['category'], str(raw.get('name', 'I')))
    enforce_cap('index_objects', len(C.objects), "G-范畴")
    return action_from_json(G, C, raw.get('action') or {})


def parse_subset(J: GSet, raw: str) -> frozenset:
    """位掩码或 "{a,b}" 形式的点名集合"""
    return _parse_subset(J, raw)
