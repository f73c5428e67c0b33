"""
G-集合模块
有限 G-集合及连通度公式需要的组合量：轨道、稳定子、不变划分与有效子群
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from sympy.utilities.iterables import multiset_partitions

from .config_manager import enforce_cap
from .error_handler import EmptySubset, SubgroupMismatch, ValidationError
from .groups import Group, Subgroup, subgroup_lattice

Subset = FrozenSet[int]
# 不变划分：块的元组，块之间互不相交且覆盖全部点
InvariantPartition = Tuple[Subset, ...]


@dataclass(frozen=True)
class GSet:
    """有限 G-集合，act[g][x] 为 g·x"""
    group: Group
    points: Tuple[str, ...]
    act: Tuple[Tuple[int, ...], ...]

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.group, self.points, self.act))

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def all_points(self) -> Subset:
        return frozenset(range(len(self.points)))

    def translate(self, g: int, U) -> Subset:
        """g·U"""
        row = self.act[g]
        return frozenset(row[x] for x in U)

    def has_trivial_action(self) -> bool:
        return all(row == tuple(range(self.size)) for row in self.act)

    def subset_label(self, U) -> str:
        return "{" + ",".join(self.points[x] for x in sorted(U)) + "}"

    def to_json(self) -> dict:
        G = self.group
        return {
            "group": G.to_json(),
            "points": list(self.points),
            "action": {G.elements[g]: list(self.act[g]) for g in range(G.order)},
        }


def build_gset(group: Group, points: Sequence[str], act: Sequence[Sequence[int]]) -> GSet:
    """
    校验作用表并构造 G-集合

    Raises:
        ValidationError: 作用不是置换、单位元不平凡或不满足 (gh)x = g(hx)
    """
    n = len(points)
    if len(set(points)) != n:
        raise ValidationError("G-集合的点名必须互不相同")
    if len(act) != group.order:
        raise ValidationError(f"需要 {group.order} 个群元素的作用，实际 {len(act)} 个")
    table = tuple(tuple(int(x) for x in row) for row in act)
    for g, row in enumerate(table):
        if sorted(row) != list(range(n)):
            raise ValidationError(f"元素 {group.elements[g]} 的作用不是置换")
    if table[group.identity] != tuple(range(n)):
        raise ValidationError("单位元的作用不是恒等")
    for g in range(group.order):
        for h in range(group.order):
            gh = group.mul[g][h]
            for x in range(n):
                if table[gh][x] != table[g][table[h][x]]:
                    raise ValidationError(
                        f"作用不相容: ({group.elements[g]}{group.elements[h]})·{points[x]} "
                        f"≠ {group.elements[g]}·({group.elements[h]}·{points[x]})")
    return GSet(group, tuple(str(p) for p in points), table)


def gset_from_json(data: dict, group: Optional[Group] = None) -> GSet:
    """
    从 {"group": ..., "points": [...], "action": {元素名: 置换}} 构造

    group 给出时忽略 JSON 中的 group 字段。
    """
    from .groups import group_from_json

    if not isinstance(data, dict) or 'points' not in data or 'action' not in data:
        raise ValidationError("G-集合 JSON 需要 points 与 action 字段")
    if group is None:
        if 'group' not in data:
            raise ValidationError("G-集合 JSON 缺少 group 字段")
        group = group_from_json(data['group'])
    points = [str(p) for p in data['points']]
    enforce_cap('gset_points', len(points), "G-集合")
    action = data['action']
    rows = []
    for g, name in enumerate(group.elements):
        if name not in action:
            if g == group.identity:
                rows.append(list(range(len(points))))
                continue
            raise ValidationError(f"缺少元素 {name} 的作用")
        rows.append(action[name])
    return build_gset(group, points, rows)


def coset_gset(G: Group, H: Subgroup) -> GSet:
    """左陪集集合 G/H，点按代表元最小者排序"""
    cosets: List[Tuple[int, ...]] = []
    seen = set()
    for g in range(G.order):
        coset = tuple(sorted(G.mul[g][h] for h in H.members))
        if coset not in seen:
            seen.add(coset)
            cosets.append(coset)
    where = {x: k for k, c in enumerate(cosets) for x in c}
    act = [[where[G.mul[g][c[0]]] for c in cosets] for g in range(G.order)]
    points = [G.elements[c[0]] + ("H" if not H.is_trivial() else "") for c in cosets]
    return build_gset(G, points, act)


def regular_gset(G: Group) -> GSet:
    return build_gset(G, G.elements, [list(G.mul[g]) for g in range(G.order)])


def trivial_gset(G: Group, n: int) -> GSet:
    return build_gset(G, [str(k + 1) for k in range(n)], [list(range(n))] * G.order)


def disjoint_union(A: GSet, B: GSet) -> GSet:
    if A.group != B.group:
        raise SubgroupMismatch("只能合并同一个群上的 G-集合")
    offset = A.size
    names = [f"{p}" for p in A.points]
    for p in B.points:
        name = p
        while name in names:
            name = name + "'"
        names.append(name)
    act = [list(A.act[g]) + [offset + x for x in B.act[g]] for g in range(A.group.order)]
    return build_gset(A.group, names, act)


def add_fixed_point(J: GSet, name: str = "+") -> GSet:
    """J_+：添加一个固定基点"""
    while name in J.points:
        name = name + "+"
    n = J.size
    act = [list(J.act[g]) + [n] for g in range(J.group.order)]
    return build_gset(J.group, list(J.points) + [name], act)


def _check_subgroup(J: GSet, H: Subgroup):
    if H.parent is not J.group and H.parent != J.group:
        raise SubgroupMismatch("子群不属于 G-集合所在的群")


@dataclass(frozen=True)
class OrbitData:
    """H-轨道与每个点在 H 中的稳定子"""
    blocks: Tuple[Tuple[int, ...], ...]
    stabilizers: Tuple[Subgroup, ...]

    @property
    def count(self) -> int:
        return len(self.blocks)


def orbits(J: GSet, H: Subgroup) -> OrbitData:
    """
    计算 H-轨道

    Raises:
        SubgroupMismatch: H 不是 J 所在群的子群
    """
    _check_subgroup(J, H)
    blocks = _orbit_blocks(J, H.members)
    stabilizers = tuple(
        Subgroup(J.group, tuple(h for h in H.members if J.act[h][x] == x))
        for x in range(J.size))
    return OrbitData(blocks, stabilizers)


@lru_cache(maxsize=4096)
def _orbit_blocks(J: GSet, members: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
    owner: Dict[int, int] = {}
    blocks = []
    for x in range(J.size):
        if x in owner:
            continue
        block = tuple(sorted({J.act[h][x] for h in members}))
        for y in block:
            owner[y] = len(blocks)
        blocks.append(block)
    return tuple(blocks)


def orbit_count(J: GSet, H: Subgroup, U=None) -> int:
    """|U/H|，U 默认为全体点；U 需要是 H-不变的"""
    blocks = _orbit_blocks(J, H.members)
    if U is None:
        return len(blocks)
    return sum(1 for b in blocks if b[0] in U)


def invariant_partitions(J: GSet, H: Subgroup) -> List[InvariantPartition]:
    """
    Pa_H(J)：块为 H-不变集的全部划分

    即 H-轨道划分的全部粗化，第一个总是 {J}。
    """
    _check_subgroup(J, H)
    return list(_partitions(J, H.members))


@lru_cache(maxsize=1024)
def _partitions(J: GSet, members: Tuple[int, ...]) -> Tuple[InvariantPartition, ...]:
    blocks = _orbit_blocks(J, members)
    if not blocks:
        return ((),)
    result = []
    for grouping in multiset_partitions(list(range(len(blocks)))):
        result.append(tuple(frozenset(x for k in part for x in blocks[k]) for part in grouping))
    return tuple(result)


def subset_stabilizer(J: GSet, U, H: Subgroup) -> Subgroup:
    """H_U = {h ∈ H | hU = U}"""
    U = frozenset(U)
    return Subgroup(J.group, tuple(h for h in H.members if J.translate(h, U) == U))


def eff_subgroups(J: GSet, U, H: Subgroup) -> Tuple[Subgroup, ...]:
    """
    Eff_H(U)：U 上的有效子群

    H_U ≠ H 时为 H_U 的全部子群；否则为满足 |U/L| ≠ |U/H| 的 L ≤ H。
    返回结果都是 H 的真子群，按子群格顺序排列。

    Raises:
        EmptySubset: U 为空
        SubgroupMismatch: H 不属于 J 的群
    """
    U = frozenset(U)
    if not U:
        raise EmptySubset("Eff_H(U) 要求 U 非空")
    _check_subgroup(J, H)
    return _eff(J, U, H.members)


@lru_cache(maxsize=65536)
def _eff(J: GSet, U: Subset, members: Tuple[int, ...]) -> Tuple[Subgroup, ...]:
    lattice = subgroup_lattice(J.group)
    H = Subgroup(J.group, members)
    stab = subset_stabilizer(J, U, H)
    if stab.order != H.order:
        result = tuple(lattice.subgroups_of(stab))
    else:
        full = orbit_count(J, H, U)
        result = tuple(L for L in lattice.subgroups_of(H) if orbit_count(J, L, U) != full)
    assert all(L.order < H.order for L in result), "Eff_H(U) 中出现了非真子群"
    return result


def nonempty_subsets(J: GSet) -> Iterator[Subset]:
    """按位掩码顺序枚举非空子集"""
    for mask in range(1, 1 << J.size):
        yield mask_to_subset(mask)


def all_subsets(J: GSet) -> Iterator[Subset]:
    for mask in range(1 << J.size):
        yield mask_to_subset(mask)


def subset_to_mask(U) -> int:
    return sum(1 << x for x in U)


def mask_to_subset(mask: int) -> Subset:
    return frozenset(k for k in range(mask.bit_length()) if mask >> k & 1)


def orbit_quotient_map(J: GSet, H: Subgroup) -> Dict[Subset, Subset]:
    """
    P(J)^H → P(J/H) 的对象映射

    H-不变子集映到它包含的轨道编号集合。
    """
    blocks = _orbit_blocks(J, H.members)
    result = {}
    for mask in range(1 << len(blocks)):
        chosen = mask_to_subset(mask)
        U = frozenset(x for k in chosen for x in blocks[k])
        result[U] = chosen
    return result
