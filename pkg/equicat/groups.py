"""
有限群模块
乘法表形式的有限群、子群、子群格与子群共轭类
"""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import permutations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from networkx.utils import UnionFind

from .config_manager import enforce_cap, get_performance_config
from .error_handler import (NoIdentity, NoInverse, NotAssociative, ValidationError,
                            log_debug)


@dataclass(frozen=True)
class Group:
    """乘法表给出的有限群，元素顺序即输入顺序"""
    elements: Tuple[str, ...]
    mul: Tuple[Tuple[int, ...], ...]
    identity: int

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.elements, self.mul, self.identity))

    @property
    def order(self) -> int:
        return len(self.elements)

    def op(self, a: int, b: int) -> int:
        return self.mul[a][b]

    @cached_property
    def _inverses(self) -> Tuple[int, ...]:
        n = self.order
        return tuple(next(b for b in range(n) if self.mul[a][b] == self.identity) for a in range(n))

    def inverse(self, a: int) -> int:
        return self._inverses[a]

    def conjugate(self, g: int, x: int) -> int:
        """g x g⁻¹"""
        return self.mul[self.mul[g][x]][self.inverse(g)]

    @cached_property
    def is_abelian(self) -> bool:
        n = self.order
        return all(self.mul[a][b] == self.mul[b][a] for a in range(n) for b in range(n))

    def index(self, name: str) -> int:
        try:
            return self.elements.index(name)
        except ValueError:
            raise ValidationError(f"群中没有元素 {name!r}") from None

    def name(self, a: int) -> str:
        return self.elements[a]

    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)))

    def trivial(self) -> "Subgroup":
        return Subgroup(self, (self.identity,))

    def to_json(self) -> dict:
        return {"elements": list(self.elements), "mul": [list(row) for row in self.mul]}


@dataclass(frozen=True)
class Subgroup:
    """子群，members 为排序后的元素下标"""
    parent: Group = field(compare=False, repr=False)
    members: Tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g: int) -> bool:
        return g in self.member_set

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return self.member_set <= other.member_set

    def conjugate(self, g: int) -> "Subgroup":
        """g S g⁻¹"""
        return Subgroup(self.parent, tuple(sorted({self.parent.conjugate(g, x) for x in self.members})))

    @property
    def label(self) -> str:
        return "{" + ",".join(self.parent.elements[m] for m in self.members) + "}"

    def is_trivial(self) -> bool:
        return len(self.members) == 1

    def is_whole(self) -> bool:
        return len(self.members) == self.parent.order

    def as_group(self) -> Tuple[Group, Tuple[int, ...]]:
        """
        把子群重新编号为独立的群

        Returns:
            (群, 新下标 -> 原群下标)
        """
        local = {g: k for k, g in enumerate(self.members)}
        mul = tuple(tuple(local[self.parent.mul[a][b]] for b in self.members) for a in self.members)
        names = tuple(self.parent.elements[g] for g in self.members)
        return Group(names, mul, local[self.parent.identity]), self.members


def build_group(mul_table: Sequence[Sequence[int]], names: Optional[Sequence[str]] = None) -> Group:
    """
    校验乘法表并构造群

    Raises:
        ValidationError: 表不是方阵或有越界下标
        NoIdentity / NoInverse / NotAssociative: 违反群公理，消息指出违例元素
    """
    n = len(mul_table)
    if n == 0:
        raise ValidationError("乘法表不能为空")
    if any(len(row) != n for row in mul_table):
        raise ValidationError(f"乘法表必须是 {n}×{n} 方阵")
    table = tuple(tuple(int(v) for v in row) for row in mul_table)
    for a, row in enumerate(table):
        for b, v in enumerate(row):
            if not 0 <= v < n:
                raise ValidationError(f"乘法表项 ({a},{b}) = {v} 越界")

    if names is None:
        names = tuple(f"g{k}" for k in range(n))
    names = tuple(str(x) for x in names)
    if len(names) != n or len(set(names)) != n:
        raise ValidationError("元素名必须与乘法表等长且互不相同")

    identity = next((e for e in range(n)
                     if all(table[e][x] == x and table[x][e] == x for x in range(n))), None)
    if identity is None:
        raise NoIdentity("乘法表中没有单位元")

    for a in range(n):
        if not any(table[a][b] == identity and table[b][a] == identity for b in range(n)):
            raise NoInverse(f"元素 {names[a]} 没有逆元")

    for a, b, c in product(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise NotAssociative(f"结合律在 ({names[a]}, {names[b]}, {names[c]}) 处不成立")

    return Group(names, table, identity)


def group_from_json(data: dict) -> Group:
    """从 {"elements": [...], "mul": [[...]]} 构造群"""
    if not isinstance(data, dict) or 'mul' not in data:
        raise ValidationError("群 JSON 需要 mul 字段")
    return build_group(data['mul'], data.get('elements'))


def cyclic_group(n: int) -> Group:
    names = ["e"] + [f"r{k}" if k > 1 else "r" for k in range(1, n)]
    return build_group([[(a + b) % n for b in range(n)] for a in range(n)], names)


def trivial_group() -> Group:
    return build_group([[0]], ["e"])


def direct_product(G: Group, H: Group) -> Group:
    pairs = [(a, b) for a in range(G.order) for b in range(H.order)]
    index = {p: k for k, p in enumerate(pairs)}
    mul = [[index[(G.mul[a][c], H.mul[b][d])] for (c, d) in pairs] for (a, b) in pairs]
    names = []
    for a, b in pairs:
        left, right = G.elements[a], H.elements[b]
        if a == G.identity and b == H.identity:
            names.append("e")
        else:
            names.append(f"({left},{right})")
    return build_group(mul, names)


def symmetric_group(n: int) -> Group:
    """置换群，乘法为复合 (στ)(x) = σ(τ(x))"""
    perms = sorted(permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    mul = [[index[tuple(s[t[x]] for x in range(n))] for t in perms] for s in perms]
    names = ["e" if p == tuple(range(n)) else "".join(str(x + 1) for x in p) for p in perms]
    return build_group(mul, names)


def standard_group(name: str) -> Group:
    """按名称构造常用群：trivial, Z<n>, Z2xZ2, S3, S4"""
    key = name.strip().replace("×", "x").replace("/", "").upper()
    if key in ("TRIVIAL", "E", "1", "Z1"):
        return trivial_group()
    if key == "Z2XZ2":
        return direct_product(cyclic_group(2), cyclic_group(2))
    if key.startswith("Z") and key[1:].isdigit():
        return cyclic_group(int(key[1:]))
    if key.startswith("S") and key[1:].isdigit():
        return symmetric_group(int(key[1:]))
    raise ValidationError(f"未知的群名称: {name}")


def generate_subgroup(G: Group, generators: Iterable[int]) -> Tuple[int, ...]:
    """生成元的闭包"""
    members = {G.identity}
    frontier = [G.identity]
    gens = list(generators)
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = G.mul[x][g]
                if y not in members:
                    members.add(y)
                    new.append(y)
        frontier = new
    return tuple(sorted(members))


@dataclass(frozen=True)
class SubgroupLattice:
    """子群格：全部子群、包含关系和共轭类"""
    group: Group
    subgroups: Tuple[Subgroup, ...]
    inclusion: frozenset
    conj_classes: Tuple[Tuple[int, ...], ...]
    class_rep: Tuple[int, ...]

    @cached_property
    def _index(self) -> Dict[Tuple[int, ...], int]:
        return {s.members: k for k, s in enumerate(self.subgroups)}

    @cached_property
    def _class_of(self) -> Tuple[int, ...]:
        owner = [0] * len(self.subgroups)
        for c, members in enumerate(self.conj_classes):
            for k in members:
                owner[k] = c
        return tuple(owner)

    def __len__(self):
        return len(self.subgroups)

    def index_of(self, S) -> int:
        members = S.members if isinstance(S, Subgroup) else tuple(sorted(S))
        try:
            return self._index[members]
        except KeyError:
            raise ValidationError(f"{members} 不是子群") from None

    def class_of(self, S) -> int:
        """子群（或下标）所在的共轭类编号"""
        k = S if isinstance(S, int) else self.index_of(S)
        return self._class_of[k]

    def representative(self, c: int) -> Subgroup:
        return self.subgroups[self.class_rep[c]]

    def label(self, k: int) -> str:
        return self.subgroups[k].label

    def class_label(self, c: int) -> str:
        return self.subgroups[self.class_rep[c]].label

    def find(self, label: str) -> Subgroup:
        """按标签查找子群；G 表示全群，e 或 1 表示平凡子群"""
        text = label.strip()
        if text == "G":
            return self.subgroups[-1]
        if text in ("e", "1"):
            return self.subgroups[0]
        for s in self.subgroups:
            if s.label == text:
                return s
        names = [x.strip() for x in text.strip("{}").split(",") if x.strip()]
        try:
            members = tuple(sorted(self.group.index(x) for x in names))
        except ValidationError:
            raise ValidationError(f"无法识别的子群标签: {label}") from None
        return self.subgroups[self.index_of(members)]

    def subgroups_of(self, S: Subgroup) -> List[Subgroup]:
        """S 的全部子群（按格的顺序）"""
        return [T for T in self.subgroups if T.member_set <= S.member_set]

    def contained_in(self, members: Iterable[int]) -> List[Subgroup]:
        allowed = frozenset(members)
        return [T for T in self.subgroups if T.member_set <= allowed]

    def to_json(self) -> dict:
        return {
            "order": self.group.order,
            "subgroups": [s.label for s in self.subgroups],
            "inclusion": sorted([list(p) for p in self.inclusion]),
            "conjugacy_classes": [[self.label(k) for k in c] for c in self.conj_classes],
            "class_representatives": [self.label(k) for k in self.class_rep],
        }


def subgroup_lattice(G: Group) -> SubgroupLattice:
    """
    计算子群格

    先取所有至多两个生成元生成的子群，再对并（生成的子群）取闭包，
    因而不依赖生成元个数的上界。顺序按 (阶, 成员) 排列。

    Raises:
        GroupTooLarge: 群阶超过配置上限
    """
    enforce_cap('group_order', G.order, "群")
    if get_performance_config().get('cache_lattices', True):
        return _build_lattice(G)
    return _build_lattice.__wrapped__(G)


@lru_cache(maxsize=64)
def _build_lattice(G: Group) -> SubgroupLattice:
    n = G.order
    found = set()
    for a in range(n):
        for b in range(a, n):
            found.add(generate_subgroup(G, (a, b)))

    changed = True
    while changed:
        changed = False
        current = sorted(found)
        for i, s in enumerate(current):
            for t in current[i + 1:]:
                if set(s) <= set(t) or set(t) <= set(s):
                    continue
                joined = generate_subgroup(G, set(s) | set(t))
                if joined not in found:
                    found.add(joined)
                    changed = True

    ordered = sorted(found, key=lambda m: (len(m), m))
    subgroups = tuple(Subgroup(G, m) for m in ordered)
    index = {m: k for k, m in enumerate(ordered)}

    inclusion = frozenset((i, j) for i, s in enumerate(ordered) for j, t in enumerate(ordered)
                          if set(s) <= set(t))

    classes = UnionFind(range(len(ordered)))
    for k, s in enumerate(subgroups):
        for g in range(n):
            classes.union(k, index[s.conjugate(g).members])
    grouped = sorted(tuple(sorted(c)) for c in classes.to_sets())
    conj_classes = tuple(sorted(grouped, key=lambda c: c[0]))
    class_rep = tuple(c[0] for c in conj_classes)

    log_debug(f"群阶 {n}: {len(subgroups)} 个子群, {len(conj_classes)} 个共轭类")
    return SubgroupLattice(G, subgroups, inclusion, conj_classes, class_rep)
