"""
连通度界模块
扩展整数运算与各个闭式连通度估计：等变 Blakers–Massey 及其对偶、
悬挂定理（闭式与经由 BM 的推导）、子流形与构形空间界、同伦极限与限制映射的连通度
"""

import math
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Any, Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Tuple, Union

from sympy.utilities.iterables import multiset_partitions

from .error_handler import (DimensionMismatch, InfinityClash, MissingEntry, MonotonicityViolation,
                            NotFiniteDimensional, SubgroupMismatch, ValidationError, log_debug,
                            log_warning)
from .equivariant import GAction, fixed_category, fixed_slice
from .fincat import identity_functor, inclusion_functor, label, over_category
from .groups import Group, Subgroup, SubgroupLattice, subgroup_lattice
from .gsets import (GSet, _orbit_blocks, _partitions, add_fixed_point, all_subsets, eff_subgroups,
                    mask_to_subset, nonempty_subsets, orbit_count, subset_stabilizer, subset_to_mask)


@total_ordering
class ExtInt:
    """ℤ ∪ {−∞, +∞}；+∞ 与 −∞ 相加是错误而不是值"""

    __slots__ = ('value',)

    def __init__(self, value: Union[int, float, "ExtInt"] = 0):
        if isinstance(value, ExtInt):
            value = value.value
        if isinstance(value, float):
            if not math.isinf(value):
                if not value.is_integer():
                    raise ValidationError(f"连通度必须是整数或 ±∞: {value}")
                value = int(value)
        elif isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"连通度必须是整数或 ±∞: {value!r}")
        self.value = value

    @classmethod
    def parse(cls, raw: Any) -> "ExtInt":
        """接受整数、ExtInt 或字符串 "+inf" / "inf" / "-inf" / "∞" """
        if isinstance(raw, ExtInt):
            return raw
        if isinstance(raw, str):
            text = raw.strip().lower().replace("∞", "inf")
            if text in ("inf", "+inf", "infinity", "+infinity"):
                return INF
            if text in ("-inf", "-infinity", "−inf"):
                return NEG_INF
            try:
                return cls(int(text))
            except ValueError:
                raise ValidationError(f"无法解析连通度: {raw!r}") from None
        return cls(raw)

    def is_finite(self) -> bool:
        return not isinstance(self.value, float)

    def __add__(self, other):
        other = other if isinstance(other, ExtInt) else ExtInt(other)
        a, b = self.value, other.value
        if isinstance(a, float) and isinstance(b, float) and a != b:
            raise InfinityClash("+∞ 与 −∞ 相加")
        return ExtInt(a + b)

    __radd__ = __add__

    def __neg__(self):
        return ExtInt(-self.value)

    def __sub__(self, other):
        other = other if isinstance(other, ExtInt) else ExtInt(other)
        return self + (-other)

    def __rsub__(self, other):
        return ExtInt(other) + (-self)

    def __mul__(self, n: int):
        """与非负或负整数相乘；0 倍为 0（空和）"""
        if isinstance(n, ExtInt):
            if not n.is_finite():
                raise ValidationError("连通度只能与有限整数相乘")
            n = n.value
        if n == 0:
            return ExtInt(0)
        return ExtInt(self.value * n)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, ExtInt):
            return self.value == other.value
        if isinstance(other, (int, float)):
            return self.value == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, ExtInt):
            return self.value < other.value
        if isinstance(other, (int, float)):
            return self.value < other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __int__(self):
        if not self.is_finite():
            raise ValidationError(f"{self} 不是有限整数")
        return self.value

    def __repr__(self):
        return f"ExtInt({self})"

    def __str__(self):
        if self.value == math.inf:
            return "+∞"
        if self.value == -math.inf:
            return "−∞"
        return str(self.value)

    def to_json(self) -> Union[int, str]:
        if self.value == math.inf:
            return "+inf"
        if self.value == -math.inf:
            return "-inf"
        return self.value


INF = ExtInt(math.inf)
NEG_INF = ExtInt(-math.inf)
ZERO = ExtInt(0)


def ext(value) -> ExtInt:
    return ExtInt.parse(value)


def ext_min(values: Iterable) -> ExtInt:
    """最小值；空集为 +∞"""
    best = INF
    for v in values:
        v = v if isinstance(v, ExtInt) else ExtInt.parse(v)
        if v < best:
            best = v
    return best


def ext_max(values: Iterable) -> ExtInt:
    """最大值；空集为 −∞"""
    best = NEG_INF
    for v in values:
        v = v if isinstance(v, ExtInt) else ExtInt.parse(v)
        if v > best:
            best = v
    return best


def ext_sum(values: Iterable) -> ExtInt:
    total = ZERO
    for v in values:
        total = total + v
    return total


# ---------------------------------------------------------------- 连通度函数与表

class ConnFunction:
    """子群共轭类上的扩展整数函数，按类路由求值"""

    def __init__(self, lattice: SubgroupLattice, values: Iterable):
        self.lattice = lattice
        self.values: Tuple[ExtInt, ...] = tuple(ExtInt.parse(v) for v in values)
        if len(self.values) != len(lattice.conj_classes):
            raise ValidationError(f"需要 {len(lattice.conj_classes)} 个共轭类上的值")

    def __call__(self, S: Subgroup) -> ExtInt:
        return self.values[self.lattice.class_of(S)]

    def __eq__(self, other):
        return isinstance(other, ConnFunction) and self.values == other.values

    def __repr__(self):
        return "ConnFunction(" + ", ".join(f"{self.lattice.class_label(c)}: {v}"
                                          for c, v in enumerate(self.values)) + ")"

    @classmethod
    def from_callable(cls, lattice: SubgroupLattice, fn: Callable[[Subgroup], Any]) -> "ConnFunction":
        return cls(lattice, [fn(lattice.representative(c)) for c in range(len(lattice.conj_classes))])

    @classmethod
    def constant(cls, lattice: SubgroupLattice, value) -> "ConnFunction":
        return cls(lattice, [value] * len(lattice.conj_classes))

    @classmethod
    def from_mapping(cls, lattice: SubgroupLattice, mapping: Mapping[str, Any]) -> "ConnFunction":
        """
        键为子群标签（任一类成员均可）

        Raises:
            MissingEntry: 有共轭类没有值
            ValidationError: 同一类给了不同的值
        """
        values: Dict[int, ExtInt] = {}
        for key, raw in mapping.items():
            c = lattice.class_of(lattice.find(key))
            v = ExtInt.parse(raw)
            if c in values and values[c] != v:
                raise ValidationError(f"共轭类 {lattice.class_label(c)} 上给了不同的值")
            values[c] = v
        missing = [lattice.class_label(c) for c in range(len(lattice.conj_classes)) if c not in values]
        if missing:
            raise MissingEntry("连通度函数缺少共轭类: " + ", ".join(missing))
        return cls(lattice, [values[c] for c in range(len(lattice.conj_classes))])

    def to_json(self) -> Dict[str, Any]:
        return {self.lattice.class_label(c): v.to_json() for c, v in enumerate(self.values)}


class SubsetTable:
    """
    按 (子集 U, 子群 L ≤ G_U) 索引的扩展整数表

    值可以预先给出，也可以由 source(U, L) 按需计算并缓存。
    """

    allow_empty = True
    symbol = "X_U^L"

    def __init__(self, J: GSet, values: Optional[Mapping[Tuple[frozenset, Tuple[int, ...]], Any]] = None,
                 source: Optional[Callable[[frozenset, Subgroup], Any]] = None):
        self.J = J
        self.lattice = subgroup_lattice(J.group)
        self._values: Dict[Tuple[frozenset, Tuple[int, ...]], ExtInt] = {
            k: ExtInt.parse(v) for k, v in (values or {}).items()}
        self._source = source

    def value(self, U, L: Subgroup) -> ExtInt:
        key = (U if isinstance(U, frozenset) else frozenset(U), L.members)
        v = self._values.get(key)
        if v is None:
            if self._source is None:
                raise MissingEntry(f"{self.symbol} 缺少条目 U={self.J.subset_label(key[0])}, L={L.label}")
            v = ExtInt.parse(self._source(key[0], L))
            self._values[key] = v
        return v

    def subsets(self):
        return all_subsets(self.J) if self.allow_empty else nonempty_subsets(self.J)

    def keys(self) -> List[Tuple[frozenset, Subgroup]]:
        """全部合法键：U 与 L ≤ G_U"""
        whole = self.J.group.whole()
        result = []
        for U in self.subsets():
            stab = subset_stabilizer(self.J, U, whole)
            result.extend((U, L) for L in self.lattice.subgroups_of(stab))
        return result

    def materialize(self) -> "SubsetTable":
        for U, L in self.keys():
            self.value(U, L)
        return self

    def check_conjugation(self) -> "SubsetTable":
        """
        ν^{gU}(gLg⁻¹) = ν^U(L)

        Raises:
            ValidationError: 某个共轭对上的值不同
        """
        G = self.J.group
        for U, L in self.keys():
            v = self.value(U, L)
            for g in range(G.order):
                gU, gL = self.J.translate(g, U), L.conjugate(g)
                if self.value(gU, gL) != v:
                    raise ValidationError(
                        f"{self.symbol} 不满足共轭相容: U={self.J.subset_label(U)}, L={L.label}, "
                        f"g={G.elements[g]}")
        return self

    @classmethod
    def from_callable(cls, J: GSet, fn: Callable[[frozenset, Subgroup], Any], lazy: bool = True):
        table = cls(J, source=fn)
        return table if lazy else table.materialize()

    @classmethod
    def from_json(cls, J: GSet, data: Mapping[str, Mapping[str, Any]]):
        """键为子集位掩码（十进制字符串）或点名集合 "{a,b}"，内层键为子群标签"""
        lattice = subgroup_lattice(J.group)
        values = {}
        for raw_key, row in data.items():
            U = _parse_subset(J, raw_key)
            if not cls.allow_empty and not U:
                raise ValidationError(f"{cls.symbol} 不接受空子集")
            for sub_label, raw in row.items():
                L = lattice.find(sub_label)
                values[(U, L.members)] = raw
        return cls(J, values)

    def to_json(self) -> Dict[str, Dict[str, Any]]:
        result: Dict[str, Dict[str, Any]] = {}
        for (U, members), v in sorted(self._values.items(), key=lambda kv: (subset_to_mask(kv[0][0]), kv[0][1])):
            result.setdefault(str(subset_to_mask(U)), {})[self.lattice.label(self.lattice.index_of(members))] = v.to_json()
        return result


def _parse_subset(J: GSet, raw_key: str) -> frozenset:
    text = str(raw_key).strip()
    if text.startswith("{"):
        names = [x.strip() for x in text.strip("{}").split(",") if x.strip()]
        try:
            return frozenset(J.points.index(n) for n in names)
        except ValueError:
            raise ValidationError(f"子集 {raw_key} 含未知的点") from None
    try:
        mask = int(text)
    except ValueError:
        raise ValidationError(f"无法解析子集键 {raw_key!r}") from None
    if mask < 0 or mask >= 1 << J.size:
        raise ValidationError(f"子集位掩码 {mask} 越界")
    return mask_to_subset(mask)


class CocartData(SubsetTable):
    """ν^U(L)：非空 U 上的余笛卡尔性数据"""

    allow_empty = False
    symbol = "ν^U"

    def check_monotone(self) -> "CocartData":
        """
        U ⊆ V 且二者 L-不变时 ν^U(L) ≤ ν^V(L)；只需检查添加一个 L-轨道的情形

        Raises:
            MonotonicityViolation: 给出 U ⊂ V 与 L
        """
        J = self.J
        for U, L in self.keys():
            v = self.value(U, L)
            for block in _orbit_blocks(J, L.members):
                if block[0] in U:
                    continue
                V = U | frozenset(block)
                if self.value(V, L) < v:
                    raise MonotonicityViolation(
                        f"ν^{J.subset_label(U)}({L.label}) = {v} > "
                        f"ν^{J.subset_label(V)}({L.label}) = {self.value(V, L)}")
        return self


class VertexConn(SubsetTable):
    """conn X_U^L：包括空集在内每个顶点的不动点连通度"""

    allow_empty = True
    symbol = "conn X_U^L"


class PointTable:
    """按 (点 j, 子群 L) 索引的表，用于子流形余维数 d_j(L)"""

    def __init__(self, J: GSet, source: Callable[[int, Subgroup], Any]):
        self.J = J
        self._source = source
        self._cache: Dict[Tuple[int, Tuple[int, ...]], ExtInt] = {}

    def __call__(self, j: int, L: Subgroup) -> ExtInt:
        key = (j, L.members)
        v = self._cache.get(key)
        if v is None:
            v = ExtInt.parse(self._source(j, L))
            self._cache[key] = v
        return v

    @classmethod
    def constant(cls, J: GSet, value) -> "PointTable":
        v = ExtInt.parse(value)
        return cls(J, lambda j, L: v)

    @classmethod
    def from_json(cls, J: GSet, data: Mapping[str, Mapping[str, Any]]) -> "PointTable":
        """{点名: {子群标签: 值}}"""
        lattice = subgroup_lattice(J.group)
        values: Dict[Tuple[int, Tuple[int, ...]], ExtInt] = {}
        for point, row in data.items():
            if point not in J.points:
                raise ValidationError(f"未知的点 {point}")
            for sub_label, raw in row.items():
                values[(J.points.index(point), lattice.find(sub_label).members)] = ExtInt.parse(raw)

        def lookup(j, L):
            try:
                return values[(j, L.members)]
            except KeyError:
                raise MissingEntry(f"d 缺少条目 j={J.points[j]}, L={L.label}") from None

        return cls(J, lookup)

    def check_conjugation(self) -> "PointTable":
        """d_{gj}(gLg⁻¹) = d_j(L)"""
        G = self.J.group
        for L in subgroup_lattice(G).subgroups:
            for j in range(self.J.size):
                for g in range(G.order):
                    if self(self.J.act[g][j], L.conjugate(g)) != self(j, L):
                        raise ValidationError(f"d 不满足共轭相容: j={self.J.points[j]}, L={L.label}")
        return self


class ObjectTable:
    """按 (对象 i, 子群 H ≤ G_i) 索引的表"""

    def __init__(self, source: Callable[[Hashable, Subgroup], Any]):
        self._source = source

    def __call__(self, i, H: Subgroup) -> ExtInt:
        return ExtInt.parse(self._source(i, H))

    @classmethod
    def from_json(cls, objects: Iterable, lattice: SubgroupLattice, data: Mapping[str, Mapping[str, Any]],
                  default: Any = None) -> "ObjectTable":
        """{对象标签: {子群标签: 值}}；缺少的条目取 default，未给 default 时报 MissingEntry"""
        by_label = {label(x): x for x in objects}
        values: Dict[Tuple[Hashable, Tuple[int, ...]], ExtInt] = {}
        for obj, row in data.items():
            if obj not in by_label:
                raise ValidationError(f"未知的对象 {obj}")
            for sub_label, raw in row.items():
                values[(by_label[obj], lattice.find(sub_label).members)] = ExtInt.parse(raw)

        def lookup(i, H):
            v = values.get((i, H.members))
            if v is not None:
                return v
            if default is None:
                raise MissingEntry(f"缺少条目 i={label(i)}, H={H.label}")
            return default

        return cls(lookup)


# ---------------------------------------------------------------- Blakers–Massey

@dataclass
class BoundResult:
    """各共轭类代表处的界、两项分量与取到最小值的见证"""
    function: ConnFunction
    first_terms: Optional[ConnFunction] = None
    second_terms: Optional[ConnFunction] = None
    witnesses: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def __call__(self, S: Subgroup) -> ExtInt:
        return self.function(S)

    def to_json(self) -> dict:
        data = {"nu": self.function.to_json(), "witnesses": self.witnesses, "warnings": list(self.warnings)}
        if self.first_terms is not None:
            data["first_term"] = self.first_terms.to_json()
        if self.second_terms is not None:
            data["second_term"] = self.second_terms.to_json()
        return data


@dataclass
class BoundTerms:
    value: ExtInt
    first: ExtInt
    second: ExtInt
    witness: Dict[str, Any]


def _masks(P) -> List[int]:
    return sorted(subset_to_mask(T) for T in P)


def bm_value(J: GSet, nu: CocartData, vc: VertexConn, H: Subgroup) -> BoundTerms:
    """
    在任意子群 H 处计算 Blakers–Massey 界

    第一项：min over Pa_H(J) of Σ ν^{T_α}(H) − |J/H| + 1；
    第二项：min over ∅≠U⊆J, L ∈ Eff_H(U) of conn X_U^L − |U/L| + 1。
    """
    n = orbit_count(J, H)
    first, best_partition = INF, None
    for P in _partitions(J, H.members):
        term = ext_sum(nu.value(T, H) for T in P) - n + 1
        if best_partition is None or term < first:
            first, best_partition = term, P
    second, best_pair = INF, None
    for U in nonempty_subsets(J):
        for L in eff_subgroups(J, U, H):
            term = vc.value(U, L) - orbit_count(J, L, U) + 1
            if term < second:
                second, best_pair = term, (U, L)
    witness: Dict[str, Any] = {"partition": _masks(best_partition) if best_partition is not None else None}
    if best_pair is not None:
        witness["U"] = subset_to_mask(best_pair[0])
        witness["L"] = best_pair[1].label
    return BoundTerms(min(first, second), first, second, witness)


def dual_bm_value(J: GSet, nu: CocartData, vc: VertexConn, H: Subgroup) -> BoundTerms:
    """
    在任意子群 H 处计算对偶界

    min over Pa_H(J) of |J/H| − 1 + Σ_α min{ν^{T_α}(H), min over ∅≠U⊆T_α, L ∈ Eff_H(U) of conn X_U^L − |U/L| + 1}
    """
    n = orbit_count(J, H)
    inner_cache: Dict[frozenset, Tuple[ExtInt, Optional[Tuple[frozenset, Subgroup]]]] = {}

    def inner(T: frozenset):
        if T not in inner_cache:
            best, pair = INF, None
            members = sorted(T)
            for mask in range(1, 1 << len(members)):
                U = frozenset(x for k, x in enumerate(members) if mask >> k & 1)
                for L in eff_subgroups(J, U, H):
                    term = vc.value(U, L) - orbit_count(J, L, U) + 1
                    if term < best:
                        best, pair = term, (U, L)
            inner_cache[T] = (best, pair)
        return inner_cache[T]

    value, best_partition = INF, None
    for P in _partitions(J, H.members):
        total = ZERO + (n - 1)
        for T in P:
            total = total + min(nu.value(T, H), inner(T)[0])
        if best_partition is None or total < value:
            value, best_partition = total, P
    witness: Dict[str, Any] = {"partition": _masks(best_partition) if best_partition is not None else None}
    if best_partition is not None:
        blocks = []
        for T in best_partition:
            eff_value, pair = inner(T)
            entry: Dict[str, Any] = {"block": subset_to_mask(T)}
            if eff_value < nu.value(T, H) and pair is not None:
                entry.update({"U": subset_to_mask(pair[0]), "L": pair[1].label})
            blocks.append(entry)
        witness["blocks"] = blocks
    return BoundTerms(value, value, INF, witness)


def _collect(J: GSet, evaluate: Callable[[Subgroup], BoundTerms], with_terms: bool = True) -> BoundResult:
    lattice = subgroup_lattice(J.group)
    values, firsts, seconds, witnesses = [], [], [], {}
    for c in range(len(lattice.conj_classes)):
        H = lattice.representative(c)
        terms = evaluate(H)
        values.append(terms.value)
        firsts.append(terms.first)
        seconds.append(terms.second)
        witnesses[H.label] = terms.witness
    if not with_terms:
        return BoundResult(ConnFunction(lattice, values), witnesses=witnesses)
    return BoundResult(ConnFunction(lattice, values), ConnFunction(lattice, firsts),
                       ConnFunction(lattice, seconds), witnesses)


def bm_bound(J: GSet, nu: CocartData, vc: VertexConn, check: bool = True) -> BoundResult:
    """
    等变 Blakers–Massey：各共轭类上的笛卡尔性估计

    Raises:
        MonotonicityViolation: ν 不单调（check 为真时检查）
        InfinityClash: 求和中出现 +∞ 与 −∞
    """
    if check:
        nu.check_monotone()
    result = _collect(J, lambda H: bm_value(J, nu, vc, H))
    log_debug(f"BM 界: {result.function}")
    return result


def dual_bm_bound(J: GSet, nu_cart: CocartData, vc: VertexConn, check: bool = True) -> BoundResult:
    """对偶 Blakers–Massey：各共轭类上的余笛卡尔性估计"""
    if check:
        nu_cart.check_monotone()
    result = _collect(J, lambda H: dual_bm_value(J, nu_cart, vc, H), with_terms=False)
    log_debug(f"对偶 BM 界: {result.function}")
    return result


def classical_range(J: GSet, nu: CocartData) -> ExtInt:
    """平凡群时的经典范围：min over 全部集合划分 Σ ν^{T_α} − |J| + 1"""
    e = J.group.trivial()
    points = list(range(J.size))
    if not points:
        return ExtInt(1)
    best = INF
    for grouping in multiset_partitions(points):
        best = min(best, ext_sum(nu.value(frozenset(T), e) for T in grouping) - J.size + 1)
    return best


# ---------------------------------------------------------------- 悬挂

def _check_same_group(G: Group, J: GSet):
    if G != J.group:
        raise SubgroupMismatch("G-集合不在给定的群上")


def suspension_closed_form(G: Group, J: GSet, connX: ConnFunction) -> ExtInt:
    """min{2·connX(G)+1, min over H with |J/H| ≠ |J/G| of connX(H)}"""
    _check_same_group(G, J)
    lattice = subgroup_lattice(G)
    whole = G.whole()
    n = orbit_count(J, whole)
    return min(connX(whole) * 2 + 1,
               ext_min(connX(H) for H in lattice.subgroups if orbit_count(J, H) != n))


def suspension_cube_data(J: GSet, connX: ConnFunction) -> Tuple[GSet, CocartData, VertexConn]:
    """σ^J X 作为 J_+-立方体的 ν^U 与顶点连通度"""
    Jp = add_fixed_point(J)
    full = Jp.all_points

    def nu(U, L):
        if U == full:
            return INF
        return connX(L) + orbit_count(Jp, L, U)

    def vc(U, L):
        if not U:
            return connX(L)
        if U == full:
            return connX(L) + orbit_count(J, L)
        return INF

    return Jp, CocartData.from_callable(Jp, nu), VertexConn.from_callable(Jp, vc)


def suspension_via_bm(G: Group, J: GSet, connX: ConnFunction, check: bool = True) -> BoundResult:
    """
    经由 BM 重新推导悬挂范围：在 J_+ 上构造立方体数据并求 bm_bound

    connX 有负值时仍然计算，并在 warnings 中记录 NegativeConnectivity。
    """
    _check_same_group(G, J)
    Jp, nu, vc = suspension_cube_data(J, connX)
    result = bm_bound(Jp, nu, vc, check=check)
    if any(v < 0 for v in connX.values):
        result.warnings.append("NegativeConnectivity")
        log_warning("connX 有负值，悬挂公式与 BM 推导的一致性只在非负范围内成立")
    return result


# ---------------------------------------------------------------- 子流形与构形空间

def submanifold_bound(J: GSet, m: ConnFunction, d: PointTable, connM: ConnFunction) -> BoundResult:
    """
    ν(H) = min{ Σ_j (m_H − d_j(H)) − 2|J/H| + 1,
                min over L < H with |J/L| ≠ |J/H| of min{connM(L)+1, m_L − max_j d_j(L)} − |J/L| }

    Raises:
        DimensionMismatch: 某个 d_j(H) > m_H
    """
    lattice = subgroup_lattice(J.group)
    for L in lattice.subgroups:
        for j in range(J.size):
            if d(j, L) > m(L):
                raise DimensionMismatch(f"d_{J.points[j]}({L.label}) = {d(j, L)} > m = {m(L)}")

    def evaluate(H: Subgroup) -> BoundTerms:
        n = orbit_count(J, H)
        first = ext_sum(m(H) - d(j, H) for j in range(J.size)) - 2 * n + 1
        second, arg = INF, None
        for L in lattice.subgroups_of(H):
            nL = orbit_count(J, L)
            if L.order == H.order or nL == n:
                continue
            term = min(connM(L) + 1, m(L) - ext_max(d(j, L) for j in range(J.size))) - nL
            if term < second:
                second, arg = term, L
        return BoundTerms(min(first, second), first, second, {"L": arg.label if arg else None})

    return _collect(J, evaluate)


def configuration_bound(J: GSet, m: ConnFunction, connM: ConnFunction) -> BoundResult:
    """
    ν(H) = min{ |J|·m_H − 2|J/H| + 1,
                min over L < H with |J/L| ≠ |J/H| of min{connM(L)+1, m_L} − |J/L| }
    """
    lattice = subgroup_lattice(J.group)

    def evaluate(H: Subgroup) -> BoundTerms:
        n = orbit_count(J, H)
        first = m(H) * J.size - 2 * n + 1
        second, arg = INF, None
        for L in lattice.subgroups_of(H):
            nL = orbit_count(J, L)
            if L.order == H.order or nL == n:
                continue
            term = min(connM(L) + 1, m(L)) - nL
            if term < second:
                second, arg = term, L
        return BoundTerms(min(first, second), first, second, {"L": arg.label if arg else None})

    return _collect(J, evaluate)


# ---------------------------------------------------------------- 同伦极限与映射空间

POINT = "point"


def _stab_subgroups(a: GAction, i) -> List[Subgroup]:
    lattice = subgroup_lattice(a.group)
    return lattice.subgroups_of(a.stabilizer(i))


def overcat_dimensions(a: GAction) -> Dict[Tuple[Hashable, Tuple[int, ...]], int]:
    """dim N((I/i)^H)，对每个 i 与 H ≤ G_i"""
    return {(i, H.members): fixed_slice(a, i, H).nerve_dimension()
            for i in a.cat.objects for H in _stab_subgroups(a, i)}


def holim_connectivity_bound(a: GAction, connX: Callable[[Hashable, Subgroup], Any],
                             dims: Optional[Mapping[Tuple[Hashable, Tuple[int, ...]], Any]] = None) -> ExtInt:
    """
    min over i, H ≤ G_i of connX(i, H) − dim N((I/i)^H)

    Raises:
        MissingEntry: dims 缺少条目
    """
    a.cat.require_loop_free()
    if dims is None:
        dims = overcat_dimensions(a)
    best = INF
    for i in a.cat.objects:
        for H in _stab_subgroups(a, i):
            key = (i, H.members)
            if key not in dims:
                raise MissingEntry(f"缺少 dim N((I/{label(i)})^{H.label})")
            best = min(best, ExtInt.parse(connX(i, H)) - ExtInt.parse(dims[key]))
    return best


def mapping_space_connectivity_bound(data: Mapping[Tuple[Hashable, Tuple[int, ...]], Tuple[Any, Any]],
                                     a: Optional[GAction] = None) -> ExtInt:
    """
    min over i, H ≤ G_i with K_i^H ≠ 点 of connX(i, H) − dim K_i^H

    data 的值为 (dimK 或 POINT, connX)。给出 a 时检查每个 (i, H ≤ G_i) 都有条目。
    """
    if a is not None:
        for i in a.cat.objects:
            for H in _stab_subgroups(a, i):
                if (i, H.members) not in data:
                    raise MissingEntry(f"映射空间数据缺少 i={label(i)}, H={H.label}")
    best = INF
    for key in data:
        dimK, conn = data[key]
        if dimK == POINT:
            continue
        best = min(best, ExtInt.parse(conn) - ExtInt.parse(dimK))
    return best


def overcat_mapping_data(a: GAction, connX: Callable[[Hashable, Subgroup], Any]) -> Dict[
        Tuple[Hashable, Tuple[int, ...]], Tuple[int, ExtInt]]:
    """K = (N I/−)_+ 时的映射空间数据；K_i^H 带基点，永远不是单点"""
    dims = overcat_dimensions(a)
    lattice = subgroup_lattice(a.group)
    return {key: (dim, ExtInt.parse(connX(key[0], lattice.subgroups[lattice.index_of(key[1])])))
            for key, dim in dims.items()}


@dataclass
class RestrictionBound:
    value: ExtInt
    flags: List[str] = field(default_factory=list)
    witness: Optional[Dict[str, Any]] = None

    def to_json(self) -> dict:
        return {"value": self.value.to_json(), "flags": list(self.flags), "witness": self.witness}


def pi0_condition(a: GAction, connX: Callable[[Hashable, Subgroup], Any]) -> Tuple[bool, List[str]]:
    """对 i ∈ I^G 检查 connX(i, G) ≥ dim N(I^G/i)，这是限制映射 π₀-满射的充分条件"""
    G = a.group.whole()
    IG, _ = fixed_category(a, G)
    failures = []
    for i in IG.objects:
        over, _ = over_category(identity_functor(IG), i)
        dim = over.nerve_dimension()
        if ExtInt.parse(connX(i, G)) < dim:
            failures.append(label(i))
    return not failures, failures


def restriction_connectivity_bound(a: GAction, connX: Callable[[Hashable, Subgroup], Any]) -> RestrictionBound:
    """
    限制映射 Hom(K,X)^G → 不动点层的连通度：
    min over i, H ≤ G_i with hom(ι^H/i) ⊊ hom(I^H/i) of connX(i, H) − dim N(I^H/i) + 1

    Raises:
        NotFiniteDimensional: I 不是无圈范畴
    """
    I = a.cat
    if not I.is_loop_free():
        raise NotFiniteDimensional("指标范畴的神经不是有限维的")
    G = a.group.whole()
    IG, _ = fixed_category(a, G)
    if not IG.objects:
        log_warning("I^G 为空，限制映射的界按约定取 +∞")
        return RestrictionBound(INF, ["EmptyFixedCategory"])

    fixed_cache: Dict[Tuple[int, ...], Any] = {}
    best, arg = INF, None
    for i in I.objects:
        for H in _stab_subgroups(a, i):
            if H.members not in fixed_cache:
                fixed_cache[H.members] = fixed_category(a, H)[0]
            IH = fixed_cache[H.members]
            full, _ = over_category(identity_functor(IH), i)
            sub, _ = over_category(inclusion_functor(IG, IH), i)
            if len(sub.morphisms) >= len(full.morphisms):
                continue
            term = ExtInt.parse(connX(i, H)) - full.nerve_dimension() + 1
            if term < best:
                best, arg = term, {"i": label(i), "H": H.label}
    holds, failures = pi0_condition(a, connX)
    flags = ["Pi0ConditionHolds"] if holds else ["Pi0Unverified"]
    if failures:
        log_debug("π₀ 充分条件不成立的对象: " + ", ".join(failures))
    return RestrictionBound(best, flags, arg)
