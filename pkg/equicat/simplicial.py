"""
单纯同调模块
无圈有限范畴的神经、基于 Smith 标准形的整系数同调与同调等价判定
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

from sympy import factorint
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from .error_handler import BoundaryNotSquareZero, NotLoopFree, log_debug
from .fincat import FinCat, Functor, connected_components, label

Simplex = Hashable


def _matrix(entries: Dict[Tuple[int, int], int], rows: int, cols: int) -> DomainMatrix:
    dense = [[ZZ(0)] * cols for _ in range(rows)]
    for (r, c), v in entries.items():
        dense[r][c] = ZZ(v)
    return DomainMatrix(dense, (rows, cols), ZZ)


def _is_zero(M: DomainMatrix) -> bool:
    return 0 in M.shape or M.is_zero_matrix


@dataclass
class ChainComplex:
    """
    有限整系数链复形

    sizes[p] 为 C_p 的秩，boundaries[p] 为 ∂_p: C_p → C_{p-1}（p ≥ 1）。
    由神经构造时 basis[p] 给出非退化单形，0-单形是对象，p-单形是 p 个可复合非恒等态射的元组。
    """
    sizes: List[int]
    boundaries: Dict[int, DomainMatrix]
    basis: Optional[List[List[Simplex]]] = None
    truncated: bool = False

    @property
    def top(self) -> int:
        return len(self.sizes) - 1

    def boundary(self, p: int) -> DomainMatrix:
        rows = self.sizes[p - 1] if 0 <= p - 1 <= self.top else 0
        cols = self.sizes[p] if 0 <= p <= self.top else 0
        M = self.boundaries.get(p)
        if M is None:
            return DomainMatrix([[ZZ(0)] * cols for _ in range(rows)], (rows, cols), ZZ)
        return M

    def check_square_zero(self) -> "ChainComplex":
        """
        Raises:
            BoundaryNotSquareZero: 某个 ∂_{p-1}∘∂_p ≠ 0
        """
        for p in range(2, self.top + 1):
            A, B = self.boundary(p - 1), self.boundary(p)
            if 0 in A.shape or 0 in B.shape:
                continue
            if not (A * B).is_zero_matrix:
                raise BoundaryNotSquareZero(f"∂_{p - 1}∘∂_{p} ≠ 0")
        return self


def _chains(C: FinCat, max_dim: Optional[int]) -> Tuple[List[List[Simplex]], bool]:
    non_identity = C.non_identity()
    out: Dict[Hashable, List[Hashable]] = {x: [] for x in C.objects}
    for m in non_identity:
        out[C.src[m]].append(m)
    basis: List[List[Simplex]] = [list(C.objects)]
    current = [(m,) for m in non_identity]
    truncated = False
    p = 1
    while current:
        if max_dim is not None and p > max_dim:
            truncated = True
            break
        basis.append(current)
        current = [c + (m,) for c in current for m in out[C.tgt[c[-1]]]]
        p += 1
    return basis, truncated


def _faces(C: FinCat, c: Tuple) -> List[Simplex]:
    p = len(c)
    if p == 1:
        return [C.tgt[c[0]], C.src[c[0]]]
    faces = [c[1:]]
    for k in range(1, p):
        faces.append(c[:k - 1] + (C.compose(c[k], c[k - 1]),) + c[k + 1:])
    faces.append(c[:-1])
    return faces


def nerve(C: FinCat, max_dim: Optional[int] = None) -> ChainComplex:
    """
    无圈范畴的（非退化）神经链复形

    Args:
        max_dim: 只构造到该维数；截断时 truncated 为真

    Raises:
        NotLoopFree: C 有非恒等自同态或态射圈
    """
    if not C.is_loop_free():
        raise NotLoopFree(f"{C.name or '范畴'} 不是无圈范畴，神经不是有限维的")
    basis, truncated = _chains(C, max_dim)
    index = [{s: k for k, s in enumerate(level)} for level in basis]
    boundaries = {}
    for p in range(1, len(basis)):
        entries: Dict[Tuple[int, int], int] = {}
        for col, c in enumerate(basis[p]):
            for k, face in enumerate(_faces(C, c)):
                row = index[p - 1][face]
                entries[(row, col)] = entries.get((row, col), 0) + (-1) ** k
        boundaries[p] = _matrix(entries, len(basis[p - 1]), len(basis[p]))
    K = ChainComplex([len(level) for level in basis], boundaries, basis, truncated)
    K.check_square_zero()
    return K


@dataclass
class HomologyResult:
    """每个维数的 Betti 数与挠系数（素数幂，升序）"""
    betti: List[int]
    torsion: List[List[int]] = field(default_factory=list)

    def is_point(self) -> bool:
        return self.betti[:1] == [1] and not any(self.betti[1:]) and not any(self.torsion)

    def is_zero(self) -> bool:
        return not any(self.betti) and not any(self.torsion)

    def degree(self, p: int) -> Tuple[int, Tuple[int, ...]]:
        if p < len(self.betti):
            return self.betti[p], tuple(self.torsion[p])
        return 0, ()

    def agrees_with(self, other: "HomologyResult") -> bool:
        """逐维比较，较短一侧缺失的维数按零处理"""
        top = max(len(self.betti), len(other.betti))
        return all(self.degree(p) == other.degree(p) for p in range(top))

    def to_json(self) -> dict:
        return {"betti": list(self.betti), "torsion": [list(t) for t in self.torsion]}


def _invariants(M: DomainMatrix) -> List[int]:
    """非零不变因子的绝对值"""
    if 0 in M.shape:
        return []
    return [abs(int(v)) for v in invariant_factors(M) if v]


def _prime_powers(values: Sequence[int]) -> List[int]:
    powers = []
    for v in values:
        if v > 1:
            powers.extend(p ** e for p, e in factorint(v).items())
    return sorted(powers)


def homology(K: ChainComplex, max_dim: Optional[int] = None) -> HomologyResult:
    """
    Smith 标准形求整系数同调

    Raises:
        BoundaryNotSquareZero: 复形不满足 ∂² = 0
    """
    K.check_square_zero()
    top = K.top if max_dim is None else min(K.top, max_dim)
    invariants = {p: _invariants(K.boundary(p)) for p in range(1, top + 2) if p <= K.top}
    betti, torsion = [], []
    for p in range(top + 1):
        rank_in = len(invariants.get(p, []))
        rank_out = len(invariants.get(p + 1, []))
        betti.append(K.sizes[p] - rank_in - rank_out)
        torsion.append(_prime_powers(invariants.get(p + 1, [])))
    return HomologyResult(betti, torsion)


def rational_ranks(K: ChainComplex) -> List[int]:
    """ℚ 上用 Gauss 消元独立计算 Betti 数，作为交叉验证"""
    ranks = {}
    for p in range(1, K.top + 1):
        M = K.boundary(p)
        ranks[p] = 0 if 0 in M.shape else M.convert_to(QQ).rank()
    return [K.sizes[p] - ranks.get(p, 0) - ranks.get(p + 1, 0) for p in range(K.top + 1)]


def euler_characteristic(values: Sequence[int]) -> int:
    return sum((-1) ** p * v for p, v in enumerate(values))


def fixed_chains(C: FinCat, a, H) -> List[List[Simplex]]:
    """N(C) 中被 H 固定的非退化单形"""
    basis, _ = _chains(C, None)
    result = [[x for x in basis[0] if all(a.act_obj(h, x) == x for h in H.members)]]
    for level in basis[1:]:
        result.append([c for c in level if all(a.act_mor(h, m) == m for h in H.members for m in c)])
    while len(result) > 1 and not result[-1]:
        result.pop()
    return result


# ---------------------------------------------------------------- 同调等价

def chain_map(F: Functor, A: ChainComplex, B: ChainComplex) -> Dict[int, DomainMatrix]:
    """F 诱导的链映射 f_p: C_p(N dom) → C_p(N cod)；像为退化单形时取 0"""
    index = [{s: k for k, s in enumerate(level)} for level in B.basis]
    maps = {}
    for p in range(A.top + 1):
        rows = B.sizes[p] if p <= B.top else 0
        entries: Dict[Tuple[int, int], int] = {}
        for col, s in enumerate(A.basis[p]):
            if p == 0:
                image = F.ob(s)
            else:
                image = tuple(F.mor(m) for m in s)
                if any(F.cod.is_identity(m) for m in image):
                    continue
            if p > B.top:
                continue
            entries[(index[p][image], col)] = 1
        maps[p] = _matrix(entries, rows, A.sizes[p])
    return maps


def _block(top_left: DomainMatrix, top_right: DomainMatrix, bottom_right: DomainMatrix) -> DomainMatrix:
    r1, c1 = top_left.shape
    r2, c2 = bottom_right.shape
    dense = [[ZZ(0)] * (c1 + c2) for _ in range(r1 + r2)]
    for (M, dr, dc) in ((top_left, 0, 0), (top_right, 0, c1), (bottom_right, r1, c1)):
        if 0 in M.shape:
            continue
        for r, row in enumerate(M.to_list()):
            for c, v in enumerate(row):
                if v:
                    dense[r + dr][c + dc] = ZZ(v)
    return DomainMatrix(dense, (r1 + r2, c1 + c2), ZZ)


def mapping_cone(A: ChainComplex, B: ChainComplex, f: Dict[int, DomainMatrix], top: int) -> ChainComplex:
    """Cone_q = B_q ⊕ A_{q-1}，∂(b, a) = (∂b + f(a), −∂a)"""

    def size(K, p):
        return K.sizes[p] if 0 <= p <= K.top else 0

    def fmap(p):
        M = f.get(p)
        if M is None or p > A.top:
            return DomainMatrix([[ZZ(0)] * size(A, p) for _ in range(size(B, p))], (size(B, p), size(A, p)), ZZ)
        return M

    sizes = [size(B, q) + size(A, q - 1) for q in range(top + 1)]
    boundaries = {}
    for q in range(1, top + 1):
        dB = B.boundary(q) if q <= B.top else DomainMatrix(
            [[ZZ(0)] * size(B, q) for _ in range(size(B, q - 1))], (size(B, q - 1), size(B, q)), ZZ)
        dA = A.boundary(q - 1) if 1 <= q - 1 <= A.top else DomainMatrix(
            [[ZZ(0)] * size(A, q - 1) for _ in range(size(A, q - 2))], (size(A, q - 2), size(A, q - 1)), ZZ)
        boundaries[q] = _block(dB, fmap(q - 1), -dA if 0 not in dA.shape else dA)
    return ChainComplex(sizes, boundaries)


@dataclass
class EquivalenceVerdict:
    verdict: str
    failing_degree: Optional[int] = None
    pi0_bijective: bool = True
    truncated: bool = False
    dom_homology: Optional[HomologyResult] = None
    cod_homology: Optional[HomologyResult] = None

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_json(self) -> dict:
        data: Dict[str, Any] = {
            "verdict": self.verdict,
            "failing_degree": self.failing_degree,
            "pi0_bijective": self.pi0_bijective,
            "truncated": self.truncated,
        }
        if self.dom_homology is not None:
            data["dom_homology"] = self.dom_homology.to_json()
            data["cod_homology"] = self.cod_homology.to_json()
        return data


def _pi0_bijective(F: Functor) -> bool:
    dom_components = connected_components(F.dom)
    cod_components = connected_components(F.cod)
    owner = {x: k for k, comp in enumerate(cod_components) for x in comp}
    images = [owner[F.ob(comp[0])] for comp in dom_components]
    return len(set(images)) == len(images) == len(cod_components)


def homology_equivalence(F: Functor, max_dim: int) -> EquivalenceVerdict:
    """
    F 是否在 p ≤ max_dim 的整同调上诱导同构

    用映射锥判定：取 Cone 的第一个非零同调 H_q；若 H_{q-1} 在两侧同构则第一个失败的维数为 q，
    否则为 q-1。任一侧神经维数超过 max_dim 时，通过的结论记为 INCONCLUSIVE。

    Raises:
        NotLoopFree: 任一侧不是无圈范畴
    """
    for side in (F.dom, F.cod):
        if not side.is_loop_free():
            raise NotLoopFree(f"{side.name or '范畴'} 不是无圈范畴")
    depth = max_dim + 2
    A, B = nerve(F.dom, depth), nerve(F.cod, depth)
    truncated = F.dom.nerve_dimension() > max_dim or F.cod.nerve_dimension() > max_dim
    hA, hB = homology(A, max_dim), homology(B, max_dim)
    pi0 = _pi0_bijective(F)

    cone = mapping_cone(A, B, chain_map(F, A, B), max_dim + 2)
    hC = homology(cone, max_dim + 1)
    failing = None
    for q in range(min(len(hC.betti), max_dim + 2)):
        if hC.betti[q] or hC.torsion[q]:
            if q == 0:
                failing = 0
            elif homology(A).degree(q - 1) == homology(B).degree(q - 1):
                failing = q
            else:
                failing = q - 1
            break

    if failing is not None and failing <= max_dim:
        verdict = EquivalenceVerdict("FAIL", failing, pi0, truncated, hA, hB)
    elif truncated:
        verdict = EquivalenceVerdict("INCONCLUSIVE", None, pi0, truncated, hA, hB)
    else:
        verdict = EquivalenceVerdict("PASS", None, pi0, truncated, hA, hB)
    log_debug(f"同调等价 {F.name}: {verdict.verdict}")
    return verdict


def truncated_homology(C: FinCat, max_dim: Optional[int] = None) -> Tuple[ChainComplex, HomologyResult]:
    """
    神经到 max_dim 为止的整同调

    多构造一维单形，使 H_max_dim 计入 ∂_{max_dim+1} 的像。
    """
    if max_dim is None:
        K = nerve(C)
        return K, homology(K)
    K = nerve(C, max_dim + 1)
    return K, homology(K, max_dim)


def nerve_report(C: FinCat, max_dim: Optional[int] = None) -> dict:
    """命令行 homology 子命令的输出"""
    K, H = truncated_homology(C, max_dim)
    top = len(H.betti) - 1
    data = H.to_json()
    data.update({
        "simplices": list(K.sizes[:top + 1]),
        "dimension": top,
        "truncated": max_dim is not None and C.nerve_dimension() > max_dim,
        "rational_betti": rational_ranks(K)[:top + 1],
        "components": [[label(x) for x in comp] for comp in connected_components(C)],
    })
    return data
