"""
检查模块
按种子生成随机实例并调用对应的见证或等式，汇总为可复现的检查报告
"""

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Dict, Optional, Tuple

from .bounds import (ConnFunction, PointTable, configuration_bound, submanifold_bound,
                     suspension_closed_form, suspension_via_bm)
from .config_manager import config_manager, enforce_cap
from .constructions import (brute_force_families, comma_bk, cylinder_diagram, fixed_grothendieck_witness,
                            hom_category, indgrot_witness, quillen_b_base, twisted_limit_witness)
from .error_handler import EquicatError, ErrorCollector, UnknownCheck, ValidationError, log_info, log_warning
from .fincat import degree_filtration, label
from .equivariant import GDiagram
from .groups import standard_group, subgroup_lattice
from .gsets import regular_gset
from .instances import (SMALL_GROUPS, make_rng, random_conn, random_cospan, random_diagram,
                        random_diagram_pair, random_gdiagram, random_gdiagram_pair, random_group,
                        random_gset, random_iso_diagram, random_subgroup)
from .workers import run_parallel


@dataclass
class CheckReport:
    """一次检查的结果；elapsed 只在 include_timing 时序列化"""
    check: str
    seed: int
    size: int
    passed: int
    failed: int
    witness: Optional[Dict[str, Any]] = None
    counterexample: Optional[Dict[str, Any]] = None
    summary: Dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def verdict(self) -> str:
        return "PASS" if self.failed == 0 and self.passed == self.size else "FAIL"

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict == "PASS" else 1

    def to_json(self, include_timing: bool = False) -> dict:
        data = {
            "check": self.check,
            "seed": self.seed,
            "size": self.size,
            "verdict": self.verdict,
            "passed": self.passed,
            "failed": self.failed,
            "summary": self.summary,
            "witness": self.witness,
            "counterexample": self.counterexample,
        }
        if include_timing:
            data["elapsed"] = round(self.elapsed, 3)
        return data


@dataclass
class _Check:
    generate: Callable[[Any, int], Any]
    verify: Callable[[Any], Dict[str, Any]]
    description: str


# ---------------------------------------------------------------- 各个检查

def _gen_gthom(rng, k):
    G = random_group(rng, ("trivial", "Z2", "Z3", "Z2xZ2", "S3"))
    X = random_gdiagram(rng, G, max_index=5, max_vertex=3)
    return X, random_subgroup(rng, G)


def _verify_gthom(instance):
    X, H = instance
    witness = fixed_grothendieck_witness(X, H)
    return {"group": X.group.order, "subgroup": H.label, **witness.ledger}


def _gen_indgrot(rng, k):
    if k % 5 == 4:
        return random_gdiagram(rng, standard_group("Z2"), max_index=4, max_vertex=3,
                               kinds=("powerset", "cone"))
    return random_diagram(rng, max_index=3, max_vertex=3)


def _verify_indgrot(X):
    equivariant = isinstance(X, GDiagram)
    I = X.index
    filtration = degree_filtration(I, "under")
    tried = []
    for n in range(filtration.max_degree + 1):
        level = filtration.level(n)
        for r in range(1, len(level) + 1):
            for U in combinations(level, r):
                indgrot_witness(X, U, equivariant)
                tried.append([label(u) for u in U])
    return {"equivariant": equivariant, "objects": len(I.objects), "subsets": len(tried)}


def _gen_twisted(rng, k):
    G = standard_group("Z2" if k % 2 == 0 else "Z3")
    return random_gdiagram_pair(rng, G, max_index=3, max_vertex=3)


def _verify_twisted(instance):
    K, X = instance
    witness = twisted_limit_witness(K, X)
    return {"group": K.group.order, **witness.ledger}


def _gen_modelhpb(rng, k):
    return random_cospan(rng, max_objects=3)


def _verify_modelhpb(cospan):
    return comma_bk(cospan.f, cospan.g).to_json()


def _gen_suspension(rng, k):
    G = standard_group(SMALL_GROUPS[k % len(SMALL_GROUPS)])
    J = random_gset(rng, G, max_orbits=6)
    return G, J, random_conn(rng, G, 0, 4)


def _verify_suspension(instance):
    G, J, connX = instance
    closed = suspension_closed_form(G, J, connX)
    derived = suspension_via_bm(G, J, connX)(G.whole())
    if closed != derived:
        raise _Mismatch({"closed_form": closed.to_json(), "via_bm": derived.to_json(), "points": J.size})
    return {"group": G.order, "points": J.size, "value": closed.to_json()}


def _gen_conf(rng, k):
    G = random_group(rng)
    J = random_gset(rng, G, max_points=4)
    return J, random_conn(rng, G, 0, 4), random_conn(rng, G, 0, 4)


def _verify_conf(instance):
    J, m, connM = instance
    conf = configuration_bound(J, m, connM).function
    sub = submanifold_bound(J, m, PointTable.constant(J, 0), connM).function
    if conf != sub:
        raise _Mismatch({"configuration": conf.to_json(), "submanifold": sub.to_json()})
    return {"points": J.size, "nu": conf.to_json()}


def _gen_exsharp(rng, k):
    return None


def _verify_exsharp(_):
    G = standard_group("Z2")
    lattice = subgroup_lattice(G)
    J = regular_gset(G)
    m = ConnFunction.from_mapping(lattice, {"e": 2, "G": 1})
    result = configuration_bound(J, m, ConnFunction.constant(lattice, 0))
    whole, trivial = result(G.whole()).to_json(), result(G.trivial()).to_json()
    if (whole, trivial) != (-1, 1):
        raise _Mismatch({"nu_G": whole, "nu_e": trivial})
    return {"nu_G": whole, "nu_e": trivial, "witness": result.witnesses}


def _gen_nerve_hom(rng, k):
    return random_diagram_pair(rng, max_index=3, max_vertex=2)


def _verify_nerve_hom(instance):
    K, X = instance
    hom = hom_category(K, X)
    vertices, edges = brute_force_families(K, X), brute_force_families(cylinder_diagram(K), X)
    found = (len(hom.cat.objects), len(hom.cat.morphisms))
    if found != (vertices, edges):
        raise _Mismatch({"hom": list(found), "brute_force": [vertices, edges]})
    return {"zero_simplices": vertices, "one_simplices": edges}


def _gen_quillen(rng, k):
    return random_iso_diagram(rng, max_index=3, max_vertex=3)


def _verify_quillen(Y):
    result = quillen_b_base(Y)
    if result["verdict"] != "PASS":
        raise _Mismatch(result)
    return {"objects": len(Y.index.objects)}


class _Mismatch(EquicatError):
    """数值检查不一致，附带两侧的值"""

    def __init__(self, detail: Dict[str, Any]):
        super().__init__("两侧结果不一致")
        self.detail = detail


CHECKS: Dict[str, _Check] = {
    "gthom": _Check(_gen_gthom, _verify_gthom, "(I≀X)^H ≅ I^H≀X^H"),
    "indgrot": _Check(_gen_indgrot, _verify_indgrot, "U≤I 分解"),
    "twisted": _Check(_gen_twisted, _verify_twisted, "Hom(K,X)^G 作为扭曲箭头极限"),
    "modelhpb": _Check(_gen_modelhpb, _verify_modelhpb, "f↓g 的两个模型"),
    "susp-coherence": _Check(_gen_suspension, _verify_suspension, "悬挂闭式与 BM 推导一致"),
    "conf-specialization": _Check(_gen_conf, _verify_conf, "构形空间界是 d≡0 的子流形界"),
    "exsharp": _Check(_gen_exsharp, _verify_exsharp, "ℤ/2 构形空间的锐利范围"),
    "nerve-hom": _Check(_gen_nerve_hom, _verify_nerve_hom, "N Hom(K,X) 低维单形计数"),
    "quillenB-base": _Check(_gen_quillen, _verify_quillen, "同构值图的 Quillen B 基本情形"),
}


def default_size(check_id: str) -> int:
    return int(config_manager.get_checks_config().get('default_size', {}).get(check_id, 10))


def _attempt(verify: Callable[[Any], Dict[str, Any]], instance) -> Tuple[bool, Dict[str, Any]]:
    try:
        return True, verify(instance)
    except _Mismatch as e:
        return False, {"error": "Mismatch", "detail": e.detail}
    except EquicatError as e:
        return False, {"error": type(e).__name__, "message": str(e)}


def run_check(check_id: str, seed: int = 0, size: Optional[int] = None,
              max_workers: Optional[int] = None) -> CheckReport:
    """
    生成 size 个随机实例并逐个检查

    实例全部由 seed 决定且按序号生成，验证可以并行，报告按序号汇总。

    Raises:
        UnknownCheck: 未知的检查名
        SizeCap: size 超过 check_size 上限
    """
    check = CHECKS.get(check_id)
    if check is None:
        raise UnknownCheck(f"未知的检查: {check_id}（可选: {', '.join(CHECKS)}）")
    size = default_size(check_id) if size is None else int(size)
    if size < 1:
        raise ValidationError("检查实例数必须为正")
    enforce_cap('check_size', size, "检查实例数")

    start = time.perf_counter()
    rng = make_rng(seed)
    instances = [check.generate(rng, k) for k in range(size)]
    results = run_parallel([lambda inst=inst: _attempt(check.verify, inst) for inst in instances], max_workers)

    collector = ErrorCollector()
    report = CheckReport(check_id, seed, size, 0, 0)
    for k, (ok, detail) in enumerate(results):
        if ok:
            report.passed += 1
            if report.witness is None:
                report.witness = {"instance": k, **detail}
        else:
            report.failed += 1
            collector.add_error(f"{check_id} 实例 {k}: {detail}")
            if report.counterexample is None:
                report.counterexample = {"instance": k, **detail}
    report.summary = {"description": check.description, "instances": size}
    if collector.has_errors():
        log_warning(collector.summary())
    report.elapsed = time.perf_counter() - start
    log_info(f"检查 {check_id} (seed={seed}, size={size}): {report.verdict}, "
             f"{report.passed} 通过, {report.failed} 失败")
    return report
