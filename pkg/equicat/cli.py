"""
命令行模块
equicat <名词> <动词> [--选项]；输入输出均为 JSON，退出码 0 表示 PASS，1 表示 FAIL 或不确定，2 表示输入错误
"""

import argparse
import json
import os
import sys
from typing import Any, Callable, Dict, List, Optional

from . import __version__
from .bounds import (CocartData, ConnFunction, ObjectTable, PointTable, VertexConn, bm_bound,
                     classical_range, configuration_bound, dual_bm_bound, holim_connectivity_bound,
                     mapping_space_connectivity_bound, overcat_mapping_data,
                     restriction_connectivity_bound, submanifold_bound, suspension_closed_form,
                     suspension_via_bm)
from .checks import CHECKS, run_check
from .config_manager import config_manager, get_config, set_config
from .constructions import (comma_bk, grothendieck, hom_category, hpb_certificate, m_over, matching_data,
                            reedy_quasi_fibrant, total_fiber_model)
from .equivariant import GDiagram, fixed_category, fixed_diagram, orbit_category, transport, twisted_arrow
from .error_handler import ValidationError, handle_errors, log_info, setup_global_error_handler
from .fincat import (cat_limit, degree_filtration, identity_functor, label, over_category,
                     slice_families, under_category)
from .formats import (find_objects, load_category, load_cospan, load_diagram, load_gcategory, load_group,
                      load_gset, load_subgroup, parse_subset)
from .groups import subgroup_lattice
from .gsets import eff_subgroups, invariant_partitions, orbits
from .simplicial import nerve_report
from .utils import FileManager, dump_report


# ---------------------------------------------------------------- 输入输出

def _load(path: str) -> Any:
    return FileManager.load_json(path)


def _group_arg(value: str):
    """群参数可以是标准群名，也可以是 group.json 路径"""
    if value.endswith('.json') or os.path.isfile(value):
        return load_group(_load(value))
    return load_group(value)


def _split(value: Optional[str]) -> List[str]:
    return [x.strip() for x in (value or "").split(",") if x.strip()]


def _emit(args: argparse.Namespace, data: Any):
    indent = get_config('output.indent', 2)
    print(dump_report(data, indent))
    if getattr(args, 'out', None):
        FileManager.save_json(args.out, data, indent)


def _verdict_code(verdict: str) -> int:
    return 0 if verdict == "PASS" else 1


# ---------------------------------------------------------------- group / gset

def cmd_group(args) -> int:
    G = _group_arg(args.group)
    lattice = subgroup_lattice(G)
    _emit(args, {"group": G.to_json(), "lattice": lattice.to_json()})
    return 0


def cmd_gset(args) -> int:
    group = _group_arg(args.group) if args.group else None
    J = load_gset(_load(args.gset), group)
    H = load_subgroup(J.group, args.subgroup)
    if args.verb == "orbits":
        data = orbits(J, H)
        result = {
            "subgroup": H.label,
            "orbits": [[J.points[x] for x in block] for block in data.blocks],
            "stabilizers": {J.points[x]: S.label for x, S in enumerate(data.stabilizers)},
        }
    elif args.verb == "partitions":
        parts = invariant_partitions(J, H)
        result = {"subgroup": H.label, "count": len(parts),
                  "partitions": [[sorted(J.points[x] for x in block) for block in p] for p in parts]}
    else:
        if not args.subset:
            raise ValidationError("eff 需要 --subset")
        U = parse_subset(J, args.subset)
        result = {"subgroup": H.label, "subset": J.subset_label(U),
                  "eff": [L.label for L in eff_subgroups(J, U, H)]}
    _emit(args, result)
    return 0


# ---------------------------------------------------------------- bounds

def _conn(J, raw) -> ConnFunction:
    return ConnFunction.from_mapping(subgroup_lattice(J.group), raw)


def _require(data: Dict[str, Any], *keys: str):
    missing = [k for k in keys if k not in data]
    if missing:
        raise ValidationError("输入缺少字段: " + ", ".join(missing))


def _gset_bound(verb: str, J, data: Dict[str, Any]) -> Dict[str, Any]:
    G = J.group
    if verb in ("bm", "dualbm"):
        _require(data, "nu", "vc")
        nu, vc = CocartData.from_json(J, data["nu"]), VertexConn.from_json(J, data["vc"])
        result = (bm_bound if verb == "bm" else dual_bm_bound)(J, nu, vc).to_json()
        if verb == "bm" and G.order == 1:
            result["classical"] = classical_range(J, nu).to_json()
        return result
    if verb == "susp-closed":
        _require(data, "conn")
        return {"value": suspension_closed_form(G, J, _conn(J, data["conn"])).to_json()}
    if verb == "susp-bm":
        _require(data, "conn")
        return suspension_via_bm(G, J, _conn(J, data["conn"])).to_json()
    if verb == "submanifold":
        _require(data, "m", "d", "connM")
        return submanifold_bound(J, _conn(J, data["m"]), PointTable.from_json(J, data["d"]),
                                 _conn(J, data["connM"])).to_json()
    _require(data, "m", "connM")
    return configuration_bound(J, _conn(J, data["m"]), _conn(J, data["connM"])).to_json()


def _diagram_bound(verb: str, data: Dict[str, Any]) -> Dict[str, Any]:
    a = load_gcategory(data)
    _require(data, "conn")
    connX = ObjectTable.from_json(a.cat.objects, subgroup_lattice(a.group), data["conn"], data.get("default"))
    if verb == "holim":
        return {"value": holim_connectivity_bound(a, connX).to_json()}
    if verb == "resmap":
        return restriction_connectivity_bound(a, connX).to_json()
    return {"value": mapping_space_connectivity_bound(overcat_mapping_data(a, connX), a).to_json()}


def cmd_bounds(args) -> int:
    data = _load(args.input)
    if args.verb in ("holim", "resmap", "mapspace"):
        result = _diagram_bound(args.verb, data)
    else:
        if not args.gset:
            raise ValidationError(f"bounds {args.verb} 需要 --gset")
        group = _group_arg(args.group) if args.group else None
        result = _gset_bound(args.verb, load_gset(_load(args.gset), group), data)
    _emit(args, {"bound": args.verb, **result})
    return 0


# ---------------------------------------------------------------- cat / eq

def cmd_cat(args) -> int:
    if args.verb == "limit":
        D = load_diagram(_load(args.diagram))
        D = D.diagram if isinstance(D, GDiagram) else D
        L, projections = cat_limit(D)
        _emit(args, {"limit": L.to_json(), "projections": sorted(label(i) for i in projections)})
        return 0

    C = load_category(_load(args.cat), "C")
    if args.verb == "validate":
        loop_free = C.is_loop_free()
        result = {"valid": True, "objects": len(C.objects), "morphisms": len(C.morphisms),
                  "loop_free": loop_free}
        if loop_free:
            result["nerve_dimension"] = C.nerve_dimension()
    elif args.verb == "over":
        x = find_objects(C, [args.object])[0]
        slicer = under_category if args.under else over_category
        cat, _ = slicer(identity_functor(C), x)
        result = cat.to_json()
    elif args.verb == "slice":
        fam = slice_families(C, find_objects(C, _split(args.objects)))
        result = {"members": [label(u) for u in fam.members],
                  "under": fam.under.to_json(), "strict": fam.strict.to_json()}
    else:
        result = degree_filtration(C, args.direction).to_json()
    _emit(args, result)
    return 0


def cmd_eq(args) -> int:
    if args.verb == "orbitcat":
        _emit(args, orbit_category(_group_arg(args.group)).to_json())
        return 0
    if args.verb == "tw":
        _emit(args, twisted_arrow(load_category(_load(args.cat), "C")).to_json())
        return 0

    if args.verb == "fixed" and args.diagram:
        X = load_diagram(_load(args.diagram))
        if not isinstance(X, GDiagram):
            raise ValidationError("eq fixed --diagram 需要 G-图")
        H = load_subgroup(X.group, args.subgroup)
        XH, IH = fixed_diagram(X, H)
        _emit(args, {"subgroup": H.label, "index": IH.to_json(),
                     "vertices": {label(i): XH.vertex[i].to_json() for i in IH.objects}})
        return 0

    a = load_gcategory(_load(args.gcat))
    if args.verb == "fixed":
        H = load_subgroup(a.group, args.subgroup)
        _emit(args, {"subgroup": H.label, "fixed": fixed_category(a, H)[0].to_json()})
        return 0
    lattice = subgroup_lattice(a.group)
    L, H = lattice.find(args.source), lattice.find(args.target)
    g = a.group.index(args.element) if args.element else a.group.identity
    fstar = transport(a, L, H, g)
    _emit(args, {"source": L.label, "target": H.label, "coset": a.group.elements[g],
                 "objects": {label(x): label(y) for x, y in fstar.obj_map.items()},
                 "morphisms": {label(m): label(n) for m, n in fstar.mor_map.items()}})
    return 0


# ---------------------------------------------------------------- 构造与验证

def cmd_build(args) -> int:
    if args.verb == "comma":
        f, g = load_cospan(_load(args.cospan))
        model = comma_bk(f, g)
        _emit(args, {**model.to_json(), "comma": model.cat.to_json()})
        return 0
    if args.verb == "hom":
        K, X = load_diagram(_load(args.source)), load_diagram(_load(args.target))
        hom = hom_category(K, X)
        result = hom.to_json()
        if hom.action is not None and args.subgroup:
            H = load_subgroup(hom.action.group, args.subgroup)
            result["fixed"] = {"subgroup": H.label, "objects": len(hom.fixed(H)[0].objects)}
        _emit(args, result)
        return 0

    X = load_diagram(_load(args.diagram))
    if args.verb == "grothendieck":
        cat, action = grothendieck(X)
        result = {"total": cat.to_json()}
        if action is not None:
            result["action"] = action.to_json()
        _emit(args, result)
        return 0

    I = X.index
    U = find_objects(I, _split(args.objects))
    md = matching_data(X, U, args.equivariant)
    M = md.hom.cat
    if args.phi is not None:
        _emit(args, {"members": [label(u) for u in md.members], "transformation": args.phi,
                     "comma": m_over(md.functor, args.phi).to_json()})
        return 0
    _emit(args, {
        "members": [label(u) for u in md.members],
        "source_objects": len(md.source.objects),
        "hom": md.hom.to_json(),
        "stabilizer": md.stabilizer.label if md.stabilizer is not None else None,
        "fibers": {str(phi): len(m_over(md.functor, phi).objects) for phi in M.objects},
    })
    return 0


def cmd_check(args) -> int:
    report = run_check(args.check, args.seed, args.size)
    _emit(args, report.to_json(get_config('output.include_timing', False)))
    return report.exit_code


def cmd_qf(args) -> int:
    X = load_diagram(_load(args.diagram))
    report = reedy_quasi_fibrant(X, args.max_dim, args.mode)
    _emit(args, report.to_json())
    return _verdict_code(report.verdict)


def cmd_totalfiber(args) -> int:
    X = load_diagram(_load(args.cube))
    if args.phi is None:
        result = hpb_certificate(X)
        _emit(args, result)
        return 0 if result["certified"] else 1
    model = total_fiber_model(X, args.phi)
    _emit(args, {**model.to_json(), "homology": model.homology(args.max_dim).to_json(),
                 "fiber": model.cat.to_json()})
    return 0


def cmd_homology(args) -> int:
    _emit(args, nerve_report(load_category(_load(args.cat), "C"), args.max_dim))
    return 0


def cmd_config(args) -> int:
    if args.verb == "show":
        _emit(args, config_manager.export_config())
    elif args.verb == "set":
        try:
            value = json.loads(args.value)
        except json.JSONDecodeError:
            value = args.value
        set_config(args.key, value)
        log_info(f"配置已更新: {args.key} = {value!r}")
        _emit(args, {args.key: get_config(args.key)})
    else:
        config_manager.reset_to_defaults()
        _emit(args, config_manager.export_config())
    return 0


# ---------------------------------------------------------------- 解析器

def _common(parser: argparse.ArgumentParser):
    parser.add_argument('--out', help="同时把 JSON 结果写入文件")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="equicat", description="等变范畴值图的构造、连通度界与验证")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--workers', type=int, help="并行检查的线程数")
    parser.add_argument('--timing', action='store_true', help="在报告中输出耗时")
    parser.add_argument('--log-file', action='store_true', help="把日志写入日志目录")
    sub = parser.add_subparsers(dest='noun', required=True)

    p = sub.add_parser('group', help="群与子群格")
    p.add_argument('verb', choices=['lattice'])
    p.add_argument('--group', required=True, help="标准群名或 group.json")
    _common(p)
    p.set_defaults(func=cmd_group)

    p = sub.add_parser('gset', help="G-集合的轨道、划分与有效子群")
    p.add_argument('verb', choices=['orbits', 'partitions', 'eff'])
    p.add_argument('--gset', required=True)
    p.add_argument('--group', help="覆盖 gset.json 中的群")
    p.add_argument('--subgroup', help="子群标签，默认整个群")
    p.add_argument('--subset', help="位掩码或 {a,b}")
    _common(p)
    p.set_defaults(func=cmd_gset)

    p = sub.add_parser('bounds', help="连通度界")
    p.add_argument('verb', choices=['bm', 'dualbm', 'susp-closed', 'susp-bm', 'submanifold', 'conf',
                                    'holim', 'resmap', 'mapspace'])
    p.add_argument('--gset')
    p.add_argument('--group')
    p.add_argument('--in', dest='input', required=True, help="界的输入表")
    _common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser('cat', help="有限范畴")
    p.add_argument('verb', choices=['validate', 'over', 'slice', 'degree', 'limit'])
    p.add_argument('--cat')
    p.add_argument('--diagram')
    p.add_argument('--object')
    p.add_argument('--objects', help="逗号分隔的对象标签")
    p.add_argument('--under', action='store_true', help="over 改为 under 切片")
    p.add_argument('--direction', choices=['under', 'over'], default='under')
    _common(p)
    p.set_defaults(func=cmd_cat)

    p = sub.add_parser('eq', help="等变结构")
    p.add_argument('verb', choices=['fixed', 'orbitcat', 'tw', 'transport'])
    p.add_argument('--gcat', help="{group, category, action}")
    p.add_argument('--diagram')
    p.add_argument('--cat')
    p.add_argument('--group')
    p.add_argument('--subgroup')
    p.add_argument('--source', help="transport 的 L")
    p.add_argument('--target', help="transport 的 H")
    p.add_argument('--element', help="陪集代表 g")
    _common(p)
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser('build', help="构造")
    p.add_argument('verb', choices=['grothendieck', 'hom', 'fU', 'comma'])
    p.add_argument('--diagram')
    p.add_argument('--source', help="hom 的 K")
    p.add_argument('--target', help="hom 的 X")
    p.add_argument('--subgroup')
    p.add_argument('--objects', help="fU 的 U，逗号分隔")
    p.add_argument('--equivariant', action='store_true')
    p.add_argument('--phi', type=int, help="Hom 范畴中变换的序号")
    p.add_argument('--cospan')
    _common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser('check', help="随机实例检查")
    p.add_argument('check', choices=list(CHECKS))
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--size', type=int)
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser('qf', help="Reedy 拟纤维性")
    p.add_argument('--diagram', required=True)
    p.add_argument('--max-dim', type=int, default=2)
    p.add_argument('--mode', choices=['plain', 'equivariant'], default='plain')
    _common(p)
    p.set_defaults(func=cmd_qf)

    p = sub.add_parser('totalfiber', help="立方体图的总纤维")
    p.add_argument('--cube', required=True)
    p.add_argument('--phi', type=int, help="变换序号；省略时检查全部总纤维")
    p.add_argument('--max-dim', type=int)
    _common(p)
    p.set_defaults(func=cmd_totalfiber)

    p = sub.add_parser('homology', help="神经的整同调")
    p.add_argument('--cat', required=True)
    p.add_argument('--max-dim', type=int)
    _common(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser('config', help="配置")
    p.add_argument('verb', choices=['show', 'set', 'reset'])
    p.add_argument('key', nargs='?')
    p.add_argument('value', nargs='?')
    _common(p)
    p.set_defaults(func=cmd_config)
    return parser


_REQUIRED: Dict[tuple, List[str]] = {
    ('cat', 'validate'): ['cat'], ('cat', 'over'): ['cat', 'object'], ('cat', 'slice'): ['cat', 'objects'],
    ('cat', 'degree'): ['cat'], ('cat', 'limit'): ['diagram'],
    ('eq', 'orbitcat'): ['group'], ('eq', 'tw'): ['cat'], ('eq', 'transport'): ['gcat', 'source', 'target'],
    ('build', 'grothendieck'): ['diagram'], ('build', 'hom'): ['source', 'target'],
    ('build', 'fU'): ['diagram', 'objects'], ('build', 'comma'): ['cospan'],
    ('config', 'set'): ['key', 'value'],
}


def _check_required(parser: argparse.ArgumentParser, args: argparse.Namespace):
    needed = _REQUIRED.get((args.noun, getattr(args, 'verb', None)), [])
    if args.noun == 'eq' and args.verb == 'fixed' and not (args.gcat or args.diagram):
        needed = ['gcat']
    missing = [name for name in needed if getattr(args, name, None) in (None, "")]
    if missing:
        parser.error(f"{args.noun} {args.verb} 需要: " + ", ".join("--" + m.replace('_', '-') for m in missing))


@handle_errors("命令执行失败")
def _dispatch(func: Callable[[argparse.Namespace], int], args: argparse.Namespace) -> int:
    return func(args)


def main(argv: Optional[List[str]] = None) -> int:
    """命令行入口，返回退出码"""
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_required(parser, args)

    if args.log_file:
        log_cfg = get_config('logging', {})
        setup_global_error_handler(log_cfg.get('log_dir') or None, log_cfg.get('file_level', 'INFO'),
                                   log_cfg.get('console_level', 'ERROR'))
    if args.workers is not None:
        config_manager.override('performance.max_workers', max(1, args.workers))
    if args.timing:
        config_manager.override('output.include_timing', True)

    log_info(f"equicat {' '.join(argv if argv is not None else sys.argv[1:])}")
    return _dispatch(args.func, args)
