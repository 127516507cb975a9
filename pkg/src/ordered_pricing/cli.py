"""Command-line entry point.  Every command prints one JSON report on stdout.

Exit codes: 0 success, 2 invalid input, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from . import buymany, fedex, hardness, io, kernel, model, oracle, ptas, scalar
from .kernel import BudgetExceeded

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3


class InputError(ValueError):
    """Bad user input; reported with exit code 2."""

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


# ------------------------------------------------------------------ input


def _read_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    try:
        with open(source) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from None


def _read_json(source: str, cache: dict):
    if source not in cache:
        text = _read_text(source)
        try:
            cache[source] = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{source}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    return cache[source]


def _load_instance(args, cache):
    doc = _read_json(args.instance, cache)
    instance = io.instance_from_dict(doc)
    problems = model.validate_instance(instance)
    if problems:
        raise InputError("instance is invalid", problems)
    return instance, doc


def _load_pricing(text: str, mode: str, cache) -> tuple:
    """``--pricing`` takes a file, inline JSON, or a literal like ``(1,3)``."""
    if os.path.exists(text) or text == "-":
        doc = _read_json(text, cache)
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError:
            doc = text
    return io.pricing_from_json(doc, mode)


def _load_menu(source: Optional[str], mode: str, cache, fallback: Optional[dict] = None) -> tuple:
    if source is None:
        if fallback is None or "menu" not in fallback:
            raise InputError("no menu given and the instance document carries none")
        doc = fallback
    else:
        doc = _read_json(source, cache)
    return io.menu_from_dict(doc, mode)


def _load_order(source: str, cache) -> buymany.DominanceOrder:
    doc = _read_json(source, cache)
    if not isinstance(doc, dict) or "n" not in doc:
        raise io.FormatError("order", "expected an object with 'n' and 'pairs'")
    pairs = doc.get("pairs", [])
    if doc.get("chain"):
        return buymany.DominanceOrder.chain(int(doc["n"]))
    return buymany.DominanceOrder(int(doc["n"]), [tuple(p) for p in pairs])


def _threads(args) -> int:
    env = os.environ.get("ORDERED_PRICING_THREADS")
    if env:
        return kernel.default_threads()
    return max(1, args.threads or 1)


def _check_dims(instance, n: int, what: str) -> None:
    if n != instance.n:
        raise InputError(f"{what} has {n} items but the instance has {instance.n}")


# ------------------------------------------------------------------ report


def _revenue(value) -> Optional[dict]:
    if value is None:
        return None
    return {"exact": scalar.dump(value), "decimal": scalar.decimal_str(value)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, (Fraction, float)):
        return scalar.dump(x)
    return str(x)


def make_report(command, instance_doc=None, witness=None, revenue=None, diagnostics=None, warnings=(), **extra):
    report = {
        "command": command,
        "instance_digest": io.digest(io.instance_to_dict(instance_doc)) if instance_doc is not None else None,
        "witness": _jsonable(witness),
        "revenue": _revenue(revenue),
        "diagnostics": _jsonable(diagnostics or {}),
        "warnings": list(warnings),
    }
    report.update({k: _jsonable(v) for k, v in extra.items()})
    return report


def _pretty(report: dict) -> str:
    lines = [f"command   {report['command']}"]
    if report.get("instance_digest"):
        lines.append(f"digest    {report['instance_digest'][:16]}")
    if report.get("revenue"):
        r = report["revenue"]
        lines.append(f"revenue   {r['exact']}  (~{r['decimal']})")
    wit = report.get("witness")
    if isinstance(wit, dict):
        for key, val in wit.items():
            if key == "pricing":
                lines.append(f"pricing   {', '.join(str(v) for v in val)}")
            elif key == "menu":
                for k, opt in enumerate(val["options"]):
                    lines.append(f"option {k:<3}{opt['price']:>10}  alloc {', '.join(str(a) for a in opt['alloc'])}")
    for key, val in report.get("diagnostics", {}).items():
        lines.append(f"  {key:<28}{json.dumps(val)}")
    for w in report.get("warnings", []):
        lines.append(f"warning: {w}")
    if "error" in report:
        lines.append(f"error: {report['error']['message']}")
        for v in report["error"].get("violations", []):
            lines.append(f"  {v['path']}: {v['code']} ({v['message']})")
    return "\n".join(lines)


# ------------------------------------------------------------------ commands


def cmd_evaluate(args, cache):
    instance, doc = _load_instance(args, cache)
    if args.pricing is not None:
        pricing = _load_pricing(args.pricing, instance.mode, cache)
        _check_dims(instance, len(pricing), "pricing")
        rev = model.revenue_item_pricing(instance, pricing)
        payments = [model.best_response_item_pricing(t, pricing).payment for t in instance.types]
        return make_report("evaluate", instance, {"pricing": pricing}, rev, {"payments": payments})
    fallback = doc if isinstance(doc, dict) else None
    menu = _load_menu(args.menu, instance.mode, cache, fallback)
    problems = model.validate_menu(menu, instance.n, instance.mode == "exact")
    if problems:
        raise InputError("menu is invalid", problems)
    rev = model.revenue_menu(instance, menu)
    choices = [model.best_response_menu(t, menu).choice for t in instance.types]
    return make_report("evaluate", instance, {"menu": io.menu_to_dict(menu)}, rev, {"choices": choices})


def cmd_solve_brute(args, cache):
    instance, _ = _load_instance(args, cache)
    warnings = []
    if args.grid == "auto":
        eps = oracle.check_eps(Fraction(args.eps))
        observed = {Fraction(v) for t in instance.types for v in t.values}
        grid = sorted(observed | {Fraction(0)} | set(oracle.support_size_grid(observed, eps)))
    else:
        grid = list(_load_pricing(args.grid, "exact", cache))
    if instance.mode == "float":
        warnings.append("float instance converted to exact rationals for enumeration")
    t0 = time.perf_counter()
    pricing, rev = oracle.brute_force_optimal_pricing(instance, grid, budget=args.budget, threads=_threads(args))
    diag = {"grid_size": len(grid), "candidates": kernel.count_monotone(len(grid) + 1, instance.n), "backend": kernel.backend()}
    if args.timings:
        diag["seconds"] = round(time.perf_counter() - t0, 6)
    return make_report("solve brute", instance, {"pricing": pricing}, rev, diag, warnings)


def cmd_solve_fedex(args, cache):
    instance, _ = _load_instance(args, cache)
    t0 = time.perf_counter()
    res = fedex.fedex_dp(instance)
    diag = {"low_prices": res.low_prices, "prices": res.prices, "canonical_pricing": res.canonical}
    if args.timings:
        diag["seconds"] = round(time.perf_counter() - t0, 6)
    return make_report("solve fedex", instance, {"pricing": res.pricing}, res.revenue, diag)


def cmd_solve_ptas(args, cache):
    instance, _ = _load_instance(args, cache)
    t0 = time.perf_counter()
    res = ptas.ptas_solve(
        instance,
        Fraction(args.eps),
        gamma=args.gamma,
        delta=args.delta,
        period=args.period,
        grid=args.grid,
        budget=args.budget,
        threads=_threads(args),
    )
    diag = dict(res.diagnostics)
    if args.timings:
        diag["seconds"] = round(time.perf_counter() - t0, 6)
    warnings = []
    if args.gamma is not None or args.delta is not None:
        warnings.append("gap parameters overridden; the approximation guarantee does not apply")
    return make_report("solve ptas", instance, {"pricing": res.pricing}, res.revenue, diag, warnings)


def cmd_derive(args, cache):
    menu = _load_menu(args.menu, "exact", cache)
    n = len(menu[0].allocation) if menu else 0
    problems = model.validate_menu(menu, n)
    if problems:
        raise InputError("menu is invalid", problems)
    diag = {"buy_many_check": buymany.buy_many_check(menu), "strategy_family": buymany.STRATEGY_FAMILY}
    if args.order:
        order = _load_order(args.order, cache)
        if order.n != n:
            raise InputError(f"order has {order.n} items but the menu has {n}")
        sets = [buymany.SetLottery.from_lottery(lot) for lot in menu]
        q = buymany.derive_item_pricing_width_k(sets, order)
        diag["width"] = order.width
    else:
        q = buymany.derive_item_pricing(menu, n)
        diag["lowest_support_failures"] = buymany.lowest_support_property(menu, q)
    return make_report("derive-pricing", None, {"pricing": q}, None, diag)


def cmd_check_gap(args, cache):
    instance, doc = _load_instance(args, cache)
    menu = _load_menu(args.menu, "exact", cache, doc if isinstance(doc, dict) else None)
    problems = model.validate_menu(menu, instance.n)
    if problems:
        raise InputError("menu is invalid", problems)
    ell, beta = Fraction(args.ell), Fraction(args.beta)
    q = buymany.derive_item_pricing(menu, instance.n)
    menu_rev = model.revenue_menu(instance, menu)
    q_rev = model.revenue_item_pricing(instance, q)
    search = buymany.scaled_pricing_search(instance, q, ell, 1, args.grid_size)
    checks = []
    for t in instance.types:
        ud = buymany.utility_difference_check(t, menu, q, ell, beta)
        checks.append({"lhs": ud.lhs, "rhs": ud.rhs, "holds": ud.holds})
    witness = model.scale_pricing(q, search.alpha)
    best_rev = search.revenue
    diag = {
        "menu_revenue": menu_rev,
        "derived_pricing": q,
        "derived_revenue": q_rev,
        "best_alpha": search.alpha,
        "expected_scaled_revenue": search.expected_revenue,
        "gap_ratio": menu_rev / best_rev if best_rev else None,
        "utility_difference": checks,
        "buy_many_check": buymany.buy_many_check(menu),
        "lowest_support_failures": buymany.lowest_support_property(menu, q),
        "strategy_family": buymany.STRATEGY_FAMILY,
    }
    warnings = []
    if not diag["buy_many_check"]:
        warnings.append("menu fails the repeat-strategy buy-many check")
    return make_report("check-gap", instance, {"pricing": witness}, best_rev, diag, warnings)


def cmd_gen_hardness(args, cache):
    n_vertices, edges = io.parse_graph(_read_text(args.graph))
    try:
        graph = hardness.Graph.build(n_vertices, edges)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    instance, report = hardness.reduce_maxcut(graph, args.n)
    gadget = hardness.report_to_dict(report)
    if args.sidecar:
        with open(args.sidecar, "w") as fh:
            json.dump(gadget, fh, indent=2, sort_keys=True)
            fh.write("\n")
    diag = {"items": instance.n, "types": len(instance.types), "edges": len(graph.edges)}
    return make_report(
        "gen hardness", instance, None, None, diag, report.warnings,
        instance=io.instance_to_dict(instance), gadget_report=gadget,
    )


def cmd_fixture(args, cache):
    instance, menu, pricing = buymany.gap_example_fixture()
    diag = {"menu_revenue": model.revenue_menu(instance, menu)}
    return make_report(
        "fixture gap-example", instance, {"pricing": pricing}, model.revenue_item_pricing(instance, pricing), diag,
        instance=io.instance_to_dict(instance), menu=io.menu_to_dict(menu),
    )


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")
    common.add_argument("--threads", type=int, default=None, help="worker threads (ORDERED_PRICING_THREADS overrides)")

    p = argparse.ArgumentParser(prog="ordered-pricing", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", parents=[common], help="revenue of a pricing or menu")
    ev.add_argument("--instance", required=True, help="instance JSON file, or - for stdin")
    group = ev.add_mutually_exclusive_group(required=True)
    group.add_argument("--pricing", help="pricing file, inline JSON, or a literal such as (1,3)")
    group.add_argument("--menu", nargs="?", const=None, default=argparse.SUPPRESS,
                       help="menu file; without a value, the menu embedded in the instance document")
    ev.set_defaults(func=cmd_evaluate)

    solve = sub.add_parser("solve", help="optimal or approximate pricing")
    ssub = solve.add_subparsers(dest="solver", required=True)
    br = ssub.add_parser("brute", parents=[common], help="exhaustive search over a price grid")
    br.add_argument("--instance", required=True)
    br.add_argument("--grid", default="auto", help="'auto' or a file/list of prices")
    br.add_argument("--eps", default="1/2", help="grid resolution for --grid auto")
    br.add_argument("--budget", type=int, default=oracle.BRUTE_FORCE_BUDGET)
    br.set_defaults(func=cmd_solve_brute)
    fx = ssub.add_parser("fedex", parents=[common], help="exact DP for two-valued types")
    fx.add_argument("--instance", required=True)
    fx.set_defaults(func=cmd_solve_fedex)
    pt = ssub.add_parser("ptas", parents=[common], help="interval-prefix approximation scheme")
    pt.add_argument("--instance", required=True)
    pt.add_argument("--eps", required=True)
    pt.add_argument("--gamma", type=int)
    pt.add_argument("--delta", type=int)
    pt.add_argument("--period", type=int)
    pt.add_argument("--grid", choices=("support", "range"), default="support")
    pt.add_argument("--budget", type=int, default=ptas.DP_BUDGET)
    pt.set_defaults(func=cmd_solve_ptas)

    dp = sub.add_parser("derive-pricing", parents=[common], help="item pricing derived from a menu")
    dp.add_argument("--menu", required=True)
    dp.add_argument("--order", help='dominance order JSON: {"n": N, "pairs": [[i, j], ...]}')
    dp.set_defaults(func=cmd_derive)

    cg = sub.add_parser("check-gap", parents=[common], help="menu vs derived pricing diagnostics")
    cg.add_argument("--instance", required=True)
    cg.add_argument("--menu", help="menu file (defaults to the menu in the instance document)")
    cg.add_argument("--ell", default=str(buymany.DEFAULT_ELL))
    cg.add_argument("--beta", default=str(buymany.DEFAULT_BETA))
    cg.add_argument("--grid-size", type=int, default=64)
    cg.set_defaults(func=cmd_check_gap)

    gen = sub.add_parser("gen", help="instance generators")
    gsub = gen.add_subparsers(dest="generator", required=True)
    hd = gsub.add_parser("hardness", parents=[common], help="Max-Cut reduction instance")
    hd.add_argument("--graph", required=True, help="'n m' header then m lines 'i j'")
    hd.add_argument("--n", type=int, help="pad the vertex count to n")
    hd.add_argument("--sidecar", help="also write the gadget report to this file")
    hd.set_defaults(func=cmd_gen_hardness)

    fx = sub.add_parser("fixture", help="canonical fixtures")
    fsub = fx.add_subparsers(dest="fixture", required=True)
    ge = fsub.add_parser("gap-example", parents=[common], help="three-type menu vs pricing example")
    ge.set_defaults(func=cmd_fixture)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    name = " ".join(filter(None, [args.command, getattr(args, "solver", None), getattr(args, "generator", None),
                                  getattr(args, "fixture", None)]))
    cache = {}
    code = EXIT_OK
    try:
        report = args.func(args, cache)
    except BudgetExceeded as exc:
        code = EXIT_BUDGET
        report = {"command": name, "error": {"kind": "budget", "message": str(exc),
                                                      "needed": exc.needed, "budget": exc.budget}}
    except InputError as exc:
        code = EXIT_INVALID
        report = {"command": name, "error": {
            "kind": "validation", "message": str(exc),
            "violations": [{"code": v.code, "path": v.path, "message": v.message} for v in exc.violations]}}
    except (io.FormatError, fedex.NotTwoValued, model.DimensionError, ValueError) as exc:
        code = EXIT_INVALID
        report = {"command": name, "error": {"kind": "validation", "message": str(exc),
                                                      "path": getattr(exc, "path", None)}}
    if code != EXIT_OK:
        print(report["error"]["message"], file=sys.stderr)
    if args.pretty:
        out.write(_pretty(report) + "\n")
    else:
        out.write(json.dumps(report, indent=2) + "\n")
    return code


def main() -> None:
    sys.exit(run())
