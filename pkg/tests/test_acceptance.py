"""Acceptance suite: one test per criterion, each recording a pass/fail line.

Lines are printed at the end of the pytest run by ``conftest.py``.
"""

import itertools
import math
import random
import time
from fractions import Fraction as F

from conftest import ACCEPTANCE, REPORTS
from helpers import (
    random_additive_instance,
    random_menu,
    random_ordered_instance,
    random_two_valued_instance,
    random_width_order,
    ref_interval_optimum,
    ref_revenue,
)
from ordered_pricing import buymany, fedex, hardness, model, oracle, ptas
from ordered_pricing.buymany import DominanceOrder, SetLottery
from ordered_pricing.hardness import Graph
from ordered_pricing.model import BuyerType
from ordered_pricing.ptas import EpsParams

HALF = F(1, 2)


def record(key, ok, detail):
    ACCEPTANCE[key] = (ok, detail)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_1_worked_example():
    t0 = time.perf_counter()
    instance, menu, pricing = buymany.gap_example_fixture()
    item = model.revenue_item_pricing(instance, (F(1), F(3)))
    lot = model.revenue_menu(instance, menu)
    took = time.perf_counter() - t0
    ok = item == F(7, 3) and lot == F(23, 9) and pricing == (1, 3) and took < 1
    record("1", ok, f"item pricing {item}, menu {lot}, {took:.3f}s")


def test_criterion_2_fedex_dp():
    t0 = time.perf_counter()
    rng = random.Random(2020)
    count = mismatches = bad_members = 0
    for _ in range(200):
        inst = random_two_valued_instance(rng, rng.randint(1, 6), rng.randint(1, 5), top=12)
        res = fedex.fedex_dp(inst)
        grid = sorted(set(res.low_prices) | set(res.prices))
        _, best = oracle.brute_force_optimal_pricing(inst, grid)
        count += 1
        if res.revenue != best or ref_revenue(inst, res.pricing) != best:
            mismatches += 1
        members = res.pricing[0] in res.low_prices and all(p in res.prices for p in res.pricing[1:])
        members = members and all(res.pricing[i] <= res.pricing[i + 1] for i in range(1, inst.n - 1))
        if not members:
            bad_members += 1
    took = time.perf_counter() - t0
    ok = count >= 200 and mismatches == 0 and bad_members == 0 and took < 120
    record("2", ok, f"{count} instances, {mismatches} revenue mismatches, {bad_members} membership failures, {took:.1f}s")


def test_criterion_3_interval_dp():
    t0 = time.perf_counter()
    rng = random.Random(3030)
    params = EpsParams.create(HALF, gamma=1, delta=2)
    count = mismatches = 0
    for _ in range(100):
        inst = random_additive_instance(rng, rng.randint(1, 6), rng.randint(1, 3))
        grid = sorted({F(rng.randint(0, 10), rng.choice([1, 2])) for _ in range(rng.randint(1, 4))})
        got = ptas.interval_dp(inst, grid, params).revenue
        want = ref_interval_optimum(inst, grid, 1, 2, params.base)
        count += 1
        mismatches += got != want
    took = time.perf_counter() - t0
    ok = count >= 100 and mismatches == 0 and took < 120
    record("3", ok, f"{count} instances, {mismatches} mismatches, {took:.1f}s")


def test_criterion_4a_nisan():
    rng = random.Random(4040)
    failures = pairs = 0
    for e in (F(1, 4), F(1, 16)):
        alpha = ptas.nisan_scale(e)
        factor = 1 - 3 * F(math.isqrt(e.numerator), math.isqrt(e.denominator))
        for _ in range(500):
            n = rng.randint(1, 5)
            buyer = BuyerType(tuple(sorted(F(rng.randint(0, 30)) for _ in range(n))), F(1))
            q = [F(rng.randint(1, 60), rng.randint(1, 4)) for _ in range(n)]
            p = [x * (1 + e * F(rng.randint(0, 16), 16)) for x in q]
            lhs = model.best_response_item_pricing(buyer, model.scale_pricing(q, alpha)).payment
            rhs = factor * model.best_response_item_pricing(buyer, p).payment
            pairs += 1
            failures += lhs < rhs
    record("4a", failures == 0 and pairs >= 1000, f"{pairs} pairs over eps' in {{1/4, 1/16}}, {failures} failures")


def _ptas_instances():
    rng = random.Random(4141)
    return [random_ordered_instance(rng, rng.randint(1, 5), rng.randint(1, 4), top=10) for _ in range(30)]


def test_criterion_4b_safeguard():
    failures = 0
    for inst in _ptas_instances():
        res = ptas.ptas_solve(inst, HALF, gamma=1, delta=2)
        failures += res.revenue < ptas.best_uniform_price(inst)[1]
        failures += model.revenue_item_pricing(inst, res.pricing) != res.revenue
    record("4b", failures == 0, f"30 instances, {failures} below the best uniform price")


def test_criterion_4c_ratio_table():
    rows = []
    for k, inst in enumerate(_ptas_instances()):
        observed = {F(v) for t in inst.types for v in t.values}
        grid = sorted(observed | {F(0)} | set(oracle.support_size_grid(observed, HALF)))
        _, opt = oracle.brute_force_optimal_pricing(inst, grid)
        res = ptas.ptas_solve(inst, HALF, gamma=1, delta=2)
        ratio = res.revenue / opt if opt else F(1)
        rows.append((k, inst.n, len(inst.types), opt, res.revenue, ratio, res.diagnostics["chosen"]))
    lines = ["ptas ratio table (eps=1/2, gamma=1, delta=2)", " id  n  m   optimum   ptas      ratio   source"]
    for k, n, m, opt, got, ratio, src in rows:
        lines.append(f"{k:3d} {n:2d} {m:2d} {float(opt):9.4f} {float(got):9.4f} {float(ratio):8.4f}  {src}")
    worst = min(r[5] for r in rows)
    mean = sum(float(r[5]) for r in rows) / len(rows)
    lines.append(f"worst ratio {float(worst):.4f}, mean ratio {mean:.4f}")
    REPORTS.append("\n".join(lines))
    print("\n".join(lines))
    ok = all(r[4] <= r[3] for r in rows)
    record("4c", ok, f"ratio table over {len(rows)} instances emitted, worst {float(worst):.4f}")


def test_criterion_5_buy_many():
    t0 = time.perf_counter()
    instance, menu, _ = buymany.gap_example_fixture()
    fixture_ok = all(
        buymany.utility_difference_check(t, menu, ell=F("0.03485"), beta=F("0.18668")).holds for t in instance.types
    )
    support_ok = buymany.lowest_support_property(menu) == []
    rng = random.Random(5050)
    menus = failures = 0
    while menus < 100:
        n = rng.randint(1, 4)
        cand = buymany.buy_many_closure(random_menu(rng, n, rng.randint(1, 3)))
        if not buymany.buy_many_check(cand):
            continue
        menus += 1
        inst = random_ordered_instance(rng, n, 3)
        for t in inst.types:
            if not buymany.utility_difference_check(t, cand).holds:
                failures += 1
        if buymany.lowest_support_property(cand) != []:
            failures += 1
    took = time.perf_counter() - t0
    ok = fixture_ok and support_ok and failures == 0 and took < 120
    record("5", ok, f"fixture types hold={fixture_ok}, {menus} buy-many menus, {failures} failures, {took:.1f}s")


def test_criterion_6_flatten():
    rng = random.Random(6060)
    failures = 0
    for _ in range(120):
        n = rng.randint(1, 5)
        inst = random_two_valued_instance(rng, n, rng.randint(1, 4), fedex=True)
        menu = random_menu(rng, n, rng.randint(1, 4))
        failures += not buymany.fedex_flatten_check(inst, menu).equal
    record("6", failures == 0, f"120 FedEx instances with random menus, {failures} mismatches")


def test_criterion_7_hardness():
    t0 = time.perf_counter()
    rng = random.Random(7070)
    edges_checked = cuts_checked = failures = 0
    for _ in range(6):
        nv = rng.randint(2, 10)
        all_pairs = list(itertools.combinations(range(1, nv + 1), 2))
        graph = Graph.build(nv, rng.sample(all_pairs, rng.randint(1, min(20, len(all_pairs)))))
        built = hardness.reduce_maxcut(graph)
        report = built[1]
        scale = F(1, report.n**10)
        for g in report.edges:
            x, y = hardness.xy(g.i, g.j)
            R = 2 * y**3 * scale
            A = [list(row) for row in g.A]
            good = A == hardness.expected_matrix(x, y) and hardness.outcome_matrix(g.i, g.j) == A
            good = good and all(v >= 0 for v in g.z)
            good = good and hardness.matvec(g.A, g.z) == [R, R, R + scale, R + scale]
            edges_checked += 1
            failures += not good
        for _ in range(20):
            cut = {v for v in range(1, nv + 1) if rng.random() < 0.5}
            failures += not hardness.revenue_of_cut_check(graph, cut, built=built).equal
            cuts_checked += 1
    took = time.perf_counter() - t0
    ok = failures == 0 and took < 120
    record("7", ok, f"{edges_checked} edges, {cuts_checked} cuts over 6 graphs, {failures} failures, {took:.1f}s")


def _antichain_lottery(rng, order, k):
    outcomes = {}
    for _ in range(rng.randint(1, 3)):
        chosen = []
        for i in rng.sample(range(order.n), rng.randint(1, k)):
            if order.is_antichain(chosen + [i]):
                chosen.append(i)
        key = frozenset(chosen)
        outcomes[key] = outcomes.get(key, 0) + rng.randint(1, 4)
    total = sum(outcomes.values())
    return SetLottery(tuple((s, F(w, total)) for s, w in outcomes.items()), F(rng.randint(1, 20), 2))


def test_criterion_8_width_k():
    rng = random.Random(8080)
    chain_fail = 0
    for _ in range(120):
        n = rng.randint(1, 5)
        menu = random_menu(rng, n, rng.randint(0, 4))
        sets = [SetLottery.from_lottery(lot) for lot in menu]
        if buymany.derive_item_pricing_width_k(sets, DominanceOrder.chain(n)) != buymany.derive_item_pricing(menu, n):
            chain_fail += 1
    support_fail = lotteries = 0
    for k in (2, 3):
        for _ in range(50):
            order = random_width_order(rng, k, rng.randint(1, 3))
            menu = [_antichain_lottery(rng, order, k) for _ in range(rng.randint(1, 4))]
            q = buymany.derive_item_pricing_width_k(menu, order)
            for lot in menu:
                lotteries += 1
                support_fail += buymany.cheap_support_set(lot, q, k) is None
    ok = chain_fail == 0 and support_fail == 0
    record("8", ok, f"120 chain menus ({chain_fail} mismatches), {lotteries} width-2/3 lotteries ({support_fail} without support set)")
