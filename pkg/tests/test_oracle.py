import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import INF, random_menu, random_ordered_instance, ref_brute_force, ref_revenue
from ordered_pricing import kernel, model, oracle
from ordered_pricing.buymany import gap_example_fixture
from ordered_pricing.model import BuyerType, Lottery, PricingInstance


def test_check_eps():
    assert oracle.check_eps(F(1, 2)) == F(1, 2)
    for bad in (F(1, 3), F(0), F(1), F(2, 5)):
        with pytest.raises(ValueError):
            oracle.check_eps(bad)


def test_support_grid_examples():
    assert oracle.support_size_grid([], F(1, 2)) == []
    grid = oracle.support_size_grid([F(1)], F(1, 2))
    base = F(5, 4)
    assert grid == [base**r for r in range(-7, 2)]
    combined = oracle.support_size_grid([F(1), F(3)], F(1, 2))
    expected = set()
    for d in (1, 2, 3):
        lo, hi = F(d, 4) / base, d * base
        expected |= {base**r for r in range(-40, 40) if lo <= base**r <= hi}
    assert combined == sorted(expected)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(0, 20), max_size=4), st.sets(st.integers(0, 20), max_size=3))
def test_support_grid_monotone(v, extra):
    small = set(oracle.support_size_grid([F(x) for x in v], F(1, 2)))
    big = set(oracle.support_size_grid([F(x) for x in v | extra], F(1, 2)))
    assert small <= big


def test_brute_force_examples():
    instance, _, _ = gap_example_fixture()
    pricing, rev = oracle.brute_force_optimal_pricing(instance, [F(x) for x in (0, 1, 2, 3, 5)])
    assert pricing == (1, 3) and rev == F(7, 3)
    single = PricingInstance((BuyerType((F(0), F(10)), F(1)),))
    assert oracle.brute_force_optimal_pricing(single, [F(10)]) == ((10, 10), 10)
    two = PricingInstance((BuyerType((F(0), F(8)), F(1, 2)), BuyerType((F(5), F(5)), F(1, 2))))
    assert oracle.brute_force_optimal_pricing(two, [F(x) for x in (0, 5, 8, 13)]) == ((5, 8), F(13, 2))


def test_brute_force_budget():
    instance, _, _ = gap_example_fixture()
    with pytest.raises(kernel.BudgetExceeded):
        oracle.brute_force_optimal_pricing(instance, range(10), budget=10)


@pytest.mark.parametrize("seed", range(25))
def test_brute_force_matches_reference(seed):
    rng = random.Random(seed)
    inst = random_ordered_instance(rng, rng.randint(1, 4), rng.randint(1, 4), top=8)
    grid = sorted({F(rng.randint(0, 9), rng.choice([1, 2, 3])) for _ in range(rng.randint(1, 5))})
    pricing, rev = oracle.brute_force_optimal_pricing(inst, grid)
    ref_pricing, ref_rev = ref_brute_force(inst, grid)
    assert rev == ref_rev
    assert tuple(pricing) == tuple(ref_pricing)
    assert ref_revenue(inst, pricing) == rev


def test_threads_and_backends_agree():
    rng = random.Random(11)
    inst = random_ordered_instance(rng, 4, 4)
    grid = [F(x) for x in range(0, 13, 2)]
    base = oracle.brute_force_optimal_pricing(inst, grid)
    assert oracle.brute_force_optimal_pricing(inst, grid, threads=3) == base
    values = [list(t.values) for t in inst.types]
    probs = [t.prob for t in inst.types]
    full = grid + [INF]
    a = kernel.best_by_endpoints(values, probs, full)
    b = kernel.best_by_endpoints(values, probs, full, force_python=True)
    assert a.revenue == b.revenue and a.witness == b.witness


def test_adaptive_examples():
    _, menu, _ = gap_example_fixture()
    choice = oracle.adaptive_utility_unit_demand(BuyerType((F(0), F(5)), F(1)), menu)
    assert choice.utility == 0
    lot = (Lottery((F(1, 2), F(1, 2)), F(1)),)
    choice = oracle.adaptive_utility_unit_demand(BuyerType((F(0), F(4)), F(1)), lot)
    assert (choice.utility, choice.kind, choice.threshold) == (2, "repeat", 1)
    # deterministic menus: repeating never helps
    rng = random.Random(2)
    for _ in range(30):
        inst = random_ordered_instance(rng, 3, 1)
        prices = tuple(F(rng.randint(0, 12)) for _ in range(3))
        t = inst.types[0]
        menu_det = model.pricing_as_menu(prices)
        assert oracle.adaptive_utility_unit_demand(t, menu_det).utility == model.best_response_item_pricing(t, prices).utility


def test_cheapest_sure_upgrade():
    _, menu, _ = gap_example_fixture()
    assert oracle.cheapest_sure_upgrade(menu, 1) == 5
    assert oracle.cheapest_sure_upgrade(menu, 0) == 1
    prices = (F(4), F(2), F(7))
    det = model.pricing_as_menu(prices)
    assert [oracle.cheapest_sure_upgrade(det, i) for i in range(3)] == [2, 2, 7]
    assert oracle.cheapest_sure_upgrade((), 0) == INF


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_cheapest_sure_upgrade_monotone(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    menu = random_menu(rng, n, rng.randint(1, 4))
    q = [oracle.cheapest_sure_upgrade(menu, i) for i in range(n)]
    assert all(q[i] <= q[i + 1] for i in range(n - 1))


@pytest.mark.parametrize("seed", range(30))
def test_grid_sufficiency(seed):
    # powers of the base priced above every value act like infinity, so the
    # full range only needs to reach the largest value
    rng = random.Random(100 + seed)
    eps = F(1, 2)
    inst = random_ordered_instance(rng, rng.randint(1, 3), rng.randint(1, 3), top=8)
    V = {v for t in inst.types for v in t.values}
    small = oracle.support_size_grid(V, eps) + [F(0)]
    wide = oracle.range_power_grid(eps * eps * min(v for v in V if v > 0), max(V), eps) + [F(0)]
    assert oracle.brute_force_optimal_pricing(inst, small)[1] == oracle.brute_force_optimal_pricing(inst, wide)[1]
