"""Random generators and slow reference implementations shared by the tests.

The reference functions deliberately avoid the library's engine so that
cross-checks compare two independent computations.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction as F

from ordered_pricing.model import ADDITIVE, UNIT_DEMAND, BuyerType, Lottery, PricingInstance

INF = math.inf


def random_probs(rng: random.Random, m: int) -> list:
    w = [rng.randint(1, 6) for _ in range(m)]
    s = sum(w)
    return [F(x, s) for x in w]


def random_ordered_values(rng: random.Random, n: int, top: int = 12) -> tuple:
    vals = sorted(rng.randint(0, top) for _ in range(n))
    if vals[-1] == 0:
        vals[-1] = rng.randint(1, top)
    return tuple(F(v) for v in vals)


def random_ordered_instance(rng: random.Random, n: int, m: int, top: int = 12) -> PricingInstance:
    probs = random_probs(rng, m)
    return PricingInstance(tuple(BuyerType(random_ordered_values(rng, n, top), p) for p in probs))


def random_two_valued_instance(rng: random.Random, n: int, m: int, top: int = 12, fedex: bool = False):
    types = []
    for p in random_probs(rng, m):
        hi = rng.randint(1, top)
        lo = 0 if fedex else rng.randint(0, hi)
        k = rng.randint(0, n - 1)
        types.append(BuyerType(tuple(F(lo) if i < k else F(hi) for i in range(n)), p))
    return PricingInstance(tuple(types))


def random_additive_instance(rng: random.Random, n: int, m: int, top: int = 6) -> PricingInstance:
    types = []
    for p in random_probs(rng, m):
        vals = [F(rng.randint(0, top)) for _ in range(n)]
        if sum(vals) == 0:
            vals[rng.randrange(n)] = F(rng.randint(1, top))
        types.append(BuyerType(tuple(vals), p, ADDITIVE))
    return PricingInstance(tuple(types), ADDITIVE)


def random_allocation(rng: random.Random, n: int, max_support: int = 3) -> tuple:
    support = rng.sample(range(n), rng.randint(1, min(max_support, n)))
    w = [rng.randint(1, 4) for _ in support]
    s = sum(w)
    alloc = [F(0)] * n
    for i, x in zip(support, w):
        alloc[i] = F(x, s)
    return tuple(alloc)


def random_menu(rng: random.Random, n: int, size: int, top: int = 12) -> tuple:
    return tuple(Lottery(random_allocation(rng, n), F(rng.randint(1, 4 * top), 4)) for _ in range(size))


# ----------------------------------------------------------------- references


def ref_best_response(values, prices):
    """``(utility, payment, index)``; index -1 means walking away."""
    best = (F(0), F(0), -1)
    for k, (v, p) in enumerate(zip(values, prices)):
        if p == INF:
            continue
        cand = (v - p, p, k)
        if cand > best:
            best = cand
    return best


def ref_revenue(instance, prices):
    return sum((t.prob * ref_best_response(t.values, prices)[1] for t in instance.types), F(0))


def ref_menu_revenue(instance, menu):
    total = F(0)
    for t in instance.types:
        best = (F(0), F(0), -1)
        for k, lot in enumerate(menu):
            u = sum((x * v for x, v in zip(lot.allocation, t.values)), F(0)) - lot.price
            best = max(best, (u, lot.price, k))
        total += t.prob * best[1]
    return total


def ref_brute_force(instance, grid):
    """All non-decreasing pricings over ``grid + [inf]`` in lexicographic order."""
    full = sorted(set(F(p) for p in grid)) + [INF]
    best = None
    for prices in itertools.combinations_with_replacement(full, instance.n):
        rev = ref_revenue(instance, prices)
        if best is None or rev > best[1]:
            best = (prices, rev)
    return best


def compositions(n: int):
    """Boundary tuples ``(0, ..., n)`` of every interval partition of ``n`` items."""
    for cuts in itertools.product([False, True], repeat=max(n - 1, 0)):
        yield (0,) + tuple(i + 1 for i, c in enumerate(cuts) if c) + (n,)


def ref_gap_ok(bounds, prices, gamma, delta, base) -> bool:
    for k in range(len(bounds) - 1):
        block = prices[bounds[k]:bounds[k + 1]]
        for a in block:
            for b in block:
                if b > base**delta * a:
                    return False
        for earlier in prices[:bounds[k]]:
            for b in block:
                if b < base**gamma * earlier:
                    return False
    return True


def ref_interval_revenue(instance, bounds, prices):
    total = F(0)
    for t in instance.types:
        paid = F(0)
        for k in range(len(bounds) - 1):
            best = (F(0), F(0), -1)
            run = F(0)
            for j in range(bounds[k], bounds[k + 1]):
                run += t.values[j]
                best = max(best, (run - prices[j], prices[j], j))
            paid += best[1]
        total += t.prob * paid
    return total


def ref_interval_optimum(instance, grid, gamma, delta, base):
    """Exhaustive search over partitions and monotone per-interval grid prices."""
    grid = sorted(set(grid))
    best = None
    for bounds in compositions(instance.n):
        blocks = [
            list(itertools.combinations_with_replacement(grid, bounds[k + 1] - bounds[k]))
            for k in range(len(bounds) - 1)
        ]
        for combo in itertools.product(*blocks):
            prices = tuple(p for block in combo for p in block)
            if not ref_gap_ok(bounds, prices, gamma, delta, base):
                continue
            rev = ref_interval_revenue(instance, bounds, prices)
            if best is None or rev > best:
                best = rev
    return best


def random_width_order(rng: random.Random, k: int, per_chain: int):
    """``k`` disjoint chains plus random cross edges that keep the width at ``k``."""
    from ordered_pricing.buymany import DominanceOrder

    n = k * per_chain
    items = list(range(n))
    rng.shuffle(items)
    chains = [items[c * per_chain:(c + 1) * per_chain] for c in range(k)]
    pairs = [(ch[i], ch[i + 1]) for ch in chains for i in range(per_chain - 1)]
    for _ in range(rng.randint(0, k)):
        a, b = rng.sample(range(k), 2)
        i = rng.randrange(per_chain)
        j = rng.randrange(i, per_chain)
        trial = pairs + [(chains[a][i], chains[b][j])]
        try:
            order = DominanceOrder(n, trial)
        except ValueError:
            continue
        if order.width == k:
            pairs = trial
    return DominanceOrder(n, pairs)
