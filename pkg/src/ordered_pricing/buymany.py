"""From buy-many lottery menus to item pricings.

A buyer facing a buy-many menu may buy a lottery repeatedly.  For ordered
unit-demand buyers the strategies considered here are "buy lottery λ until
an item with index >= i arrives", whose expected cost is ``p(λ) / Pr[j >= i]``.
The derived item pricing charges each item the cheapest such cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import networkx as nx

from . import model, oracle, scalar
from .model import BuyerType, Lottery, PricingInstance
from .scalar import INF

DEFAULT_ELL = Fraction("0.03485")
DEFAULT_BETA = Fraction("0.18668")
STRATEGY_FAMILY = "single-lottery repeat with an index threshold"


def derive_item_pricing(menu: Sequence[Lottery], n: Optional[int] = None) -> tuple:
    """``q_i`` = cheapest expected cost of surely getting an item with index >= i."""
    if n is None:
        if not menu:
            raise ValueError("item count is required for an empty menu")
        n = len(menu[0].allocation)
    q = tuple(oracle.cheapest_sure_upgrade(menu, i) for i in range(n))
    for i in range(n - 1):
        if q[i] > q[i + 1]:
            raise AssertionError(f"derived pricing decreases at item {i}")
    return q


def dominates(upper: Sequence, lower: Sequence) -> bool:
    """First-order dominance along the item order: every suffix mass is at least as large."""
    a = b = Fraction(0)
    for x, y in zip(reversed(upper), reversed(lower)):
        a += x
        b += y
        if a < b:
            return False
    return True


def conditional(lot: Lottery, i: int) -> Optional[Lottery]:
    """The lottery obtained by repeating ``lot`` until an index >= i arrives."""
    mass = lot.mass_from(i)
    if mass == 0:
        return None
    alloc = tuple(Fraction(0) if k < i else x / mass for k, x in enumerate(lot.allocation))
    return Lottery(alloc, lot.price / mass)


def repeat_violations(menu: Sequence[Lottery]) -> list:
    """Repeat strategies that no single option matches at the same or lower price.

    An empty result means every repeat outcome is first-order dominated by a
    menu option costing no more, so no ordered buyer gains from repeating.
    The test is invariant under scaling all prices.
    """
    bad = []
    for k, lot in enumerate(menu):
        for i in range(1, len(lot.allocation)):
            cond = conditional(lot, i)
            if cond is None or cond.allocation == lot.allocation:
                continue
            if not any(mu.price <= cond.price and dominates(mu.allocation, cond.allocation) for mu in menu):
                bad.append((k, i))
    return bad


def buy_many_check(menu: Sequence[Lottery]) -> bool:
    return not repeat_violations(menu)


def repeat_check(buyer: BuyerType, menu: Sequence[Lottery]) -> bool:
    """No repeat strategy gives ``buyer`` strictly more than the best single purchase."""
    once = model.best_response_menu(buyer, menu).utility
    return oracle.adaptive_utility_unit_demand(buyer, menu).utility <= once


def buy_many_closure(menu: Sequence[Lottery]) -> tuple:
    """Add every repeat outcome as an explicit option, which makes the menu pass the check."""
    out = list(menu)
    seen = {(lot.allocation, lot.price) for lot in menu}
    for lot in menu:
        for i in range(1, len(lot.allocation)):
            cond = conditional(lot, i)
            if cond is not None and (cond.allocation, cond.price) not in seen:
                seen.add((cond.allocation, cond.price))
                out.append(cond)
    return tuple(out)


def lowest_support_property(menu: Sequence[Lottery], q: Optional[Sequence] = None) -> list:
    """Lotteries whose lowest-index support item is priced above the lottery in ``q``."""
    if q is None:
        q = derive_item_pricing(menu)
    bad = []
    for k, lot in enumerate(menu):
        i = next(j for j, x in enumerate(lot.allocation) if x > 0)
        if q[i] > lot.price:
            bad.append(k)
    return bad


def support_value_property(buyer: BuyerType, menu: Sequence[Lottery]) -> bool:
    """Every support item of the chosen lottery is worth at least the buyer's utility."""
    br = model.best_response_menu(buyer, menu)
    if br.choice is None:
        return True
    lot = menu[br.choice]
    return all(v >= br.utility for x, v in zip(lot.allocation, buyer.values) if x > 0)


def item_utility(buyer: BuyerType, pricing: Sequence) -> Fraction:
    return model.best_response_item_pricing(buyer, pricing).utility


@dataclass(frozen=True)
class UtilityDifference:
    lhs: Fraction
    rhs: Fraction
    holds: bool
    buy_many: bool
    strategy_family: str = STRATEGY_FAMILY


def utility_difference_check(
    buyer: BuyerType,
    menu: Sequence[Lottery],
    q: Optional[Sequence] = None,
    ell=DEFAULT_ELL,
    beta=DEFAULT_BETA,
) -> UtilityDifference:
    """Compare ``u_{ell q} - u_q`` with ``(1-beta) rev_p - (ell/beta) rev_{beta p}``.

    ``u`` are item-pricing utilities and ``rev`` buy-one payments from the menu.
    """
    ell, beta = Fraction(ell), Fraction(beta)
    if q is None:
        q = derive_item_pricing(menu, buyer.n)
    lhs = item_utility(buyer, model.scale_pricing(q, ell)) - item_utility(buyer, q)
    rev_p = model.best_response_menu(buyer, menu).payment
    rev_bp = model.best_response_menu(buyer, model.scale_menu(menu, beta)).payment
    rhs = (1 - beta) * rev_p - ell / beta * rev_bp
    return UtilityDifference(lhs, rhs, lhs >= rhs, buy_many_check(menu))


@dataclass(frozen=True)
class ScaledSearch:
    alpha: Fraction
    revenue: Fraction
    expected_revenue: float
    grid: tuple


def scaled_pricing_search(instance: PricingInstance, q: Sequence, ell, h, grid_size: int = 64) -> ScaledSearch:
    """Evaluate ``alpha * q`` on a geometric grid over ``[ell, h]``.

    Returns the best grid point and a trapezoid estimate of the expected
    revenue when ``alpha`` has density ``1 / (alpha ln(h/ell))``.
    """
    ell, h = Fraction(ell), Fraction(h)
    if not 0 < ell <= h:
        raise ValueError("need 0 < ell <= h")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    if ell == h:
        alphas = [ell]
    else:
        ratio = float(h / ell)
        inner = [Fraction(float(ell) * ratio ** (k / (grid_size - 1))) for k in range(1, grid_size - 1)]
        alphas = [ell] + inner + [h]
    revs = [model.revenue_item_pricing(instance, model.scale_pricing(q, a)) for a in alphas]
    best_k = max(range(len(alphas)), key=lambda k: (revs[k], -k))
    if len(alphas) == 1:
        estimate = float(revs[0])
    else:
        logs = [math.log(a.numerator) - math.log(a.denominator) for a in alphas]
        area = sum((logs[k + 1] - logs[k]) * (float(revs[k]) + float(revs[k + 1])) / 2 for k in range(len(alphas) - 1))
        estimate = area / (logs[-1] - logs[0])
    return ScaledSearch(alphas[best_k], revs[best_k], estimate, tuple(alphas))


@dataclass(frozen=True)
class FlattenReport:
    menu_revenue: Fraction
    pricing_revenue: Fraction
    pricing: tuple
    equal: bool
    strategy_family: str = STRATEGY_FAMILY


def is_fedex(instance: PricingInstance) -> bool:
    for t in instance.types:
        distinct = sorted(set(t.values))
        if len(distinct) > 2 or (len(distinct) == 2 and distinct[0] != 0):
            return False
    return True


def fedex_flatten_check(instance: PricingInstance, menu: Sequence[Lottery]) -> FlattenReport:
    """Adaptive revenue of ``menu`` against the revenue of its derived item pricing."""
    if not is_fedex(instance):
        raise ValueError("instance is not a FedEx instance (values must be 0 then constant)")
    q = derive_item_pricing(menu, instance.n)
    adaptive = oracle.adaptive_revenue(instance, menu)
    flat = model.revenue_item_pricing(instance, q)
    return FlattenReport(adaptive, flat, q, adaptive == flat)


def gap_example_fixture():
    """Three types where a lottery menu out-earns every item pricing.

    Returns ``(instance, menu, pricing)``: the menu earns 23/9 while the best
    item pricing ``(1, 3)`` earns 7/3.
    """
    third = Fraction(1, 3)
    F = Fraction
    instance = PricingInstance(
        (
            BuyerType((F(0), F(5)), third),
            BuyerType((F(1), F(3)), third),
            BuyerType((F(1), F(2)), third),
        )
    )
    menu = (
        Lottery((F(0), F(1)), F(5)),
        Lottery((F(2, 3), F(1, 3)), F(5, 3)),
        Lottery((F(1), F(0)), F(1)),
    )
    return instance, menu, (F(1), F(3))


# ---------------------------------------------------------------- width k


@dataclass(frozen=True)
class SetLottery:
    """A price and a distribution over item sets (``frozenset`` of 0-based items)."""

    outcomes: tuple
    price: Fraction

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple((frozenset(s), Fraction(p)) for s, p in self.outcomes))
        if sum(p for _, p in self.outcomes) != 1:
            raise ValueError("outcome probabilities must sum to 1")

    @classmethod
    def from_lottery(cls, lot: Lottery) -> "SetLottery":
        return cls(tuple((frozenset({i}), x) for i, x in enumerate(lot.allocation) if x > 0), Fraction(lot.price))


class DominanceOrder:
    """Partial order on items; ``(i, j)`` in ``pairs`` means ``j`` dominates ``i``."""

    def __init__(self, n: int, pairs=()):
        self.n = n
        g = nx.DiGraph()
        g.add_nodes_from(range(n))
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"pair ({i}, {j}) is out of range")
            if i != j:
                g.add_edge(i, j)
        if not nx.is_directed_acyclic_graph(g):
            raise ValueError("relation has a cycle, so it is not antisymmetric")
        self._closure = nx.transitive_closure_dag(g)
        self.pairs = frozenset(self._closure.edges())

    @classmethod
    def chain(cls, n: int) -> "DominanceOrder":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    def leq(self, i: int, j: int) -> bool:
        return i == j or (i, j) in self.pairs

    def dominators(self, i: int) -> frozenset:
        """Items ``j`` with ``i <= j``, including ``i`` itself."""
        return frozenset({i} | set(self._closure.successors(i)))

    def is_antichain(self, items) -> bool:
        items = list(items)
        return not any(self.leq(a, b) for a in items for b in items if a != b)

    @property
    def width(self) -> int:
        """Largest antichain, via Dilworth: ``n`` minus a maximum matching of comparabilities."""
        if self.n == 0:
            return 0
        b = nx.Graph()
        left = [("L", i) for i in range(self.n)]
        b.add_nodes_from(left, bipartite=0)
        b.add_nodes_from((("R", i) for i in range(self.n)), bipartite=1)
        b.add_edges_from((("L", i), ("R", j)) for i, j in self.pairs)
        matching = nx.bipartite.hopcroft_karp_matching(b, top_nodes=left)
        return self.n - len(matching) // 2


def derive_item_pricing_width_k(menu: Sequence[SetLottery], order: DominanceOrder) -> tuple:
    """``q_i`` = min over lotteries of price / Pr[allocated set meets the dominators of i]."""
    out = []
    for i in range(order.n):
        up = order.dominators(i)
        best = INF
        for lot in menu:
            mass = sum((p for s, p in lot.outcomes if s & up), Fraction(0))
            if mass > 0:
                cost = lot.price / mass
                if scalar.is_inf(best) or cost < best:
                    best = cost
        out.append(best)
    return tuple(out)


def cheap_support_set(lot: SetLottery, q: Sequence, k: int):
    """A support set ``T`` with ``sum_{i in T} q_i <= k^2 p``, or ``None``."""
    bound = k * k * lot.price
    for s, p in lot.outcomes:
        if p == 0:
            continue
        total = Fraction(0)
        finite = True
        for i in s:
            if scalar.is_inf(q[i]):
                finite = False
                break
            total += q[i]
        if finite and total <= bound:
            return s
    return None
