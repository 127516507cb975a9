"""Brute-force ground truth and sufficient price grids."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import kernel, scalar
from .kernel import BudgetExceeded
from .model import UNIT_DEMAND, BuyerType, Lottery, PricingInstance
from .scalar import INF

BRUTE_FORCE_BUDGET = 10**7


def check_eps(eps) -> Fraction:
    """``eps`` must lie in (0, 1) with ``1/eps`` a positive even integer."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    inv = 1 / eps
    if inv.denominator != 1 or inv.numerator % 2:
        raise ValueError(f"1/eps must be an even integer, got {inv}")
    return eps


def support_size_grid(V, eps) -> list:
    """Powers ``z`` of ``1 + eps^2`` with ``z/(1+eps^2) <= y - y' <= z(1+eps^2)/eps^2``.

    ``y, y'`` range over ``V`` and zero.  Grid sorted ascending.
    """
    eps = check_eps(eps)
    base = 1 + eps * eps
    pts = sorted({Fraction(v) for v in V} | {Fraction(0)})
    if any(v < 0 for v in pts):
        raise ValueError("values must be nonnegative")
    diffs = {y - y2 for y in pts for y2 in pts if y > y2}
    out = set()
    for d in diffs:
        lo = d * eps * eps / base
        hi = d * base
        r = scalar.ceil_log(lo, base)
        while base**r <= hi:
            out.add(base**r)
            r += 1
    return sorted(out)


def range_power_grid(lo, hi, eps) -> list:
    """All powers of ``1 + eps^2`` inside ``[lo, hi]``."""
    eps = check_eps(eps)
    base = 1 + eps * eps
    lo, hi = Fraction(lo), Fraction(hi)
    if lo <= 0 or hi < lo:
        return []
    out = []
    r = scalar.ceil_log(lo, base)
    while base**r <= hi:
        out.append(base**r)
        r += 1
    return out


def _exact_values(instance: PricingInstance):
    return [[Fraction(v) for v in t.values] for t in instance.types], [Fraction(t.prob) for t in instance.types]


def brute_force_optimal_pricing(
    instance: PricingInstance,
    grid: Sequence,
    budget: int = BRUTE_FORCE_BUDGET,
    threads: Optional[int] = None,
):
    """Best non-decreasing pricing with entries in ``grid`` or infinity.

    Ties go to the lexicographically smallest pricing.  Returns
    ``(pricing, revenue)``; raises ``BudgetExceeded`` when the number of
    monotone candidates exceeds ``budget``.
    """
    if instance.kind != UNIT_DEMAND:
        raise ValueError("brute force expects a unit_demand_ordered instance")
    full = sorted({Fraction(p) for p in grid if not scalar.is_inf(p)}) + [INF]
    needed = kernel.count_monotone(len(full), instance.n)
    if needed > budget:
        raise BudgetExceeded(needed, budget, "brute-force pricings")
    if instance.n == 0:
        return (), Fraction(0)
    values, probs = _exact_values(instance)
    table = kernel.best_by_endpoints(values, probs, full, threads=threads, length=instance.n)
    revenue, witness = table.best()
    return tuple(full[k] for k in witness), revenue


@dataclass(frozen=True)
class AdaptiveChoice:
    """Best adaptive plan: ``kind`` is ``"none"``, ``"once"`` or ``"repeat"``."""

    utility: Fraction
    payment: Fraction
    kind: str
    lottery: Optional[int] = None
    threshold: Optional[int] = None


def repeat_terms(buyer: BuyerType, lot: Lottery, i: int):
    """``(P, E[v_j | j >= i], expected payment)`` of repeating ``lot`` until index >= i."""
    mass = lot.mass_from(i)
    if mass == 0:
        return mass, None, INF
    cond = sum((x * v for x, v in zip(lot.allocation[i:], buyer.values[i:])), Fraction(0)) / mass
    return mass, cond, lot.price / mass


def adaptive_utility_unit_demand(buyer: BuyerType, menu: Sequence[Lottery]) -> AdaptiveChoice:
    """Best utility over one-shot purchases, threshold repeats of one lottery, and walking away."""
    best = AdaptiveChoice(Fraction(0), Fraction(0), "none")

    def consider(u, pay, kind, k, i):
        nonlocal best
        if u > best.utility or (u == best.utility and pay > best.payment):
            best = AdaptiveChoice(u, pay, kind, k, i)

    for k, lot in enumerate(menu):
        consider(lot.value(buyer.values) - lot.price, lot.price, "once", k, None)
    for k, lot in enumerate(menu):
        for i in range(1, len(lot.allocation)):
            mass, cond, pay = repeat_terms(buyer, lot, i)
            if mass == 0:
                continue
            consider(cond - pay, pay, "repeat", k, i)
    return best


def adaptive_revenue(instance: PricingInstance, menu: Sequence[Lottery]) -> Fraction:
    return sum((t.prob * adaptive_utility_unit_demand(t, menu).payment for t in instance.types), Fraction(0))


def cheapest_sure_upgrade(menu: Sequence[Lottery], i: int):
    """Cheapest expected price of surely getting an item with index >= ``i`` (0-based)."""
    best = INF
    for lot in menu:
        mass = lot.mass_from(i)
        if mass > 0:
            cost = lot.price / mass
            if scalar.is_inf(best) or cost < best:
                best = cost
    return best
