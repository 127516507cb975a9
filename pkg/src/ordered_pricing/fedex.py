"""Exact optimal item pricing when every buyer type has at most two distinct values.

A two-valued ordered type looks like ``(v_L, ..., v_L, v_H, ..., v_H)``.  The
DP prices item 0 at some ``y`` from the low set and items ``1..n-1``
non-decreasingly from the star set.  A type then only weighs its cheapest low
item against its first high item, so revenue decomposes by that index once
``y`` and ``p_1`` are fixed.  The table ``F[y, p_1, i][z]`` is the best
revenue from types whose first high index is at most ``i`` with ``p_i = z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import model
from .model import UNIT_DEMAND, PricingInstance

NEG = None  # unreachable DP cell


class NotTwoValued(ValueError):
    def __init__(self, index: int, values):
        super().__init__(f"type {index} has more than two distinct values: ({', '.join(str(v) for v in values)})")
        self.index = index


@dataclass(frozen=True)
class TwoValueType:
    """``high_index`` is the 0-based first item valued ``v_high`` (0 when flat)."""

    high_index: int
    v_low: Fraction
    v_high: Fraction
    prob: Fraction

    def expand(self, n: int) -> model.BuyerType:
        vals = tuple(self.v_low if i < self.high_index else self.v_high for i in range(n))
        return model.BuyerType(vals, self.prob)


@dataclass(frozen=True)
class FedexResult:
    pricing: tuple
    revenue: Fraction
    low_prices: tuple
    prices: tuple
    table: dict
    canonical: tuple


def detect_two_value(instance: PricingInstance) -> list:
    if instance.kind != UNIT_DEMAND:
        raise ValueError("two-value detection expects a unit_demand_ordered instance")
    out = []
    for k, t in enumerate(instance.types):
        distinct = sorted(set(t.values))
        if len(distinct) > 2:
            raise NotTwoValued(k, t.values)
        for i in range(1, t.n):
            if t.values[i] < t.values[i - 1]:
                raise ValueError(f"type {k} is not ordered")
        lo, hi = distinct[0], distinct[-1]
        idx = 0 if lo == hi else t.values.index(hi)
        out.append(TwoValueType(idx, Fraction(lo), Fraction(hi), Fraction(t.prob)))
    return out


def fedex_price_sets(types) -> tuple:
    """Candidate first-item prices and candidate prices for every other item."""
    low = {Fraction(0)} | {t.v_low for t in types}
    star = set(low)
    for t in types:
        for y in low:
            star.add(t.v_high - t.v_low + y)
    return tuple(sorted(low)), tuple(sorted(star))


def buyer_payment_G(t: TwoValueType, y, z) -> Fraction:
    """Payment of ``t`` when its cheapest low item costs ``y`` and its first high item ``z``.

    Seller-favourable ties: equal utilities go to the dearer option, which for
    ``z >= y`` is the high item.
    """
    low = (t.v_low - y, y)
    high = (t.v_high - z, z)
    best = max(low, high)
    return Fraction(best[1]) if best[0] >= 0 else Fraction(0)


def _flat_payment(t: TwoValueType, price) -> Fraction:
    return Fraction(price) if t.v_high >= price else Fraction(0)


def fedex_dp(instance: PricingInstance) -> FedexResult:
    """Optimal pricing with ``p_0`` in the low set and ``p_1 <= ... <= p_{n-1}`` in the star set.

    Under such a pricing a two-valued type only compares its cheapest low item
    (``p_0``, or ``min(p_0, p_1)`` once item 1 is also low) with its first high
    item, so the DP state is ``(p_0, p_1, i, p_i)``.  ``pricing`` is the DP
    witness; ``canonical`` is its non-decreasing form with identical payments.
    """
    types = detect_two_value(instance)
    n = instance.n
    low, star = fedex_price_sets(types)
    by_index = {}
    for t in types:
        by_index.setdefault(t.high_index, []).append(t)
    flat = by_index.get(0, ())

    if n == 0:
        return FedexResult((), Fraction(0), low, star, {}, ())
    if n == 1:
        best = None
        for y in low:
            v = sum((t.prob * _flat_payment(t, y) for t in flat), Fraction(0))
            if best is None or v > best[0]:
                best = (v, y)
        pricing = (best[1],)
        return _finish(instance, best[0], pricing, low, star, {})

    def layer_gain(i, lo_price, z):
        return sum((t.prob * buyer_payment_G(t, lo_price, z) for t in by_index.get(i, ())), Fraction(0))

    table = {}
    back = {}
    best = None
    for y in low:
        for w in star:
            m = min(y, w)
            first = sum((t.prob * _flat_payment(t, m) for t in flat), Fraction(0)) + layer_gain(1, y, w)
            prev = {z: (first if z == w else NEG) for z in star}
            table[(y, w, 1)] = prev
            for i in range(2, n):
                cur = {}
                run_val, run_arg = NEG, None
                for z in star:
                    v = prev[z]
                    if v is not NEG and (run_val is NEG or v > run_val):
                        run_val, run_arg = v, z
                    if run_val is NEG:
                        cur[z] = NEG
                        continue
                    cur[z] = run_val + layer_gain(i, m, z)
                    back[(y, w, i, z)] = run_arg
                table[(y, w, i)] = cur
                prev = cur
            for z in star:
                v = prev[z]
                if v is not NEG and (best is None or v > best[0]):
                    best = (v, y, w, z)

    revenue, y, w, z = best
    path = [None] * n
    path[n - 1] = z
    for i in range(n - 1, 1, -1):
        path[i - 1] = back[(y, w, i, path[i])]
    path[0] = y

    # items nobody targets take the price of the next targeted item
    targeted = sorted(i for i in by_index if i >= 2)
    pricing = list(path)
    for i in range(2, n):
        if i not in by_index:
            nxt = next((j for j in targeted if j > i), None)
            if nxt is not None:
                pricing[i] = path[nxt]
    return _finish(instance, revenue, tuple(pricing), low, star, table)


def _finish(instance, revenue, pricing, low, star, table) -> FedexResult:
    check = model.revenue_item_pricing(instance, pricing)
    if check != revenue:
        raise AssertionError(f"witness revenue {check} differs from table value {revenue}")
    canonical = model.canonical_pricing(pricing)
    if model.revenue_item_pricing(instance, canonical) != revenue:
        raise AssertionError("canonical form changed the revenue")
    return FedexResult(pricing, revenue, low, star, table, canonical)
