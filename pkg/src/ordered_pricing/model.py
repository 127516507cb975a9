"""Buyer types, instances, menus, and the best-response / revenue engine.

Every other module evaluates pricings through the functions here, so the
tie-breaking rule lives in exactly one place: maximize utility, then price,
then option index.  Walking away ("NONE") behaves like an extra option with
price 0 and utility 0 that loses every tie.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import scalar
from .scalar import INF, Scalar

UNIT_DEMAND = "unit_demand_ordered"
ADDITIVE = "additive"
KINDS = (UNIT_DEMAND, ADDITIVE)
MODES = ("exact", "float")


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class BuyerType:
    values: tuple
    prob: Scalar
    kind: str = UNIT_DEMAND

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class PricingInstance:
    types: tuple
    kind: str = UNIT_DEMAND
    mode: str = "exact"
    n_items: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        if self.n_items is None:
            object.__setattr__(self, "n_items", self.types[0].n if self.types else 0)

    @property
    def n(self) -> int:
        return self.n_items

    @property
    def value_range(self) -> Scalar:
        finite = [v for t in self.types for v in t.values if not scalar.is_inf(v)]
        return max(finite, default=Fraction(0))

    def values(self) -> list:
        """Sorted distinct values appearing anywhere in the support."""
        return sorted({v for t in self.types for v in t.values})


@dataclass(frozen=True)
class Lottery:
    allocation: tuple
    price: Scalar

    def __post_init__(self):
        object.__setattr__(self, "allocation", tuple(self.allocation))

    def value(self, values: Sequence) -> Scalar:
        return sum((x * v for x, v in zip(self.allocation, values) if x), Fraction(0))

    def mass_from(self, i: int) -> Scalar:
        """Probability that the allocated item has index >= i (0-based)."""
        return sum(self.allocation[i:], Fraction(0))


@dataclass(frozen=True)
class BestResponse:
    choice: Optional[int]
    payment: Scalar
    utility: Scalar


@dataclass(frozen=True)
class Violation:
    code: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} at {self.path}: {self.message}"


NONE_RESPONSE = BestResponse(None, Fraction(0), Fraction(0))


def _better(u, p, best_u, best_p) -> bool:
    # Options are scanned in increasing index, so an exact tie on utility and
    # price favours the later (higher-index) option.
    if scalar.gt(u, best_u):
        return True
    return scalar.eq(u, best_u) and scalar.ge(p, best_p)


def choose(utilities: Sequence, prices: Sequence) -> BestResponse:
    """Seller-favourable argmax over options with the given utilities and prices."""
    best = NONE_RESPONSE
    for k, (u, p) in enumerate(zip(utilities, prices)):
        if scalar.is_inf(p):
            continue
        if _better(u, p, best.utility, best.payment):
            best = BestResponse(k, p, u)
    return best


def _check_dims(buyer: BuyerType, n: int) -> None:
    if buyer.n != n:
        raise DimensionError(f"buyer has {buyer.n} values but pricing has {n} entries")


def best_response_item_pricing(buyer: BuyerType, pricing: Sequence) -> BestResponse:
    _check_dims(buyer, len(pricing))
    utilities = [v - p if not scalar.is_inf(p) else -INF for v, p in zip(buyer.values, pricing)]
    return choose(utilities, pricing)


def revenue_item_pricing(instance: PricingInstance, pricing: Sequence) -> Scalar:
    total = Fraction(0)
    for t in instance.types:
        total += t.prob * best_response_item_pricing(t, pricing).payment
    return total


def best_response_menu(buyer: BuyerType, menu: Sequence[Lottery]) -> BestResponse:
    for lot in menu:
        _check_dims(buyer, len(lot.allocation))
    utilities = [lot.value(buyer.values) - lot.price for lot in menu]
    return choose(utilities, [lot.price for lot in menu])


def revenue_menu(instance: PricingInstance, menu: Sequence[Lottery]) -> Scalar:
    total = Fraction(0)
    for t in instance.types:
        total += t.prob * best_response_menu(t, menu).payment
    return total


def pricing_as_menu(pricing: Sequence) -> tuple:
    """Encode an item pricing as deterministic lotteries, one per item."""
    n = len(pricing)
    return tuple(
        Lottery(tuple(Fraction(int(i == k)) for i in range(n)), p) for k, p in enumerate(pricing)
    )


def scale_menu(menu: Sequence[Lottery], factor) -> tuple:
    return tuple(Lottery(lot.allocation, lot.price * factor) for lot in menu)


def scale_pricing(pricing: Sequence, factor) -> tuple:
    return tuple(p if scalar.is_inf(p) else p * factor for p in pricing)


def canonical_pricing(pricing: Sequence) -> tuple:
    """Replace each price by the cheapest price at or above its index.

    For ordered unit-demand buyers nobody buys an item that costs more than a
    better one, so this leaves every payment unchanged and makes prices
    non-decreasing.
    """
    out = list(pricing)
    for i in range(len(out) - 2, -1, -1):
        if out[i + 1] < out[i]:
            out[i] = out[i + 1]
    return tuple(out)


def additive_proxy(buyer: BuyerType) -> BuyerType:
    """Marginal upgrade values ``v_i - v_{i-1}`` of an ordered unit-demand type."""
    if buyer.kind != UNIT_DEMAND:
        raise ValueError("additive_proxy expects a unit_demand_ordered type")
    prev = Fraction(0)
    out = []
    for k, v in enumerate(buyer.values):
        if v < prev:
            raise ValueError(f"values are not non-decreasing at item {k}")
        out.append(v - prev)
        prev = v
    return BuyerType(tuple(out), buyer.prob, ADDITIVE)


def proxy_instance(instance: PricingInstance) -> PricingInstance:
    return PricingInstance(
        tuple(additive_proxy(t) for t in instance.types), ADDITIVE, instance.mode, instance.n
    )


def best_response_interval_prefix(buyer: BuyerType, ipp) -> list:
    """Per-interval best responses of an additive buyer to an interval prefix pricing.

    Option ``j`` of the interval starting after ``b`` sells items ``b+1..j``,
    so its value is the running sum of marginal values over the interval.
    Returned choices are global 0-based item indices.
    """
    _check_dims(buyer, len(ipp.option_prices))
    out = []
    for start, stop in ipp.intervals():
        running = Fraction(0)
        utilities = []
        for j in range(start, stop):
            running += buyer.values[j]
            q = ipp.option_prices[j]
            utilities.append(running - q if not scalar.is_inf(q) else -INF)
        br = choose(utilities, ipp.option_prices[start:stop])
        if br.choice is not None:
            br = BestResponse(br.choice + start, br.payment, br.utility)
        out.append(br)
    return out


def revenue_interval_prefix(instance: PricingInstance, ipp) -> Scalar:
    total = Fraction(0)
    for t in instance.types:
        paid = sum((br.payment for br in best_response_interval_prefix(t, ipp)), Fraction(0))
        total += t.prob * paid
    return total


def validate_instance(instance: PricingInstance) -> list:
    """Return every violated instance invariant; an empty list means valid."""
    problems = []
    if instance.kind not in KINDS:
        problems.append(Violation("kind", "kind", f"unknown kind {instance.kind!r}"))
    if instance.mode not in MODES:
        problems.append(Violation("mode", "mode", f"unknown mode {instance.mode!r}"))
    if not instance.types:
        problems.append(Violation("support", "types", "distribution has no types"))
        return problems

    total = Fraction(0) if instance.mode == "exact" else 0.0
    R = instance.value_range
    for k, t in enumerate(instance.types):
        path = f"types[{k}]"
        if t.n != instance.n:
            problems.append(Violation("dimension", f"{path}.values", f"expected {instance.n} values, got {t.n}"))
            continue
        if t.kind != instance.kind:
            problems.append(Violation("kind", path, f"type kind {t.kind!r} differs from instance kind"))
        if not t.prob > 0 or t.prob > 1:
            problems.append(Violation("probability", f"{path}.prob", f"probability {t.prob} not in (0, 1]"))
        total += t.prob
        if any(scalar.is_inf(v) or v < 0 for v in t.values):
            problems.append(Violation("range", f"{path}.values", "values must be finite and nonnegative"))
            continue
        if t.kind == UNIT_DEMAND:
            for i in range(1, t.n):
                if t.values[i] < t.values[i - 1]:
                    problems.append(
                        Violation("monotonicity", f"{path}.values[{i}]", "values decrease along the item order")
                    )
                    break
            top = max(t.values, default=0)
        else:
            top = sum(t.values, Fraction(0))
        if top < 1:
            problems.append(Violation("nontriviality", path, "every type needs v([n]) >= 1"))
        for i, v in enumerate(t.values):
            if v != 0 and (v < 1 or v > R):
                problems.append(Violation("range", f"{path}.values[{i}]", f"positive value {v} outside [1, R]"))

    if instance.mode == "exact":
        if total != 1:
            problems.append(Violation("probabilities", "types[*].prob", f"probabilities sum to {total}, not 1"))
    elif abs(float(total) - 1.0) > 1e-9:
        problems.append(Violation("probabilities", "types[*].prob", f"probabilities sum to {float(total)}, not 1"))
    return problems


def validate_menu(menu: Sequence[Lottery], n: int, exact: bool = True) -> list:
    problems = []
    for k, lot in enumerate(menu):
        path = f"options[{k}]"
        if len(lot.allocation) != n:
            problems.append(Violation("dimension", f"{path}.alloc", f"expected {n} entries"))
            continue
        if any(x < 0 for x in lot.allocation):
            problems.append(Violation("allocation", f"{path}.alloc", "negative probability"))
        total = sum(lot.allocation, Fraction(0))
        if (exact and total != 1) or (not exact and not scalar.eq(total, 1)):
            problems.append(Violation("allocation", f"{path}.alloc", f"entries sum to {total}, not 1"))
        if scalar.is_inf(lot.price) or lot.price < 0:
            problems.append(Violation("price", f"{path}.price", "price must be finite and nonnegative"))
    return problems
