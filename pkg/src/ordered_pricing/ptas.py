"""Near-optimal item pricing for ordered unit-demand buyers via interval prefix pricings.

Pipeline, with ``base = 1 + eps^2``:

1. round prices down to powers of ``base`` and scale by ``base^(-1/eps)``;
2. zero out prices ``<= eps^2`` and scale the rest by ``1 - eps``;
3. drop the cheapest exponent class by raising its prices, group what is
   left into intervals separated by a factor ``base^gamma``, and scale by
   ``(1 + 4 eps^2)^(-1/(2 eps))``;
4. find the best interval prefix pricing for the additive proxies with a
   dynamic program over intervals and convert it back to item prices.

Steps 1-3 only argue that a good interval prefix pricing exists; the solver
runs step 4 directly and the first three are exposed for diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from . import kernel, model, oracle, scalar
from .kernel import BudgetExceeded
from .model import ADDITIVE, UNIT_DEMAND, PricingInstance
from .scalar import INF

DP_BUDGET = 10**7


class GapViolation(ValueError):
    pass


def _ceil_upper(expr_fn) -> int:
    """Ceiling of a real computed with outward-rounded interval arithmetic."""
    ctx = MPIntervalContext()
    for prec in (96, 256, 1024):
        ctx.prec = prec
        val = expr_fn(ctx)
        lo, hi = int(mpmath.ceil(val.a)), int(mpmath.ceil(val.b))
        if lo == hi:
            return hi
    return hi


@dataclass(frozen=True)
class EpsParams:
    eps: Fraction
    base: Fraction
    gamma: int
    delta: int
    width: int
    period: int

    @property
    def classes(self) -> int:
        return int(1 / self.eps)

    @property
    def step1_alpha(self) -> Fraction:
        return self.base ** (-int(1 / self.eps))

    @property
    def step3_scale(self) -> Fraction:
        return (1 + 4 * self.eps * self.eps) ** (-int(1 / (2 * self.eps)))

    @property
    def unit(self) -> Fraction:
        return 1 - self.eps

    @classmethod
    def create(cls, eps, gamma=None, delta=None, width=None, period=None) -> "EpsParams":
        eps = oracle.check_eps(eps)
        inv2 = int(1 / (eps * eps))
        inv3 = int(1 / eps**3)
        g = gamma if gamma is not None else _ceil_upper(lambda iv: inv2 * iv.log(inv2))
        d = delta if delta is not None else _ceil_upper(lambda iv: inv3 * iv.log(inv2))
        w = width if width is not None else g
        p = period if period is not None else w * int(1 / eps)
        params = cls(eps, 1 + eps * eps, int(g), int(d), int(w), int(p))
        params.check()
        return params

    def check(self) -> None:
        if self.gamma < 1 or self.delta < 1:
            raise ValueError("gamma and delta must be positive integers")
        if self.gamma > self.delta:
            raise ValueError("gamma must not exceed delta")
        if self.width < max(self.gamma - 1, 1):
            raise ValueError("class width must be at least gamma - 1")
        if self.period < self.classes * self.width:
            raise ValueError("period must hold every class band")
        if self.period - self.width - 1 > self.delta:
            raise ValueError("interval bands would be wider than delta")

    def exponent_class(self, e: int) -> Optional[int]:
        a = e % self.period
        ell = a // self.width
        return ell if ell < self.classes else None


@dataclass(frozen=True)
class IntervalPrefixPricing:
    """Option ``j`` sells items ``start..j`` of its interval at ``option_prices[j]``.

    ``boundaries`` are ``0 = i_0 < i_1 < ... < i_t = n``; both price-gap
    inequalities are verified on construction.
    """

    boundaries: tuple
    option_prices: tuple
    gamma: int
    delta: int
    base: Fraction

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        object.__setattr__(self, "option_prices", tuple(self.option_prices))
        problem = gap_violation(self.boundaries, self.option_prices, self.gamma, self.delta, self.base)
        if problem:
            raise GapViolation(problem)

    @property
    def n(self) -> int:
        return len(self.option_prices)

    def intervals(self) -> list:
        b = self.boundaries
        return [(b[k], b[k + 1]) for k in range(len(b) - 1)]


def gap_violation(boundaries, prices, gamma, delta, base) -> Optional[str]:
    """Describe the first violated invariant, or ``None`` when the pricing is valid."""
    n = len(prices)
    if not boundaries or boundaries[0] != 0 or boundaries[-1] != n:
        return f"boundaries must run from 0 to {n}"
    if any(boundaries[k] >= boundaries[k + 1] for k in range(len(boundaries) - 1)):
        return "boundaries must be strictly increasing"
    if any(scalar.is_inf(q) or q < 0 for q in prices):
        return "option prices must be finite and nonnegative"
    up_g = Fraction(base) ** gamma
    up_d = Fraction(base) ** delta
    for k in range(len(boundaries) - 1):
        lo, hi = boundaries[k], boundaries[k + 1]
        block = prices[lo:hi]
        if max(block) > up_d * min(block):
            return f"interval {k} spans more than base^delta"
        if lo > 0 and min(block) < up_g * max(prices[:lo]):
            return f"interval {k} is closer than base^gamma to an earlier price"
    return None


def nisan_scale(eps_pt):
    """``(1 + e)^(-1/sqrt(e))``; exact when ``1/sqrt(e)`` is an integer."""
    e = Fraction(eps_pt)
    if e <= 0:
        raise ValueError("scale parameter must be positive")
    num, den = math.isqrt(e.numerator), math.isqrt(e.denominator)
    if num * num == e.numerator and den * den == e.denominator and Fraction(den, num).denominator == 1:
        return (1 + e) ** (-int(Fraction(den, num)))
    return float(mpmath.power(1 + mpmath.mpf(e.numerator) / e.denominator, -1 / mpmath.sqrt(mpmath.mpf(e.numerator) / e.denominator)))


def round_to_powers(pricing: Sequence, params: EpsParams) -> tuple:
    out = []
    for p in pricing:
        if scalar.is_inf(p):
            out.append(INF)
        elif p == 0:
            out.append(Fraction(0))
        else:
            r = scalar.floor_log(p, params.base)
            out.append(params.base**r * params.step1_alpha)
    return tuple(out)


def restricted_prices(params: EpsParams, R) -> list:
    """``(1-eps) * base^r`` for every power ``base^r`` in ``(eps^2, R]``."""
    lo = params.eps * params.eps
    out = []
    r = scalar.floor_log(lo, params.base) + 1
    while params.base**r <= R:
        out.append(params.unit * params.base**r)
        r += 1
    return out


def restrict_price_set(pricing: Sequence, params: EpsParams, R) -> tuple:
    """Zero every price ``<= eps^2`` and scale the rest by ``1 - eps``."""
    lo = params.eps * params.eps
    out = []
    for p in pricing:
        if scalar.is_inf(p):
            out.append(INF)
        elif p <= lo:
            out.append(Fraction(0))
        else:
            out.append(params.unit * p)
    return tuple(out), restricted_prices(params, R)


def price_exponent(q, params: EpsParams) -> int:
    r = scalar.exact_exponent(q, params.base, params.unit)
    if r is None:
        raise ValueError(f"price {q} is not (1 - eps) times a power of the base")
    return r


def class_contributions(instance: PricingInstance, pricing: Sequence, params: EpsParams) -> list:
    """Revenue from buyers whose purchase is priced in each exponent class."""
    contrib = [Fraction(0)] * params.classes
    for t in instance.types:
        br = model.best_response_item_pricing(t, pricing)
        if br.choice is None or br.payment == 0:
            continue
        ell = params.exponent_class(price_exponent(br.payment, params))
        if ell is not None:
            contrib[ell] += t.prob * br.payment
    return contrib


def select_sparse_class(instance: PricingInstance, pricing: Sequence, params: EpsParams):
    """Class with the least revenue contribution (smallest index on ties) and its residues."""
    contrib = class_contributions(instance, pricing, params)
    ell = min(range(params.classes), key=lambda k: (contrib[k], k))
    residues = tuple(range(ell * params.width, (ell + 1) * params.width))
    return ell, residues


def _band_start_above(e: int, ell: int, params: EpsParams) -> int:
    """Smallest exponent ``>= e`` whose class is not ``ell``."""
    while params.exponent_class(e) == ell:
        e += 1
    return e


def raise_sparse_class(pricing: Sequence, ell: int, params: EpsParams) -> tuple:
    """Lift every class-``ell`` price to the next later price outside the class."""
    n = len(pricing)
    in_class = []
    for p in pricing:
        if scalar.is_inf(p) or p == 0:
            in_class.append(False)
        else:
            in_class.append(params.exponent_class(price_exponent(p, params)) == ell)
    out = list(pricing)
    for i in range(n):
        if not in_class[i]:
            continue
        later = [pricing[j] for j in range(i + 1, n) if not in_class[j]]
        if later:
            out[i] = min(later)
        else:
            e = _band_start_above(price_exponent(pricing[i], params), ell, params)
            out[i] = params.unit * params.base**e
    return tuple(out)


def _band_of(e: int, ell: int, params: EpsParams) -> int:
    # bands are [r*P + (ell+1)*W, (r+1)*P + ell*W)
    return (e - (ell + 1) * params.width) // params.period


def build_interval_prefix(pricing: Sequence, ell: int, params: EpsParams):
    """Raise class ``ell``, group by exponent band, and scale into an interval prefix pricing.

    Returns ``(ipp, raised)`` where ``raised`` is the item pricing after the
    raise and before grouping.
    """
    if any(pricing[i] > pricing[i + 1] for i in range(len(pricing) - 1)):
        raise ValueError("pricing must be non-decreasing")
    if any(scalar.is_inf(p) for p in pricing):
        raise ValueError("pricing must be finite")
    raised = raise_sparse_class(pricing, ell, params)
    keys = []
    for p in raised:
        keys.append(None if p == 0 else _band_of(price_exponent(p, params), ell, params))
    bounds = [0]
    for i in range(1, len(raised)):
        if keys[i] != keys[i - 1]:
            bounds.append(i)
    bounds.append(len(raised))
    if len(raised) == 0:
        bounds = [0]
    c = params.step3_scale
    ipp = IntervalPrefixPricing(tuple(bounds), tuple(c * p for p in raised), params.gamma, params.delta, params.base)
    return ipp, raised


def ipp_to_item_pricing(ipp: IntervalPrefixPricing, params: EpsParams) -> tuple:
    problem = gap_violation(ipp.boundaries, ipp.option_prices, ipp.gamma, ipp.delta, ipp.base)
    if problem:
        raise GapViolation(problem)
    c = params.step3_scale
    return tuple(c * q for q in ipp.option_prices)


@dataclass(frozen=True)
class IntervalDPResult:
    ipp: IntervalPrefixPricing
    revenue: Fraction
    evaluated: int


def _interval_values(instance: PricingInstance, j: int, i: int) -> list:
    rows = []
    for t in instance.types:
        run = Fraction(0)
        row = []
        for a in range(j, i):
            run += Fraction(t.values[a])
            row.append(run)
        rows.append(row)
    return rows


def interval_dp_cost(n: int, grid: Sequence, params: EpsParams) -> int:
    g = len(grid)
    hi = _windows(grid, params)
    total = 0
    for length in range(1, n + 1):
        per = sum(kernel.count_monotone(hi[a] - a + 1, length - 1) for a in range(g))
        total += per * (n - length + 1)
    return total


def _windows(grid, params):
    up = params.base**params.delta
    hi = []
    for a, y in enumerate(grid):
        b = a
        while b + 1 < len(grid) and grid[b + 1] <= up * y:
            b += 1
        hi.append(b)
    return hi


def interval_dp(
    instance: PricingInstance,
    grid: Sequence,
    params: EpsParams,
    budget: int = DP_BUDGET,
    threads: Optional[int] = None,
) -> IntervalDPResult:
    """Optimal gap-respecting interval prefix pricing for additive buyers over ``grid``."""
    if instance.kind != ADDITIVE:
        raise ValueError("interval_dp expects an additive instance")
    grid = sorted({Fraction(p) for p in grid})
    if not grid:
        raise ValueError("price grid is empty")
    if any(p < 0 for p in grid):
        raise ValueError("grid prices must be nonnegative")
    n, g = instance.n, len(grid)
    if n == 0:
        return IntervalDPResult(IntervalPrefixPricing((0,), (), params.gamma, params.delta, params.base), Fraction(0), 0)
    cost = interval_dp_cost(n, grid, params)
    if cost > budget:
        raise BudgetExceeded(cost, budget, "interval assignments")

    hi = _windows(grid, params)
    up_g = params.base**params.gamma
    probs = [Fraction(t.prob) for t in instance.types]
    G = {}
    for j in range(n):
        for i in range(j + 1, n + 1):
            G[(j, i)] = kernel.best_by_endpoints(
                _interval_values(instance, j, i), probs, grid, hi=hi, threads=threads, length=i - j
            )

    # F[i][b]: best revenue on items < i whose last price is grid[b]; F[0] holds the empty prefix
    F = [dict() for _ in range(n + 1)]
    back = [dict() for _ in range(n + 1)]
    F[0][None] = Fraction(0)
    for i in range(1, n + 1):
        for b in range(g):
            best = None
            for j in range(i):
                table = G[(j, i)]
                prev_keys = sorted(F[j], key=lambda w: -1 if w is None else w)
                for w in prev_keys:
                    for a in range(b + 1):
                        if (a, b) not in table.revenue:
                            continue
                        if w is not None and grid[w] * up_g > grid[a]:
                            continue
                        val = F[j][w] + table.revenue[(a, b)]
                        if best is None or val > best[0]:
                            best = (val, j, w, a)
            if best is not None:
                F[i][b] = best[0]
                back[i][b] = best[1:]
    if not F[n]:
        raise ValueError("no gap-respecting interval prefix pricing exists on this grid")
    b_top = max(F[n], key=lambda b: (F[n][b], -b))
    revenue = F[n][b_top]

    prices = [None] * n
    bounds = [n]
    i, b = n, b_top
    while i > 0:
        j, w, a = back[i][b]
        wit = G[(j, i)].witness[(a, b)]
        for k, idx in enumerate(wit):
            prices[j + k] = grid[idx]
        bounds.append(j)
        i, b = j, w
    bounds.reverse()
    ipp = IntervalPrefixPricing(tuple(bounds), tuple(prices), params.gamma, params.delta, params.base)
    check = model.revenue_interval_prefix(instance, ipp)
    if check != revenue:
        raise AssertionError(f"witness revenue {check} differs from table value {revenue}")
    return IntervalDPResult(ipp, revenue, cost)


def best_uniform_price(instance: PricingInstance):
    """Best single price charged for every item, over the observed positive values."""
    best = (Fraction(0), Fraction(0))
    for p in sorted({Fraction(v) for t in instance.types for v in t.values if v > 0}):
        rev = model.revenue_item_pricing(instance, (p,) * instance.n)
        if rev > best[1]:
            best = (p, rev)
    return (best[0],) * instance.n, best[1]


def dp_grid(instance: PricingInstance, params: EpsParams, source: str = "support") -> list:
    """Candidate interval prices: scaled ``(1-eps)``-multiples of a power grid, plus zero."""
    values = {Fraction(v) for t in instance.types for v in t.values}
    R = max(values, default=Fraction(0))
    if source == "support":
        floor = params.eps * params.eps
        star = {Fraction(0)} | {params.unit * z for z in oracle.support_size_grid(values, params.eps) if z > floor}
    elif source == "range":
        star = {Fraction(0)} | set(restricted_prices(params, R))
    else:
        raise ValueError(f"unknown grid source {source!r}")
    c = params.step3_scale
    return sorted(c * y for y in star)


def _cap_infinite(pricing, params: EpsParams, R) -> tuple:
    cap = params.base ** (scalar.floor_log(max(Fraction(R), Fraction(1)), params.base) + 1)
    return tuple(cap if scalar.is_inf(p) else Fraction(p) for p in pricing)


def reference_chain(instance: PricingInstance, reference: Sequence, params: EpsParams) -> dict:
    """Measured revenue after each existence step applied to a reference pricing."""
    R = instance.value_range
    p = model.canonical_pricing(_cap_infinite(reference, params, R))
    q1 = round_to_powers(p, params)
    q2, _ = restrict_price_set(q1, params, R)
    ell, _ = select_sparse_class(instance, q2, params)
    ipp, raised = build_interval_prefix(q2, ell, params)
    proxies = model.proxy_instance(instance)
    return {
        "reference": model.revenue_item_pricing(instance, reference),
        "step1_rounded": model.revenue_item_pricing(instance, q1),
        "step2_restricted": model.revenue_item_pricing(instance, q2),
        "step3_class": ell,
        "step3_raised": model.revenue_item_pricing(instance, raised),
        "step3_interval_prefix": model.revenue_interval_prefix(proxies, ipp),
        "step3_item_pricing": model.revenue_item_pricing(instance, ipp_to_item_pricing(ipp, params)),
    }


@dataclass(frozen=True)
class PtasResult:
    pricing: tuple
    revenue: Fraction
    diagnostics: dict = field(default_factory=dict)


def ptas_solve(
    instance: PricingInstance,
    eps,
    gamma: Optional[int] = None,
    delta: Optional[int] = None,
    period: Optional[int] = None,
    grid: str = "support",
    budget: int = DP_BUDGET,
    reference: Optional[Sequence] = None,
    threads: Optional[int] = None,
) -> PtasResult:
    if instance.kind != UNIT_DEMAND:
        raise ValueError("ptas_solve expects a unit_demand_ordered instance")
    params = EpsParams.create(eps, gamma, delta, period=period)
    exact = PricingInstance(
        tuple(model.BuyerType(tuple(Fraction(v) for v in t.values), Fraction(t.prob)) for t in instance.types),
        UNIT_DEMAND,
        "exact",
        instance.n,
    )
    proxies = model.proxy_instance(exact)
    prices = dp_grid(exact, params, grid)
    dp = interval_dp(proxies, prices, params, budget=budget, threads=threads)
    q4 = ipp_to_item_pricing(dp.ipp, params)
    rev_q4 = model.revenue_item_pricing(exact, q4)
    uniform, rev_uniform = best_uniform_price(exact)
    chosen = "pipeline" if rev_q4 >= rev_uniform else "uniform"
    pricing, revenue = (q4, rev_q4) if chosen == "pipeline" else (uniform, rev_uniform)
    diag = {
        "eps": params.eps,
        "gamma": params.gamma,
        "delta": params.delta,
        "class_width": params.width,
        "class_period": params.period,
        "grid_source": grid,
        "grid_size": len(prices),
        "dp_assignments": dp.evaluated,
        "interval_prefix_revenue": dp.revenue,
        "interval_boundaries": dp.ipp.boundaries,
        "pipeline_revenue": rev_q4,
        "uniform_revenue": rev_uniform,
        "chosen": chosen,
    }
    if reference is not None:
        diag["reference_chain"] = reference_chain(exact, reference, params)
    return PtasResult(tuple(pricing), revenue, diag)
