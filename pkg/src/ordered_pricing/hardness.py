"""Max-Cut to ordered item pricing: instance generator and exact gadget checks.

Vertices ``1..n`` become items ``1..n`` plus a final item ``n+1``.  Pricing
item ``i`` at ``3i-1`` puts vertex ``i`` on one side of the cut and ``3i-2``
on the other; every cut edge adds exactly ``n^-10`` to the revenue.  Vertex
and item numbers are 1-based in this module, matching the graph file format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from . import model
from .model import BuyerType, PricingInstance

BUDGET_N = 180


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: frozenset

    @classmethod
    def build(cls, n_vertices: int, edges: Iterable) -> "Graph":
        if n_vertices <= 0:
            raise ValueError("graph needs at least one vertex")
        seen = set()
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (1 <= i <= n_vertices and 1 <= j <= n_vertices):
                raise ValueError(f"edge ({i}, {j}) is out of range")
            e = (min(i, j), max(i, j))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        return cls(n_vertices, frozenset(seen))

    def cut_size(self, cut) -> int:
        cut = set(cut)
        return sum((i in cut) != (j in cut) for i, j in self.edges)


def xy(i: int, j: int):
    return 3 * i - 2, 3 * j - 2


def expected_matrix(x, y) -> list:
    """The outcome matrix written out symbolically: rows are pricings, columns buyers."""
    return [
        [y, y, y, x],
        [0, y + 1, y + 1, x + 1],
        [x, x, y + 1, x],
        [y, y, y, y],
    ]


def _gadget_values(i: int, j: int, lo, hi, length: int) -> tuple:
    return tuple(Fraction(0) if k < i else Fraction(lo) if k < j else Fraction(hi) for k in range(1, length + 1))


def gadget_buyers(i: int, j: int, length: int) -> list:
    """The four edge buyers as value vectors over items ``1..length``."""
    x, y = xy(i, j)
    pairs = [(x, y), (x + 1, y + 1), (x, y + 1), (x + 1, y)]
    return [_gadget_values(i, j, a, b, length) for a, b in pairs]


def _pricing(i: int, j: int, pi, pj, length: int) -> tuple:
    out = []
    for k in range(1, length + 1):
        out.append(Fraction(pi) if k == i else Fraction(pj) if k == j else Fraction(3 * k - 2))
    return tuple(out)


def outcome_matrix(i: int, j: int) -> list:
    """Payments of the four edge buyers (columns) under the four local pricings (rows).

    Computed with the best-response engine on items ``1..j``; other items are
    priced ``3k - 2`` and are never affordable to these buyers.
    """
    if not 1 <= i < j:
        raise ValueError("need 1 <= i < j")
    x, y = xy(i, j)
    buyers = [BuyerType(v, Fraction(1)) for v in gadget_buyers(i, j, j)]
    rows = []
    for pi, pj in [(x, y), (x + 1, y + 1), (x, y + 1), (x + 1, y)]:
        p = _pricing(i, j, pi, pj, j)
        rows.append([model.best_response_item_pricing(b, p).payment for b in buyers])
    return rows


def solve_exact(A, rhs) -> list:
    """Gauss-Jordan elimination over the rationals."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(A, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def matvec(A, v) -> list:
    return [sum((Fraction(a) * b for a, b in zip(row, v)), Fraction(0)) for row in A]


@dataclass(frozen=True)
class EdgeGadget:
    i: int
    j: int
    A: tuple
    a: tuple
    b: tuple
    z: tuple
    R: Fraction


def edge_gadget(i: int, j: int, n: int) -> EdgeGadget:
    if not 1 <= i < j <= n:
        raise ValueError("need 1 <= i < j <= n")
    A = outcome_matrix(i, j)
    a = solve_exact(A, [1, 1, 1, 1])
    b = solve_exact(A, [0, 0, 1, 1])
    _, y = xy(i, j)
    scale = Fraction(1, n**10)
    z = [scale * (2 * y**3 * ak + bk) for ak, bk in zip(a, b)]
    if any(v < 0 for v in z):
        raise AssertionError(f"negative gadget probability on edge ({i}, {j})")
    R = 2 * scale * y**3
    if matvec(A, z) != [R, R, R + scale, R + scale]:
        raise AssertionError(f"gadget identity fails on edge ({i}, {j})")
    return EdgeGadget(i, j, tuple(tuple(r) for r in A), tuple(a), tuple(b), tuple(z), R)


@dataclass(frozen=True)
class GadgetReport:
    n: int
    q1: Fraction
    q2_prime: Fraction
    filler: Fraction
    R1: Fraction
    R2: Fraction
    edges: tuple
    vertex_mass: Fraction
    edge_mass: Fraction
    vertex_budget_ok: bool
    edge_budget_ok: bool
    warnings: tuple = field(default_factory=tuple)

    @property
    def edge_total(self) -> Fraction:
        return sum((g.R for g in self.edges), Fraction(0))


def reduce_maxcut(graph: Graph, n: Optional[int] = None, mode: str = "exact"):
    """Build the pricing instance for ``graph`` (padded to ``n`` vertices if given)."""
    if mode != "exact":
        raise ValueError("the reduction needs exact arithmetic")
    n = graph.n_vertices if n is None else n
    if n < graph.n_vertices:
        raise ValueError("padding cannot drop vertices")
    items = n + 1
    top = Fraction(6 * n)
    q1 = Fraction(9, 10)
    q2 = Fraction(1, 40 * n * n)

    def vec(start, low, last=None):
        vals = [Fraction(0) if k < start else Fraction(low) for k in range(1, items + 1)]
        if last is not None:
            vals[-1] = Fraction(last)
        return tuple(vals)

    types = [BuyerType(vec(items, top), q1)]
    vertex_mass = Fraction(0)
    for i in range(1, n + 1):
        trio = [
            BuyerType(vec(i, 3 * i - 1), q2),
            BuyerType(vec(i, 3 * i - 2), q2 / (3 * i - 2)),
            BuyerType(vec(i, 3 * i - 2, top), q2),
        ]
        vertex_mass += sum(t.prob for t in trio)
        types.extend(trio)

    gadgets = []
    edge_mass = Fraction(0)
    for i, j in sorted(graph.edges):
        g = edge_gadget(i, j, n)
        gadgets.append(g)
        for vals, prob in zip(gadget_buyers(i, j, items), g.z):
            if prob > 0:
                types.append(BuyerType(vals, prob))
                edge_mass += prob

    filler = 1 - q1 - vertex_mass - edge_mass
    if filler < 0:
        raise AssertionError("probabilities exceed one")
    if filler > 0:
        types.append(BuyerType(vec(items, top), filler))

    R1 = top * (q1 + filler)
    R2 = sum(((3 * i - 1) * q2 + top * q2 for i in range(1, n + 1)), Fraction(0))
    vertex_ok = vertex_mass <= Fraction(3, 40 * n)
    edge_ok = edge_mass < Fraction(1, 240 * n**3)
    warnings = []
    if not edge_ok:
        warnings.append(
            f"edge gadget mass {edge_mass} is not below 1/(240 n^3); the optimality argument needs n > {BUDGET_N}"
        )
    if not vertex_ok:
        warnings.append("vertex gadget mass exceeds 3/(40 n)")
    report = GadgetReport(n, q1, q2, filler, R1, R2, tuple(gadgets), vertex_mass, edge_mass, vertex_ok, edge_ok, tuple(warnings))
    return PricingInstance(tuple(types), model.UNIT_DEMAND, "exact", items), report


def cut_to_pricing(graph: Graph, cut, n: Optional[int] = None) -> tuple:
    n = graph.n_vertices if n is None else n
    cut = set(cut)
    prices = [Fraction(3 * i - 1) if i in cut else Fraction(3 * i - 2) for i in range(1, n + 1)]
    return tuple(prices) + (Fraction(6 * n),)


@dataclass(frozen=True)
class CutCheck:
    engine: Fraction
    formula: Fraction
    equal: bool
    crossing: int


def revenue_of_cut_check(graph: Graph, cut, n: Optional[int] = None, built=None) -> CutCheck:
    """Engine revenue of the cut pricing against ``R1 + R2 + sum R_ij + |cut| n^-10``."""
    instance, report = built if built is not None else reduce_maxcut(graph, n)
    n = report.n
    engine = model.revenue_item_pricing(instance, cut_to_pricing(graph, cut, n))
    crossing = graph.cut_size(cut)
    formula = report.R1 + report.R2 + report.edge_total + Fraction(crossing, n**10)
    return CutCheck(engine, formula, engine == formula, crossing)


def edge_contribution(gadget: EdgeGadget, pricing: tuple, items: int) -> Fraction:
    """Revenue of one edge's four buyers under a full pricing."""
    total = Fraction(0)
    for vals, prob in zip(gadget_buyers(gadget.i, gadget.j, items), gadget.z):
        total += prob * model.best_response_item_pricing(BuyerType(vals, prob), pricing).payment
    return total


def report_to_dict(report: GadgetReport) -> dict:
    from .scalar import dump

    return {
        "n": report.n,
        "q1": dump(report.q1),
        "q2_prime": dump(report.q2_prime),
        "filler": dump(report.filler),
        "R1": dump(report.R1),
        "R2": dump(report.R2),
        "vertex_mass": dump(report.vertex_mass),
        "edge_mass": dump(report.edge_mass),
        "vertex_budget_ok": report.vertex_budget_ok,
        "edge_budget_ok": report.edge_budget_ok,
        "warnings": list(report.warnings),
        "edges": [
            {
                "i": g.i,
                "j": g.j,
                "A": [[dump(v) for v in row] for row in g.A],
                "a": [dump(v) for v in g.a],
                "b": [dump(v) for v in g.b],
                "z": [dump(v) for v in g.z],
                "R": dump(g.R),
            }
            for g in report.edges
        ],
    }
