"""Enumeration of monotone price assignments, backed by a compiled core.

The compiled extension ``_kernel`` is used when it imports and the scaled
integers fit in 64 bits; otherwise the pure-Python ``_kernel_py`` runs.
Setting ``ORDERED_PRICING_PURE=1`` forces the pure-Python path.
"""

from __future__ import annotations

import math
import os
from array import array
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import _kernel_py
from . import scalar

try:
    if os.environ.get("ORDERED_PRICING_PURE", "") not in ("", "0"):
        raise ImportError("pure-Python kernel requested")
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

INT64_SAFE = 1 << 62


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would visit more candidates than allowed."""

    def __init__(self, needed: int, budget: int, what: str = "assignments"):
        super().__init__(f"{what}: {needed} candidates exceed budget {budget}")
        self.needed = needed
        self.budget = budget


def backend() -> str:
    return "compiled" if _compiled is not None else "python"


def count_monotone(g: int, length: int) -> int:
    """Number of non-decreasing sequences of ``length`` indices from ``range(g)``."""
    if length == 0:
        return 1
    return math.comb(g + length - 1, length)


def default_threads() -> int:
    env = os.environ.get("ORDERED_PRICING_THREADS")
    if env:
        return max(1, int(env))
    return 1


@dataclass(frozen=True)
class EndpointTable:
    """Best revenue and witness for each (first index, last index) pair."""

    revenue: dict
    witness: dict

    def best(self):
        """Global maximum; ties go to the lexicographically smallest witness."""
        top = None
        for key, rev in self.revenue.items():
            wit = self.witness[key]
            if top is None or rev > top[0] or (rev == top[0] and wit < top[1]):
                top = (rev, wit)
        return top


def _lcm_den(xs) -> int:
    d = 1
    for x in xs:
        d = math.lcm(d, Fraction(x).denominator)
    return d


def best_by_endpoints(
    values: Sequence[Sequence],
    probs: Sequence,
    grid: Sequence,
    hi: Optional[Sequence[int]] = None,
    firsts: Optional[Sequence[int]] = None,
    threads: Optional[int] = None,
    force_python: bool = False,
    length: Optional[int] = None,
) -> EndpointTable:
    """Enumerate non-decreasing assignments of ``grid`` prices to positions.

    ``values[t][pos]`` is buyer ``t``'s value for the option at ``pos``;
    ``grid`` is sorted ascending and may end with ``INF``.  For a first index
    ``a`` the remaining indices range up to ``hi[a]`` (default: all).  The
    result maps each reachable ``(a, b)`` to the best expected payment and
    its lexicographically first witness, as a tuple of grid indices.
    ``length`` is only needed when there are no buyers.
    """
    g = len(grid)
    L = len(values[0]) if values else (length or 0)
    if g == 0:
        return EndpointTable({}, {})
    inf_last = scalar.is_inf(grid[-1])
    finite = list(grid[:-1]) if inf_last else list(grid)
    if any(scalar.is_inf(v) for row in values for v in row):
        raise ValueError("buyer values must be finite")
    if firsts is None:
        firsts = range(g)
    if hi is None:
        hi = [g - 1] * g

    d_val = _lcm_den([v for row in values for v in row] + finite)
    d_prob = _lcm_den(probs)
    ivals = [[int(Fraction(v) * d_val) for v in row] for row in values]
    igrid = [int(Fraction(p) * d_val) for p in finite] + ([0] if inf_last else [])
    iprobs = [int(Fraction(p) * d_prob) for p in probs]
    scale = Fraction(1, d_val * d_prob)

    if L == 0:
        return EndpointTable({}, {})

    biggest = max([abs(x) for row in ivals for x in row] + [abs(x) for x in igrid] + [1])
    use_compiled = (
        _compiled is not None
        and not force_python
        and len(ivals) > 0
        and sum(iprobs) * biggest < INT64_SAFE
        and 2 * biggest < INT64_SAFE
    )

    def run_row(a):
        rev = [-1] * g
        if use_compiled:
            m = len(ivals)
            vbuf = memoryview(array("q", [x for row in ivals for x in row])).cast("B").cast("q", [m, L])
            rbuf = array("q", rev)
            wbuf = memoryview(array("q", [0] * (g * L))).cast("B").cast("q", [g, L])
            _compiled.fill_row(vbuf, array("q", iprobs), array("q", igrid), g, inf_last, a, hi[a], rbuf, wbuf)
            wits = {b: tuple(wbuf[b, t] for t in range(L)) for b in range(g) if rbuf[b] >= 0}
            return a, list(rbuf), wits
        wit = [None] * g
        _kernel_py.fill_row(ivals, iprobs, igrid, g, inf_last, a, hi[a], rev, wit)
        wits = {b: tuple(wit[b]) for b in range(g) if rev[b] >= 0}
        return a, rev, wits

    if not ivals:
        # no buyers: every assignment earns zero, the first one is the witness
        revenue, witness = {}, {}
        for a in firsts:
            for b in range(a, hi[a] + 1):
                revenue[(a, b)] = Fraction(0)
                witness[(a, b)] = (a,) * (L - 1) + (b,) if L > 1 else (a,)
        return EndpointTable(revenue, witness)

    threads = threads or default_threads()
    rows = [a for a in firsts if hi[a] >= a]
    if threads > 1 and len(rows) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_row, rows))
    else:
        results = [run_row(a) for a in rows]

    revenue, witness = {}, {}
    for a, rev, wits in results:
        for b, w in wits.items():
            revenue[(a, b)] = rev[b] * scale
            witness[(a, b)] = w
    return EndpointTable(revenue, witness)
