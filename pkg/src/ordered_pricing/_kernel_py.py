"""Pure-Python enumeration kernel, used when the compiled module is unavailable.

``fill_row`` walks every non-decreasing sequence of grid indices
``a = k_0 <= k_1 <= ... <= k_{L-1} <= hi`` in lexicographic order.  Each of
the ``m`` rows of ``values`` is a unit-demand buyer whose value for position
``pos`` is ``values[t][pos]``; the buyer's best response is updated
incrementally as positions are fixed, using the usual rule (utility, then
price, then later position).  For each final index ``b`` the first sequence
reaching the highest total ``sum_t probs[t] * payment_t`` is recorded.

When ``inf_last`` is set, grid index ``g - 1`` stands for an unaffordable
price and its integer value is ignored.  All arithmetic is on Python ints.
"""


def fill_row(values, probs, grid, g, inf_last, a, hi, rev, wit):
    m = len(values)
    L = len(values[0]) if m else len(wit[0]) if wit else 0
    if L == 0:
        return
    cols = [[values[t][pos] for t in range(m)] for pos in range(L)]
    bu = [[0] * m for _ in range(L + 1)]
    bp = [[0] * m for _ in range(L + 1)]
    idx = [0] * L
    idx[0] = a
    pos = 0
    inf_k = g - 1 if inf_last else -1
    while True:
        k = idx[pos]
        cur_u, cur_p = bu[pos], bp[pos]
        if k == inf_k:
            bu[pos + 1] = cur_u
            bp[pos + 1] = cur_p
        else:
            price = grid[k]
            col = cols[pos]
            nu = cur_u[:]
            np_ = cur_p[:]
            for t in range(m):
                u = col[t] - price
                if u > cur_u[t] or (u == cur_u[t] and price >= cur_p[t]):
                    nu[t] = u
                    np_[t] = price
            bu[pos + 1] = nu
            bp[pos + 1] = np_

        if pos == L - 1:
            total = 0
            for pr, pay in zip(probs, bp[L]):
                total += pr * pay
            b = idx[pos]
            if total > rev[b]:
                rev[b] = total
                wit[b] = idx[:]
        else:
            pos += 1
            idx[pos] = idx[pos - 1]
            continue

        while pos > 0 and idx[pos] >= hi:
            pos -= 1
        if pos == 0:
            break
        idx[pos] += 1
