# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration of non-decreasing grid assignments.

Mirrors ``_kernel_py.fill_row`` exactly; see that module for the contract.
"""

from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free


cdef int _fill(const int64_t[:, ::1] values, const int64_t[::1] probs,
               const int64_t[::1] grid, Py_ssize_t g, bint inf_last,
               Py_ssize_t a, Py_ssize_t hi,
               int64_t[::1] rev, int64_t[:, ::1] wit) noexcept nogil:
    cdef Py_ssize_t m = values.shape[0]
    cdef Py_ssize_t L = values.shape[1]
    cdef Py_ssize_t pos, t, k, b, off, nxt
    cdef int64_t u, pu, pp, price, total
    cdef int64_t *bu = <int64_t *> malloc((L + 1) * (m + 1) * sizeof(int64_t))
    cdef int64_t *bp = <int64_t *> malloc((L + 1) * (m + 1) * sizeof(int64_t))
    cdef Py_ssize_t *idx = <Py_ssize_t *> malloc((L + 1) * sizeof(Py_ssize_t))
    if bu == NULL or bp == NULL or idx == NULL:
        free(bu)
        free(bp)
        free(idx)
        return -1

    for t in range(m):
        bu[t] = 0
        bp[t] = 0

    idx[0] = a
    pos = 0
    while True:
        # apply idx[pos] at position pos: level pos -> level pos + 1
        k = idx[pos]
        off = pos * m
        nxt = off + m
        if inf_last and k == g - 1:
            for t in range(m):
                bu[nxt + t] = bu[off + t]
                bp[nxt + t] = bp[off + t]
        else:
            price = grid[k]
            for t in range(m):
                pu = bu[off + t]
                pp = bp[off + t]
                u = values[t, pos] - price
                if u > pu or (u == pu and price >= pp):
                    bu[nxt + t] = u
                    bp[nxt + t] = price
                else:
                    bu[nxt + t] = pu
                    bp[nxt + t] = pp

        if pos == L - 1:
            total = 0
            off = L * m
            for t in range(m):
                total += probs[t] * bp[off + t]
            b = idx[pos]
            if total > rev[b]:
                rev[b] = total
                for t in range(L):
                    wit[b, t] = idx[t]
        else:
            pos += 1
            idx[pos] = idx[pos - 1]
            continue

        # advance to the next assignment in lexicographic order
        while pos > 0 and idx[pos] >= hi:
            pos -= 1
        if pos == 0:
            break
        idx[pos] += 1

    free(bu)
    free(bp)
    free(idx)
    return 0


def fill_row(values, probs, grid, Py_ssize_t g, bint inf_last, Py_ssize_t a,
             Py_ssize_t hi, rev, wit):
    """Fill ``rev[b]`` / ``wit[b]`` for assignments starting at grid index ``a``.

    ``values`` is an int64 C-contiguous (m, L) buffer, ``rev`` an int64 (g,)
    buffer pre-filled with -1 and ``wit`` an int64 (g, L) buffer.  The GIL is
    released while enumerating.
    """
    cdef const int64_t[:, ::1] v = values
    cdef const int64_t[::1] p = probs
    cdef const int64_t[::1] q = grid
    cdef int64_t[::1] r = rev
    cdef int64_t[:, ::1] w = wit
    cdef int status
    if v.shape[1] == 0:
        return
    with nogil:
        status = _fill(v, p, q, g, inf_last, a, hi, r, w)
    if status != 0:
        raise MemoryError()
