# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled assignment kernel: shortest-augmenting-path algorithm.

Same algorithm, arithmetic and tie-breaking as swae._assign_py (the
pure-Python fallback); the inner column scans run as plain C loops.
"""

import numpy as np


def solve(cost_in) -> np.ndarray:
    """Minimum-cost row->column permutation of a square cost matrix."""
    cost_arr = np.ascontiguousarray(cost_in, dtype=np.float64)
    cdef double[:, ::1] cost = cost_arr
    cdef Py_ssize_t n = cost.shape[0]

    u_arr = np.zeros(n)
    v_arr = np.zeros(n)
    col_at_row_arr = np.full(n, -1, dtype=np.intp)
    row_at_col_arr = np.full(n, -1, dtype=np.intp)
    shortest_arr = np.empty(n)
    prev_row_arr = np.empty(n, dtype=np.intp)
    scanned_row_arr = np.empty(n, dtype=np.uint8)
    scanned_col_arr = np.empty(n, dtype=np.uint8)

    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef Py_ssize_t[::1] col_at_row = col_at_row_arr
    cdef Py_ssize_t[::1] row_at_col = row_at_col_arr
    cdef double[::1] shortest = shortest_arr
    cdef Py_ssize_t[::1] prev_row = prev_row_arr
    cdef unsigned char[::1] scanned_row = scanned_row_arr
    cdef unsigned char[::1] scanned_col = scanned_col_arr

    cdef Py_ssize_t cur, i, j, sink, best, tmp
    cdef double min_val, r, best_val, ui
    cdef double inf = float("inf")

    for cur in range(n):
        for j in range(n):
            shortest[j] = inf
            prev_row[j] = -1
            scanned_row[j] = 0
            scanned_col[j] = 0
        i = cur
        min_val = 0.0
        sink = -1
        while sink < 0:
            scanned_row[i] = 1
            ui = u[i]
            best = -1
            best_val = inf
            for j in range(n):
                if scanned_col[j]:
                    continue
                r = (min_val + cost[i, j]) - ui - v[j]
                if r < shortest[j]:
                    shortest[j] = r
                    prev_row[j] = i
                if shortest[j] < best_val:
                    best_val = shortest[j]
                    best = j
            j = best
            min_val = best_val
            scanned_col[j] = 1
            if row_at_col[j] < 0:
                sink = j
            else:
                i = row_at_col[j]

        u[cur] += min_val
        for i in range(n):
            if scanned_row[i] and i != cur:
                u[i] += min_val - shortest[col_at_row[i]]
        for j in range(n):
            if scanned_col[j]:
                v[j] -= min_val - shortest[j]

        j = sink
        while True:
            i = prev_row[j]
            row_at_col[j] = i
            tmp = col_at_row[i]
            col_at_row[i] = j
            j = tmp
            if i == cur:
                break

    return col_at_row_arr
