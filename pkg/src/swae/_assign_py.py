"""Pure-Python assignment kernel: shortest-augmenting-path algorithm.

Fallback for :mod:`swae._assign` (the compiled twin). Both implement the
same O(n^3) algorithm with identical arithmetic and tie-breaking, so they
return the same permutation for the same cost matrix; this version
vectorizes the per-column scans with numpy instead of compiling them.
"""

from __future__ import annotations

import numpy as np


def solve(cost: np.ndarray) -> np.ndarray:
    """Minimum-cost row->column permutation of a square cost matrix.

    Maintains dual potentials (u, v) and grows the matching one row at a
    time along a shortest augmenting path in the reduced-cost graph.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n = cost.shape[0]
    u = np.zeros(n)
    v = np.zeros(n)
    col_at_row = np.full(n, -1, dtype=np.intp)
    row_at_col = np.full(n, -1, dtype=np.intp)

    for cur in range(n):
        shortest = np.full(n, np.inf)
        prev_row = np.full(n, -1, dtype=np.intp)
        scanned_row = np.zeros(n, dtype=bool)
        scanned_col = np.zeros(n, dtype=bool)
        i = cur
        min_val = 0.0
        sink = -1
        while sink < 0:
            scanned_row[i] = True
            r = (min_val + cost[i]) - u[i] - v
            upd = ~scanned_col & (r < shortest)
            shortest[upd] = r[upd]
            prev_row[upd] = i
            masked = np.where(scanned_col, np.inf, shortest)
            j = int(np.argmin(masked))
            min_val = float(masked[j])
            scanned_col[j] = True
            if row_at_col[j] < 0:
                sink = j
            else:
                i = int(row_at_col[j])

        u[cur] += min_val
        other_rows = np.flatnonzero(scanned_row)
        other_rows = other_rows[other_rows != cur]
        u[other_rows] += min_val - shortest[col_at_row[other_rows]]
        cols = np.flatnonzero(scanned_col)
        v[cols] -= min_val - shortest[cols]

        j = sink
        while True:
            i = int(prev_row[j])
            row_at_col[j] = i
            j, col_at_row[i] = col_at_row[i], j
            if i == cur:
                break

    return np.asarray(col_at_row)
