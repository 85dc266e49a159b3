"""Compiled inner loops of the energy-graph construction.

The per-edge feasibility verification is linear in the number of tasks
between the two candidate supports, giving the O(n^3) construction overall;
numba keeps that affordable for thousands of tasks.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def edge_scan(r, d, p, ps, vtask, vstart):
    """Feasibility scan over all candidate edges of the energy graph.

    Tasks are 0-based; ps[k] is the processing-time prefix sum over tasks
    0..k-1. Task vertices are ordered release(0), deadline(0), release(1), ...
    with vtask/vstart giving each vertex's task and fixed start time.

    Returns (delta, split, feasible, source_ok, sink_ok) where delta/split/
    feasible describe support-to-support edges and source_ok/sink_ok flag the
    right-aligned-prefix and left-aligned-suffix edges.
    """
    n = r.shape[0]
    m = vtask.shape[0]
    delta = np.full((m, m), -1.0)
    split = np.full((m, m), -1, dtype=np.int64)
    feasible = np.zeros((m, m), dtype=np.bool_)
    source_ok = np.zeros(m, dtype=np.bool_)
    sink_ok = np.zeros(m, dtype=np.bool_)

    for vb in range(m):
        j = vtask[vb]
        stb = vstart[vb]
        ok = True
        for x in range(j):
            rx = stb - (ps[j] - ps[x])
            if rx < r[x] or rx > d[x] - p[x]:
                ok = False
                break
        source_ok[vb] = ok

    for va in range(m):
        i = vtask[va]
        sta = vstart[va]
        ok = True
        for x in range(i + 1, n):
            lx = sta + (ps[x] - ps[i])
            if lx < r[x] or lx > d[x] - p[x]:
                ok = False
                break
        sink_ok[va] = ok

    for va in range(m):
        i = vtask[va]
        sta = vstart[va]
        for vb in range(m):
            j = vtask[vb]
            if j <= i:
                continue
            stb = vstart[vb]
            gap = stb - (sta + p[i]) - (ps[j] - ps[i + 1])
            if gap < 0.0:
                continue
            # largest prefix that can pack left-aligned behind support i
            reach_a = i
            for x in range(i + 1, j):
                lx = sta + (ps[x] - ps[i])
                if lx < r[x] or lx > d[x] - p[x]:
                    break
                reach_a = x
            # smallest suffix start that can pack right-aligned before support j
            reach_b = j
            for x in range(j - 1, i, -1):
                rx = stb - (ps[j] - ps[x])
                if rx < r[x] or rx > d[x] - p[x]:
                    break
                reach_b = x
            if reach_b <= reach_a + 1:
                feasible[va, vb] = True
                delta[va, vb] = gap
                split[va, vb] = min(reach_a, j - 1)

    return delta, split, feasible, source_ok, sink_ok
