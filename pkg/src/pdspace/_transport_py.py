"""Pure-Python min-cost transportation kernel (fallback for ``_transport.pyx``).

Both modules expose the same function::

    transport(cost, supply, demand) -> (flow, feasible)

``cost`` is an ``r x c`` float array where ``inf`` marks a forbidden cell,
``supply`` (length ``r``) and ``demand`` (length ``c``) are non-negative
integer vectors with equal sums. The result is an integer flow matrix of
minimum total ``sum(cost * flow)`` whose row sums equal ``supply`` and column
sums equal ``demand``; ``feasible`` is False when no such flow avoids the
forbidden cells (the flow returned is then partial).

Successive shortest paths: each row's supply is routed along Dijkstra
shortest paths in the residual graph, using node potentials to keep reduced
costs non-negative. Dijkstra stops at the first column with unmet demand.
With unit supplies this is the Hungarian method, ``O((r + c)^3)``.
"""

from __future__ import annotations

import math

import numpy as np

INF = math.inf


def transport(cost, supply, demand):
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    r, c = cost.shape
    C = cost.tolist()
    rem_s = [int(v) for v in supply]
    rem_d = [int(v) for v in demand]
    n = r + c
    pot = [0.0] * n
    flow = [[0] * c for _ in range(r)]
    # rows currently sending flow into each column
    senders: list[set[int]] = [set() for _ in range(c)]

    for s in range(r):
        while rem_s[s] > 0:
            dist = [INF] * n
            prev = [-1] * n
            done = [False] * n
            dist[s] = 0.0
            sink = -1
            while True:
                u, best = -1, INF
                for v in range(n):
                    if not done[v] and dist[v] < best:
                        u, best = v, dist[v]
                if u < 0:
                    break
                done[u] = True
                if u >= r:
                    j = u - r
                    if rem_d[j] > 0:
                        sink = u
                        break
                    pu = pot[u]
                    for i in sorted(senders[j]):
                        if not done[i]:
                            nd = best - C[i][j] + pu - pot[i]
                            if nd < best:
                                nd = best
                            if nd < dist[i]:
                                dist[i] = nd
                                prev[i] = u
                else:
                    row = C[u]
                    pu = pot[u]
                    for j in range(c):
                        cij = row[j]
                        v = r + j
                        if cij == INF or done[v]:
                            continue
                        nd = best + cij + pu - pot[v]
                        if nd < best:
                            nd = best
                        if nd < dist[v]:
                            dist[v] = nd
                            prev[v] = u
            if sink < 0:
                return np.array(flow, dtype=np.int64).reshape(r, c), False
            D = dist[sink]
            for v in range(n):
                pot[v] += D if dist[v] > D else dist[v]
            amt = min(rem_s[s], rem_d[sink - r])
            v = sink
            while v != s:
                u = prev[v]
                if u >= r:
                    amt = min(amt, flow[v][u - r])
                v = u
            v = sink
            while v != s:
                u = prev[v]
                if u < r:
                    j = v - r
                    flow[u][j] += amt
                    senders[j].add(u)
                else:
                    j = u - r
                    flow[v][j] -= amt
                    if flow[v][j] == 0:
                        senders[j].discard(v)
                v = u
            rem_s[s] -= amt
            rem_d[sink - r] -= amt
    return np.array(flow, dtype=np.int64).reshape(r, c), True
