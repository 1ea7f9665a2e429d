# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled min-cost transportation kernel; see ``_transport_py`` for the contract."""

import numpy as np

from libc.math cimport INFINITY


def transport(cost, supply, demand):
    cdef double[:, ::1] C = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t r = C.shape[0], c = C.shape[1], n = r + c
    cdef long long[::1] rem_s = np.array(supply, dtype=np.int64)
    cdef long long[::1] rem_d = np.array(demand, dtype=np.int64)
    flow_arr = np.zeros((r, c), dtype=np.int64)
    cdef long long[:, ::1] flow = flow_arr
    cdef double[::1] pot = np.zeros(n)
    cdef double[::1] dist = np.empty(n)
    cdef Py_ssize_t[::1] prev = np.empty(n, dtype=np.intp)
    cdef unsigned char[::1] done = np.empty(n, dtype=np.uint8)
    cdef Py_ssize_t s, u, v, i, j, sink
    cdef double best, nd, cij, pu, D
    cdef long long amt

    for s in range(r):
        while rem_s[s] > 0:
            for v in range(n):
                dist[v] = INFINITY
                prev[v] = -1
                done[v] = 0
            dist[s] = 0.0
            sink = -1
            while True:
                u = -1
                best = INFINITY
                for v in range(n):
                    if not done[v] and dist[v] < best:
                        u = v
                        best = dist[v]
                if u < 0:
                    break
                done[u] = 1
                pu = pot[u]
                if u >= r:
                    j = u - r
                    if rem_d[j] > 0:
                        sink = u
                        break
                    for i in range(r):
                        if flow[i, j] > 0 and not done[i]:
                            nd = best - C[i, j] + pu - pot[i]
                            if nd < best:
                                nd = best
                            if nd < dist[i]:
                                dist[i] = nd
                                prev[i] = u
                else:
                    for j in range(c):
                        cij = C[u, j]
                        v = r + j
                        if cij == INFINITY or done[v]:
                            continue
                        nd = best + cij + pu - pot[v]
                        if nd < best:
                            nd = best
                        if nd < dist[v]:
                            dist[v] = nd
                            prev[v] = u
            if sink < 0:
                return flow_arr, False
            D = dist[sink]
            for v in range(n):
                pot[v] += D if dist[v] > D else dist[v]
            amt = rem_s[s] if rem_s[s] < rem_d[sink - r] else rem_d[sink - r]
            v = sink
            while v != s:
                u = prev[v]
                if u >= r and flow[v, u - r] < amt:
                    amt = flow[v, u - r]
                v = u
            v = sink
            while v != s:
                u = prev[v]
                if u < r:
                    flow[u, v - r] += amt
                else:
                    flow[v, u - r] -= amt
                v = u
            rem_s[s] -= amt
            rem_d[sink - r] -= amt
    return flow_arr, True
