# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: transportation simplex, min-plus products, pricing."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, INFINITY

cnp.import_array()

BACKEND = "cython"


def transport_simplex(a, b, C, long max_iter=0):
    """Exact transportation simplex; same contract as the Python kernel."""
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[:, ::1] c = np.ascontiguousarray(C, dtype=np.float64)
    cdef Py_ssize_t m = c.shape[0], n = c.shape[1]
    cdef Py_ssize_t N = m + n, E = N - 1, total = m * n
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bi_a = np.empty(E, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bj_a = np.empty(E, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x_a = np.empty(E, dtype=np.float64)
    cdef cnp.int64_t[::1] bi = bi_a
    cdef cnp.int64_t[::1] bj = bj_a
    cdef double[::1] x = x_a
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u_a = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v_a = np.zeros(n, dtype=np.float64)
    cdef double[::1] u = u_a
    cdef double[::1] v = v_a
    cdef double[::1] ra = np.array(av, dtype=np.float64)
    cdef double[::1] rb = np.array(bv, dtype=np.float64)

    cdef cnp.int64_t[::1] deg = np.zeros(N + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] start = np.zeros(N + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] fill = np.zeros(N, dtype=np.int64)
    cdef cnp.int64_t[::1] adj = np.zeros(2 * E + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] parent = np.zeros(N, dtype=np.int64)
    cdef cnp.int64_t[::1] pedge = np.zeros(N, dtype=np.int64)
    cdef cnp.int64_t[::1] depth = np.zeros(N, dtype=np.int64)
    cdef cnp.int64_t[::1] stack = np.zeros(N, dtype=np.int64)
    cdef cnp.int64_t[::1] path_i = np.zeros(N, dtype=np.int64)
    cdef cnp.int64_t[::1] path_j = np.zeros(N, dtype=np.int64)
    cdef cnp.int64_t[::1] cyc = np.zeros(N, dtype=np.int64)

    cdef Py_ssize_t i = 0, j = 0, e, k, node, other, top, s, t, ni, nj, nc
    cdef Py_ssize_t pos = 0, stop, scanned, enter, cell, leave
    cdef long it = 0
    cdef double q, best, rc, theta, cmax = 1.0, eps
    cdef Py_ssize_t block

    # northwest corner start
    for e in range(E):
        q = ra[i] if ra[i] < rb[j] else rb[j]
        bi[e] = i
        bj[e] = j
        x[e] = q
        ra[i] -= q
        rb[j] -= q
        if e == E - 1:
            break
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif ra[i] <= rb[j]:
            i += 1
        else:
            j += 1

    for i in range(m):
        for j in range(n):
            if fabs(c[i, j]) > cmax:
                cmax = fabs(c[i, j])
    eps = 1e-12 * cmax
    if max_iter <= 0:
        max_iter = 50 * total + 1000
    block = <Py_ssize_t>sqrt(<double>total)
    if block < 64:
        block = 64 if total > 64 else total

    while True:
        # adjacency of the basis tree in CSR form
        for k in range(N + 1):
            deg[k] = 0
        for e in range(E):
            deg[bi[e]] += 1
            deg[m + bj[e]] += 1
        start[0] = 0
        for k in range(N):
            start[k + 1] = start[k] + deg[k]
            fill[k] = start[k]
        for e in range(E):
            adj[fill[bi[e]]] = e
            fill[bi[e]] += 1
            adj[fill[m + bj[e]]] = e
            fill[m + bj[e]] += 1

        # potentials by DFS from row 0
        u[0] = 0.0
        parent[0] = -1
        pedge[0] = -1
        depth[0] = 0
        stack[0] = 0
        top = 1
        while top > 0:
            top -= 1
            node = stack[top]
            for k in range(start[node], start[node + 1]):
                e = adj[k]
                if e == pedge[node]:
                    continue
                if node < m:
                    other = m + bj[e]
                    v[bj[e]] = c[node, bj[e]] - u[node]
                else:
                    other = bi[e]
                    u[other] = c[other, node - m] - v[node - m]
                parent[other] = node
                pedge[other] = e
                depth[other] = depth[node] + 1
                stack[top] = other
                top += 1

        # block pricing
        best = -eps
        enter = -1
        scanned = 0
        while scanned < total:
            stop = pos + block
            if stop > total:
                stop = total
            for cell in range(pos, stop):
                i = cell // n
                j = cell - i * n
                rc = c[i, j] - u[i] - v[j]
                if rc < best:
                    best = rc
                    enter = cell
            scanned += stop - pos
            pos = 0 if stop == total else stop
            if enter >= 0:
                break
        if enter < 0:
            break
        if it >= max_iter:
            it = -it
            break
        it += 1

        # cycle through the entering cell
        i = enter // n
        j = enter - i * n
        ni = 0
        nj = 0
        s = i
        t = m + j
        while depth[s] > depth[t]:
            path_i[ni] = pedge[s]
            ni += 1
            s = parent[s]
        while depth[t] > depth[s]:
            path_j[nj] = pedge[t]
            nj += 1
            t = parent[t]
        while s != t:
            path_i[ni] = pedge[s]
            ni += 1
            s = parent[s]
            path_j[nj] = pedge[t]
            nj += 1
            t = parent[t]
        nc = 0
        for k in range(nj):
            cyc[nc] = path_j[k]
            nc += 1
        for k in range(ni - 1, -1, -1):
            cyc[nc] = path_i[k]
            nc += 1
        leave = cyc[0]
        theta = x[leave]
        for k in range(2, nc, 2):
            if x[cyc[k]] < theta:
                theta = x[cyc[k]]
                leave = cyc[k]
        for k in range(nc):
            if k % 2 == 0:
                x[cyc[k]] -= theta
            else:
                x[cyc[k]] += theta
        bi[leave] = i
        bj[leave] = j
        x[leave] = theta

    return bi_a, bj_a, x_a, u_a, v_a, it


def min_plus_through(D, Z):
    """``out[i, j] = min_z D[i, z] + D[z, j]`` over the index set ``Z``."""
    cdef const double[:, ::1] d = np.ascontiguousarray(D, dtype=np.float64)
    cdef const cnp.int64_t[::1] zs = np.ascontiguousarray(Z, dtype=np.int64)
    cdef Py_ssize_t n = d.shape[0], nz = zs.shape[0], i, j, k
    out_a = np.full((n, d.shape[1]), INFINITY)
    cdef double[:, ::1] out = out_a
    cdef double di, val
    for i in range(n):
        for k in range(nz):
            di = d[i, zs[k]]
            for j in range(d.shape[1]):
                val = di + d[zs[k], j]
                if val < out[i, j]:
                    out[i, j] = val
    return out_a


def negative_reduced_costs(C, u, v, double thresh, Py_ssize_t per_row):
    """Up to ``per_row`` most negative entries of ``C - u - v`` per row below ``thresh``."""
    cdef const double[:, ::1] c = np.ascontiguousarray(C, dtype=np.float64)
    cdef const double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t m = c.shape[0], n = c.shape[1], i, j, k, cnt, slot
    if per_row > n:
        per_row = n
    cdef double[::1] kv = np.empty(max(per_row, 1), dtype=np.float64)
    cdef cnp.int64_t[::1] kj = np.empty(max(per_row, 1), dtype=np.int64)
    rows = []
    cols = []
    cdef double rc
    for i in range(m):
        cnt = 0
        for j in range(n):
            rc = c[i, j] - uu[i] - vv[j]
            if rc >= thresh:
                continue
            if cnt < per_row:
                kv[cnt] = rc
                kj[cnt] = j
                cnt += 1
            else:
                # replace the largest kept value if this one is smaller
                slot = 0
                for k in range(1, cnt):
                    if kv[k] > kv[slot]:
                        slot = k
                if rc < kv[slot]:
                    kv[slot] = rc
                    kj[slot] = j
        for k in range(cnt):
            rows.append(i)
            cols.append(kj[k])
    return np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)


def triangle_violations(D, double tol, Py_ssize_t limit):
    """Triples (i, k, j) with ``D[i, j] > D[i, k] + D[k, j] + tol``, at most ``limit``."""
    cdef const double[:, ::1] d = np.ascontiguousarray(D, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0], i, j, k
    found = []
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i, j] > d[i, k] + d[k, j] + tol:
                    found.append((i, k, j))
                    if len(found) >= limit:
                        return found
    return found
