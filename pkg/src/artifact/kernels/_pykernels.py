"""Pure-Python (numpy) versions of the hot kernels.

These mirror ``_ckernels.pyx`` line for line in terms of algorithm and
return values, so either backend can be swapped in at import time.
"""

import numpy as np

BACKEND = "python"


def _northwest_corner(a, b):
    m, n = len(a), len(b)
    n_edges = m + n - 1
    bi = np.empty(n_edges, dtype=np.int64)
    bj = np.empty(n_edges, dtype=np.int64)
    x = np.empty(n_edges)
    ra = a.copy()
    rb = b.copy()
    i = j = 0
    for e in range(n_edges):
        q = min(ra[i], rb[j])
        bi[e], bj[e], x[e] = i, j, q
        ra[i] -= q
        rb[j] -= q
        if e == n_edges - 1:
            break
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif ra[i] <= rb[j]:
            i += 1
        else:
            j += 1
    return bi, bj, x


def transport_simplex(a, b, C, max_iter=0):
    """Exact transportation simplex on a dense cost matrix.

    Parameters
    ----------
    a, b : ndarray
        Strictly positive supplies and demands with equal sums.
    C : ndarray, shape (len(a), len(b))
        Cost matrix.
    max_iter : int
        Pivot limit; 0 picks a generous default.

    Returns
    -------
    bi, bj, x : ndarray
        Basic cells and their flows (a spanning tree of the bipartite graph).
    u, v : ndarray
        Dual potentials with ``C[i, j] - u[i] - v[j] >= 0`` at optimum.
    n_iter : int
        Number of pivots; negative if the pivot limit was hit.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    m, n = C.shape
    N = m + n
    n_edges = N - 1
    bi, bj, x = _northwest_corner(a, b)
    if max_iter <= 0:
        max_iter = 50 * m * n + 1000
    flat = C.ravel()
    total = m * n
    block = max(int(np.sqrt(total)), min(total, 64))
    eps = 1e-12 * max(1.0, float(np.abs(C).max()))
    u = np.zeros(m)
    v = np.zeros(n)
    pos = 0
    it = 0
    while True:
        adj = [[] for _ in range(N)]
        for e in range(n_edges):
            adj[bi[e]].append(e)
            adj[m + bj[e]].append(e)
        parent = [-1] * N
        pedge = [-1] * N
        depth = [0] * N
        u[0] = 0.0
        stack = [0]
        while stack:
            node = stack.pop()
            for e in adj[node]:
                if e == pedge[node]:
                    continue
                if node < m:
                    other = m + bj[e]
                    v[bj[e]] = C[node, bj[e]] - u[node]
                else:
                    other = bi[e]
                    u[other] = C[other, node - m] - v[node - m]
                parent[other] = node
                pedge[other] = e
                depth[other] = depth[node] + 1
                stack.append(other)

        # block pricing: scan cyclically until a block has a violated cell
        best = -eps
        enter = -1
        scanned = 0
        while scanned < total:
            stop = min(pos + block, total)
            idx = np.arange(pos, stop)
            rc = flat[pos:stop] - u[idx // n] - v[idx % n]
            k = int(np.argmin(rc))
            scanned += stop - pos
            pos = 0 if stop == total else stop
            if rc[k] < best:
                best = rc[k]
                enter = int(idx[k])
                break
        if enter < 0:
            break
        if it >= max_iter:
            it = -it
            break
        it += 1

        i, j = divmod(enter, n)
        p_i, p_j = [], []
        s, t = i, m + j
        while depth[s] > depth[t]:
            p_i.append(pedge[s])
            s = parent[s]
        while depth[t] > depth[s]:
            p_j.append(pedge[t])
            t = parent[t]
        while s != t:
            p_i.append(pedge[s])
            s = parent[s]
            p_j.append(pedge[t])
            t = parent[t]
        cycle = p_j + p_i[::-1]
        minus = cycle[0::2]
        plus = cycle[1::2]
        leave = minus[0]
        theta = x[leave]
        for e in minus[1:]:
            if x[e] < theta:
                theta = x[e]
                leave = e
        for e in minus:
            x[e] -= theta
        for e in plus:
            x[e] += theta
        bi[leave], bj[leave], x[leave] = i, j, theta
    return bi, bj, x, u.copy(), v.copy(), it


def min_plus_through(D, Z):
    """``out[i, j] = min_z D[i, z] + D[z, j]`` over the index set ``Z``."""
    D = np.asarray(D, dtype=np.float64)
    out = np.full(D.shape, np.inf)
    for z in Z:
        np.minimum(out, D[:, z][:, None] + D[z, :][None, :], out=out)
    return out


def negative_reduced_costs(C, u, v, thresh, per_row):
    """Up to ``per_row`` most negative entries of ``C - u - v`` per row below ``thresh``."""
    C = np.asarray(C, dtype=np.float64)
    RC = C - np.asarray(u)[:, None] - np.asarray(v)[None, :]
    neg = RC < thresh
    if not neg.any():
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    RC = np.where(neg, RC, np.inf)
    k = min(per_row, C.shape[1])
    if k < C.shape[1]:
        idx = np.argpartition(RC, k - 1, axis=1)[:, :k]
    else:
        idx = np.tile(np.arange(C.shape[1]), (C.shape[0], 1))
    rows = np.repeat(np.arange(C.shape[0]), idx.shape[1])
    cols = idx.ravel()
    keep = neg[rows, cols]
    return rows[keep].astype(np.int64), cols[keep].astype(np.int64)


def triangle_violations(D, tol, limit):
    """Triples (i, k, j) with ``D[i, j] > D[i, k] + D[k, j] + tol``, at most ``limit``."""
    D = np.asarray(D, dtype=np.float64)
    found = []
    for k in range(D.shape[0]):
        bad = np.argwhere(D > D[:, k][:, None] + D[k, :][None, :] + tol)
        for i, j in bad:
            found.append((int(i), k, int(j)))
            if len(found) >= limit:
                return found
    return found
