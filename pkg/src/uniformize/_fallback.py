"""Pure-Python/numpy twins of the compiled kernels in ``_kernels.pyx``.

Same contracts, same loop orders, same tie-breaks: results match the
compiled versions bit for bit.  ``threads`` is accepted and ignored.
"""
import heapq

import numpy as np


def apsp(indptr, indices, weights, n, threads=1):
    out = np.empty((n, n), dtype=np.float64)
    indptr = [int(v) for v in indptr]
    indices = [int(v) for v in indices]
    weights = [float(v) for v in weights]
    inf = float("inf")
    for s in range(n):
        dist = [inf] * n
        done = [False] * n
        dist[s] = 0.0
        heap = [(0.0, s)]
        while heap:
            du, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if done[v]:
                    continue
                nd = du + weights[e]
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        out[s] = dist
    iu = np.triu_indices(n, 1)
    out[iu[1], iu[0]] = out[iu]
    return out


def delta_base(D, p, threads=1):
    n = D.shape[0]
    top = -np.inf
    wit = (0, 0, 0)
    col_p = D[:, p]
    for x in range(n):
        z = np.arange(x, n)
        # rows: z >= x, columns: y
        a = D[x, :][None, :] + col_p[z][:, None]
        b = D[z, :] + D[x, p]
        vals = (D[x, z][:, None] + col_p[None, :] - np.maximum(a, b)) * 0.5
        flat = int(np.argmax(vals))
        val = vals.flat[flat]
        if val > top:
            zi, y = divmod(flat, n)
            top = float(val)
            wit = (x, int(y), int(z[zi]))
    return top, wit[0], wit[1], wit[2]


def delta_global(D, threads=1):
    n = D.shape[0]
    if n < 4:
        return 0.0, -1, -1, -1, -1
    top = -np.inf
    wit = (-1, -1, -1, -1)
    for i in range(n - 3):
        for j in range(i + 1, n - 2):
            k = np.arange(j + 1, n - 1)
            l = np.arange(n)
            A = D[i, j] + D[k][:, l]
            B = D[i, k][:, None] + D[j, l][None, :]
            C = D[i, l][None, :] + D[j, k][:, None]
            mask = l[None, :] > k[:, None]
            a_top = (A >= B) & (A >= C)
            b_top = ~a_top & (B >= C)
            s1 = np.where(a_top, A, np.where(b_top, B, C))
            s2 = np.where(a_top, np.where(B >= C, B, C),
                          np.where(b_top, np.where(A >= C, A, C),
                                   np.where(A >= B, A, B)))
            vals = np.where(mask, (s1 - s2) * 0.5, -np.inf)
            flat = int(np.argmax(vals))
            val = vals.flat[flat]
            if val > top:
                ki, li = divmod(flat, n)
                kk = int(k[ki])
                top = float(val)
                if a_top.flat[flat]:
                    wit = (i, kk, j, li)
                elif b_top.flat[flat]:
                    wit = (i, j, kk, li)
                else:
                    wit = (i, j, li, kk)
    return top, wit[0], wit[1], wit[2], wit[3]


def chain_closure(W, threads=1):
    theta = np.array(W, dtype=np.float64, copy=True)
    for k in range(theta.shape[0]):
        np.minimum(theta, theta[:, k, None] + theta[None, k, :], out=theta)
    return theta


def triangle_violation(T, threads=1):
    T = np.asarray(T, dtype=np.float64)
    worst = -np.inf
    for k in range(T.shape[0]):
        worst = max(worst, float((T - (T[:, k, None] + T[None, k, :])).max()))
    return worst
