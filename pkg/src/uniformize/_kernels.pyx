# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: all-pairs Dijkstra and four-point defect scans.

Every routine here has a line-for-line twin in ``_fallback.py``; both must
return bitwise identical results, including witnesses.
"""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange, parallel
from libc.stdlib cimport malloc, free
from libc.math cimport INFINITY

cnp.import_array()


cdef inline void _heap_push(double* keys, int* vals, Py_ssize_t* size,
                            double key, int val) noexcept nogil:
    cdef Py_ssize_t i = size[0]
    cdef Py_ssize_t parent
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if keys[parent] <= key:
            break
        keys[i] = keys[parent]
        vals[i] = vals[parent]
        i = parent
    keys[i] = key
    vals[i] = val


cdef inline void _heap_pop(double* keys, int* vals, Py_ssize_t* size,
                           double* key, int* val) noexcept nogil:
    cdef Py_ssize_t n, i, child
    cdef double last_key
    cdef int last_val
    key[0] = keys[0]
    val[0] = vals[0]
    size[0] -= 1
    n = size[0]
    if n == 0:
        return
    last_key = keys[n]
    last_val = vals[n]
    i = 0
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and keys[child + 1] < keys[child]:
            child += 1
        if keys[child] >= last_key:
            break
        keys[i] = keys[child]
        vals[i] = vals[child]
        i = child
    keys[i] = last_key
    vals[i] = last_val


cdef void _dijkstra_row(const long long* indptr, const int* indices,
                        const double* weights, int n, int source,
                        double* dist, Py_ssize_t cap) noexcept nogil:
    cdef char* done = <char*> malloc(n * sizeof(char))
    cdef double* keys = <double*> malloc(cap * sizeof(double))
    cdef int* vals = <int*> malloc(cap * sizeof(int))
    cdef Py_ssize_t size = 0
    cdef Py_ssize_t e
    cdef int i, u, v
    cdef double du, nd
    for i in range(n):
        dist[i] = INFINITY
        done[i] = 0
    dist[source] = 0.0
    _heap_push(keys, vals, &size, 0.0, source)
    while size > 0:
        _heap_pop(keys, vals, &size, &du, &u)
        if done[u]:
            continue
        done[u] = 1
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if done[v]:
                continue
            nd = du + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                _heap_push(keys, vals, &size, nd, v)
    free(done)
    free(keys)
    free(vals)


def apsp(const long long[::1] indptr, const int[::1] indices, const double[::1] weights,
         int n, int threads=1):
    """Dense shortest-path table; row ``i`` for ``i < j`` is authoritative."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] D = out
    cdef Py_ssize_t cap = indices.shape[0] + 1
    cdef int s, i, j
    if n == 0:
        return out
    with nogil, parallel(num_threads=threads):
        for s in prange(n, schedule='dynamic'):
            _dijkstra_row(&indptr[0], &indices[0], &weights[0], n, s, &D[s, 0], cap)
    for i in range(n):
        for j in range(i + 1, n):
            D[j, i] = D[i, j]
    return out


def delta_base(const double[:, ::1] D, int p, int threads=1):
    """Largest defect over ordered triples at a fixed base; loop order x, z>=x, y."""
    cdef int n = D.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] best_arr = np.full(n, -INFINITY)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] wit_arr = np.zeros((n, 2), dtype=np.int32)
    cdef double[::1] best = best_arr
    cdef int[:, ::1] wit = wit_arr
    cdef int x, y, z
    cdef double dxp, dzp, dxz, a, b, val, bx
    with nogil, parallel(num_threads=threads):
        for x in prange(n, schedule='dynamic'):
            bx = -INFINITY
            dxp = D[x, p]
            for z in range(x, n):
                dzp = D[z, p]
                dxz = D[x, z]
                for y in range(n):
                    a = D[x, y] + dzp
                    b = D[y, z] + dxp
                    if b > a:
                        a = b
                    val = (dxz + D[y, p] - a) * 0.5
                    if val > bx:
                        bx = val
                        wit[x, 0] = y
                        wit[x, 1] = z
            best[x] = bx
    cdef double top = -INFINITY
    cdef int bi = 0
    for x in range(n):
        if best[x] > top:
            top = best[x]
            bi = x
    return top, bi, int(wit[bi, 0]), int(wit[bi, 1])


def delta_global(const double[:, ::1] D, int threads=1):
    """Largest four-point defect over 4-subsets i<j<k<l, first maximum wins.

    Returns ``(value, x, y, z, p)`` with the ordered witness arranged so that
    ``d(x,z) + d(y,p)`` is the largest of the three pair sums.
    """
    cdef int n = D.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] best_arr = np.full(n, -INFINITY)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] wit_arr = np.zeros((n, 4), dtype=np.int32)
    cdef double[::1] best = best_arr
    cdef int[:, ::1] wit = wit_arr
    cdef int i, j, k, l, code
    cdef double dij, dik, djk, A, B, C, s1, s2, val, bi_val
    if n < 4:
        return 0.0, -1, -1, -1, -1
    with nogil, parallel(num_threads=threads):
        for i in prange(n - 3, schedule='dynamic'):
            bi_val = -INFINITY
            for j in range(i + 1, n - 2):
                dij = D[i, j]
                for k in range(j + 1, n - 1):
                    dik = D[i, k]
                    djk = D[j, k]
                    for l in range(k + 1, n):
                        A = dij + D[k, l]
                        B = dik + D[j, l]
                        C = D[i, l] + djk
                        if A >= B and A >= C:
                            s1 = A
                            s2 = B if B >= C else C
                            code = 0
                        elif B >= C:
                            s1 = B
                            s2 = A if A >= C else C
                            code = 1
                        else:
                            s1 = C
                            s2 = A if A >= B else B
                            code = 2
                        val = (s1 - s2) * 0.5
                        if val > bi_val:
                            bi_val = val
                            if code == 0:
                                wit[i, 0] = i
                                wit[i, 1] = k
                                wit[i, 2] = j
                                wit[i, 3] = l
                            elif code == 1:
                                wit[i, 0] = i
                                wit[i, 1] = j
                                wit[i, 2] = k
                                wit[i, 3] = l
                            else:
                                wit[i, 0] = i
                                wit[i, 1] = j
                                wit[i, 2] = l
                                wit[i, 3] = k
            best[i] = bi_val
    cdef double top = -INFINITY
    cdef int bidx = 0
    for i in range(n - 3):
        if best[i] > top:
            top = best[i]
            bidx = i
    return top, int(wit[bidx, 0]), int(wit[bidx, 1]), int(wit[bidx, 2]), int(wit[bidx, 3])


def chain_closure(const double[:, ::1] W, int threads=1):
    """Floyd-Warshall min-plus closure without a zero diagonal.

    Row ``k`` is fixed during pass ``k`` (the diagonal is nonnegative), so
    the rows of one pass can be updated in parallel.
    """
    cdef int n = W.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.array(W, dtype=np.float64, copy=True)
    cdef double[:, ::1] T = out
    cdef int i, j, k
    cdef double tik, cand
    for k in range(n):
        with nogil, parallel(num_threads=threads):
            for i in prange(n, schedule='static'):
                tik = T[i, k]
                for j in range(n):
                    cand = tik + T[k, j]
                    if cand < T[i, j]:
                        T[i, j] = cand
    return out


def triangle_violation(const double[:, ::1] T, int threads=1):
    """max over i, j, k of T[i,j] - (T[i,k] + T[k,j])."""
    cdef int n = T.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] best_arr = np.full(max(n, 1), -INFINITY)
    cdef double[::1] best = best_arr
    cdef int i, j, k
    cdef double v, bi
    with nogil, parallel(num_threads=threads):
        for i in prange(n, schedule='static'):
            bi = -INFINITY
            for k in range(n):
                for j in range(n):
                    v = T[i, j] - (T[i, k] + T[k, j])
                    if v > bi:
                        bi = v
            best[i] = bi
    return float(best_arr.max())
