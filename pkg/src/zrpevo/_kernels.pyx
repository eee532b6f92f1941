# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Must stay result-identical to ``_kernels_py``."""
from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free

import numpy as np

cdef double REL_TOL = 1e-9


def bounded_bfs(const int64_t[::1] indptr, const int64_t[::1] indices,
                int64_t source, int64_t radius):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] hops = out
    cdef int64_t* queue = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    if queue == NULL:
        raise MemoryError()
    cdef Py_ssize_t head = 0, tail = 0
    cdef int64_t x, v, e
    hops[source] = 0
    queue[tail] = source
    tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        if radius >= 0 and hops[x] >= radius:
            continue
        for e in range(indptr[x], indptr[x + 1]):
            v = indices[e]
            if hops[v] < 0:
                hops[v] = hops[x] + 1
                queue[tail] = v
                tail += 1
    free(queue)
    return out


cdef inline void _sift_up(double* key, int64_t* val, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t p
    cdef double k = key[i]
    cdef int64_t v = val[i]
    while i > 0:
        p = (i - 1) >> 1
        if key[p] < k or (key[p] == k and val[p] <= v):
            break
        key[i] = key[p]
        val[i] = val[p]
        i = p
    key[i] = k
    val[i] = v


cdef inline void _sift_down(double* key, int64_t* val, Py_ssize_t size) noexcept nogil:
    cdef Py_ssize_t i = 0, c
    cdef double k = key[0]
    cdef int64_t v = val[0]
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and (key[c + 1] < key[c] or (key[c + 1] == key[c] and val[c + 1] < val[c])):
            c += 1
        if k < key[c] or (k == key[c] and v <= val[c]):
            break
        key[i] = key[c]
        val[i] = val[c]
        i = c
    key[i] = k
    val[i] = v


cdef Py_ssize_t _fill_root_path(const int64_t* parent, int64_t x, int64_t* buf) noexcept nogil:
    # writes leaf-first; caller reads backwards
    cdef Py_ssize_t m = 0
    while x != -1:
        buf[m] = x
        m += 1
        x = parent[x]
    return m


cdef bint _candidate_less(const int64_t* parent, int64_t a, int64_t b, int64_t t,
                          int64_t* bufa, int64_t* bufb) noexcept nogil:
    """True iff path(a)+[t] < path(b)+[t] lexicographically."""
    cdef Py_ssize_t la = _fill_root_path(parent, a, bufa)
    cdef Py_ssize_t lb = _fill_root_path(parent, b, bufb)
    cdef Py_ssize_t i = 0
    cdef int64_t x, y
    while i <= la and i <= lb:
        x = bufa[la - 1 - i] if i < la else t
        y = bufb[lb - 1 - i] if i < lb else t
        if x != y:
            return x < y
        i += 1
    return la < lb


def lex_dijkstra(const int64_t[::1] indptr, const int64_t[::1] indices,
                 const double[::1] weights, int64_t source,
                 const unsigned char[::1] allowed):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t nnz = indices.shape[0]
    dist_arr = np.full(n, np.inf)
    parent_arr = np.full(n, -1, dtype=np.int64)
    if not allowed[source]:
        return dist_arr, parent_arr
    cdef double[::1] dist = dist_arr
    cdef int64_t[::1] parent = parent_arr
    cdef double* hkey = <double*>malloc((nnz + 1) * sizeof(double))
    cdef int64_t* hval = <int64_t*>malloc((nnz + 1) * sizeof(int64_t))
    cdef unsigned char* done = <unsigned char*>malloc(n * sizeof(unsigned char))
    cdef int64_t* bufa = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* bufb = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    if hkey == NULL or hval == NULL or done == NULL or bufa == NULL or bufb == NULL:
        free(hkey); free(hval); free(done); free(bufa); free(bufb)
        raise MemoryError()
    cdef Py_ssize_t size = 0, i
    cdef int64_t x, t, e
    cdef double dx, nd, tol
    for i in range(n):
        done[i] = 0
    with nogil:
        dist[source] = 0.0
        hkey[0] = 0.0
        hval[0] = source
        size = 1
        while size > 0:
            dx = hkey[0]
            x = hval[0]
            size -= 1
            if size > 0:
                hkey[0] = hkey[size]
                hval[0] = hval[size]
                _sift_down(hkey, hval, size)
            if done[x]:
                continue
            done[x] = 1
            for e in range(indptr[x], indptr[x + 1]):
                t = indices[e]
                if done[t] or not allowed[t]:
                    continue
                nd = dx + weights[e]
                tol = REL_TOL * (nd if nd > 1.0 else 1.0)
                if nd < dist[t] - tol:
                    dist[t] = nd
                    parent[t] = x
                    hkey[size] = nd
                    hval[size] = t
                    _sift_up(hkey, hval, size)
                    size += 1
                elif nd <= dist[t] + tol and parent[t] != x:
                    if _candidate_less(&parent[0], x, parent[t], t, bufa, bufb):
                        parent[t] = x
    free(hkey); free(hval); free(done); free(bufa); free(bufb)
    return dist_arr, parent_arr


def loop_erased_walk(const int64_t[::1] indptr, const int64_t[::1] indices,
                     int64_t start, int64_t target,
                     const unsigned char[::1] blocked, const double[::1] uniforms):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t steps = uniforms.shape[0]
    cdef int64_t* pos = <int64_t*>malloc(n * sizeof(int64_t))
    cdef int64_t* path = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    if pos == NULL or path == NULL:
        free(pos); free(path)
        raise MemoryError()
    cdef Py_ssize_t i, s, length = 1, k, cut
    cdef int64_t x = start, y, e
    for i in range(n):
        pos[i] = -1
    path[0] = start
    pos[start] = 0
    with nogil:
        for s in range(steps):
            if x == target:
                break
            k = 0
            for e in range(indptr[x], indptr[x + 1]):
                if not blocked[indices[e]]:
                    k += 1
            if k == 0:
                break
            k = <Py_ssize_t>(uniforms[s] * k)
            y = -1
            for e in range(indptr[x], indptr[x + 1]):
                if not blocked[indices[e]]:
                    if k == 0:
                        y = indices[e]
                        break
                    k -= 1
            if pos[y] >= 0:
                cut = pos[y]
                for i in range(cut + 1, length):
                    pos[path[i]] = -1
                length = cut + 1
            else:
                pos[y] = length
                path[length] = y
                length += 1
            x = y
    out = np.empty(length, dtype=np.int64)
    cdef int64_t[::1] o = out
    for i in range(length):
        o[i] = path[i]
    free(pos); free(path)
    return out


def route_costs(const int64_t[::1] indptr, const int64_t[::1] indices,
                const double[::1] weights, const int64_t[::1] genes,
                const int64_t[::1] offsets, double penalty):
    cdef Py_ssize_t m = offsets.shape[0] - 1
    out = np.empty(m)
    cdef double[::1] o = out
    cdef Py_ssize_t k, a, lo, hi, mid
    cdef int64_t i, j
    cdef double total
    with nogil:
        for k in range(m):
            total = 0.0
            for a in range(offsets[k], offsets[k + 1] - 1):
                i = genes[a]
                j = genes[a + 1]
                lo = indptr[i]
                hi = indptr[i + 1]
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if indices[mid] < j:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < indptr[i + 1] and indices[lo] == j:
                    total += weights[lo]
                else:
                    total += penalty
            o[k] = total
    return out
