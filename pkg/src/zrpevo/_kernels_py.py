"""Pure-Python kernels.

Drop-in fallback for the compiled ``_kernels`` extension: identical
signatures, identical results (including tie-breaking), just slower.
Graphs are passed in CSR form: ``indptr`` (n+1,), ``indices`` (nnz,)
sorted within each row, ``weights`` (nnz,).
"""
from bisect import bisect_left
import heapq

import numpy as np

_REL_TOL = 1e-9


def bounded_bfs(indptr, indices, source, radius):
    """Hop counts from ``source``; -1 beyond ``radius`` or unreachable.

    A negative ``radius`` means unbounded.
    """
    n = len(indptr) - 1
    hops = np.full(n, -1, dtype=np.int64)
    hops[source] = 0
    frontier = [int(source)]
    depth = 0
    while frontier and (radius < 0 or depth < radius):
        depth += 1
        nxt = []
        for x in frontier:
            for v in indices[indptr[x]:indptr[x + 1]].tolist():
                if hops[v] < 0:
                    hops[v] = depth
                    nxt.append(v)
        frontier = nxt
    return hops


def _root_path(parent, x):
    path = []
    while x != -1:
        path.append(x)
        x = parent[x]
    path.reverse()
    return path


def lex_dijkstra(indptr, indices, weights, source, allowed):
    """Min-cost distances and predecessor links from ``source``.

    Only nodes with ``allowed[v] != 0`` are entered. Among equal-cost
    paths the predecessor chain encodes the lexicographically smallest
    node sequence. Returns ``(dist, parent)``; unreachable nodes keep
    ``inf`` / -1.
    """
    n = len(indptr) - 1
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    if not allowed[source]:
        return dist, parent
    d = [float("inf")] * n
    par = [-1] * n
    done = [False] * n
    ptr = indptr.tolist()
    d[source] = 0.0
    heap = [(0.0, int(source))]
    while heap:
        dx, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        lo, hi = ptr[x], ptr[x + 1]
        for t, w in zip(indices[lo:hi].tolist(), weights[lo:hi].tolist()):
            if done[t] or not allowed[t]:
                continue
            nd = dx + w
            tol = _REL_TOL * max(1.0, nd)
            if nd < d[t] - tol:
                d[t] = nd
                par[t] = x
                heapq.heappush(heap, (nd, t))
            elif nd <= d[t] + tol and par[t] != x:
                if _root_path(par, x) + [t] < _root_path(par, par[t]) + [t]:
                    par[t] = x
    dist[:] = d
    parent[:] = par
    return dist, parent


def loop_erased_walk(indptr, indices, start, target, blocked, uniforms):
    """Random walk from ``start`` with chronological loop erasure.

    One uniform is consumed per move; the successor is the
    ``floor(u * k)``-th of the ``k`` non-blocked out-neighbours. Stops on
    reaching ``target``, at a dead end, or when ``uniforms`` runs out.
    """
    start = int(start)
    target = int(target)
    path = [start]
    pos = {start: 0}
    x = start
    for u in uniforms.tolist():
        if x == target:
            break
        row = indices[indptr[x]:indptr[x + 1]].tolist()
        cands = [v for v in row if not blocked[v]]
        if not cands:
            break
        y = cands[int(u * len(cands))]
        if y in pos:
            cut = pos[y]
            for v in path[cut + 1:]:
                del pos[v]
            del path[cut + 1:]
        else:
            pos[y] = len(path)
            path.append(y)
        x = y
    return np.asarray(path, dtype=np.int64)


def route_costs(indptr, indices, weights, genes, offsets, penalty):
    """Sum of arc weights along each packed route.

    Route ``k`` is ``genes[offsets[k]:offsets[k+1]]``; a missing arc
    contributes ``penalty``.
    """
    ptr = indptr.tolist()
    idx = indices.tolist()
    w = weights.tolist()
    g = genes.tolist()
    off = offsets.tolist()
    out = np.empty(len(off) - 1)
    for k in range(len(off) - 1):
        total = 0.0
        for a in range(off[k], off[k + 1] - 1):
            i, j = g[a], g[a + 1]
            lo, hi = ptr[i], ptr[i + 1]
            e = bisect_left(idx, j, lo, hi)
            if e < hi and idx[e] == j:
                total += w[e]
            else:
                total += penalty
        out[k] = total
    return out
