"""Random ad-hoc network topologies as undirected weighted graphs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

from ._backend import kernels


class TopologyError(ValueError):
    """Invalid topology parameters or a malformed edge-list document."""


@dataclass(frozen=True)
class TopologyParams:
    n: int
    target_avg_degree: float = 8.0
    cost_min: int = 1
    cost_max: int = 10
    seed: int = 0

    def validate(self) -> None:
        if self.n < 1:
            raise TopologyError(f"node count must be >= 1, got {self.n}")
        if not 0 < self.target_avg_degree < self.n:
            raise TopologyError(
                f"target average degree must lie in (0, n={self.n}), got {self.target_avg_degree}"
            )
        if not 1 <= self.cost_min <= self.cost_max:
            raise TopologyError(
                f"need 1 <= cost_min <= cost_max, got [{self.cost_min}, {self.cost_max}]"
            )
        if not 0 <= self.seed < 2**64:
            raise TopologyError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True, eq=False)
class Network:
    """Undirected graph on nodes ``0..n-1``.

    ``edges`` holds ``(u, v, cost)`` with ``u < v``, sorted. ``positions``
    is an ``(n, 2)`` tuple of coordinates when the graph was generated
    geometrically.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]
    positions: Optional[tuple[tuple[float, float], ...]] = field(default=None)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]], positions=None) -> "Network":
        seen = {}
        for u, v, c in edges:
            u, v = int(u), int(v)
            if u == v:
                raise TopologyError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise TopologyError(f"edge ({u}, {v}) outside node range [0, {n})")
            if not c > 0:
                raise TopologyError(f"non-positive cost {c} on edge ({u}, {v})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise TopologyError(f"duplicate edge {key}")
            seen[key] = c
        ordered = tuple((u, v, seen[(u, v)]) for u, v in sorted(seen))
        return cls(n=n, edges=ordered, positions=positions)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, indices, weights)`` with both directions of every edge."""
        return csr_from_arcs(
            self.n, [(u, v, c) for u, v, c in self.edges] + [(v, u, c) for u, v, c in self.edges]
        )

    @cached_property
    def _cost(self) -> dict[tuple[int, int], float]:
        table = {}
        for u, v, c in self.edges:
            table[u, v] = c
            table[v, u] = c
        return table

    def cost(self, u: int, v: int) -> Optional[float]:
        return self._cost.get((u, v))

    def neighbors(self, u: int) -> list[int]:
        indptr, indices, _ = self.csr
        return indices[indptr[u]:indptr[u + 1]].tolist()

    @property
    def max_cost(self) -> float:
        return max((c for _, _, c in self.edges), default=1)

    def components(self) -> list[list[int]]:
        """Connected components, each sorted, ordered by smallest member."""
        indptr, indices, _ = self.csr
        seen = np.zeros(self.n, dtype=bool)
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            hops = kernels.bounded_bfs(indptr, indices, s, -1)
            members = np.flatnonzero(hops >= 0)
            seen[members] = True
            comps.append(members.tolist())
        return comps


def csr_from_arcs(n, arcs):
    """Build sorted CSR arrays from directed ``(u, v, w)`` triples."""
    arcs = sorted(arcs, key=lambda a: (a[0], a[1]))
    indptr = np.zeros(n + 1, dtype=np.int64)
    for u, _, _ in arcs:
        indptr[u + 1] += 1
    np.cumsum(indptr, out=indptr)
    indices = np.fromiter((a[1] for a in arcs), dtype=np.int64, count=len(arcs))
    weights = np.fromiter((a[2] for a in arcs), dtype=np.float64, count=len(arcs))
    return indptr, indices, weights


def connection_radius(n: int, target_avg_degree: float) -> float:
    """Radio range giving ``target_avg_degree`` expected neighbours in the unit square."""
    if n < 2:
        return 0.0
    return math.sqrt(target_avg_degree / (math.pi * (n - 1)))


def generate_random_network(params: TopologyParams) -> Network:
    """Random geometric graph: uniform points in the unit square, edges within radio range.

    Edge costs are uniform integers in ``[cost_min, cost_max]``. The
    result is a deterministic function of ``params``.
    """
    params.validate()
    rng = np.random.default_rng(params.seed)
    n = params.n
    pts = rng.random((n, 2))
    rho = connection_radius(n, params.target_avg_degree)
    iu, ju = np.triu_indices(n, k=1)
    d2 = ((pts[iu] - pts[ju]) ** 2).sum(axis=1)
    keep = d2 <= rho * rho
    us, vs = iu[keep], ju[keep]
    costs = rng.integers(params.cost_min, params.cost_max + 1, size=len(us))
    edges = tuple(zip(us.tolist(), vs.tolist(), costs.tolist()))
    positions = tuple(map(tuple, pts.tolist()))
    return Network(n=n, edges=edges, positions=positions)


def load_network(text: str) -> Network:
    """Parse the edge-list format: node count line, then ``u v cost`` lines.

    Blank lines and lines starting with ``#`` are skipped. Errors name the
    offending 1-based line number.
    """
    n = None
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1 or not _is_int(parts[0]) or int(parts[0]) < 1:
                raise TopologyError(f"expected positive node count at line {lineno}")
            n = int(parts[0])
            continue
        if len(parts) != 3 or not all(_is_int(p) for p in parts):
            raise TopologyError(f"malformed edge at line {lineno}: expected 'u v cost'")
        u, v, c = (int(p) for p in parts)
        if not (0 <= u < n and 0 <= v < n):
            raise TopologyError(f"node out of range at line {lineno}")
        if u == v:
            raise TopologyError(f"self-loop at line {lineno}")
        if c < 1:
            raise TopologyError(f"non-positive cost at line {lineno}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise TopologyError(f"duplicate edge at line {lineno}")
        seen[key] = c
    if n is None:
        raise TopologyError("empty edge-list document")
    return Network(n=n, edges=tuple((u, v, seen[u, v]) for u, v in sorted(seen)))


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def format_edge_list(net: Network) -> str:
    lines = [str(net.n)]
    lines += [f"{u} {v} {_num(c)}" for u, v, c in net.edges]
    return "\n".join(lines) + "\n"


def _num(x) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def hop_distances(net: Network, u: int) -> dict[int, int]:
    """Unweighted BFS distances from ``u``; unreachable nodes are absent."""
    indptr, indices, _ = net.csr
    hops = kernels.bounded_bfs(indptr, indices, u, -1)
    reach = np.flatnonzero(hops >= 0)
    return dict(zip(reach.tolist(), hops[reach].tolist()))


def trace_path(parent: np.ndarray, v: int) -> list[int]:
    path = []
    while v != -1:
        path.append(int(v))
        v = parent[v]
    path.reverse()
    return path


def min_cost_path(net: Network, u: int, v: int, allowed=None) -> Optional[tuple[float, list[int]]]:
    """Cheapest ``u -> v`` path, optionally restricted to the node set ``allowed``.

    Equal-cost paths resolve to the lexicographically smallest node
    sequence. Returns ``None`` when ``v`` is unreachable.
    """
    indptr, indices, weights = net.csr
    if allowed is None:
        mask = np.ones(net.n, dtype=np.uint8)
    else:
        mask = np.zeros(net.n, dtype=np.uint8)
        mask[list(allowed)] = 1
    if not (mask[u] and mask[v]):
        return None
    dist, parent = kernels.lex_dijkstra(indptr, indices, weights, u, mask)
    if not np.isfinite(dist[v]):
        return None
    path = trace_path(parent, v)
    return path_cost(net, path), path


def path_cost(net: Network, path) -> float:
    return sum(net.cost(a, b) for a, b in zip(path, path[1:]))
