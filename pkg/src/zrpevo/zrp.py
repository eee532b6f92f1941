"""ZRP routing zones, peripheral (border) nodes and the bordercast overlay.

Zone membership is by hop count; intra-zone (IARP) segments are the
cheapest paths inside the zone's induced subgraph. The overlay has an arc
from every node to each peripheral node of its zone, plus a terminal arc
to the destination whenever the destination sits inside the zone.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Optional

import numpy as np

from ._backend import kernels
from .topology import Network, csr_from_arcs, path_cost, trace_path


@dataclass(frozen=True)
class Zone:
    center: int
    radius: int
    hop_of: Mapping[int, int]
    peripheral: frozenset[int]
    iarp: Mapping[int, tuple[float, tuple[int, ...]]]

    @property
    def members(self) -> frozenset[int]:
        return frozenset(self.hop_of)

    @property
    def interior(self) -> frozenset[int]:
        return self.members - self.peripheral


def build_zone(net: Network, center: int, r: int) -> Zone:
    """Routing zone of ``center`` with hop radius ``r``.

    Peripheral nodes are the members exactly ``r`` hops away. When the
    component is too small to reach ``r`` hops, the outermost shell
    present stands in for them so that the zone can still bordercast.
    """
    if r < 1:
        raise ValueError(f"zone radius must be >= 1, got {r}")
    indptr, indices, weights = net.csr
    hops = kernels.bounded_bfs(indptr, indices, center, r)
    members = np.flatnonzero(hops >= 0)
    hop_vals = hops[members]
    hop_of = dict(zip(members.tolist(), hop_vals.tolist()))
    outer = int(hop_vals.max())
    peripheral = frozenset(members[hop_vals == outer].tolist()) if outer > 0 else frozenset()

    mask = np.zeros(net.n, dtype=np.uint8)
    mask[members] = 1
    _, parent = kernels.lex_dijkstra(indptr, indices, weights, center, mask)
    iarp = {}
    for v in hop_of:
        path = tuple(trace_path(parent, v))
        iarp[v] = (path_cost(net, path), path)
    return Zone(center=center, radius=r, hop_of=hop_of, peripheral=peripheral, iarp=iarp)


def build_zone_table(net: Network, r: int) -> dict[int, Zone]:
    return {u: build_zone(net, u, r) for u in range(net.n)}


@dataclass(frozen=True, eq=False)
class BordercastOverlay:
    """Directed overlay on which chromosomes live, for one destination."""

    destination: int
    n: int
    arcs: Mapping[tuple[int, int], float]
    zones: Mapping[int, Zone]
    max_edge_cost: float = 1

    def weight(self, u: int, v: int) -> Optional[float]:
        return self.arcs.get((u, v))

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return csr_from_arcs(self.n, [(u, v, w) for (u, v), w in self.arcs.items()])

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        indptr, indices, _ = self.csr
        return tuple(tuple(indices[indptr[u]:indptr[u + 1]].tolist()) for u in range(self.n))

    @cached_property
    def max_weight(self) -> float:
        return max(self.arcs.values(), default=0)

    def segment(self, u: int, v: int) -> Optional[tuple[int, ...]]:
        """Physical IARP path behind arc ``u -> v``, or None if there is no arc."""
        if (u, v) not in self.arcs:
            return None
        return self.zones[u].iarp[v][1]


def build_overlay(zone_table: Mapping[int, Zone], net: Network, destination: int) -> BordercastOverlay:
    if not 0 <= destination < net.n:
        raise ValueError(f"destination {destination} outside [0, {net.n})")
    arcs = {}
    for u in range(net.n):
        zone = zone_table[u]
        for p in zone.peripheral:
            arcs[u, p] = zone.iarp[p][0]
        if destination != u and destination in zone.hop_of:
            arcs[u, destination] = zone.iarp[destination][0]
    return BordercastOverlay(
        destination=destination,
        n=net.n,
        arcs=dict(sorted(arcs.items())),
        zones=zone_table,
        max_edge_cost=net.max_cost,
    )
