"""Variable-length route chromosomes over a bordercast overlay.

A route is a tuple of node ids from source to destination with no
repeated node. Its fitness is the sum of overlay arc weights along it; a
missing arc costs a fixed penalty instead (minimised).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._backend import kernels
from .zrp import BordercastOverlay

Route = tuple[int, ...]


@dataclass(frozen=True)
class Individual:
    route: Route
    fitness: float


@dataclass(frozen=True)
class PenaltyPolicy:
    per_missing_link: float

    @classmethod
    def for_overlay(cls, overlay: BordercastOverlay) -> "PenaltyPolicy":
        """Smallest integer penalty that keeps every valid route ahead of every invalid one.

        A simple route has at most ``n - 1`` arcs, so ``(n - 1) * max_weight``
        bounds any valid fitness; the ``n * cost_max`` floor is kept too.
        """
        n = overlay.n
        bound = max(n * overlay.max_edge_cost, (n - 1) * overlay.max_weight)
        return cls(per_missing_link=float(bound) + 1.0)


def is_valid_route(route: Sequence[int], source: int, destination: int) -> bool:
    return (
        len(route) >= 2
        and route[0] == source
        and route[-1] == destination
        and len(set(route)) == len(route)
    )


def loop_erase(seq: Sequence[int]) -> Route:
    """Chronological loop erasure: revisiting a node cuts back to its first visit."""
    out: list[int] = []
    pos: dict[int, int] = {}
    for v in seq:
        if v in pos:
            cut = pos[v]
            for w in out[cut + 1:]:
                del pos[w]
            del out[cut + 1:]
        else:
            pos[v] = len(out)
            out.append(v)
    return tuple(out)


def evaluate_fitness(route: Sequence[int], overlay: BordercastOverlay, penalty: PenaltyPolicy) -> float:
    total = 0.0
    for a, b in zip(route, route[1:]):
        w = overlay.arcs.get((a, b))
        total += penalty.per_missing_link if w is None else w
    return total


def evaluate_many(routes: Sequence[Route], overlay: BordercastOverlay, penalty: PenaltyPolicy) -> np.ndarray:
    """Vectorised :func:`evaluate_fitness` over a population."""
    if not routes:
        return np.empty(0)
    lengths = np.fromiter((len(r) for r in routes), dtype=np.int64, count=len(routes))
    offsets = np.zeros(len(routes) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    genes = np.fromiter((g for r in routes for g in r), dtype=np.int64, count=int(offsets[-1]))
    indptr, indices, weights = overlay.csr
    return kernels.route_costs(indptr, indices, weights, genes, offsets, float(penalty.per_missing_link))


def default_walk_budget(overlay: BordercastOverlay) -> int:
    """Move budget for random walks when none is configured."""
    return 4 * overlay.n


def walk_to(overlay: BordercastOverlay, start: int, destination: int, rng: np.random.Generator,
            max_len: int, blocked: Optional[np.ndarray] = None) -> list[int]:
    """Loop-erased random walk from ``start``; destination force-appended if not reached."""
    if blocked is None:
        blocked = np.zeros(overlay.n, dtype=np.uint8)
    indptr, indices, _ = overlay.csr
    path = kernels.loop_erased_walk(indptr, indices, start, destination, blocked, rng.random(max_len))
    path = path.tolist()
    if path[-1] != destination:
        path.append(destination)
    return path


def random_route(overlay: BordercastOverlay, source: int, destination: int,
                 rng: np.random.Generator, max_len: int) -> Route:
    """Random route built by a loop-erased walk of at most ``max_len`` moves."""
    if source == destination:
        raise ValueError("source and destination must differ")
    if max_len < 2:
        raise ValueError(f"max_len must be >= 2, got {max_len}")
    return tuple(walk_to(overlay, source, destination, rng, max_len))


def decode_physical_path(route: Sequence[int], overlay: BordercastOverlay) -> Optional[list[int]]:
    """Concatenate the IARP segments behind each arc; None if any arc is missing."""
    path = [route[0]]
    for a, b in zip(route, route[1:]):
        seg = overlay.segment(a, b)
        if seg is None:
            return None
        path.extend(seg[1:])
    return path
