"""Run records, convergence detection and initial populations shared by both engines."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .routes import Individual, PenaltyPolicy, Route, default_walk_budget, evaluate_many, random_route
from .zrp import BordercastOverlay


@dataclass(frozen=True)
class RunRecord:
    best_per_gen: tuple[float, ...]
    avg_per_gen: tuple[float, ...]
    best_route: Route
    best_fitness: float
    converged_at: Optional[int]
    generations_used: int


def detect_convergence(best_per_gen: Sequence[float], stall_window: int) -> Optional[int]:
    """First index ``g`` with ``best_per_gen`` constant on ``[g, g + stall_window)``."""
    if not best_per_gen:
        raise ValueError("empty fitness history")
    run_start = 0
    for i in range(len(best_per_gen)):
        if best_per_gen[i] != best_per_gen[run_start]:
            run_start = i
        if i - run_start + 1 >= stall_window:
            return run_start
    return None


def init_population(overlay: BordercastOverlay, source: int, destination: int, size: int,
                    rng: np.random.Generator, max_len: Optional[int] = None,
                    penalty: Optional[PenaltyPolicy] = None) -> list[Individual]:
    if size < 2:
        raise ValueError(f"population size must be >= 2, got {size}")
    max_len = max_len or default_walk_budget(overlay)
    penalty = penalty or PenaltyPolicy.for_overlay(overlay)
    routes = [random_route(overlay, source, destination, rng, max_len) for _ in range(size)]
    fits = evaluate_many(routes, overlay, penalty)
    return [Individual(r, float(f)) for r, f in zip(routes, fits)]


class History:
    """Best-so-far / population-average bookkeeping with stall-based termination."""

    def __init__(self, max_generations: int, stall_window: int):
        self.max_generations = max_generations
        self.stall_window = stall_window
        self.best: list[float] = []
        self.avg: list[float] = []
        self.best_route: Optional[Route] = None
        self._best = float("inf")
        self._since = 0

    def record(self, routes: Sequence[Route], fitness: np.ndarray) -> None:
        i = int(np.argmin(fitness))
        if fitness[i] < self._best:
            self._best = float(fitness[i])
            self.best_route = tuple(routes[i])
            self._since = len(self.best)
        self.best.append(self._best)
        self.avg.append(float(np.mean(fitness)))

    def done(self) -> bool:
        return (
            len(self.best) >= self.max_generations
            or len(self.best) - self._since >= self.stall_window
        )

    def finish(self) -> RunRecord:
        return RunRecord(
            best_per_gen=tuple(self.best),
            avg_per_gen=tuple(self.avg),
            best_route=self.best_route,
            best_fitness=self._best,
            converged_at=detect_convergence(self.best, self.stall_window),
            generations_used=len(self.best),
        )
