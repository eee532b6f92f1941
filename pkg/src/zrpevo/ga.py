"""Generational genetic algorithm over route chromosomes.

Binary tournament selection, one-point route crossover, suffix-regenerating
mutation and single-individual elitism.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .population import History, RunRecord, init_population
from .routes import (
    Individual, PenaltyPolicy, Route, default_walk_budget, evaluate_many, loop_erase, walk_to,
)
from .zrp import BordercastOverlay


@dataclass(frozen=True)
class GaParams:
    population_size: int = 50
    crossover_prob: float = 0.9
    mutation_prob: float = 0.9
    max_generations: int = 1000
    stall_window: int = 50
    tournament_size: int = 2
    seed: int = 0
    max_len: Optional[int] = None

    def validate(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        for name in ("crossover_prob", "mutation_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.max_generations < 1 or self.stall_window < 1:
            raise ValueError("max_generations and stall_window must be positive")
        if self.tournament_size < 2:
            raise ValueError("tournament_size must be >= 2")
        if self.max_len is not None and self.max_len < 2:
            raise ValueError("max_len must be >= 2")


def _winner(fitness: Sequence[float], draws) -> int:
    return min(draws, key=lambda j: (fitness[j], j))


def tournament_select(population: Sequence[Individual], k: int, rng: np.random.Generator) -> Individual:
    """Best of ``k`` uniform draws with replacement; ties go to the lower index."""
    draws = rng.integers(0, len(population), size=k).tolist()
    return population[_winner([ind.fitness for ind in population], draws)]


def one_point_crossover(p1: Route, p2: Route, rng: np.random.Generator) -> Route:
    """Cut both parents at a shared intermediate node and join p1's head to p2's tail.

    Without a shared node, independent interior cut points are used and the
    junction may be an invalid link (left to the penalty).
    """
    common = sorted(set(p1[1:-1]).intersection(p2[1:-1]))
    if common:
        cut = common[rng.integers(len(common))]
        child = p1[:p1.index(cut)] + p2[p2.index(cut):]
    else:
        a = int(rng.integers(1, len(p1)))
        b = int(rng.integers(1, len(p2)))
        child = p1[:a] + p2[b:]
    return loop_erase(child)


def mutate(route: Route, overlay: BordercastOverlay, rng: np.random.Generator, max_len: int) -> Route:
    """Keep ``route[:m+1]`` and regrow the rest by a random walk that avoids the kept prefix."""
    if len(route) <= 2:
        return route
    m = int(rng.integers(1, len(route) - 1))
    blocked = np.zeros(overlay.n, dtype=np.uint8)
    blocked[list(route[:m])] = 1
    tail = walk_to(overlay, route[m], route[-1], rng, max_len, blocked)
    return tuple(route[:m]) + tuple(tail)


def run_ga(overlay: BordercastOverlay, source: int, destination: int, params: GaParams,
           penalty: Optional[PenaltyPolicy] = None) -> RunRecord:
    if source == destination:
        raise ValueError("source and destination must differ")
    params.validate()
    rng = np.random.default_rng(params.seed)
    penalty = penalty or PenaltyPolicy.for_overlay(overlay)
    max_len = params.max_len or default_walk_budget(overlay)
    M, k = params.population_size, params.tournament_size

    pop = init_population(overlay, source, destination, M, rng, max_len, penalty)
    routes = [ind.route for ind in pop]
    fitness = np.array([ind.fitness for ind in pop])
    hist = History(params.max_generations, params.stall_window)
    hist.record(routes, fitness)

    while not hist.done():
        fit = fitness.tolist()
        draws = rng.integers(0, M, size=(M - 1, 2, k)).tolist()
        coins = rng.random((M - 1, 2)).tolist()
        children = [routes[_winner(fit, range(M))]]
        for (d1, d2), (c_cross, c_mut) in zip(draws, coins):
            p1 = routes[_winner(fit, d1)]
            if c_cross < params.crossover_prob:
                child = one_point_crossover(p1, routes[_winner(fit, d2)], rng)
            else:
                child = p1
            if c_mut < params.mutation_prob:
                child = mutate(child, overlay, rng, max_len)
            children.append(child)
        routes = children
        fitness = evaluate_many(routes, overlay, penalty)
        hist.record(routes, fitness)
    return hist.finish()
