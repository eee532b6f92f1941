"""Estimation of distribution algorithms over variable-length routes.

Two model families:

* UMDA: a route-length marginal plus one categorical marginal per
  interior gene position, estimated from frequencies in the selected set.
* Gaussian: mean and standard deviation of the route length and of the
  node id found at each interior position; genes are sampled by rounding
  normal draws.

Both sample every interior position independently, so the model
probability of a gene tuple is the product of its marginals.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import accumulate
from typing import Literal, Optional, Sequence

import numpy as np

from .population import History, RunRecord, init_population
from .routes import Individual, PenaltyPolicy, Route, default_walk_budget, evaluate_many, loop_erase
from .zrp import BordercastOverlay

Variant = Literal["umda", "gaussian"]


@dataclass(frozen=True)
class EdaParams:
    population_size: int = 50
    selected_fraction: float = 0.5
    max_generations: int = 1000
    stall_window: int = 50
    variant: Variant = "umda"
    seed: int = 0
    max_len: Optional[int] = None
    std_ddof: int = 0

    def validate(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0.0 < self.selected_fraction <= 1.0:
            raise ValueError("selected_fraction must lie in (0, 1]")
        if self.max_generations < 1 or self.stall_window < 1:
            raise ValueError("max_generations and stall_window must be positive")
        if self.variant not in ("umda", "gaussian"):
            raise ValueError(f"unknown EDA variant {self.variant!r}")
        if self.std_ddof not in (0, 1):
            raise ValueError("std_ddof must be 0 or 1")
        if self.max_len is not None and self.max_len < 2:
            raise ValueError("max_len must be >= 2")


def _routes(selected) -> list[Route]:
    return [s.route if isinstance(s, Individual) else tuple(s) for s in selected]


def truncation_select(population: Sequence[Individual], fraction: float) -> list[Individual]:
    """The ``ceil(fraction * M)`` fittest individuals, ties broken by index."""
    if not population:
        raise ValueError("empty population")
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    order = _truncation_order([ind.fitness for ind in population], fraction)
    return [population[i] for i in order]


def _truncation_order(fitness: Sequence[float], fraction: float) -> list[int]:
    keep = math.ceil(fraction * len(fitness) - 1e-9)
    return sorted(range(len(fitness)), key=lambda i: (fitness[i], i))[:keep]


# -- UMDA -------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteModel:
    """``position_marginals[k]`` is the marginal of gene index ``k + 1``."""

    length_marginal: dict[int, float]
    position_marginals: tuple[dict[int, float], ...]

    def marginal(self, gene_index: int) -> Optional[dict[int, float]]:
        k = gene_index - 1
        if 0 <= k < len(self.position_marginals):
            return self.position_marginals[k]
        return None

    @cached_property
    def _tables(self):
        def table(marg):
            keys = sorted(marg)
            return keys, list(accumulate(marg[k] for k in keys))
        return table(self.length_marginal), [table(m) for m in self.position_marginals]

    def tuple_probability(self, genes: Sequence[int], n: int) -> float:
        """Probability of drawing this raw gene tuple (before loop erasure).

        Interior positions past the deepest marginal are uniform over ``n`` nodes.
        """
        p = self.length_marginal.get(len(genes), 0.0)
        for i in range(1, len(genes) - 1):
            marg = self.marginal(i)
            p *= (1.0 / n) if marg is None else marg.get(genes[i], 0.0)
        return p


def _pick(table, u: float) -> int:
    keys, cum = table
    return keys[min(bisect_right(cum, u * cum[-1]), len(keys) - 1)]


def estimate_umda(selected) -> DiscreteModel:
    routes = _routes(selected)
    if not routes:
        raise ValueError("cannot estimate a model from an empty selection")
    lengths = Counter(len(r) for r in routes)
    total = len(routes)
    length_marginal = {L: c / total for L, c in sorted(lengths.items())}
    depth = max(lengths) - 2
    marginals = []
    for i in range(1, depth + 1):
        column = Counter(r[i] for r in routes if len(r) - 1 > i)
        m = sum(column.values())
        marginals.append({v: c / m for v, c in sorted(column.items())})
    return DiscreteModel(length_marginal, tuple(marginals))


def sample_umda_raw(model: DiscreteModel, n: int, source: int, destination: int,
                    rng: np.random.Generator) -> list[int]:
    """One gene tuple from the model, before loop erasure."""
    length_table, pos_tables = model._tables
    L = _pick(length_table, rng.random())
    us = rng.random(max(L - 2, 0)).tolist()
    genes = [source]
    for i, u in enumerate(us, start=1):
        if i - 1 < len(pos_tables):
            genes.append(_pick(pos_tables[i - 1], u))
        else:
            genes.append(min(int(u * n), n - 1))
    genes.append(destination)
    return genes


def sample_umda(model: DiscreteModel, overlay: BordercastOverlay, source: int, destination: int,
                rng: np.random.Generator) -> Route:
    return loop_erase(sample_umda_raw(model, overlay.n, source, destination, rng))


# -- Gaussian ---------------------------------------------------------------

@dataclass(frozen=True)
class GaussianModel:
    """``position_stats[k]`` is ``(mean, std)`` of the node id at gene index ``k + 1``."""

    length_mean: float
    length_std: float
    position_stats: tuple[tuple[float, float], ...]


def _mean_std(values: Sequence[float], ddof: int) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    std = float(arr.std(ddof=ddof)) if len(arr) > ddof else 0.0
    return float(arr.mean()), std


def estimate_gaussian(selected, ddof: int = 0) -> GaussianModel:
    """Per-position mean/std of node ids; ``ddof=0`` is the population std."""
    routes = _routes(selected)
    if not routes:
        raise ValueError("cannot estimate a model from an empty selection")
    length_mean, length_std = _mean_std([len(r) for r in routes], ddof)
    depth = max(len(r) for r in routes) - 2
    stats = tuple(
        _mean_std([r[i] for r in routes if len(r) - 1 > i], ddof) for i in range(1, depth + 1)
    )
    return GaussianModel(length_mean, length_std, stats)


def _round_clamp(x: float, lo: int, hi: int) -> int:
    return int(min(max(math.floor(x + 0.5), lo), hi))


def sample_gaussian(model: GaussianModel, overlay: BordercastOverlay, source: int, destination: int,
                    rng: np.random.Generator, max_len: Optional[int] = None) -> Route:
    n = overlay.n
    max_len = max_len or default_walk_budget(overlay)
    L = _round_clamp(model.length_mean + model.length_std * rng.standard_normal(), 2, max_len)
    zs = rng.standard_normal(L - 2).tolist()
    genes = [source]
    for i, z in enumerate(zs, start=1):
        if i - 1 < len(model.position_stats):
            mean, std = model.position_stats[i - 1]
            genes.append(_round_clamp(mean + std * z, 0, n - 1))
        else:
            genes.append(int(rng.integers(n)))
    genes.append(destination)
    return loop_erase(genes)


# -- driver -----------------------------------------------------------------

def run_eda(overlay: BordercastOverlay, source: int, destination: int, params: EdaParams,
            penalty: Optional[PenaltyPolicy] = None) -> RunRecord:
    if source == destination:
        raise ValueError("source and destination must differ")
    params.validate()
    rng = np.random.default_rng(params.seed)
    penalty = penalty or PenaltyPolicy.for_overlay(overlay)
    max_len = params.max_len or default_walk_budget(overlay)
    M = params.population_size

    pop = init_population(overlay, source, destination, M, rng, max_len, penalty)
    routes = [ind.route for ind in pop]
    fitness = np.array([ind.fitness for ind in pop])
    hist = History(params.max_generations, params.stall_window)
    hist.record(routes, fitness)

    while not hist.done():
        chosen = [routes[i] for i in _truncation_order(fitness.tolist(), params.selected_fraction)]
        if params.variant == "umda":
            model = estimate_umda(chosen)
            routes = [sample_umda(model, overlay, source, destination, rng) for _ in range(M)]
        else:
            model = estimate_gaussian(chosen, params.std_ddof)
            routes = [sample_gaussian(model, overlay, source, destination, rng, max_len)
                      for _ in range(M)]
        fitness = evaluate_many(routes, overlay, penalty)
        hist.record(routes, fitness)
    return hist.finish()
