"""Seeded GA-vs-EDA trials, paired size sweeps and their CSV tables."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np
from scipy import stats

from .eda import EdaParams, run_eda
from .ga import GaParams, run_ga
from .population import RunRecord, detect_convergence
from .routes import PenaltyPolicy, Route
from .topology import Network, TopologyParams, generate_random_network
from .zrp import BordercastOverlay, build_overlay, build_zone_table
from ._backend import kernels

__all__ = [
    "ExperimentError", "TrialConfig", "TrialResult", "SummaryRow", "SweepSummary",
    "detect_convergence", "oracle_shortest", "choose_endpoints", "engine_tag",
    "run_trial", "sweep", "trend_report", "trials_csv", "fig3_csv", "fig4_csv", "fig5_csv",
]

EngineParams = Union[GaParams, EdaParams]


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrialConfig:
    topology: Union[TopologyParams, Network]
    engine: EngineParams
    r: int = 2
    source: Optional[int] = None
    destination: Optional[int] = None
    trial_seed: int = 0

    def validate(self) -> None:
        if self.r < 1:
            raise ExperimentError(f"zone radius must be >= 1, got {self.r}")
        if (self.source is None) != (self.destination is None):
            raise ExperimentError("give both source and destination, or neither")
        if self.source is not None and self.source == self.destination:
            raise ExperimentError("source and destination must differ")


@dataclass(frozen=True)
class TrialResult:
    config: TrialConfig
    engine: str
    n: int
    source: int
    destination: int
    run: RunRecord
    oracle_cost: Optional[float]
    oracle_route: Optional[Route]

    @property
    def oracle_gap(self) -> Optional[float]:
        if self.oracle_cost is None:
            return None
        return self.run.best_fitness - self.oracle_cost


def engine_tag(params: EngineParams) -> str:
    if isinstance(params, GaParams):
        return "ga"
    return "eda-umda" if params.variant == "umda" else "eda-gauss"


def oracle_shortest(overlay: BordercastOverlay, source: int, destination: int
                    ) -> Optional[tuple[float, Route]]:
    """Dijkstra over overlay arcs, lexicographically smallest among ties."""
    if source == destination:
        raise ValueError("source and destination must differ")
    indptr, indices, weights = overlay.csr
    mask = np.ones(overlay.n, dtype=np.uint8)
    dist, parent = kernels.lex_dijkstra(indptr, indices, weights, source, mask)
    if not np.isfinite(dist[destination]):
        return None
    path = []
    v = destination
    while v != -1:
        path.append(int(v))
        v = parent[v]
    route = tuple(reversed(path))
    return sum(overlay.arcs[a, b] for a, b in zip(route, route[1:])), route


def choose_endpoints(net: Network, rng: np.random.Generator) -> tuple[int, int]:
    """Uniform ordered pair of distinct nodes lying in one connected component."""
    comps = [c for c in net.components() if len(c) >= 2]
    if not comps:
        raise ExperimentError(f"no connected pair of nodes in a {net.n}-node network")
    pairs = np.array([len(c) * (len(c) - 1) for c in comps], dtype=float)
    comp = comps[int(rng.choice(len(comps), p=pairs / pairs.sum()))]
    s, d = rng.choice(len(comp), size=2, replace=False)
    return comp[int(s)], comp[int(d)]


@dataclass(frozen=True)
class _Instance:
    net: Network
    source: int
    destination: int
    overlay: BordercastOverlay
    penalty: PenaltyPolicy
    oracle: Optional[tuple[float, Route]]


def _prepare(config: TrialConfig) -> _Instance:
    config.validate()
    if isinstance(config.topology, Network):
        net = config.topology
    else:
        net = generate_random_network(config.topology)
    if config.source is None:
        rng = np.random.default_rng(np.random.SeedSequence([config.trial_seed, 1]))
        source, destination = choose_endpoints(net, rng)
    else:
        source, destination = config.source, config.destination
        if not (0 <= source < net.n and 0 <= destination < net.n):
            raise ExperimentError(f"endpoints ({source}, {destination}) outside [0, {net.n})")
    overlay = build_overlay(build_zone_table(net, config.r), net, destination)
    return _Instance(
        net=net,
        source=source,
        destination=destination,
        overlay=overlay,
        penalty=PenaltyPolicy.for_overlay(overlay),
        oracle=oracle_shortest(overlay, source, destination),
    )


def _execute(inst: _Instance, config: TrialConfig) -> TrialResult:
    engine = config.engine
    if isinstance(engine, GaParams):
        run = run_ga(inst.overlay, inst.source, inst.destination, engine, inst.penalty)
    else:
        run = run_eda(inst.overlay, inst.source, inst.destination, engine, inst.penalty)
    return TrialResult(
        config=config,
        engine=engine_tag(engine),
        n=inst.net.n,
        source=inst.source,
        destination=inst.destination,
        run=run,
        oracle_cost=None if inst.oracle is None else inst.oracle[0],
        oracle_route=None if inst.oracle is None else inst.oracle[1],
    )


def run_trial(config: TrialConfig) -> TrialResult:
    """Build the instance described by ``config``, run its engine, attach the oracle."""
    return _execute(_prepare(config), config)


# -- sweeps -----------------------------------------------------------------

@dataclass(frozen=True)
class SummaryRow:
    n: int
    engine: str
    repeats: int
    mean_generations: float
    std_generations: float
    converged_count: int
    mean_best: float
    std_best: float
    mean_avg_curve: tuple[float, ...]


@dataclass(frozen=True)
class SweepSummary:
    sizes: tuple[int, ...]
    engines: tuple[str, ...]
    repeats: int
    rows: tuple[SummaryRow, ...]
    trials: tuple[TrialResult, ...]

    def row(self, n: int, engine: str) -> SummaryRow:
        for row in self.rows:
            if row.n == n and row.engine == engine:
                return row
        raise KeyError((n, engine))

    def trials_for(self, n: int, engine: str) -> list[TrialResult]:
        return [t for t in self.trials if t.n == n and t.engine == engine]


def cell_seed(base_seed: int, n: int, repeat: int) -> int:
    """Seed for one (size, repeat) cell, shared by every engine in that cell."""
    ss = np.random.SeedSequence([base_seed, n, repeat])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _run_cell(args) -> list[TrialResult]:
    base, engines, n, rep = args
    seed = cell_seed(base.trial_seed, n, rep)
    topo = base.topology
    if isinstance(topo, TopologyParams):
        topo = replace(topo, n=n, seed=seed)
    cell = replace(base, topology=topo, trial_seed=seed)
    inst = _prepare(cell)
    return [_execute(inst, replace(cell, engine=replace(e, seed=seed))) for e in engines]


def sweep(sizes: Sequence[int], repeats: int, base: TrialConfig,
          engines: Optional[Sequence[EngineParams]] = None, workers: int = 1) -> SweepSummary:
    """Paired sweep: per (size, repeat) every engine sees the same network,
    endpoints and seed. Output order is (size, engine, repeat) whatever ``workers`` is.
    """
    if repeats < 1:
        raise ExperimentError("repeats must be >= 1")
    engines = list(engines) if engines else [base.engine]
    tags = [engine_tag(e) for e in engines]
    if len(set(tags)) != len(tags):
        raise ExperimentError(f"duplicate engines in {tags}")
    jobs = [(base, engines, n, rep) for n in sizes for rep in range(repeats)]
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                cells = list(pool.map(_run_cell, jobs))
        else:
            cells = [_run_cell(job) for job in jobs]
    except ExperimentError as exc:
        raise ExperimentError(f"sweep failed: {exc}") from exc

    by_key = {}
    for (_, _, n, rep), results in zip(jobs, cells):
        for res in results:
            by_key[n, res.engine, rep] = res
    trials, rows = [], []
    for n in sizes:
        horizon = max(by_key[n, t, rep].run.generations_used for t in tags for rep in range(repeats))
        for tag in tags:
            group = [by_key[n, tag, rep] for rep in range(repeats)]
            trials.extend(group)
            rows.append(_summarise(n, tag, group, horizon))
    return SweepSummary(tuple(sizes), tuple(tags), repeats, tuple(rows), tuple(trials))


def _pad(curve: Sequence[float], length: int) -> list[float]:
    return list(curve) + [curve[-1]] * (length - len(curve))


def _summarise(n: int, tag: str, group: Sequence[TrialResult], horizon: int) -> SummaryRow:
    gens = np.array([t.run.generations_used for t in group], dtype=float)
    best = np.array([t.run.best_fitness for t in group], dtype=float)
    curves = np.array([_pad(t.run.avg_per_gen, horizon) for t in group])
    return SummaryRow(
        n=n,
        engine=tag,
        repeats=len(group),
        mean_generations=float(gens.mean()),
        std_generations=float(gens.std()),
        converged_count=sum(t.run.converged_at is not None for t in group),
        mean_best=float(best.mean()),
        std_best=float(best.std()),
        mean_avg_curve=tuple(curves.mean(axis=0).tolist()),
    )


def trend_report(summary: SweepSummary, baseline: str = "ga", challenger: str = "eda-umda",
                 confidence: float = 0.95) -> list[dict]:
    """Paired difference ``challenger - baseline`` in generations and best cost per size,
    with a t-interval over repeats."""
    out = []
    for n in summary.sizes:
        a = {t.config.trial_seed: t for t in summary.trials_for(n, baseline)}
        b = {t.config.trial_seed: t for t in summary.trials_for(n, challenger)}
        keys = sorted(a)
        entry = {"n": n}
        for metric, get in (("generations", lambda t: t.run.generations_used),
                            ("best", lambda t: t.run.best_fitness)):
            diff = np.array([get(b[k]) - get(a[k]) for k in keys], dtype=float)
            mean = float(diff.mean())
            if len(diff) > 1 and diff.std(ddof=1) > 0:
                half = float(stats.t.ppf(0.5 + confidence / 2, len(diff) - 1)
                             * diff.std(ddof=1) / math.sqrt(len(diff)))
            else:
                half = 0.0
            entry[metric] = {"mean_diff": mean, "ci_low": mean - half, "ci_high": mean + half}
        out.append(entry)
    return out


# -- CSV tables -------------------------------------------------------------

def fmt(x) -> str:
    """Integral values print without a decimal point; others round-trip exactly."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def _table(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


TRIALS_HEADER = ("n", "engine", "repeat", "seed", "source", "destination", "generations",
                 "best", "oracle", "oracle_gap", "converged_at")


def trials_csv(summary: SweepSummary) -> str:
    rows = []
    for n in summary.sizes:
        for tag in summary.engines:
            for rep, t in enumerate(summary.trials_for(n, tag)):
                rows.append((n, tag, rep, t.config.trial_seed, t.source, t.destination,
                             t.run.generations_used, t.run.best_fitness, t.oracle_cost,
                             t.oracle_gap, t.run.converged_at))
    return _table(TRIALS_HEADER, rows)


def fig3_csv(summary: SweepSummary) -> str:
    return _table(("n", "engine", "mean_generations", "std_generations", "converged_count"),
                  [(r.n, r.engine, r.mean_generations, r.std_generations, r.converged_count)
                   for r in summary.rows])


def fig4_csv(summary: SweepSummary) -> str:
    return _table(("n", "engine", "mean_best", "std_best"),
                  [(r.n, r.engine, r.mean_best, r.std_best) for r in summary.rows])


def fig5_csv(summary: SweepSummary, n: Optional[int] = None) -> str:
    n = summary.sizes[-1] if n is None else n
    if n not in summary.sizes:
        raise ExperimentError(f"size {n} not in sweep sizes {list(summary.sizes)}")
    rows = []
    for tag in summary.engines:
        for g, v in enumerate(summary.row(n, tag).mean_avg_curve):
            rows.append((g, tag, v))
    return _table(("generation", "engine", "mean_avg_fitness"), rows)


def generations_csv(run: RunRecord) -> str:
    return _table(("generation", "best_fitness", "avg_fitness"),
                  [(g, b, a) for g, (b, a) in enumerate(zip(run.best_per_gen, run.avg_per_gen))])
