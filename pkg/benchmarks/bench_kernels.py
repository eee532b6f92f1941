"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 500] [--repeat 5]

Also times one full trial per backend, with every module rebound to the backend.
"""
import argparse
import timeit

import numpy as np

import zrpevo.experiment
import zrpevo.routes
import zrpevo.topology
import zrpevo.zrp
from zrpevo._backend import load_backend
from zrpevo.experiment import TrialConfig, run_trial
from zrpevo.ga import GaParams
from zrpevo.routes import random_route
from zrpevo.topology import TopologyParams, generate_random_network
from zrpevo.zrp import build_overlay, build_zone_table


def _workload(n, seed):
    net = generate_random_network(TopologyParams(n, 8.0, 1, 10, seed))
    ov = build_overlay(build_zone_table(net, 2), net, 0)
    rng = np.random.default_rng(seed)
    routes = [random_route(ov, int(s), 0, rng, 4 * n) for s in rng.integers(1, n, 200)]
    genes = np.fromiter((g for r in routes for g in r), dtype=np.int64)
    offsets = np.cumsum([0] + [len(r) for r in routes]).astype(np.int64)
    return net, ov, genes, offsets


def _cases(k, net, ov, genes, offsets):
    indptr, indices, weights = net.csr
    oindptr, oindices, oweights = ov.csr
    n = net.n
    allowed = np.ones(n, dtype=np.uint8)
    blocked = np.zeros(n, dtype=np.uint8)
    uniforms = np.random.default_rng(0).random(4 * n)
    return {
        "bounded_bfs r=2 (all sources)": lambda: [k.bounded_bfs(indptr, indices, s, 2) for s in range(n)],
        "lex_dijkstra (20 sources)": lambda: [k.lex_dijkstra(indptr, indices, weights, s, allowed)
                                              for s in range(20)],
        "loop_erased_walk (200 walks)": lambda: [k.loop_erased_walk(oindptr, oindices, s % (n - 1) + 1, 0,
                                                                    blocked, uniforms) for s in range(200)],
        "route_costs (200 routes)": lambda: k.route_costs(oindptr, oindices, oweights, genes, offsets, 1e6),
    }


def _bind(mod):
    for m in (zrpevo.topology, zrpevo.zrp, zrpevo.routes, zrpevo.experiment):
        m.kernels = mod


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    backends = {}
    for name in ("python", "cython"):
        try:
            backends[name] = load_backend(name)
        except ImportError:
            print(f"{name} backend unavailable; skipping")
    work = _workload(args.n, args.seed)

    print(f"n={args.n}, best of {args.repeat} (seconds)")
    print(f"{'kernel':32s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}")
    names = list(_cases(next(iter(backends.values())), *work))
    timings = {b: _cases(mod, *work) for b, mod in backends.items()}
    for name in names:
        t = {b: min(timeit.repeat(timings[b][name], number=1, repeat=args.repeat)) for b in backends}
        speed = f"{t['python'] / t['cython']:9.1f}x" if len(t) == 2 else ""
        print(f"{name:32s}" + "".join(f"{v:12.5f}" for v in t.values()) + speed)

    cfg = TrialConfig(TopologyParams(args.n, 8.0, 1, 10, args.seed), GaParams(max_generations=100),
                      trial_seed=args.seed)
    t = {}
    for b, mod in backends.items():
        _bind(mod)
        t[b] = min(timeit.repeat(lambda: run_trial(cfg), number=1, repeat=max(1, args.repeat // 2)))
    speed = f"{t['python'] / t['cython']:9.1f}x" if len(t) == 2 else ""
    print(f"{'full GA trial (<=100 gens)':32s}" + "".join(f"{v:12.5f}" for v in t.values()) + speed)


if __name__ == "__main__":
    main()
