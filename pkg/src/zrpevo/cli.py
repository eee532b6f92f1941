"""Command-line entry point: ``zrpevo {gen-net,zones,run,sweep}``.

Exit codes: 0 success, 1 internal error, 2 usage/validation, 3 constraint
violation (unreachable destination with ``--require-reachable``, or no
connected endpoint pair).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .eda import EdaParams
from .experiment import (
    ExperimentError, TrialConfig, fig3_csv, fig4_csv, fig5_csv, fmt, generations_csv,
    run_trial, sweep, trials_csv,
)
from .ga import GaParams
from .topology import (
    TopologyError, TopologyParams, format_edge_list, generate_random_network, load_network,
)
from .zrp import build_zone_table

ENGINES = ("ga", "eda-umda", "eda-gauss")


class UsageError(Exception):
    pass


def _uint64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed {v} is not a 64-bit unsigned integer")
    return v


def _sizes(text):
    try:
        if ":" in text:
            lo, hi, step = (int(p) for p in text.split(":"))
            if step < 1:
                raise ValueError
            return list(range(lo, hi + 1, step))
        return [int(p) for p in text.split(",") if p]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}; use A:B:STEP or A,B,C")


def _add_topology(p, n_required=False):
    p.add_argument("--n", type=int, required=n_required, help="node count")
    p.add_argument("--avg-degree", type=float, default=8.0)
    p.add_argument("--cost-min", type=int, default=1)
    p.add_argument("--cost-max", type=int, default=10)


def _add_engine(p):
    p.add_argument("--pop", type=int, help="population size (default 50)")
    p.add_argument("--sel-frac", type=float, help="EDA selected fraction (default 0.5)")
    p.add_argument("--pc", type=float, help="GA crossover probability (default 0.9)")
    p.add_argument("--pm", type=float, help="GA mutation probability (default 0.9)")
    p.add_argument("--max-gen", type=int, help="generation cap (default 1000)")
    p.add_argument("--stall", type=int, help="convergence window (default 50)")
    p.add_argument("--tournament", type=int, help="GA tournament size (default 2)")
    p.add_argument("--max-len", type=int, help="random-walk move budget (default 4n)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zrpevo", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file whose keys mirror the flags; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-net", help="write a random geometric network as an edge list")
    _add_topology(p)
    p.add_argument("--seed", type=_uint64, default=0)
    p.add_argument("--out", default="-")

    p = sub.add_parser("zones", help="dump zone members and peripheral nodes")
    p.add_argument("--net", help="edge-list file")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--out", default="-")

    p = sub.add_parser("run", help="run one engine on one instance")
    p.add_argument("--net", help="edge-list file (otherwise generated from --n ...)")
    _add_topology(p)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--src", type=int)
    p.add_argument("--dst", type=int)
    p.add_argument("--engine", choices=ENGINES, default="ga")
    _add_engine(p)
    p.add_argument("--seed", type=_uint64, default=0)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--require-reachable", action="store_true")

    p = sub.add_parser("sweep", help="paired size sweep; writes fig3/fig4/fig5/trials CSVs")
    p.add_argument("--sizes", type=_sizes, default=_sizes("100:1000:100"))
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--engines", default="ga,eda-umda")
    _add_topology(p)
    p.add_argument("--r", type=int, default=2)
    _add_engine(p)
    p.add_argument("--seed", type=_uint64, default=0)
    p.add_argument("--fig5-size", type=int, help="network size for fig5.csv (default largest)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        data = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}")
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    cmd = next((a for a in argv if not a.startswith("-") and a in _subparsers(parser)), None)
    if cmd is None:
        return
    sp = _subparsers(parser)[cmd]
    dests = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest not in dests or dest == "help":
            raise UsageError(f"unknown config key {key!r} for {cmd}")
        action = dests[dest]
        if action.type is not None and isinstance(value, str):
            value = action.type(value)
        defaults[dest] = value
    sp.set_defaults(**defaults)
    for dest in defaults:
        dests[dest].required = False


def _subparsers(parser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices
    return {}


def _engine_params(args, seed):
    def pick(**kw):
        return {k: v for k, v in kw.items() if v is not None}

    common = pick(population_size=args.pop, max_generations=args.max_gen,
                  stall_window=args.stall, max_len=args.max_len)
    engines = []
    for tag in args.engines:
        if tag == "ga":
            p = GaParams(seed=seed, **common, **pick(crossover_prob=args.pc, mutation_prob=args.pm,
                                                      tournament_size=args.tournament))
        else:
            p = EdaParams(seed=seed, variant="umda" if tag == "eda-umda" else "gaussian",
                          **common, **pick(selected_fraction=args.sel_frac))
        p.validate()
        engines.append(p)
    return engines


def _topology(args, seed):
    if args.n is None:
        raise UsageError("--n is required")
    params = TopologyParams(args.n, args.avg_degree, args.cost_min, args.cost_max, seed)
    params.validate()
    return params


def _read_net(path):
    if not path:
        raise UsageError("--net is required")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    return load_network(text)


def _emit(text, out):
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_gen_net(args):
    net = generate_random_network(_topology(args, args.seed))
    _emit(format_edge_list(net), args.out)
    return 0


def cmd_zones(args):
    if args.r < 1:
        raise UsageError("--r must be >= 1")
    net = _read_net(args.net)
    lines = []
    for u, zone in build_zone_table(net, args.r).items():
        members = ",".join(map(str, sorted(zone.members)))
        peripheral = ",".join(map(str, sorted(zone.peripheral)))
        lines.append(f"{u} | {members} | {peripheral}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_run(args):
    args.engines = [args.engine]
    engine = _engine_params(args, args.seed)[0]
    topology = _read_net(args.net) if args.net else _topology(args, args.seed)
    config = TrialConfig(topology=topology, engine=engine, r=args.r, source=args.src,
                         destination=args.dst, trial_seed=args.seed)
    try:
        config.validate()
    except ExperimentError as exc:
        raise UsageError(str(exc))
    n = topology.n
    for flag, v in (("--src", args.src), ("--dst", args.dst)):
        if v is not None and not 0 <= v < n:
            raise UsageError(f"{flag} {v} outside [0, {n})")
    result = run_trial(config)
    if result.oracle_cost is None and args.require_reachable:
        print(f"destination {result.destination} unreachable from {result.source}", file=sys.stderr)
        return 3
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "generations.csv").write_text(generations_csv(result.run))
    run = result.run
    print(",".join([result.engine, fmt(result.n), fmt(args.r), fmt(args.seed),
                    fmt(run.generations_used), fmt(run.best_fitness), fmt(result.oracle_cost),
                    fmt(run.converged_at)]))
    return 0


def cmd_sweep(args):
    args.engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    bad = [e for e in args.engines if e not in ENGINES]
    if bad or not args.engines:
        raise UsageError(f"unknown engines {bad}; choose from {','.join(ENGINES)}")
    if args.repeats < 1 or not args.sizes:
        raise UsageError("need --repeats >= 1 and a non-empty --sizes")
    if args.r < 1:
        raise UsageError("--r must be >= 1")
    engines = _engine_params(args, args.seed)
    for n in args.sizes:
        TopologyParams(n, args.avg_degree, args.cost_min, args.cost_max, args.seed).validate()
    base = TrialConfig(
        topology=TopologyParams(args.sizes[0], args.avg_degree, args.cost_min, args.cost_max, args.seed),
        engine=engines[0], r=args.r, trial_seed=args.seed,
    )
    fig5 = args.fig5_size if args.fig5_size is not None else args.sizes[-1]
    if fig5 not in args.sizes:
        raise UsageError(f"--fig5-size {fig5} is not among --sizes")
    summary = sweep(args.sizes, args.repeats, base, engines, workers=args.workers)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tables = {
        "fig3.csv": fig3_csv(summary),
        "fig4.csv": fig4_csv(summary),
        "fig5.csv": fig5_csv(summary, fig5),
        "trials.csv": trials_csv(summary),
    }
    for name, text in tables.items():
        (out / name).write_text(text)
        print(out / name)
    return 0


COMMANDS = {"gen-net": cmd_gen_net, "zones": cmd_zones, "run": cmd_run, "sweep": cmd_sweep}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    except (UsageError, TopologyError, ValueError, argparse.ArgumentTypeError) as exc:
        print(f"zrpevo: error: {exc}", file=sys.stderr)
        return 2
    except ExperimentError as exc:
        print(f"zrpevo: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001
        print(f"zrpevo: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
