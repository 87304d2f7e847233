"""Command-line entry point: ``meshrefine <verb> ...``.

Exit codes: 0 success, 1 configuration/input error, 2 partial failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import fig1, metrics
from .experiments import SweepConfig, run_sweep, write_outputs
from .mra import refine_detailed
from .routing import Method, PathSet, RoutingConfig, default_k, path_is_valid, route
from .scheduler import SimConfig, simulate_tdma
from .topology import GenerationConfig, GenerationError, Network, NetworkFormatError, audit, generate_network

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


def _load_net(path: str) -> Network:
    with open(path) as fh:
        return Network.from_json(fh.read())


def _load_pathsets(path: str) -> list[PathSet]:
    with open(path) as fh:
        doc = json.load(fh)
    docs = doc if isinstance(doc, list) else [doc]
    return [PathSet.from_dict(d) for d in docs]


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sim_config(args) -> SimConfig:
    return SimConfig(total_slots=args.slots, warmup_slots=args.warmup,
                     queue_cap=args.queue_cap, slot_seconds=args.slot_seconds)


def cmd_gen_net(args) -> int:
    net = generate_network(GenerationConfig(args.n, args.delta, seed=args.seed, side=args.side,
                                            max_attempts=args.max_attempts))
    _emit(net.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_route(args) -> int:
    net = _load_net(args.net)
    method = Method(args.method)
    k = args.k if args.k is not None else default_k(method, net.delta)
    ps = route(net, args.origin, args.dest, RoutingConfig(method, k))
    _emit(ps.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_refine(args) -> int:
    net = _load_net(args.net)
    out = []
    for ps in _load_pathsets(args.paths):
        method = Method(args.method or ps.method or Method.SPA.value)
        rc = RoutingConfig(method, ps.k_max or default_k(method, net.delta))
        res = refine_detailed(net, ps, lambda a, b: route(net, a, b, rc)) if len(ps) else None
        if res is None:
            out.append(ps.to_dict())
            continue
        if args.dump_graph and res.graph is not None:
            sys.stderr.write(res.graph.dump())
        out.append(res.paths.to_dict())
    _emit(json.dumps(out if len(out) > 1 else out[0]) + "\n", args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    net = _load_net(args.net)
    sets = _load_pathsets(args.paths)
    cfg = _sim_config(args)
    trace = open(args.trace, "w") if args.trace else None
    try:
        stats = simulate_tdma(net, sets, cfg, trace=trace)
    finally:
        if trace:
            trace.close()
    tp = metrics.throughput(stats)
    per_path = list(stats.per_path.values())
    doc = {
        "scheduler": stats.scheduler,
        "measured_slots": stats.measured_slots,
        "packets_per_slot": float(tp),
        "packets_per_second": float(metrics.per_second(tp, cfg.slot_seconds)),
        "per_path": [[s, p, x] for (s, p), x in sorted(stats.per_path.items())],
        "per_od": [[i, j, x] for (i, j), x in sorted(stats.per_od.items())],
        "fairness_paths": float(metrics.fairness_paths(per_path)) if any(per_path) else None,
        "fairness_od": float(metrics.fairness_od(list(stats.per_od.values()))) if any(per_path) else None,
        "zero_traffic_pairs": metrics.zero_traffic_pairs(stats),
        "injected": stats.injected,
        "dropped": stats.dropped,
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        n=args.n, delta=args.delta, networks=args.networks, od_sets_per_network=args.od_sets,
        theta_points=tuple(args.theta), methods=tuple(Method(m) for m in args.methods),
        k_max=args.k, refinement=args.refinement, sim=_sim_config(args), seed=args.seed,
        workers=args.workers)
    result = run_sweep(cfg)
    if args.csv:
        write_outputs(result, args.csv, args.manifest)
    else:
        sys.stdout.write(result.to_csv())
        write_outputs(result, None, args.manifest)
    if args.zero_histogram:
        hist: dict[int, int] = {}
        for r in result.records:
            hist[r.zero_traffic_pairs] = hist.get(r.zero_traffic_pairs, 0) + 1
        sys.stderr.write("zero-traffic OD pairs histogram: "
                         + json.dumps(dict(sorted(hist.items()))) + "\n")
    return EXIT_PARTIAL if result.failures else EXIT_OK


def cmd_audit(args) -> int:
    problems: list[str] = []
    net = None
    if args.net:
        with open(args.net) as fh:
            try:
                net = Network.from_json(fh.read())
            except NetworkFormatError as exc:
                problems.append(f"network: {exc}")
    if net is not None:
        problems += [f"network: {p}" for p in audit(net)]
    if args.paths:
        for ps in _load_pathsets(args.paths):
            for p in ps.paths:
                if net is not None and not path_is_valid(net, p):
                    problems.append(f"path {p.nodes}: hop is not a link")
    for p in problems:
        print(p)
    if not problems:
        print("ok")
    return EXIT_CONFIG if problems else EXIT_OK


def cmd_fig1(args) -> int:
    _, text = fig1.run()
    sys.stdout.write(text)
    return EXIT_OK


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--slots", type=int, default=67500, help="total slots")
    p.add_argument("--warmup", type=int, default=7500, help="warm-up slots")
    p.add_argument("--queue-cap", type=int, default=50)
    p.add_argument("--slot-seconds", type=float, default=0.002)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meshrefine", description=__doc__.splitlines()[0])
    parser.add_argument("--fig1", action="store_true", help="run the five-path worked example")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb")

    p = sub.add_parser("gen-net", help="generate a random mesh network")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--side", type=float, default=1500.0)
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_gen_net)

    p = sub.add_parser("route", help="compute the path set for one pair")
    p.add_argument("--net", required=True)
    p.add_argument("--origin", type=int, required=True)
    p.add_argument("--dest", type=int, required=True)
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.K_DISJOINT.value)
    p.add_argument("--k", type=int)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("refine", help="refine stored path set(s)")
    p.add_argument("--net", required=True)
    p.add_argument("--paths", required=True)
    p.add_argument("--method", choices=[m.value for m in Method],
                   help="routing method used for enlargement (default: the path set's own)")
    p.add_argument("--dump-graph", action="store_true", help="print the conflict graph to stderr")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("simulate", help="TDMA-simulate stored path sets")
    p.add_argument("--net", required=True)
    p.add_argument("--paths", required=True)
    p.add_argument("--trace", help="write per-slot active link indices here")
    _add_sim_flags(p)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="original-vs-refined sweep")
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--delta", type=int, default=8)
    p.add_argument("--networks", type=int, default=1)
    p.add_argument("--od-sets", type=int, default=100)
    p.add_argument("--theta", type=float, nargs="+", default=[1.0])
    p.add_argument("--methods", nargs="+", choices=[m.value for m in Method],
                   default=[Method.K_DISJOINT.value])
    p.add_argument("--k", type=int, help="override K for the multipath methods")
    p.add_argument("--refinement", choices=["on", "off", "both"], default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", help="CSV output (default stdout)")
    p.add_argument("--manifest", help="JSON run manifest")
    p.add_argument("--zero-histogram", action="store_true",
                   help="report the zero-traffic OD-pair histogram on stderr")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("audit", help="check invariants of stored artifacts")
    p.add_argument("--net")
    p.add_argument("--paths")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("fig1", help="run the five-path worked example")
    p.set_defaults(func=cmd_fig1)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.fig1:
        return cmd_fig1(args)
    if not args.verb:
        parser.print_help()
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ValueError, OSError, GenerationError, KeyError) as exc:
        print(f"meshrefine: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
