"""Experiment orchestration: OD sets, pair-density subsets, original-vs-refined sweeps."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import metrics
from .mra import refine
from .routing import Method, PathSet, RoutingConfig, default_k, route
from .scheduler import SCHEDULER_NAME, SimConfig, TrafficStats, simulate_tdma
from .seeding import stream
from .topology import GenerationConfig, Network, generate_network

log = logging.getLogger(__name__)

MANIFEST_VERSION = 1
CSV_COLUMNS = ("n", "delta", "theta", "method", "refined", "throughput_pps", "sigma",
               "fairness_paths", "fairness_od", "seed_path")
SUBSTITUTIONS = {
    "routing": "deterministic graph proxies: SPA (AODV), K_DISJOINT (AOMDV), "
               "MPR_SPA (OLSR), MPR_K_DISJOINT (MP-OLSR); K is an upper bound for both multipath proxies",
    "scheduler": f"{SCHEDULER_NAME}: greedy longest-queue-first maximal conflict-free TDMA",
    "queues": "first-hop queues capped at queue_cap (drops at injection only); interior queues uncapped",
}


@dataclass(frozen=True)
class ODSet:
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        origins = [i for i, _ in self.pairs]
        if len(set(origins)) != len(origins):
            raise ValueError("an origin appears more than once")
        if any(i == j for i, j in self.pairs):
            raise ValueError("origin equals destination")

    def __len__(self) -> int:
        return len(self.pairs)


def gen_od_sets(net: Network, count: int, seed: int) -> list[ODSet]:
    """``count`` OD sets of n pairs each: every node is an origin exactly once."""
    n = net.n
    if n < 2:
        raise ValueError("OD sets need at least two nodes")
    out = []
    for c in range(count):
        rng = stream(seed, "od", c)
        origins = rng.permutation(n)
        dests = rng.integers(0, n - 1, size=n)
        pairs = tuple((int(i), int(d if d < i else d + 1)) for i, d in zip(origins, dests))
        out.append(ODSet(pairs))
    return out


def subset_size(theta, n: int) -> int:
    theta = Fraction(theta).limit_denominator(10**6)
    if not 0 < theta <= 1:
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    return max(1, math.ceil(theta * n))


def theta_subset(od: ODSet, theta, seed: int) -> ODSet:
    """Seeded subset of ceil(theta * n) pairs; subsets for one seed are nested."""
    m = subset_size(theta, len(od))
    order = stream(seed, "grouping").permutation(len(od))
    keep = sorted(int(x) for x in order[:m])
    return ODSet(tuple(od.pairs[x] for x in keep))


@dataclass(frozen=True)
class SweepConfig:
    n: int = 60
    delta: int = 8
    networks: int = 1
    od_sets_per_network: int = 100
    theta_points: tuple[float, ...] = (1.0,)
    methods: tuple[Method, ...] = (Method.K_DISJOINT,)
    k_max: int | None = None            # None: per-method default for this delta
    refinement: str = "both"            # "on" | "off" | "both"
    sim: SimConfig = field(default_factory=SimConfig)
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        object.__setattr__(self, "theta_points", tuple(float(t) for t in self.theta_points))
        if self.refinement not in ("on", "off", "both"):
            raise ValueError(f"refinement must be on, off or both, got {self.refinement!r}")
        if not self.theta_points or any(not 0 < t <= 1 for t in self.theta_points):
            raise ValueError("theta points must lie in (0, 1]")
        if self.networks < 1 or self.od_sets_per_network < 1:
            raise ValueError("need at least one network and one OD set")

    def routing(self, method: Method) -> RoutingConfig:
        k = self.k_max if self.k_max is not None and method.multipath else default_k(method, self.delta)
        return RoutingConfig(method, k)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["methods"] = [m.value for m in self.methods]
        d["theta_points"] = list(self.theta_points)
        return d


@dataclass(frozen=True)
class RunRecord:
    n: int
    delta: int
    theta: float
    method: str
    refined: bool
    throughput_pps: float
    sigma: float | None
    fairness_paths: float | None
    fairness_od: float | None
    seed_path: str
    packets_per_slot: float = 0.0
    multiplicity: float = 0.0
    zero_traffic_pairs: int = 0

    def csv_row(self) -> list:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return int(v)
            if isinstance(v, float):
                return repr(v)
            return v
        return [fmt(getattr(self, c)) for c in CSV_COLUMNS]


def seed_path(seed: int, net_idx: int, od_idx: int, theta: float) -> str:
    return f"seed={seed}/net={net_idx}/od={od_idx}/theta={theta!r}"


_LINEAGE = re.compile(r"seed=(\d+)/net=(\d+)/od=(\d+)/theta=([0-9.eE+-]+)$")


def network_for(cfg: SweepConfig, net_idx: int) -> Network:
    net_seed = int(stream(cfg.seed, "network", net_idx).integers(2**63))
    return generate_network(GenerationConfig(cfg.n, cfg.delta, seed=net_seed))


def _od_seed(cfg: SweepConfig, net_idx: int) -> int:
    return int(stream(cfg.seed, "od-sets", net_idx).integers(2**63))


def _group_seed(cfg: SweepConfig, net_idx: int, od_idx: int) -> int:
    return int(stream(cfg.seed, "grouping", net_idx, od_idx).integers(2**63))


def _safe(fn, *a) -> float | None:
    try:
        return float(fn(*a))
    except metrics.UndefinedMetric:
        return None


class _RouteCache:
    def __init__(self, net: Network, rc: RoutingConfig) -> None:
        self.net, self.rc, self.cache = net, rc, {}

    def __call__(self, i: int, j: int) -> PathSet:
        key = (i, j)
        if key not in self.cache:
            self.cache[key] = route(self.net, i, j, self.rc)
        return self.cache[key]


def _record(cfg: SweepConfig, theta: float, method: Method, refined: bool, stats: TrafficStats,
            sets: Sequence[PathSet], lineage: str, sig: float | None) -> RunRecord:
    tp = metrics.throughput(stats)
    per_path = [stats.per_path[(s, p)] for s, ps in enumerate(sets) for p in range(len(ps))]
    return RunRecord(
        n=cfg.n, delta=cfg.delta, theta=theta, method=method.value, refined=refined,
        throughput_pps=float(metrics.per_second(tp, cfg.sim.slot_seconds)),
        sigma=sig,
        fairness_paths=_safe(metrics.fairness_paths, per_path),
        fairness_od=_safe(metrics.fairness_od, list(stats.per_od.values())),
        seed_path=lineage,
        packets_per_slot=float(tp),
        multiplicity=sum(len(ps) for ps in sets) / len(sets),
        zero_traffic_pairs=metrics.zero_traffic_pairs(stats),
    )


def run_instance(cfg: SweepConfig, net_idx: int, od_idx: int,
                 thetas: Iterable[float] | None = None,
                 methods: Iterable[Method] | None = None) -> list[RunRecord]:
    """All rows for one (network, OD set), ordered by (theta, method, refined)."""
    net = network_for(cfg, net_idx)
    od = gen_od_sets(net, od_idx + 1, _od_seed(cfg, net_idx))[od_idx]
    gseed = _group_seed(cfg, net_idx, od_idx)
    rows: list[RunRecord] = []
    for theta in (cfg.theta_points if thetas is None else thetas):
        sub = theta_subset(od, theta, gseed)
        lineage = seed_path(cfg.seed, net_idx, od_idx, theta)
        for method in (cfg.methods if methods is None else methods):
            routes = _RouteCache(net, cfg.routing(method))
            original = [routes(i, j) for i, j in sub.pairs]
            base = simulate_tdma(net, original, cfg.sim)
            if cfg.refinement in ("off", "both"):
                rows.append(_record(cfg, theta, method, False, base, original, lineage, None))
            if cfg.refinement == "off":
                continue
            refined = [refine(net, ps, routes) if len(ps) else ps for ps in original]
            stats = simulate_tdma(net, refined, cfg.sim)
            sig = _safe(metrics.sigma, metrics.throughput(stats), metrics.throughput(base))
            rows.append(_record(cfg, theta, method, True, stats, refined, lineage, sig))
    return rows


def _task(args):
    cfg, net_idx, od_idx = args
    try:
        return net_idx, od_idx, run_instance(cfg, net_idx, od_idx), None
    except Exception as exc:  # reported, never fatal to the sweep
        log.exception("instance net=%d od=%d failed", net_idx, od_idx)
        return net_idx, od_idx, [], f"{type(exc).__name__}: {exc}"


@dataclass
class SweepResult:
    records: list[RunRecord]
    failures: list[dict]
    config: SweepConfig

    def manifest(self) -> dict:
        refined = [r.sigma for r in self.records if r.refined and r.sigma is not None]
        return {
            "version": MANIFEST_VERSION,
            "config": self.config.to_dict(),
            "scheduler": SCHEDULER_NAME,
            "substitutions": SUBSTITUTIONS,
            "rows": len(self.records),
            "failures": self.failures,
            "mean_sigma": (sum(refined) / len(refined)) if refined else None,
            "csv_columns": list(CSV_COLUMNS),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow(r.csv_row())
        return buf.getvalue()


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Run every (network, OD set, theta, method) point.

    Rows come back ordered by (network, od_set, theta, method) whatever the
    worker count; failed instances are listed in ``failures``.
    """
    tasks = [(cfg, a, b) for a in range(cfg.networks) for b in range(cfg.od_sets_per_network)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    results.sort(key=lambda r: (r[0], r[1]))
    records: list[RunRecord] = []
    failures: list[dict] = []
    for net_idx, od_idx, rows, err in results:
        records.extend(rows)
        if err is not None:
            failures.append({"network": net_idx, "od_set": od_idx, "error": err})
    return SweepResult(records, failures, cfg)


def replay(cfg: SweepConfig, record: RunRecord) -> RunRecord:
    """Regenerate ``record`` from its seed lineage under ``cfg``."""
    m = _LINEAGE.match(record.seed_path)
    if not m or int(m.group(1)) != cfg.seed:
        raise ValueError(f"seed lineage {record.seed_path!r} does not belong to this config")
    net_idx, od_idx, theta = int(m.group(2)), int(m.group(3)), float(m.group(4))
    for r in run_instance(cfg, net_idx, od_idx, [theta], [Method(record.method)]):
        if r.refined == record.refined:
            return r
    raise LookupError(f"no {'refined' if record.refined else 'original'} row for {record.seed_path}")


def write_outputs(result: SweepResult, csv_path: str | None, manifest_path: str | None) -> None:
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            fh.write(result.to_csv())
    if manifest_path:
        with open(manifest_path, "w") as fh:
            json.dump(result.manifest(), fh, indent=2)
